//! Exact rational algebra of stationary subdivision masks.
//!
//! A mask `a_l` with dilation `N` defines the linear rule
//! `(Sx)_i = sum_j a_{i - N j} x_j`. Everything here is closed over
//! arbitrary-precision rationals; floating point only appears when a
//! Hölder exponent is reported.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default number of mask iterates examined by [`Mask::analyze`].
pub const DEFAULT_M_MAX: u32 = 4;

/// Parses `"p/q"` or `"p"` into an exact rational. Decimal points are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(Error::Parse(format!("expected an exact rational p/q, got {s:?}")));
    }
    let r = BigRational::from_str(t).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(r)
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A finitely supported mask with dilation factor `N >= 2`.
///
/// Coefficients are stored from `offset` upwards; leading and trailing zeros
/// are trimmed on construction so the support is normalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    dilation: u32,
    offset: i64,
    coeffs: Vec<Rational>,
}

/// Weights of one residue class: `(Sx)_{N i + r} = sum_j w_j x_{i + j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightRow {
    pub residue: u32,
    /// First `j` of the window.
    pub start: i64,
    /// `w_j` for `j = start, start + 1, ...`; endpoints are nonzero.
    pub weights: Vec<Rational>,
}

impl WeightRow {
    pub fn window(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.weights.len() as i64
    }

    pub fn weight(&self, j: i64) -> Rational {
        let k = j - self.start;
        if k < 0 || k >= self.weights.len() as i64 {
            Rational::zero()
        } else {
            self.weights[k as usize].clone()
        }
    }

    /// The row is a single unit weight, i.e. it copies one input point.
    pub fn is_delta(&self) -> bool {
        self.weights.len() == 1 && self.weights[0].is_one()
    }
}

/// Weights of two consecutive outputs `(Sx)_{N i + r}` and `(Sx)_{N i + r + 1}`
/// expressed on the same window `x_{i + j}`. For `r = N - 1` the second output
/// belongs to the next block, which shows up as a shift of row 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowPair {
    pub residue: u32,
    pub start: i64,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl RowPair {
    /// `sum_j |sum_{i <= j} (alpha_i - beta_i)|`, the distance factor bounding
    /// how far apart the two averages can be relative to the largest edge.
    pub fn distance_factor(&self) -> Rational {
        let mut partial = Rational::zero();
        let mut total = Rational::zero();
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            partial += a - b;
            total += partial.abs();
        }
        total
    }
}

impl Mask {
    pub fn new(dilation: u32, offset: i64, coeffs: Vec<Rational>) -> Result<Self> {
        if dilation < 2 {
            return Err(Error::InvalidMask(format!("dilation must be >= 2, got {dilation}")));
        }
        let first = coeffs.iter().position(|c| !c.is_zero());
        let last = coeffs.iter().rposition(|c| !c.is_zero());
        match (first, last) {
            (Some(f), Some(l)) => Ok(Mask {
                dilation,
                offset: offset + f as i64,
                coeffs: coeffs[f..=l].to_vec(),
            }),
            _ => Err(Error::InvalidMask("mask has no nonzero coefficient".into())),
        }
    }

    /// Builds a mask from its rows: `rows[r] = (start, weights)` means
    /// `a_{r - N j} = weights[j - start]`.
    pub fn from_rows(dilation: u32, rows: &[(i64, Vec<Rational>)]) -> Result<Self> {
        if rows.len() != dilation as usize {
            return Err(Error::InvalidMask(format!(
                "expected {dilation} rows, got {}",
                rows.len()
            )));
        }
        let n = dilation as i64;
        let mut entries = Vec::new();
        for (r, (start, weights)) in rows.iter().enumerate() {
            for (k, w) in weights.iter().enumerate() {
                let j = start + k as i64;
                entries.push((r as i64 - n * j, w.clone()));
            }
        }
        Self::from_entries(dilation, entries)
    }

    fn from_entries(dilation: u32, entries: Vec<(i64, Rational)>) -> Result<Self> {
        let lo = entries.iter().map(|e| e.0).min();
        let hi = entries.iter().map(|e| e.0).max();
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::InvalidMask("empty mask".into())),
        };
        let mut coeffs = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (l, c) in entries {
            coeffs[(l - lo) as usize] += c;
        }
        Self::new(dilation, lo, coeffs)
    }

    /// Chaikin corner cutting, `(a_{-2}, .., a_1) = (1/4, 3/4, 3/4, 1/4)`.
    pub fn chaikin() -> Self {
        Self::new(2, -2, vec![ratio(1, 4), ratio(3, 4), ratio(3, 4), ratio(1, 4)])
            .expect("valid")
    }

    /// Interpolatory four-point rule with tension `omega`.
    pub fn four_point(omega: &Rational) -> Self {
        let half = ratio(1, 2);
        let row0 = (0, vec![Rational::one()]);
        let row1 = (
            -1,
            vec![-omega.clone(), &half + omega, &half + omega, -omega.clone()],
        );
        Self::from_rows(2, &[row0, row1]).expect("valid")
    }

    /// Average of the four-point rule at `omega = 1/16` and Chaikin's rule;
    /// a non-interpolatory scheme with negative coefficients.
    pub fn chaikin_four_point_blend() -> Self {
        let c = |n| ratio(n, 32);
        let row0 = (-1, vec![c(-1), c(21), c(13), c(-1)]);
        let row1 = (-1, vec![c(-1), c(13), c(21), c(-1)]);
        Self::from_rows(2, &[row0, row1]).expect("valid")
    }

    /// Resolves a built-in scheme name: `chaikin`, `fourpoint:<p/q>`, `blend-example1`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "chaikin" => Ok(Self::chaikin()),
            "blend-example1" => Ok(Self::chaikin_four_point_blend()),
            _ => match name.strip_prefix("fourpoint:") {
                Some(w) => Ok(Self::four_point(&parse_rational(w)?)),
                None => Err(Error::Parse(format!("unknown scheme {name:?}"))),
            },
        }
    }

    pub fn dilation(&self) -> u32 {
        self.dilation
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Inclusive support `(lo, hi)`.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, l: i64) -> Rational {
        let k = l - self.offset;
        if k < 0 || k >= self.coeffs.len() as i64 {
            Rational::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    /// Coefficient sum of every residue class `r in 0..N`.
    pub fn residue_sums(&self) -> Vec<Rational> {
        let n = self.dilation as i64;
        let mut sums = vec![Rational::zero(); self.dilation as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            let l = self.offset + k as i64;
            sums[l.rem_euclid(n) as usize] += c;
        }
        sums
    }

    pub fn check_affine_invariance(&self) -> bool {
        self.residue_sums().iter().all(|s| s.is_one())
    }

    fn require_affine_invariance(&self) -> Result<()> {
        match self.residue_sums().iter().position(|s| !s.is_one()) {
            None => Ok(()),
            Some(r) => Err(Error::NotAffineInvariant {
                residue: r as u32,
                sum: format_rational(&self.residue_sums()[r]),
            }),
        }
    }

    /// Range of `j` for which `a_{r - N j}` can be nonzero.
    fn row_range(&self, r: i64) -> (i64, i64) {
        let n = self.dilation as i64;
        let (lo, hi) = self.support();
        // r - N j in [lo, hi]  <=>  j in [ceil((r - hi) / N), floor((r - lo) / N)]
        let j_lo = (r - hi).div_euclid(n) + i64::from((r - hi).rem_euclid(n) != 0);
        let j_hi = (r - lo).div_euclid(n);
        (j_lo, j_hi)
    }

    fn row_unchecked(&self, r: u32) -> WeightRow {
        let n = self.dilation as i64;
        let r_i = r as i64;
        let (j_lo, j_hi) = self.row_range(r_i);
        let all: Vec<Rational> = (j_lo..=j_hi).map(|j| self.coeff(r_i - n * j)).collect();
        let first = all.iter().position(|w| !w.is_zero()).unwrap_or(0);
        let last = all.iter().rposition(|w| !w.is_zero()).unwrap_or(0);
        WeightRow {
            residue: r,
            start: j_lo + first as i64,
            weights: all[first..=last].to_vec(),
        }
    }

    /// The `N` rows of the rule. Rejects masks that are not affine invariant.
    pub fn rows(&self) -> Result<Vec<WeightRow>> {
        self.require_affine_invariance()?;
        Ok((0..self.dilation).map(|r| self.row_unchecked(r)).collect())
    }

    /// Consecutive-output row pairs `(a_{r - N j}, a_{r + 1 - N j})` for `r in 0..N`.
    pub fn row_pairs(&self) -> Result<Vec<RowPair>> {
        self.require_affine_invariance()?;
        let n = self.dilation as i64;
        let pairs = (0..self.dilation)
            .map(|r| {
                let r_i = r as i64;
                let (a_lo, a_hi) = self.row_range(r_i);
                let (b_lo, b_hi) = self.row_range(r_i + 1);
                let (lo, hi) = (a_lo.min(b_lo), a_hi.max(b_hi));
                RowPair {
                    residue: r,
                    start: lo,
                    alpha: (lo..=hi).map(|j| self.coeff(r_i - n * j)).collect(),
                    beta: (lo..=hi).map(|j| self.coeff(r_i + 1 - n * j)).collect(),
                }
            })
            .collect();
        Ok(pairs)
    }

    /// Mask `a*` of the derived scheme, defined by `S* Delta = N Delta S`.
    ///
    /// Uses `a*_l = N sum_{k >= 0} (a_{l + N k} - a_{l + 1 + N k})`; below the
    /// support the sum covers whole residue classes and vanishes.
    pub fn derived(&self) -> Result<Mask> {
        self.require_affine_invariance()?;
        let n = self.dilation as i64;
        let (lo, hi) = self.support();
        let scale = Rational::from_integer(BigInt::from(n));
        let entries = (lo - n - 1..=hi)
            .map(|l| {
                let mut acc = Rational::zero();
                let mut idx = l;
                while idx <= hi {
                    acc += self.coeff(idx) - self.coeff(idx + 1);
                    idx += n;
                }
                (l, &acc * &scale)
            })
            .collect();
        Self::from_entries(self.dilation, entries)
    }

    /// Mask of `S^m`, which has dilation `N^m`.
    pub fn iterate(&self, m: u32) -> Result<Mask> {
        if m == 0 {
            return Err(Error::InvalidMask("iterate count must be >= 1".into()));
        }
        let n = self.dilation as i64;
        let mut current = self.clone();
        for _ in 1..m {
            // S^{k+1} = S o S^k:  d_l = sum_j c_j a_{l - N j}
            let mut entries = Vec::with_capacity(current.coeffs.len() * self.coeffs.len());
            for (jc, c) in current.coeffs.iter().enumerate() {
                let j = current.offset + jc as i64;
                for (ka, a) in self.coeffs.iter().enumerate() {
                    let k = self.offset + ka as i64;
                    entries.push((k + n * j, c * a));
                }
            }
            let dilation = current
                .dilation
                .checked_mul(self.dilation)
                .ok_or_else(|| Error::InvalidMask("iterated dilation overflows u32".into()))?;
            current = Self::from_entries(dilation, entries)?;
        }
        Ok(current)
    }

    /// `max_r sum_j |a_{r - N j}|`.
    pub fn scheme_norm(&self) -> Rational {
        let n = self.dilation as i64;
        let mut sums = vec![Rational::zero(); self.dilation as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            let l = self.offset + k as i64;
            sums[l.rem_euclid(n) as usize] += c.abs();
        }
        sums.into_iter().max().expect("dilation >= 2")
    }

    /// Contractivity factor from the partial sums `gamma^{(r)}_j = sum_{i <= j} a_{r - N i}`:
    /// `max_r sum_j |gamma^{(r+1)}_j - gamma^{(r)}_j|`.
    pub fn contractivity_factor(&self) -> Result<Rational> {
        Ok(self
            .row_pairs()?
            .iter()
            .map(RowPair::distance_factor)
            .max()
            .expect("dilation >= 2"))
    }

    /// Runs the derived-scheme test for `m = 1..=m_max`.
    pub fn analyze(&self, m_max: u32) -> Result<MaskAnalysis> {
        if m_max == 0 {
            return Err(Error::InvalidMask("m_max must be >= 1".into()));
        }
        self.require_affine_invariance()?;
        let mut derived_masks = Vec::new();
        let mut norm_values = Vec::new();
        let mut gammas = Vec::new();
        let mut witness = None;
        for m in 1..=m_max {
            let it = self.iterate(m)?;
            let derived = it.derived()?;
            let norm = derived.scheme_norm();
            let gamma = &norm / Rational::from_integer(BigInt::from(it.dilation));
            if witness.is_none() && gamma < Rational::one() {
                witness = Some(m);
            }
            derived_masks.push(derived);
            norm_values.push(norm);
            gammas.push(gamma);
        }
        let holder_exponent = witness.map(|m| {
            holder_exponent(&gammas[m as usize - 1], m, self.dilation)
        });
        Ok(MaskAnalysis {
            dilation: self.dilation,
            derived_masks,
            norm_values,
            gammas,
            witness,
            holder_exponent,
        })
    }
}

/// `-log(gamma) / (m log N)`, equivalently `1 - log ||S^{m*}|| / (m log N)`.
pub fn holder_exponent(gamma: &Rational, m: u32, dilation: u32) -> f64 {
    let g = rational_to_f64(gamma);
    -g.ln() / (f64::from(m) * f64::from(dilation).ln())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "N={} a[{}..]=({})", self.dilation, self.offset, coeffs.join(", "))
    }
}

/// JSON form of a mask: `{"dilation": 2, "offset": -2, "coeffs": ["1/4", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaskDoc {
    pub dilation: u32,
    pub offset: i64,
    pub coeffs: Vec<String>,
}

impl From<&Mask> for MaskDoc {
    fn from(m: &Mask) -> Self {
        MaskDoc {
            dilation: m.dilation,
            offset: m.offset,
            coeffs: m.coeffs.iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<MaskDoc> for Mask {
    type Error = Error;

    fn try_from(doc: MaskDoc) -> Result<Mask> {
        let coeffs = doc
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Mask::new(doc.dilation, doc.offset, coeffs)
    }
}

impl Serialize for Mask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MaskDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MaskDoc::deserialize(d)?;
        Mask::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Result of the derived-scheme convergence test.
#[derive(Clone, Debug)]
pub struct MaskAnalysis {
    pub dilation: u32,
    /// Derived masks of `S^m` for `m = 1..=m_max`.
    pub derived_masks: Vec<Mask>,
    /// `||S^{m*}||`.
    pub norm_values: Vec<Rational>,
    /// `||S^{m*}|| / N^m`.
    pub gammas: Vec<Rational>,
    /// First `m` with `gamma_m < 1`.
    pub witness: Option<u32>,
    pub holder_exponent: Option<f64>,
}

impl MaskAnalysis {
    /// `false` means undecided up to `m_max`, never divergence.
    pub fn converges(&self) -> bool {
        self.witness.is_some()
    }

    pub fn witness_gamma(&self) -> Option<&Rational> {
        self.witness.map(|m| &self.gammas[m as usize - 1])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.gammas.len())
            .map(|k| {
                serde_json::json!({
                    "m": k + 1,
                    "derived_mask": MaskDoc::from(&self.derived_masks[k]),
                    "norm": format_rational(&self.norm_values[k]),
                    "gamma": format_rational(&self.gammas[k]),
                    "gamma_decimal": rational_to_f64(&self.gammas[k]),
                    "contractive": self.gammas[k] < Rational::one(),
                })
            })
            .collect();
        serde_json::json!({
            "dilation": self.dilation,
            "iterates": rows,
            "converges": self.converges(),
            "witness": self.witness,
            "holder_exponent": self.holder_exponent,
        })
    }
}
