//! Level-by-level application of the Riemannian analogue `T` of a linear
//! scheme, plus empirical contractivity, displacement and Hölder diagnostics.
//!
//! Every output point `(Tx)_{N i + r}` is the weighted Riemannian center of
//! mass of the window `x_{i + j}` with the weights of row `r`. Open polygons
//! lose the points whose window is not fully supported; closed polygons
//! index cyclically.

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::karcher::{riemannian_average, WeightedConfiguration};
use crate::manifold::{Manifold, ManifoldPoint};
use crate::mask::{rational_to_f64, Mask, Rational};
use crate::parallel;

/// Level-`k` point sequence; point `i` sits at parameter `origin + i / N^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    points: Vec<ManifoldPoint>,
    level: u32,
    closed: bool,
    origin: Rational,
}

impl Polygon {
    pub fn new(points: Vec<ManifoldPoint>, closed: bool) -> Result<Self> {
        Self::with_level(points, closed, 0, Rational::zero())
    }

    pub fn with_level(
        points: Vec<ManifoldPoint>,
        closed: bool,
        level: u32,
        origin: Rational,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::PolygonTooShort {
                len: points.len(),
                needed: 2,
            });
        }
        let m = points[0].manifold();
        if let Some(p) = points.iter().find(|p| p.manifold() != m) {
            return Err(Error::ManifoldMismatch {
                left: m.to_string(),
                right: p.manifold().to_string(),
            });
        }
        Ok(Polygon {
            points,
            level,
            closed,
            origin,
        })
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn parameter_origin(&self) -> &Rational {
        &self.origin
    }

    pub fn manifold(&self) -> Manifold {
        self.points[0].manifold()
    }

    /// Consecutive distances; closed polygons include the closing edge.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.points.len();
        let edges = if self.closed { n } else { n - 1 };
        (0..edges)
            .map(|i| {
                let (a, b) = (&self.points[i], &self.points[(i + 1) % n]);
                a.manifold().dist(a.coords(), b.coords())
            })
            .collect()
    }

    pub fn max_edge(&self) -> f64 {
        self.edge_lengths().into_iter().fold(0.0, f64::max)
    }

    /// Index of the first point in the bi-infinite level-`k` numbering.
    fn first_index(&self, dilation: u32) -> i64 {
        let scale = Rational::from_integer(BigInt::from(dilation).pow(self.level));
        let g = &self.origin * scale;
        debug_assert!(g.is_integer());
        g.to_integer().to_i64().expect("index fits in i64")
    }

    /// `(lo, hi)` parameter range of the broken geodesic.
    pub fn parameter_range(&self, dilation: u32) -> (f64, f64) {
        let h = spacing(dilation, self.level);
        let lo = rational_to_f64(&self.origin);
        let edges = if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        };
        (lo, lo + edges as f64 * h)
    }
}

fn spacing(dilation: u32, level: u32) -> f64 {
    f64::from(dilation).powi(-(level as i32))
}

fn rational_pow(base: u32, exp: u32) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(exp))
}

struct PreparedRow {
    start: i64,
    weights: Vec<f64>,
    delta: bool,
}

fn prepare_rows(mask: &Mask) -> Result<Vec<PreparedRow>> {
    Ok(mask
        .rows()?
        .into_iter()
        .map(|row| PreparedRow {
            start: row.start,
            delta: row.is_delta(),
            weights: row.weights.iter().map(rational_to_f64).collect(),
        })
        .collect())
}

/// Output indices `p` (relative to input index 0) whose window lies inside
/// `0..n`, as the longest contiguous run.
fn open_output_range(rows: &[PreparedRow], n: usize, dilation: i64) -> Option<(i64, i64)> {
    let bounds: Vec<(i64, i64)> = rows
        .iter()
        .map(|r| {
            let last = r.start + r.weights.len() as i64 - 1;
            (-r.start, n as i64 - 1 - last)
        })
        .collect();
    let valid = |p: i64| {
        let (i, r) = (p.div_euclid(dilation), p.rem_euclid(dilation) as usize);
        i >= bounds[r].0 && i <= bounds[r].1
    };
    let lo = bounds.iter().map(|b| b.0).min()? * dilation;
    let hi = bounds.iter().map(|b| b.1).max()? * dilation + dilation - 1;
    let mut best: Option<(i64, i64)> = None;
    let mut run: Option<i64> = None;
    for p in lo..=hi + 1 {
        if p <= hi && valid(p) {
            run.get_or_insert(p);
        } else if let Some(s) = run.take() {
            if best.is_none_or(|(a, b)| p - 1 - s > b - a) {
                best = Some((s, p - 1));
            }
        }
    }
    best
}

/// One step of the Riemannian analogue.
pub fn refine_once(mask: &Mask, polygon: &Polygon, tolerance: f64) -> Result<Polygon> {
    let rows = prepare_rows(mask)?;
    let n = polygon.len();
    let dil = mask.dilation() as i64;
    let max_window = rows.iter().map(|r| r.weights.len()).max().unwrap_or(1);
    let too_short = || Error::PolygonTooShort {
        len: n,
        needed: max_window,
    };

    let (p_lo, p_hi) = if polygon.closed {
        (0, dil * n as i64 - 1)
    } else {
        open_output_range(&rows, n, dil).ok_or_else(too_short)?
    };
    if p_hi - p_lo + 1 < 2 {
        return Err(too_short());
    }

    let outputs: Vec<i64> = (p_lo..=p_hi).collect();
    let points = polygon.points();
    let results = parallel::map_collect(&outputs, |&p| -> Result<ManifoldPoint> {
        let (i, r) = (p.div_euclid(dil), p.rem_euclid(dil) as usize);
        let row = &rows[r];
        let index = |j: usize| {
            let idx = i + row.start + j as i64;
            if polygon.closed {
                idx.rem_euclid(n as i64) as usize
            } else {
                idx as usize
            }
        };
        if row.delta {
            return Ok(points[index(0)].clone());
        }
        let mut window = Vec::with_capacity(row.weights.len());
        let mut weights = Vec::with_capacity(row.weights.len());
        for (j, &w) in row.weights.iter().enumerate() {
            if w != 0.0 {
                window.push(points[index(j)].clone());
                weights.push(w);
            }
        }
        let config = WeightedConfiguration::from_parts(window, weights);
        riemannian_average(&config, tolerance)?.into_certified()
    });
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;

    let level = polygon.level + 1;
    let origin = if polygon.closed {
        polygon.origin.clone()
    } else {
        &polygon.origin + Rational::from_integer(BigInt::from(p_lo)) / rational_pow(mask.dilation(), level)
    };
    Polygon::with_level(points, polygon.closed, level, origin)
}

/// Levels `0..=k` of a refinement run together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementTrace {
    pub mask: Mask,
    pub tolerance: f64,
    pub levels: Vec<Polygon>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Largest edge of the input polygon.
    pub rho: f64,
    /// `max_edge(level k) / max_edge(level k - 1)` for `k = 1..`.
    pub empirical_gammas: Vec<f64>,
    /// `max_i dist((T^{k+1} x)_{N i}, (T^k x)_i) / (gamma^k rho)` for `k = 0..`.
    pub displacement_constants: Vec<f64>,
    /// `max_i dist((T^{k+1} x)_{N i}, (T^k x)_i) / max_edge(level k)` for `k = 0..`.
    pub displacement_ratios: Vec<f64>,
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Largest displacement between coarse point `i` and its fine successor `N i`.
fn max_displacement(coarse: &Polygon, fine: &Polygon, dilation: u32) -> f64 {
    let dil = dilation as i64;
    let n_fine = fine.len() as i64;
    let g_coarse = coarse.first_index(dilation);
    let g_fine = fine.first_index(dilation);
    let mut worst: f64 = 0.0;
    for (i, p) in coarse.points.iter().enumerate() {
        let target = dil * (g_coarse + i as i64) - g_fine;
        let local = if fine.closed {
            target.rem_euclid(n_fine)
        } else if (0..n_fine).contains(&target) {
            target
        } else {
            continue;
        };
        let q = &fine.points[local as usize];
        worst = worst.max(p.manifold().dist(p.coords(), q.coords()));
    }
    worst
}

impl Diagnostics {
    pub fn compute(levels: &[Polygon], dilation: u32, gamma: f64) -> Self {
        let edges: Vec<f64> = levels.iter().map(Polygon::max_edge).collect();
        let rho = edges.first().copied().unwrap_or(0.0);
        let empirical_gammas = edges.windows(2).map(|w| ratio_or_zero(w[1], w[0])).collect();
        let mut displacement_constants = Vec::new();
        let mut displacement_ratios = Vec::new();
        for (k, pair) in levels.windows(2).enumerate() {
            let disp = max_displacement(&pair[0], &pair[1], dilation);
            displacement_constants.push(ratio_or_zero(disp, gamma.powi(k as i32) * rho));
            displacement_ratios.push(ratio_or_zero(disp, edges[k]));
        }
        Diagnostics {
            rho,
            empirical_gammas,
            displacement_constants,
            displacement_ratios,
        }
    }
}

impl RefinementTrace {
    /// Assembles a trace from existing levels and recomputes diagnostics.
    pub fn from_levels(mask: Mask, tolerance: f64, levels: Vec<Polygon>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::TooFewLevels { have: 0, need: 1 });
        }
        let gamma = rational_to_f64(&mask.contractivity_factor()?);
        let diagnostics = Diagnostics::compute(&levels, mask.dilation(), gamma);
        Ok(RefinementTrace {
            mask,
            tolerance,
            levels,
            diagnostics,
        })
    }

    pub fn dilation(&self) -> u32 {
        self.mask.dilation()
    }

    pub fn gamma(&self) -> Result<Rational> {
        self.mask.contractivity_factor()
    }

    pub fn finest(&self) -> &Polygon {
        self.levels.last().expect("trace has at least one level")
    }

    /// Copy keeping only levels `0..count`.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        let count = count.clamp(1, self.levels.len());
        Self::from_levels(self.mask.clone(), self.tolerance, self.levels[..count].to_vec())
    }
}

/// Runs `k` refinement steps.
pub fn refine(mask: &Mask, polygon: &Polygon, k: u32, tolerance: f64) -> Result<RefinementTrace> {
    let mut levels = vec![polygon.clone()];
    for _ in 0..k {
        let next = refine_once(mask, levels.last().expect("nonempty"), tolerance)?;
        levels.push(next);
    }
    RefinementTrace::from_levels(mask.clone(), tolerance, levels)
}

/// Evaluates the broken geodesic through the polygon's points.
pub fn broken_geodesic_eval(polygon: &Polygon, dilation: u32, t: f64) -> Result<ManifoldPoint> {
    let (lo, hi) = polygon.parameter_range(dilation);
    if !(t >= lo && t <= hi) {
        return Err(Error::ParameterOutOfRange { t, lo, hi });
    }
    let n = polygon.len();
    let s = (t - lo) / spacing(dilation, polygon.level);
    let edges = if polygon.closed { n } else { n - 1 };
    let i = (s.floor() as usize).min(edges);
    let frac = s - i as f64;
    if i == edges {
        return Ok(polygon.points[i % n].clone());
    }
    let (a, b) = (&polygon.points[i], &polygon.points[(i + 1) % n]);
    a.geodesic_point(b, frac)
}

/// `sup_t dist(c_a(t), c_b(t))` over `samples` evenly spaced parameters in the
/// common range of two broken geodesics.
pub fn curve_distance(a: &Polygon, b: &Polygon, dilation: u32, samples: usize) -> Result<f64> {
    let (a_lo, a_hi) = a.parameter_range(dilation);
    let (b_lo, b_hi) = b.parameter_range(dilation);
    let (lo, hi) = (a_lo.max(b_lo), a_hi.min(b_hi));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let samples = samples.max(2);
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let t = lo + (hi - lo) * s as f64 / (samples - 1) as f64;
        let pa = broken_geodesic_eval(a, dilation, t)?;
        let pb = broken_geodesic_eval(b, dilation, t)?;
        worst = worst.max(pa.dist(&pb)?);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityFailure {
    pub level: usize,
    pub index: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractivityReport {
    pub gamma: f64,
    pub passed: bool,
    /// `min (bound - value)` over all checked edges; `None` when nothing was checked.
    pub worst_margin: Option<f64>,
    pub failures: Vec<InequalityFailure>,
}

/// Checks `dist(T^k x_{i+1}, T^k x_i) <= gamma^k rho + 2 k tol` on every level.
pub fn check_contractivity(trace: &RefinementTrace, gamma: &Rational) -> ContractivityReport {
    let g = rational_to_f64(gamma);
    let rho = trace.diagnostics.rho;
    let mut worst_margin: Option<f64> = None;
    let mut failures = Vec::new();
    for (k, level) in trace.levels.iter().enumerate().skip(1) {
        let bound = g.powi(k as i32) * rho + 2.0 * k as f64 * trace.tolerance;
        for (i, d) in level.edge_lengths().into_iter().enumerate() {
            let margin = bound - d;
            worst_margin = Some(worst_margin.map_or(margin, |w| w.min(margin)));
            if !(margin >= 0.0) {
                failures.push(InequalityFailure {
                    level: k,
                    index: i,
                    value: d,
                    bound,
                });
            }
        }
    }
    ContractivityReport {
        gamma: g,
        passed: failures.is_empty(),
        worst_margin,
        failures,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementReport {
    /// Smallest `C` with `dist(T^{k+1} x_{N i}, T^k x_i) <= C gamma^k rho` on all levels.
    pub c_empirical: f64,
    pub per_level: Vec<f64>,
    pub passed: bool,
}

pub fn check_displacement_safety(trace: &RefinementTrace) -> DisplacementReport {
    let per_level = trace.diagnostics.displacement_constants.clone();
    let c_empirical = per_level.iter().copied().fold(0.0, f64::max);
    DisplacementReport {
        passed: per_level.iter().all(|c| c.is_finite()),
        c_empirical,
        per_level,
    }
}

/// Least-squares decay rate of the largest edge over levels `1..`, as a
/// Hölder exponent `-slope / log N`. Returns `+inf` for degenerate data.
pub fn estimate_holder(trace: &RefinementTrace) -> Result<f64> {
    if trace.levels.len() < 3 {
        return Err(Error::TooFewLevels {
            have: trace.levels.len(),
            need: 3,
        });
    }
    let samples: Vec<(f64, f64)> = trace
        .levels
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, p)| (k as f64, p.max_edge()))
        .collect();
    if samples.iter().any(|&(_, e)| !(e > 0.0)) {
        return Ok(f64::INFINITY);
    }
    let n = samples.len() as f64;
    let mean_k = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(k, e) in &samples {
        sxy += (k - mean_k) * (e.ln() - mean_y);
        sxx += (k - mean_k).powi(2);
    }
    let slope = sxy / sxx;
    Ok(-slope / f64::from(trace.dilation()).ln())
}

/// Hölder constant `D = 2 ((C rho + rho + gamma rho) / (1 - gamma) + rho)` with
/// the empirical `C`; only meaningful for `gamma < 1`.
pub fn empirical_holder_constant(trace: &RefinementTrace) -> Result<Option<f64>> {
    let gamma = rational_to_f64(&trace.gamma()?);
    if gamma >= 1.0 {
        return Ok(None);
    }
    let rho = trace.diagnostics.rho;
    let c = check_displacement_safety(trace).c_empirical;
    let n = f64::from(trace.dilation());
    let d = if trace.dilation() == 2 {
        2.0 * ((c * rho + rho + gamma * rho) / (1.0 - gamma) + rho)
    } else {
        2.0 * (c * rho + rho + (n - 1.0) * gamma * rho) / (1.0 - gamma) + n * rho
    };
    Ok(Some(d))
}

/// Whether the rows used at even outputs copy their input (`(Tx)_{N i} = x_i`).
pub fn is_interpolatory(mask: &Mask) -> bool {
    let n = mask.dilation() as i64;
    let (lo, hi) = mask.support();
    mask.coeff(0).is_one() && (lo..=hi).filter(|l| l.rem_euclid(n) == 0 && *l != 0).all(|l| mask.coeff(l).is_zero())
}

/// For interpolatory schemes: every point of `coarse` reappears bit-identically
/// at the matching index of `fine`.
pub fn preserves_coarse_points(coarse: &Polygon, fine: &Polygon, dilation: u32) -> bool {
    let dil = dilation as i64;
    let g_coarse = coarse.first_index(dilation);
    let g_fine = fine.first_index(dilation);
    let n_fine = fine.len() as i64;
    coarse.points.iter().enumerate().all(|(i, p)| {
        let target = dil * (g_coarse + i as i64) - g_fine;
        let local = if fine.closed {
            target.rem_euclid(n_fine)
        } else if (0..n_fine).contains(&target) {
            target
        } else {
            return true;
        };
        fine.points[local as usize].coords() == p.coords()
    })
}
