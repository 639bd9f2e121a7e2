mod common;

use common::{apply_rational, builtin_masks, random_rational, rng};
use geosubdiv::mask::{holder_exponent, parse_rational, ratio};
use geosubdiv::{Mask, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn diff(xs: &[Rational]) -> Vec<Rational> {
    xs.windows(2).map(|w| &w[1] - &w[0]).collect()
}

/// Checks `S* (dx) = N d(Sx)` on the indices both sides define.
fn derived_identity_holds(mask: &Mask, xs: &[Rational]) -> bool {
    let n = Rational::from_integer(mask.dilation().into());
    let (p0, sx) = apply_rational(mask, xs);
    let lhs_full = diff(&sx);
    let (q0, rhs) = apply_rational(&mask.derived().unwrap(), &diff(xs));
    if lhs_full.is_empty() || rhs.is_empty() {
        return false;
    }
    let lo = p0.max(q0);
    let hi = (p0 + lhs_full.len() as i64).min(q0 + rhs.len() as i64);
    if hi <= lo {
        return false;
    }
    (lo..hi).all(|p| &n * &lhs_full[(p - p0) as usize] == rhs[(p - q0) as usize])
}

/// Random affine invariant mask with dilation 2 or 3.
fn random_mask(seed: u64) -> Mask {
    use rand::Rng;
    let mut r = rng(seed);
    let dil: u32 = r.gen_range(2..=3);
    let rows: Vec<(i64, Vec<Rational>)> = (0..dil)
        .map(|_| {
            let len = r.gen_range(1..=4);
            let mut w: Vec<Rational> = (0..len - 1).map(|_| random_rational(&mut r)).collect();
            let s: Rational = w.iter().fold(Rational::zero(), |a, b| a + b);
            w.push(Rational::one() - s);
            (r.gen_range(-2..=0), w)
        })
        .collect();
    Mask::from_rows(dil, &rows).unwrap()
}

#[test]
fn builtin_masks_are_affine_invariant() {
    for (name, m) in builtin_masks() {
        assert!(m.check_affine_invariance(), "{name}");
        assert!(m.residue_sums().iter().all(One::is_one), "{name}");
    }
}

#[test]
fn four_point_derived_mask_closed_form() {
    for (p, q) in [(-1, 5), (-1, 8), (0, 1), (1, 16), (1, 5), (3, 13)] {
        let w = ratio(p, q);
        let d = Mask::four_point(&w).derived().unwrap();
        let two_w = &w * ratio(2, 1);
        let want = [-two_w.clone(), two_w.clone(), Rational::one(), Rational::one(), two_w.clone(), -two_w];
        for (k, c) in want.iter().enumerate() {
            assert_eq!(&d.coeff(k as i64 - 2), c, "omega={w} l={}", k as i64 - 2);
        }
        assert!(d.coeff(-3).is_zero() && d.coeff(4).is_zero());
    }
}

#[test]
fn derived_identity_on_builtin_masks() {
    let mut r = rng(11);
    for (name, m) in builtin_masks() {
        for _ in 0..25 {
            let xs: Vec<Rational> = (0..9).map(|_| random_rational(&mut r)).collect();
            assert!(derived_identity_holds(&m, &xs), "{name}");
        }
    }
}

#[test]
fn iterate_equals_repeated_application() {
    let mut r = rng(12);
    for (name, m) in builtin_masks().into_iter().take(3) {
        let sq = m.iterate(2).unwrap();
        for _ in 0..10 {
            let xs: Vec<Rational> = (0..10).map(|_| random_rational(&mut r)).collect();
            let (p1, once) = apply_rational(&m, &xs);
            let (p2, twice) = apply_rational(&m, &once);
            let (q, direct) = apply_rational(&sq, &xs);
            let n = m.dilation() as i64;
            let start = n * p1 + p2;
            for (i, v) in direct.iter().enumerate() {
                let idx = q + i as i64 - start;
                if idx >= 0 && (idx as usize) < twice.len() {
                    assert_eq!(v, &twice[idx as usize], "{name}");
                }
            }
            assert!(direct.len() >= twice.len().saturating_sub(2 * n as usize), "{name}");
        }
    }
}

#[test]
fn gamma_matches_four_point_formula() {
    for (p, q) in [(-7, 32), (-3, 16), (-1, 8), (-1, 16), (0, 1), (1, 32), (1, 16), (1, 8), (7, 32)] {
        let w = ratio(p, q);
        let a = Mask::four_point(&w).analyze(1).unwrap();
        assert_eq!(a.gammas[0], ratio(2, 1) * w.abs() + ratio(1, 2), "omega={w}");
    }
}

#[test]
fn quarter_tension_needs_second_iterate() {
    let a = Mask::four_point(&ratio(1, 4)).analyze(4).unwrap();
    assert!(a.gammas[0].is_one());
    assert!(a.gammas.len() >= 2);
}

#[test]
fn holder_reference_values() {
    let cases = [
        (Mask::chaikin_four_point_blend(), 0.1926),
        (Mask::four_point(&ratio(1, 16)), 0.6781),
        (Mask::four_point(&ratio(1, 16)).iterate(2).unwrap(), 0.8039),
    ];
    for (m, want) in cases {
        let got = m.analyze(4).unwrap().holder_exponent.unwrap();
        assert!((got - want).abs() <= 5e-4, "got {got}, want {want}");
    }
    assert!((holder_exponent(&ratio(1, 2), 1, 2) - 1.0).abs() < 1e-15);
}

#[test]
fn named_masks_and_rational_parsing() {
    assert_eq!(Mask::named("fourpoint:1/16").unwrap(), Mask::four_point(&ratio(1, 16)));
    assert!(Mask::named("fourpoint:0.0625").is_err());
    assert!(Mask::named("nope").is_err());
    assert_eq!(parse_rational("-6/8").unwrap(), ratio(-3, 4));
}

#[test]
fn mask_json_round_trip() {
    for (_, m) in builtin_masks() {
        let text = serde_json::to_string(&m).unwrap();
        let back: Mask = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_identity_on_random_masks(seed in any::<u64>(), data_seed in any::<u64>()) {
        let m = random_mask(seed);
        prop_assume!(m.check_affine_invariance());
        let mut r = rng(data_seed);
        let xs: Vec<Rational> = (0..12).map(|_| random_rational(&mut r)).collect();
        prop_assert!(derived_identity_holds(&m, &xs));
    }

    #[test]
    fn norm_is_max_residue_abs_sum(seed in any::<u64>()) {
        let m = random_mask(seed);
        let n = m.dilation() as i64;
        let (lo, hi) = m.support();
        let mut best = Rational::zero();
        for r in 0..n {
            let s = (lo..=hi)
                .filter(|l| l.rem_euclid(n) == r)
                .fold(Rational::zero(), |a, l| a + m.coeff(l).abs());
            if s > best {
                best = s;
            }
        }
        prop_assert_eq!(m.scheme_norm(), best);
    }

    #[test]
    fn gamma_sequence_is_consistent(seed in any::<u64>()) {
        let m = random_mask(seed);
        let a = m.analyze(3).unwrap();
        prop_assert_eq!(m.contractivity_factor().unwrap(), a.gammas[0].clone());
        for (k, g) in a.gammas.iter().enumerate() {
            let mk = m.iterate(k as u32 + 1).unwrap();
            let nk = Rational::from_integer(mk.dilation().into());
            prop_assert_eq!(g, &(mk.derived().unwrap().scheme_norm() / nk));
        }
        if let Some(w) = a.witness {
            prop_assert!(a.gammas[w as usize - 1] < Rational::one());
            prop_assert!(a.gammas[..w as usize - 1].iter().all(|g| g >= &Rational::one()));
        }
    }
}
