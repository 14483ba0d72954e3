use coarse_eur::bounds::{bound_majorization, bound_r, renyi_entropy, shannon_functional};
use coarse_eur::coarsegrain::{momentum_probs, position_probs, StateSpec, Verifier};
use coarse_eur::majorization::{build_w, f_value, majorizes, Truncation, THEOREM_SLACK};
use coarse_eur::prolate::{lambda0, lambda0_nystrom};
use num_complex::Complex64;
use proptest::prelude::*;

fn probability_vector(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("all zero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

/// `t x + (1 - t) P x` for a rotation `P`, which is majorized by `x`.
fn t_transform(x: &[f64], t: f64, shift: usize) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| t * x[i] + (1.0 - t) * x[(i + shift) % n])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn schur_concavity(
        p in probability_vector(2..12),
        t in 0.0f64..1.0,
        shift in 1usize..11,
    ) {
        let q = t_transform(&p, t, shift);
        prop_assert!(majorizes(&q, &p, 1e-12).unwrap());
        for alpha in [0.5, 1.0, 2.0] {
            let hq = renyi_entropy(&q, alpha).unwrap();
            let hp = renyi_entropy(&p, alpha).unwrap();
            prop_assert!(hq >= hp - 1e-12, "alpha={} H(q)={} H(p)={}", alpha, hq, hp);
        }
    }

    #[test]
    fn direct_sum_additivity(x in probability_vector(1..10), y in probability_vector(1..10)) {
        let joined: Vec<f64> = x.iter().chain(&y).copied().collect();
        let lhs = shannon_functional(&joined);
        let rhs = renyi_entropy(&x, 1.0).unwrap() + renyi_entropy(&y, 1.0).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn majorization_is_reflexive_and_permutation_blind(p in probability_vector(1..10), k in 0usize..10) {
        let mut rotated = p.clone();
        let len = rotated.len();
        rotated.rotate_left(k % len);
        prop_assert!(majorizes(&p, &rotated, 1e-15).unwrap());
        prop_assert!(majorizes(&rotated, &p, 1e-15).unwrap());
    }

    #[test]
    fn w_family_is_a_chain(gamma in 0.05f64..15.0, n in 3usize..9) {
        let coarse = build_w(gamma, Truncation::Finite(2)).unwrap();
        let prev = build_w(gamma, Truncation::Finite(n - 1)).unwrap();
        let fine = build_w(gamma, Truncation::Finite(n)).unwrap();
        prop_assert!((fine.total() - 1.0).abs() < 1e-14);
        prop_assert!(fine.coeffs.iter().all(|&w| w >= -1e-15));
        prop_assert!(majorizes(&fine.coeffs, &coarse.coeffs, THEOREM_SLACK).unwrap());
        prop_assert!(majorizes(&fine.coeffs, &prev.coeffs, THEOREM_SLACK).unwrap());
    }

    #[test]
    fn bound_grows_with_truncation(gamma in 0.05f64..20.0) {
        let mut last = 0.0;
        for n in 2..=6 {
            let b = bound_majorization(gamma, 1.0, Truncation::Finite(n)).unwrap();
            prop_assert!(b >= last - 1e-13, "n={} {} < {}", n, b, last);
            last = b;
        }
        prop_assert!(bound_r(gamma).unwrap() >= 0.0);
    }

    #[test]
    fn f_is_monotone(gamma in 0.01f64..20.0, scale in 1.0f64..3.0, j in 1usize..20) {
        let here = f_value(gamma, j).unwrap();
        prop_assert!(f_value(gamma, j + 1).unwrap() >= here);
        prop_assert!(f_value(gamma * scale, j).unwrap() >= here);
    }

    #[test]
    fn lambda0_is_monotone(c1 in 1e-3f64..40.0, c2 in 1e-3f64..40.0) {
        let (lo, hi) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
        prop_assume!(hi - lo > 1e-9);
        let a = lambda0(lo).unwrap();
        let b = lambda0(hi).unwrap();
        prop_assert!(b.lambda0 >= a.lambda0);
        prop_assert!(b.deficit < a.deficit);
    }

    #[test]
    fn shifted_states_never_violate(
        x0 in -3.0f64..3.0,
        p0 in -3.0f64..3.0,
        dx in 0.3f64..3.0,
        dp in 0.3f64..3.0,
    ) {
        let s = StateSpec::shifted_gaussian(1.0, x0, p0).unwrap();
        let v = Verifier::new(dx, dp, 1.0, Truncation::Finite(4)).unwrap();
        let outcome = v.check(&s).unwrap();
        prop_assert!(outcome.pass(), "{:?}", outcome);
    }

    #[test]
    fn coarse_distributions_are_normalized(
        re in prop::collection::vec(-1.0f64..1.0, 1..12),
        width in 0.2f64..4.0,
    ) {
        prop_assume!(re.iter().any(|x| x.abs() > 1e-3));
        let coeffs = re.iter().enumerate().map(|(i, &r)| Complex64::new(r, 0.3 * i as f64 * r)).collect();
        let s = StateSpec::hermite(coeffs).unwrap();
        for d in [position_probs(&s, width).unwrap(), momentum_probs(&s, width).unwrap()] {
            prop_assert!((d.total() - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn small_c_limit_band() {
    for c in [1e-4, 3e-4, 1e-3, 3e-3, 1e-2] {
        let l = lambda0(c).unwrap().lambda0;
        assert!((l * std::f64::consts::PI / (2.0 * c) - 1.0).abs() <= 0.02);
    }
}

#[test]
fn deficit_tracks_leading_asymptotics() {
    let mut last = 0.0;
    for c in [8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0] {
        let d = lambda0(c).unwrap().deficit;
        let ratio = d / (4.0 * (std::f64::consts::PI * c).sqrt() * (-2.0 * c).exp());
        assert!((ratio - 1.0).abs() <= 0.15, "c={c} ratio={ratio}");
        assert!((ratio - 1.0).abs() <= (last - 1.0f64).abs() || last == 0.0);
        last = ratio;
    }
}

#[test]
fn continuum_limit_of_cumulative_w() {
    let gamma = 1e-6;
    let w = build_w(gamma, Truncation::Finite(4200)).unwrap();
    for z in [1.0f64, 2.0, 4.0] {
        let i = (z / gamma.sqrt()).round() as usize;
        let cumulative: f64 = w.coeffs[..i - 1].iter().sum();
        let limit = lambda0_nystrom(z * z / 16.0, 256).unwrap().lambda0.sqrt();
        assert!(
            (cumulative - limit).abs() < 1e-3,
            "z={z}: {cumulative} vs {limit}"
        );
    }
}

#[test]
fn prefix_saturates_for_wide_bins() {
    let s = StateSpec::gaussian(0.5).unwrap();
    let mut last = 0.0;
    for width in [0.5, 2.0, 8.0, 32.0] {
        let q = position_probs(&s, width).unwrap();
        let p = momentum_probs(&s, width).unwrap();
        let top = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let prefix = top(&q.probs) + top(&p.probs);
        assert!(prefix > last && prefix <= 2.0 + 1e-12);
        last = prefix;
    }
    assert!((last - 2.0).abs() < 1e-9);
}
