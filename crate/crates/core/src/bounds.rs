//! Rényi entropies and the lower bounds on `H_α[q^Δ] + H_β[p^δ]`.
//!
//! Three families are available, all functions of `γ = Δδ/ħ` only:
//!
//! | family | orders | value |
//! |--------|--------|-------|
//! | `B`    | conjugate, `1/α + 1/β = 2` | `-(ln α/(1-α) + ln β/(1-β))/2 - ln(γ/π)` |
//! | `R`    | conjugate | `-ln λ₀(γ/4)` |
//! | `MAJ`  | equal, `α = β` | `H_α[W⁽ⁿ⁾(γ)]` for `α ≤ 1`, weakened form above |
//!
//! Entropies are in nats.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::majorization::{build_w, Truncation};
use crate::prolate;

/// `|α - 1|` below which the Shannon branch is used.
pub const SHANNON_WINDOW: f64 = 1e-8;
/// Maximum iterations of [`find_crossing`].
pub const BISECTION_MAX_ITER: usize = 200;

/// How much a probability vector may fall short of unit mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    /// Accepted excess over one.
    pub excess: f64,
    /// Accepted missing mass (unresolved tails).
    pub shortfall: f64,
}

impl Normalization {
    /// Sums in `[1 - 1e-6, 1 + 1e-9]`.
    pub const DEFAULT: Normalization = Normalization {
        excess: 1e-9,
        shortfall: 1e-6,
    };

    /// Any sub-normalized vector (explicit tail mass elsewhere).
    pub const ALLOW_TAIL: Normalization = Normalization {
        excess: 1e-9,
        shortfall: 1.0,
    };
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization::DEFAULT
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(domain(format!("Rényi order must be > 0, got {alpha}")));
    }
    Ok(())
}

/// `−Σ pᵢ ln pᵢ` with `0 ln 0 = 0`, applied to any non-negative vector with
/// no normalization requirement. Additive over direct sums.
pub fn shannon_functional(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Rényi entropy of order `alpha` (use `f64::INFINITY` for the min-entropy)
/// with the default normalization window.
pub fn renyi_entropy(p: &[f64], alpha: f64) -> Result<f64> {
    renyi_entropy_with(p, alpha, Normalization::DEFAULT)
}

pub fn renyi_entropy_with(p: &[f64], alpha: f64, norm: Normalization) -> Result<f64> {
    check_order(alpha)?;
    if let Some(bad) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(domain(format!(
            "probabilities must be finite and >= 0, found {bad}"
        )));
    }
    let total: f64 = p.iter().sum();
    if total > 1.0 + norm.excess || total < 1.0 - norm.shortfall {
        return Err(domain(format!(
            "probabilities sum to {total}, outside the accepted window"
        )));
    }
    let h = if alpha.is_infinite() {
        let max = p.iter().copied().fold(0.0, f64::max);
        -max.ln()
    } else if (alpha - 1.0).abs() <= SHANNON_WINDOW {
        shannon_functional(p)
    } else {
        let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
        s.ln() / (1.0 - alpha)
    };
    Ok(h.max(0.0))
}

/// `β = α / (2α - 1)`, the conjugate order (`∞` at `α = 1/2`).
pub fn conjugate_order(alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    if alpha < 0.5 {
        return Err(domain(format!(
            "order {alpha} < 1/2 has no positive conjugate"
        )));
    }
    if alpha == 0.5 {
        return Ok(f64::INFINITY);
    }
    if alpha.is_infinite() {
        return Ok(0.5);
    }
    Ok(alpha / (2.0 * alpha - 1.0))
}

/// `ln a / (1 - a)` with its limits at `a → 1` and `a → ∞`.
fn log_ratio(a: f64) -> f64 {
    if a.is_infinite() {
        return 0.0;
    }
    let h = a - 1.0;
    if h.abs() <= SHANNON_WINDOW {
        return -(1.0 - h / 2.0 + h * h / 3.0);
    }
    a.ln() / (1.0 - a)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(domain(format!("gamma must be finite and > 0, got {gamma}")));
    }
    Ok(())
}

/// The conjugate-order bound `B_α(γ)`; may be negative.
pub fn bound_b(gamma: f64, alpha: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let beta = conjugate_order(alpha)?;
    Ok(-0.5 * (log_ratio(alpha) + log_ratio(beta)) - (gamma / PI).ln())
}

/// The prolate bound `R(γ) = -ln λ₀(γ/4)`, never negative.
pub fn bound_r(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let e = prolate::lambda0(gamma / 4.0)?;
    let r = if e.deficit < 0.5 {
        -(-e.deficit).ln_1p()
    } else {
        -e.lambda0.ln()
    };
    if r < 0.0 {
        if r > -1e-12 {
            return Ok(0.0);
        }
        return Err(Error::Numerical(format!("R({gamma}) = {r:e} is negative")));
    }
    Ok(r)
}

/// Which expression is used for the majorization bound at `α > 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HighOrderForm {
    /// `(2/(1-α)) [ln(1 + Σ Wᵢ^α) - ln 2]`.
    #[default]
    PowerSum,
    /// `(2/(1-α)) [ln(1 + Σ Wᵢ) - ln 2]`, which vanishes identically because
    /// `W` is normalized. Kept only for comparison.
    Literal,
}

/// The majorization bound `R_α⁽ⁿ⁾(γ)`.
pub fn bound_majorization(gamma: f64, alpha: f64, n: Truncation) -> Result<f64> {
    bound_majorization_with(gamma, alpha, n, HighOrderForm::default())
}

pub fn bound_majorization_with(
    gamma: f64,
    alpha: f64,
    n: Truncation,
    form: HighOrderForm,
) -> Result<f64> {
    check_gamma(gamma)?;
    check_order(alpha)?;
    let w = build_w(gamma, n)?;
    majorization_bound_of(&w.coeffs, alpha, form)
}

/// The bound for a prebuilt `W` vector.
pub fn majorization_bound_of(w: &[f64], alpha: f64, form: HighOrderForm) -> Result<f64> {
    check_order(alpha)?;
    if alpha <= 1.0 + SHANNON_WINDOW {
        return renyi_entropy(w, alpha);
    }
    if alpha.is_infinite() {
        return Ok(0.0);
    }
    let s: f64 = match form {
        HighOrderForm::PowerSum => w.iter().map(|x| x.powf(alpha)).sum(),
        HighOrderForm::Literal => w.iter().sum(),
    };
    Ok((2.0 / (1.0 - alpha) * (s.ln_1p() - LN_2)).max(0.0))
}

/// One of the three bound families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    B,
    R,
    Maj,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::B => "B",
            Family::R => "R",
            Family::Maj => "MAJ",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Requested bound: a single family, or the best applicable one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySelector {
    Single(Family),
    /// `H_α[q] + H_α[p]`: all three families at `α = 1`, only `MAJ` otherwise.
    BestSameOrder,
    /// `H_α[q] + H_β[p]` with conjugate `β`: `B` and `R`.
    BestConjugate,
}

pub const CONJUGATE_ONLY: &str = "requires conjugate orders";
pub const EQUAL_ORDERS_ONLY: &str = "requires equal orders";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRequest {
    pub gamma: f64,
    pub alpha: f64,
    pub n: Truncation,
    pub family: FamilySelector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub dominant: Family,
    /// Every family evaluated, in `B, R, MAJ` order.
    pub values: Vec<(Family, f64)>,
    /// Families skipped with the reason.
    pub omitted: Vec<(Family, &'static str)>,
}

impl BoundResult {
    pub fn applicable_families(&self) -> Vec<Family> {
        self.values.iter().map(|(f, _)| *f).collect()
    }

    pub fn get(&self, family: Family) -> Option<f64> {
        self.values
            .iter()
            .find(|(f, _)| *f == family)
            .map(|(_, v)| *v)
    }
}

fn evaluate_family(family: Family, gamma: f64, alpha: f64, n: Truncation) -> Result<f64> {
    match family {
        Family::B => bound_b(gamma, alpha),
        Family::R => bound_r(gamma),
        Family::Maj => bound_majorization(gamma, alpha, n),
    }
}

impl BoundRequest {
    pub fn evaluate(&self) -> Result<BoundResult> {
        let BoundRequest {
            gamma,
            alpha,
            n,
            family,
        } = *self;
        check_gamma(gamma)?;
        check_order(alpha)?;
        let shannon = (alpha - 1.0).abs() <= SHANNON_WINDOW;
        let (wanted, omitted): (Vec<Family>, Vec<(Family, &'static str)>) = match family {
            FamilySelector::Single(f) => (vec![f], vec![]),
            FamilySelector::BestSameOrder if shannon => {
                (vec![Family::B, Family::R, Family::Maj], vec![])
            }
            FamilySelector::BestSameOrder => (
                vec![Family::Maj],
                vec![(Family::B, CONJUGATE_ONLY), (Family::R, CONJUGATE_ONLY)],
            ),
            FamilySelector::BestConjugate => {
                conjugate_order(alpha)?;
                (
                    vec![Family::B, Family::R],
                    vec![(Family::Maj, EQUAL_ORDERS_ONLY)],
                )
            }
        };
        let values = wanted
            .iter()
            .map(|&f| evaluate_family(f, gamma, alpha, n).map(|v| (f, v)))
            .collect::<Result<Vec<_>>>()?;
        let (dominant, value) = values
            .iter()
            .copied()
            .fold(None, |best: Option<(Family, f64)>, (f, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((f, v)),
            })
            .expect("at least one family");
        Ok(BoundResult {
            value,
            dominant,
            values,
            omitted,
        })
    }
}

/// Best same-order bound for `H_α[q] + H_α[p]`.
pub fn best_bound(gamma: f64, alpha: f64, n: Truncation) -> Result<BoundResult> {
    BoundRequest {
        gamma,
        alpha,
        n,
        family: FamilySelector::BestSameOrder,
    }
    .evaluate()
}

/// A bound curve `γ ↦ value`, or the zero function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curve {
    B,
    R,
    Maj(Truncation),
    Zero,
}

impl Curve {
    pub fn eval(self, gamma: f64, alpha: f64) -> Result<f64> {
        match self {
            Curve::B => bound_b(gamma, alpha),
            Curve::R => bound_r(gamma),
            Curve::Maj(n) => bound_majorization(gamma, alpha, n),
            Curve::Zero => Ok(0.0),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::B => f.write_str("B"),
            Curve::R => f.write_str("R"),
            Curve::Maj(n) => write!(f, "MAJ:{n}"),
            Curve::Zero => f.write_str("ZERO"),
        }
    }
}

impl FromStr for Curve {
    type Err = Error;

    /// `B`, `R`, `ZERO`, or `MAJ:<n>` / `MAJ<n>` with `n` an integer or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "B" => Ok(Curve::B),
            "R" => Ok(Curve::R),
            "ZERO" | "0" => Ok(Curve::Zero),
            other => match other.strip_prefix("MAJ") {
                Some(rest) => {
                    let rest = rest.trim_start_matches([':', '_', '=']);
                    let rest = rest.strip_prefix("N=").unwrap_or(rest);
                    Ok(Curve::Maj(rest.parse()?))
                }
                None => Err(domain(format!("unknown bound curve `{s}`"))),
            },
        }
    }
}

/// Bisection root of `a(γ) - b(γ)` on `bracket`, to absolute tolerance `tol`.
pub fn find_crossing(a: Curve, b: Curve, alpha: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(domain(format!(
            "bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(domain(format!("tolerance must be > 0, got {tol}")));
    }
    let diff = |g: f64| -> Result<f64> { Ok(a.eval(g, alpha)? - b.eval(g, alpha)?) };
    let mut f_lo = diff(lo)?;
    let f_hi = diff(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = diff(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn renyi_reference_values() {
        for alpha in [0.3, 0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            assert!((renyi_entropy(&[0.5, 0.5], alpha).unwrap() - LN_2).abs() < 1e-15);
            assert_eq!(renyi_entropy(&[1.0, 0.0], alpha).unwrap(), 0.0);
        }
        let h2 = renyi_entropy(&[0.5, 0.25, 0.25], 2.0).unwrap();
        assert!((h2 + (3.0f64 / 8.0).ln()).abs() < 1e-15);
        let hmin = renyi_entropy(&[0.5, 0.25, 0.25], f64::INFINITY).unwrap();
        assert!((hmin - LN_2).abs() < 1e-15);
    }

    #[test]
    fn renyi_is_continuous_through_shannon() {
        let p = [0.6, 0.3, 0.1];
        let h1 = renyi_entropy(&p, 1.0).unwrap();
        for d in [1e-5, -1e-5, 1e-7, -1e-7] {
            let h = renyi_entropy(&p, 1.0 + d).unwrap();
            assert!((h - h1).abs() < 1e-5, "{d}: {h} vs {h1}");
        }
    }

    #[test]
    fn renyi_domain_errors() {
        assert!(renyi_entropy(&[0.5, 0.5], 0.0).is_err());
        assert!(renyi_entropy(&[0.5, 0.5], -1.0).is_err());
        assert!(renyi_entropy(&[1.5, -0.5], 1.0).is_err());
        assert!(renyi_entropy(&[0.6, 0.6], 1.0).is_err());
        assert!(renyi_entropy(&[0.5, 0.4], 1.0).is_err());
        assert!(renyi_entropy_with(&[0.5, 0.4], 1.0, Normalization::ALLOW_TAIL).is_ok());
        assert!(renyi_entropy(&[0.5, 0.5 - 1e-8], 1.0).is_ok());
    }

    #[test]
    fn b_bound_values() {
        assert!((bound_b(PI, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bound_b(E * PI, 1.0).unwrap().abs() < 1e-15);
        for g in [0.3, 2.0, 11.0] {
            let want = LN_2 - (g / PI).ln();
            assert!((bound_b(g, 0.5).unwrap() - want).abs() < 1e-14);
        }
        // symmetric in (α, β)
        let a = 0.8;
        let b = conjugate_order(a).unwrap();
        assert!((bound_b(2.0, a).unwrap() - bound_b(2.0, b).unwrap()).abs() < 1e-14);
        assert!(bound_b(1.0, 0.4).is_err());
        // smooth across the α = 1 window
        let at_one = bound_b(2.0, 1.0).unwrap();
        assert!((bound_b(2.0, 1.0 + 1e-6).unwrap() - at_one).abs() < 1e-10);
    }

    #[test]
    fn r_bound_small_gamma_matches_shifted_b() {
        let g = 1e-3;
        let r = bound_r(g).unwrap();
        let approx = bound_b(g, 1.0).unwrap() + LN_2 - 1.0;
        assert!(
            (r - approx).abs() <= (LN_2 - 1.0).abs() * 0.01,
            "{r} vs {approx}"
        );
    }

    #[test]
    fn r_bound_is_minus_log_lambda() {
        let want = -prolate::lambda0(1.0).unwrap().lambda0.ln();
        assert!((bound_r(4.0).unwrap() - want).abs() < 1e-15);
        let asym = 2.0 * (40.0 * PI).sqrt() * (-20.0f64).exp();
        let r = bound_r(40.0).unwrap();
        assert!((r / asym - 1.0).abs() < 0.1, "{r} vs {asym}");
    }

    #[test]
    fn majorization_bound_two_point_case() {
        let g = 3.3;
        let f2 = crate::majorization::f_value(g, 2).unwrap();
        let want = -(f2 * f2.ln() + (1.0 - f2) * (1.0 - f2).ln());
        let got = bound_majorization(g, 1.0, Truncation::Finite(2)).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn high_order_branch() {
        let n = Truncation::Finite(4);
        let mut last = f64::INFINITY;
        for alpha in [1.5, 3.0, 10.0, 100.0, 1e4] {
            let v = bound_majorization(2.0, alpha, n).unwrap();
            assert!(v >= 0.0 && v < last, "α={alpha}: {v}");
            last = v;
        }
        assert!(last < 1e-3);
        assert_eq!(bound_majorization(2.0, f64::INFINITY, n).unwrap(), 0.0);
        let lit = bound_majorization_with(2.0, 2.0, n, HighOrderForm::Literal).unwrap();
        assert!(lit.abs() < 1e-12);
    }

    #[test]
    fn selector_applicability() {
        let r = BoundRequest {
            gamma: 7.0,
            alpha: 0.7,
            n: Truncation::Finite(3),
            family: FamilySelector::BestSameOrder,
        }
        .evaluate()
        .unwrap();
        assert_eq!(r.applicable_families(), vec![Family::Maj]);
        assert_eq!(r.omitted.len(), 2);

        let r = BoundRequest {
            gamma: 7.0,
            alpha: 0.7,
            n: Truncation::Finite(3),
            family: FamilySelector::BestConjugate,
        }
        .evaluate()
        .unwrap();
        assert_eq!(r.applicable_families(), vec![Family::B, Family::R]);
        assert_eq!(
            r.value,
            r.get(Family::B).unwrap().max(r.get(Family::R).unwrap())
        );

        assert_eq!(
            best_bound(1.0, 1.0, Truncation::Finite(4))
                .unwrap()
                .dominant,
            Family::B
        );
        assert_eq!(
            best_bound(7.0, 1.0, Truncation::Finite(3))
                .unwrap()
                .dominant,
            Family::Maj
        );
    }

    #[test]
    fn curve_parsing() {
        assert_eq!(
            "MAJ:4".parse::<Curve>().unwrap(),
            Curve::Maj(Truncation::Finite(4))
        );
        assert_eq!(
            "maj4".parse::<Curve>().unwrap(),
            Curve::Maj(Truncation::Finite(4))
        );
        assert_eq!(
            "MAJ:n=inf".parse::<Curve>().unwrap(),
            Curve::Maj(Truncation::Unbounded)
        );
        assert_eq!("b".parse::<Curve>().unwrap(), Curve::B);
        assert_eq!("zero".parse::<Curve>().unwrap(), Curve::Zero);
        assert!("MAJ:1".parse::<Curve>().is_err());
        assert!("Q".parse::<Curve>().is_err());
    }

    #[test]
    fn bisection_contract() {
        let g = find_crossing(Curve::B, Curve::Zero, 1.0, (5.0, 12.0), 1e-10).unwrap();
        assert!((g - E * PI).abs() < 1e-9);
        let err = find_crossing(Curve::B, Curve::Zero, 1.0, (1.0, 2.0), 1e-6).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
        assert!(find_crossing(Curve::B, Curve::Zero, 1.0, (3.0, 2.0), 1e-6).is_err());
    }
}
