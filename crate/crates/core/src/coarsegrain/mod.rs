//! Coarse-grained position and momentum distributions of test states and
//! empirical checks of the uncertainty relations.
//!
//! Units have `ħ = 1`, so `γ = Δ δ`. Bin `k` of width `w` covers
//! `[(k - ½) w, (k + ½) w]`. Gaussian and Hermite states are binned in
//! closed form; sampled states go through composite Gauss–Legendre
//! quadrature of the interpolated densities.

pub mod hermite;
pub mod sampled;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bounds::{majorization_bound_of, renyi_entropy, HighOrderForm};
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::majorization::{build_w, majorizes, MajorizationVector, Truncation, MEASURED_SLACK};
use crate::quadrature::GaussLegendre;
pub use sampled::SampledState;

/// Most Hermite levels a superposition may use.
pub const MAX_HERMITE_LEVELS: usize = 32;
/// Largest index window accepted for a distribution.
pub const MAX_BINS: usize = 1_000_000;
/// Target mass outside the index window.
pub const TAIL_TARGET: f64 = 1e-12;
/// Gauss–Legendre nodes per panel for sampled states.
pub const NODES_PER_PANEL: usize = 16;
/// Default number of Hermite levels for random states.
pub const DEFAULT_RANDOM_LEVELS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

/// A pure test state.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// Minimal-uncertainty packet with position spread `sigma` (standard
    /// deviation of `|ψ|²`), centred at `center` with mean momentum
    /// `momentum`.
    Gaussian {
        sigma: f64,
        center: f64,
        momentum: f64,
    },
    /// `Σ c_m h_m(x)` over the first `coeffs.len()` Hermite functions.
    Hermite {
        coeffs: Vec<Complex64>,
    },
    Sampled(SampledState),
}

impl StateSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        StateSpec::shifted_gaussian(sigma, 0.0, 0.0)
    }

    pub fn shifted_gaussian(sigma: f64, center: f64, momentum: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(domain(format!("sigma must be finite and > 0, got {sigma}")));
        }
        if !(center.is_finite() && momentum.is_finite()) {
            return Err(domain("non-finite shift"));
        }
        Ok(StateSpec::Gaussian {
            sigma,
            center,
            momentum,
        })
    }

    /// Normalizes the coefficients.
    pub fn hermite(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_HERMITE_LEVELS {
            return Err(domain(format!(
                "Hermite superposition needs 1..={MAX_HERMITE_LEVELS} levels, got {}",
                coeffs.len()
            )));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain(
                "Hermite coefficients must be finite and not all zero",
            ));
        }
        Ok(StateSpec::Hermite {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// A single Hermite function `h_level`.
    pub fn hermite_level(level: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); level + 1];
        coeffs[level] = Complex64::new(1.0, 0.0);
        StateSpec::hermite(coeffs)
    }

    /// Random superposition of the first `levels` Hermite functions with
    /// i.i.d. standard normal real and imaginary parts.
    pub fn random_hermite<R: rand::Rng + ?Sized>(levels: usize, rng: &mut R) -> Result<Self> {
        let coeffs = (0..levels)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        StateSpec::hermite(coeffs)
    }

    /// Samples a Gaussian on a uniform grid wide enough in both spaces.
    pub fn sampled_gaussian(sigma: f64, center: f64, points: usize) -> Result<Self> {
        let half = 9.0 * sigma;
        SampledState::from_fn(points, center - half, center + half, |x| {
            let d = x - center;
            Complex64::new((-d * d / (4.0 * sigma * sigma)).exp(), 0.0)
        })
        .map(StateSpec::Sampled)
    }

    /// `‖ψ‖₂`, which is one for every constructed state.
    pub fn l2_norm(&self) -> f64 {
        match self {
            StateSpec::Gaussian { .. } => 1.0,
            StateSpec::Hermite { coeffs } => {
                coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
            }
            StateSpec::Sampled(s) => s.l2_norm(),
        }
    }
}

/// `count` random Hermite states drawn from a ChaCha stream seeded with `seed`.
pub fn random_hermite_states(count: usize, levels: usize, seed: u64) -> Result<Vec<StateSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| StateSpec::random_hermite(levels, &mut rng))
        .collect()
}

/// Bin probabilities over an index window plus the mass outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseDistribution {
    pub width: f64,
    pub k_min: i64,
    pub probs: Vec<f64>,
    pub tail: f64,
}

impl CoarseDistribution {
    pub fn k_max(&self) -> i64 {
        self.k_min + self.probs.len() as i64 - 1
    }

    /// `[(k - ½) w, (k + ½) w]`.
    pub fn bin_edges(&self, k: i64) -> (f64, f64) {
        bin_edges(k, self.width)
    }

    /// Probability of bin `k`, zero outside the window.
    pub fn prob(&self, k: i64) -> f64 {
        if k < self.k_min || k > self.k_max() {
            return 0.0;
        }
        self.probs[(k - self.k_min) as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail
    }
}

fn bin_edges(k: i64, width: f64) -> (f64, f64) {
    ((k as f64 - 0.5) * width, (k as f64 + 0.5) * width)
}

fn bin_of(x: f64, width: f64) -> i64 {
    (x / width).round() as i64
}

fn check_width(width: f64) -> Result<()> {
    if !(width.is_finite() && width > 0.0) {
        return Err(domain(format!(
            "bin width must be finite and > 0, got {width}"
        )));
    }
    Ok(())
}

fn window_size(k_lo: i64, k_hi: i64) -> Result<usize> {
    let bins = (k_hi - k_lo + 1) as u64;
    if bins > MAX_BINS as u64 {
        return Err(Error::Resource(format!(
            "index window of {bins} bins exceeds the {MAX_BINS}-bin limit"
        )));
    }
    Ok(bins as usize)
}

/// Bins a density given its exact interval mass, widening the window until
/// the tail mass drops below the target.
fn closed_form_bins<M>(width: f64, support: (f64, f64), mass: M) -> Result<CoarseDistribution>
where
    M: Fn(f64, f64) -> f64,
{
    let (mut k_lo, mut k_hi) = (bin_of(support.0, width), bin_of(support.1, width));
    loop {
        window_size(k_lo, k_hi)?;
        let tail = mass(f64::NEG_INFINITY, bin_edges(k_lo, width).0)
            + mass(bin_edges(k_hi, width).1, f64::INFINITY);
        if tail < TAIL_TARGET {
            let probs = (k_lo..=k_hi)
                .map(|k| {
                    let (a, b) = bin_edges(k, width);
                    mass(a, b).max(0.0)
                })
                .collect();
            return Ok(CoarseDistribution {
                width,
                k_min: k_lo,
                probs,
                tail: tail.max(0.0),
            });
        }
        let grow = ((k_hi - k_lo) / 4).max(1);
        k_lo -= grow;
        k_hi += grow;
    }
}

/// Interval mass of `|Σ a_m h_m|²`.
fn hermite_mass(amps: &[Complex64]) -> impl Fn(f64, f64) -> f64 + '_ {
    let k = amps.len();
    let gram: Vec<f64> = (0..k * k)
        .map(|idx| (amps[idx / k].conj() * amps[idx % k]).re)
        .collect();
    move |a, b| {
        let overlaps = hermite::interval_overlaps(a, b, k);
        gram.iter().zip(&overlaps).map(|(g, o)| g * o).sum()
    }
}

fn hermite_support(levels: usize) -> (f64, f64) {
    let reach = (2.0 * levels as f64 + 1.0).sqrt() + 6.0;
    (-reach, reach)
}

/// Sampled density integrated with composite Gauss–Legendre panels of
/// at most `panel` length, restricted to `[lo, hi]`.
fn quadrature_bins<D>(
    width: f64,
    support: (f64, f64),
    domain_limits: (f64, f64),
    panel: f64,
    density: D,
) -> Result<CoarseDistribution>
where
    D: Fn(f64) -> f64 + Sync + Send,
{
    let (k_lo, k_hi) = (bin_of(support.0, width), bin_of(support.1, width));
    let bins = window_size(k_lo, k_hi)?;
    let gl = GaussLegendre::new(NODES_PER_PANEL);
    let ks: Vec<i64> = (k_lo..=k_hi).collect();
    let probs = Execution::default().map(&ks, |&k| {
        let (a, b) = bin_edges(k, width);
        let (a, b) = (a.max(domain_limits.0), b.min(domain_limits.1));
        if b <= a {
            return 0.0;
        }
        let pieces = ((b - a) / panel).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        (0..pieces)
            .map(|i| {
                let lo = a + i as f64 * step;
                gl.integrate(lo, lo + step, &density)
            })
            .sum::<f64>()
    });
    debug_assert_eq!(probs.len(), bins);
    Ok(CoarseDistribution {
        width,
        k_min: k_lo,
        probs,
        tail: 0.0,
    })
}

/// Mass outside the bins `k_lo..=k_hi` from grid samples of a density.
fn grid_tail(points: impl Iterator<Item = (f64, f64)>, step: f64, lo: f64, hi: f64) -> f64 {
    step * points
        .filter(|(x, _)| *x < lo || *x > hi)
        .map(|(_, d)| d)
        .sum::<f64>()
}

/// Coarse-grained position probabilities `q_k = ∫_{bin k} |ψ(x)|² dx`.
pub fn position_probs(state: &StateSpec, width: f64) -> Result<CoarseDistribution> {
    check_width(width)?;
    match state {
        StateSpec::Gaussian { sigma, center, .. } => {
            let (s, c) = (*sigma, *center);
            closed_form_bins(width, (c - 8.0 * s, c + 8.0 * s), |a, b| {
                hermite::normal_mass(c, s, a, b)
            })
        }
        StateSpec::Hermite { coeffs } => {
            closed_form_bins(width, hermite_support(coeffs.len()), hermite_mass(coeffs))
        }
        StateSpec::Sampled(s) => {
            let support = s.position_support();
            let expansion = s.position_expansion();
            let panel = (s.x_max() - s.x_min()) / 64.0;
            let mut dist = quadrature_bins(width, support, (s.x_min(), s.x_max()), panel, |x| {
                expansion.eval(x).norm_sqr()
            })?;
            let (lo, _) = dist.bin_edges(dist.k_min);
            let (_, hi) = dist.bin_edges(dist.k_max());
            dist.tail = grid_tail(
                (0..s.len()).map(|i| (s.position(i), s.amplitudes()[i].norm_sqr())),
                s.spacing(),
                lo,
                hi,
            );
            Ok(dist)
        }
    }
}

/// Coarse-grained momentum probabilities `p_l = ∫_{bin l} |ψ̃(p)|² dp`.
pub fn momentum_probs(state: &StateSpec, width: f64) -> Result<CoarseDistribution> {
    check_width(width)?;
    match state {
        StateSpec::Gaussian {
            sigma, momentum, ..
        } => {
            let (s, c) = (0.5 / sigma, *momentum);
            closed_form_bins(width, (c - 8.0 * s, c + 8.0 * s), |a, b| {
                hermite::normal_mass(c, s, a, b)
            })
        }
        StateSpec::Hermite { coeffs } => {
            // h̃_m = (-i)^m h_m
            let rotated: Vec<Complex64> = coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * Complex64::new(0.0, -1.0).powu(m as u32))
                .collect();
            closed_form_bins(width, hermite_support(coeffs.len()), hermite_mass(&rotated))
        }
        StateSpec::Sampled(s) => {
            let support = s.momentum_support();
            let expansion = s.momentum_expansion();
            let panel = ((support.1 - support.0) / 64.0).max(s.momentum_spacing());
            let mut dist = quadrature_bins(
                width,
                support,
                (f64::NEG_INFINITY, f64::INFINITY),
                panel,
                |p| expansion.eval(p).norm_sqr(),
            )?;
            let (lo, _) = dist.bin_edges(dist.k_min);
            let (_, hi) = dist.bin_edges(dist.k_max());
            dist.tail = grid_tail(
                s.momentum_grid()
                    .into_iter()
                    .map(|(p, a)| (p, a.norm_sqr())),
                s.momentum_spacing(),
                lo,
                hi,
            );
            Ok(dist)
        }
    }
}

/// Outcome of one entropic check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EurReport {
    pub gamma: f64,
    /// `H_α[q^Δ] + H_α[p^δ]`.
    pub lhs: f64,
    /// The majorization bound at `γ = Δ δ`.
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Both checks for one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub eur: EurReport,
    pub majorized: bool,
}

impl TrialOutcome {
    pub fn pass(&self) -> bool {
        self.eur.pass && self.majorized
    }
}

/// Fixed `(Δ, δ, α, n)` with `W⁽ⁿ⁾(Δδ)` and its bound computed once, for
/// checking many states.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub delta_x: f64,
    pub delta_p: f64,
    pub alpha: f64,
    pub w: MajorizationVector,
    pub bound: f64,
    unit_w: Vec<f64>,
}

impl Verifier {
    pub fn new(delta_x: f64, delta_p: f64, alpha: f64, n: Truncation) -> Result<Self> {
        check_width(delta_x)?;
        check_width(delta_p)?;
        let gamma = delta_x * delta_p;
        let w = build_w(gamma, n)?;
        let bound = majorization_bound_of(&w.coeffs, alpha, HighOrderForm::default())?;
        let unit_w = w.with_unit_prefix();
        Ok(Verifier {
            delta_x,
            delta_p,
            alpha,
            w,
            bound,
            unit_w,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.delta_x * self.delta_p
    }

    pub fn distributions(
        &self,
        state: &StateSpec,
    ) -> Result<(CoarseDistribution, CoarseDistribution)> {
        Ok((
            position_probs(state, self.delta_x)?,
            momentum_probs(state, self.delta_p)?,
        ))
    }

    fn eur_of(&self, q: &CoarseDistribution, p: &CoarseDistribution) -> Result<EurReport> {
        let lhs = renyi_entropy(&q.probs, self.alpha)? + renyi_entropy(&p.probs, self.alpha)?;
        let margin = lhs - self.bound;
        Ok(EurReport {
            gamma: self.gamma(),
            lhs,
            rhs: self.bound,
            margin,
            pass: margin >= -MEASURED_SLACK,
        })
    }

    fn majorized_of(&self, q: &CoarseDistribution, p: &CoarseDistribution) -> Result<bool> {
        let direct_sum: Vec<f64> = q.probs.iter().chain(&p.probs).copied().collect();
        majorizes(&direct_sum, &self.unit_w, MEASURED_SLACK)
    }

    pub fn eur(&self, state: &StateSpec) -> Result<EurReport> {
        let (q, p) = self.distributions(state)?;
        self.eur_of(&q, &p)
    }

    pub fn direct_sum(&self, state: &StateSpec) -> Result<bool> {
        let (q, p) = self.distributions(state)?;
        self.majorized_of(&q, &p)
    }

    pub fn check(&self, state: &StateSpec) -> Result<TrialOutcome> {
        let (q, p) = self.distributions(state)?;
        Ok(TrialOutcome {
            eur: self.eur_of(&q, &p)?,
            majorized: self.majorized_of(&q, &p)?,
        })
    }

    /// Checks every state; results are in input order.
    pub fn check_all(&self, states: &[StateSpec], exec: Execution) -> Result<Vec<TrialOutcome>> {
        exec.map(states, |s| self.check(s)).into_iter().collect()
    }
}

/// `H_α[q^Δ] + H_α[p^δ]` against the majorization bound at `γ = Δδ`.
pub fn verify_eur(
    state: &StateSpec,
    delta_x: f64,
    delta_p: f64,
    alpha: f64,
    n: Truncation,
) -> Result<EurReport> {
    Verifier::new(delta_x, delta_p, alpha, n)?.eur(state)
}

/// `q^Δ ⊕ p^δ ≺ {1} ⊕ W⁽ⁿ⁾(Δδ)` with total mass two on both sides.
pub fn verify_direct_sum_majorization(
    state: &StateSpec,
    delta_x: f64,
    delta_p: f64,
    n: Truncation,
) -> Result<bool> {
    Verifier::new(delta_x, delta_p, 1.0, n)?.direct_sum(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::SQRT_2;

    #[test]
    fn wide_bin_captures_everything() {
        let g = StateSpec::gaussian(1.0).unwrap();
        let q = position_probs(&g, 1e3).unwrap();
        assert_eq!(q.probs.len(), 1);
        assert_eq!(q.k_min, 0);
        assert!((q.probs[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn central_gaussian_bin() {
        let g = StateSpec::gaussian(1.0).unwrap();
        let q = position_probs(&g, 1.0).unwrap();
        let want = libm::erf(1.0 / (2.0 * SQRT_2));
        assert!((q.prob(0) - want).abs() < 1e-15);
        assert!((q.prob(0) - 0.38292).abs() < 1e-5);
        // independent quadrature of the density
        let gl = GaussLegendre::new(40);
        let rho = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for k in -5..=5 {
            let (a, b) = q.bin_edges(k);
            assert!((q.prob(k) - gl.integrate(a, b, rho)).abs() < 1e-10);
        }
    }

    #[test]
    fn normalization_and_parity() {
        let states = [
            StateSpec::gaussian(0.7).unwrap(),
            StateSpec::hermite_level(3).unwrap(),
            StateSpec::hermite(vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.3, 0.0),
            ])
            .unwrap(),
        ];
        for s in &states {
            for w in [0.1, 0.9, 2.0] {
                for d in [position_probs(s, w).unwrap(), momentum_probs(s, w).unwrap()] {
                    assert!((d.total() - 1.0).abs() < 1e-9);
                    assert!(d.tail < TAIL_TARGET);
                    let kmax = d.k_max().min(-d.k_min);
                    for k in 0..=kmax {
                        assert!((d.prob(k) - d.prob(-k)).abs() < 1e-12, "w={w} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn hermite_levels_are_fourier_symmetric() {
        for m in [0, 1, 4, 9] {
            let s = StateSpec::hermite_level(m).unwrap();
            let q = position_probs(&s, 0.6).unwrap();
            let p = momentum_probs(&s, 0.6).unwrap();
            assert_eq!(q.k_min, p.k_min);
            for (a, b) in q.probs.iter().zip(&p.probs) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_momentum_spread() {
        let g = StateSpec::gaussian(2.0).unwrap();
        let p = momentum_probs(&g, 0.25).unwrap();
        // σ_p = 1/4, so bin 0 = [-1/8, 1/8] holds erf(0.5/√2)
        assert!((p.prob(0) - libm::erf(0.5 / SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn resource_limit() {
        let g = StateSpec::gaussian(1.0).unwrap();
        assert!(matches!(position_probs(&g, 1e-6), Err(Error::Resource(_))));
        assert!(position_probs(&g, 0.0).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(StateSpec::gaussian(0.0).is_err());
        assert!(StateSpec::hermite(vec![]).is_err());
        assert!(StateSpec::hermite(vec![Complex64::new(1.0, 0.0); 33]).is_err());
        let s =
            StateSpec::hermite(vec![Complex64::new(3.0, 4.0), Complex64::new(0.0, 1.0)]).unwrap();
        assert!((s.l2_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_states_are_reproducible() {
        let a = random_hermite_states(5, 10, 7).unwrap();
        let b = random_hermite_states(5, 10, 7).unwrap();
        let c = random_hermite_states(5, 10, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for s in &a {
            assert!((s.l2_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_passes_both_checks() {
        let g = StateSpec::gaussian(1.0).unwrap();
        let r = verify_eur(&g, 1.0, 1.0, 1.0, Truncation::Finite(4)).unwrap();
        assert!(r.pass && r.margin > 0.0, "{r:?}");
        let two_pi = (2.0 * std::f64::consts::PI).sqrt();
        assert!(verify_direct_sum_majorization(&g, two_pi, two_pi, Truncation::Finite(6)).unwrap());
    }
}
