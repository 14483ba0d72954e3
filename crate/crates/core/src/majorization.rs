//! Majorizing vectors for the direct sum of coarse-grained position and
//! momentum distributions.
//!
//! For `J` bins in total (position and momentum bins together) the largest
//! excess of their combined probability over 1 is bounded by
//!
//! ```text
//!     F_J(γ) = √λ₀(γ ⌈J/2⌉⌊J/2⌋ / 4),
//! ```
//!
//! a non-decreasing sequence with `F_1 = 0` and `F_J → 1`. Its increments
//! `W_i = F_{i+1} - F_i` form a probability vector `W` with
//! `q ⊕ p ≺ {1} ⊕ W`. Truncating after `n - 1` increments and lumping the
//! rest into `1 - F_n` gives the family `W⁽ⁿ⁾`, ordered by
//! `W⁽²⁾ ≻ W⁽³⁾ ≻ … ≻ W⁽∞⁾`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::prolate::{self, ProlateEvaluation};

/// Stop the untruncated vector once `1 - F_J` falls below this.
pub const TAIL_CUTOFF: f64 = 1e-15;
/// Hard cap on the number of terms of the untruncated vector.
pub const MAX_TERMS: usize = 10_000;
/// Slack for majorization checks that follow from exact inequalities.
pub const THEOREM_SLACK: f64 = 1e-12;
/// Slack for checks on distributions obtained by quadrature.
pub const MEASURED_SLACK: f64 = 1e-9;

const CLAMP_TOLERANCE: f64 = 1e-12;

/// Where the family `W⁽ⁿ⁾` is cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truncation {
    Finite(usize),
    Unbounded,
}

impl Truncation {
    pub fn finite(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("truncation index must be >= 2, got {n}")));
        }
        Ok(Truncation::Finite(n))
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Finite(n) => write!(f, "{n}"),
            Truncation::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "unbounded" | "∞" => Ok(Truncation::Unbounded),
            t => {
                let n: usize = t.parse().map_err(|_| {
                    domain(format!(
                        "truncation must be an integer >= 2 or `inf`, got `{s}`"
                    ))
                })?;
                Truncation::finite(n)
            }
        }
    }
}

/// `⌈J/2⌉⌊J/2⌋`, the largest product `M N` with `M + N = J`.
pub fn balanced_product(j: usize) -> u64 {
    let j = j as u64;
    j.div_ceil(2) * (j / 2)
}

/// One member of the sequence, kept with its prolate evaluation so that
/// increments near saturation can be formed from deficits.
#[derive(Clone, Copy, Debug)]
struct FTerm {
    value: f64,
    complement: f64,
    eval: ProlateEvaluation,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(domain(format!("gamma must be finite and > 0, got {gamma}")));
    }
    Ok(())
}

fn f_term(gamma: f64, j: usize) -> Result<FTerm> {
    let c = gamma * balanced_product(j) as f64 / 4.0;
    let eval = prolate::lambda0(c)?;
    let (value, complement) = eval.sqrt_pair();
    Ok(FTerm {
        value,
        complement,
        eval,
    })
}

/// `F_{J+1} - F_J` without cancellation: from the eigenvalues when both are
/// small, from the deficits when both are close to one.
fn increment(lo: &FTerm, hi: &FTerm) -> f64 {
    let denom = lo.value + hi.value;
    if denom == 0.0 {
        return 0.0;
    }
    let numer = if hi.eval.lambda0 <= 0.5 {
        hi.eval.lambda0 - lo.eval.lambda0
    } else {
        lo.eval.deficit - hi.eval.deficit
    };
    numer / denom
}

/// `F_J(γ)`.
pub fn f_value(gamma: f64, j: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if j == 0 {
        return Err(domain("J must be >= 1"));
    }
    Ok(f_term(gamma, j)?.value)
}

/// `F_1 … F_{J_max}` with their complements `1 - F_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct FSequence {
    pub gamma: f64,
    pub values: Vec<f64>,
    pub deficits: Vec<f64>,
}

pub fn f_sequence(gamma: f64, j_max: usize) -> Result<FSequence> {
    check_gamma(gamma)?;
    let terms = (1..=j_max)
        .map(|j| f_term(gamma, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(FSequence {
        gamma,
        values: terms.iter().map(|t| t.value).collect(),
        deficits: terms.iter().map(|t| t.complement).collect(),
    })
}

/// A member `W⁽ⁿ⁾(γ)` of the majorizing family.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorizationVector {
    pub gamma: f64,
    pub n: Truncation,
    pub coeffs: Vec<f64>,
}

impl MajorizationVector {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// The direct sum `{1} ⊕ W`.
    pub fn with_unit_prefix(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.coeffs.iter().copied())
            .collect()
    }
}

fn checked_coefficient(w: f64, index: usize, gamma: f64) -> Result<f64> {
    if w >= 0.0 {
        return Ok(w);
    }
    if w >= -CLAMP_TOLERANCE {
        if w < -TAIL_CUTOFF {
            log::warn!("W_{index}({gamma}) = {w:e} clamped to zero");
        }
        return Ok(0.0);
    }
    Err(Error::Numerical(format!(
        "W_{index}({gamma}) = {w:e} is negative beyond tolerance; F_J is not monotone"
    )))
}

/// Assembles `(W_1, …, W_{k-1}, 1 - F_k)` from `F_1 … F_k`.
fn assemble(gamma: f64, n: Truncation, terms: &[FTerm]) -> Result<MajorizationVector> {
    let mut coeffs = Vec::with_capacity(terms.len());
    for (i, pair) in terms.windows(2).enumerate() {
        coeffs.push(checked_coefficient(
            increment(&pair[0], &pair[1]),
            i + 1,
            gamma,
        )?);
    }
    let last = terms.last().expect("at least F_1 and F_2");
    coeffs.push(last.complement.max(0.0));
    Ok(MajorizationVector { gamma, n, coeffs })
}

/// `W⁽ⁿ⁾(γ)`. The untruncated vector runs until `1 - F_J < 1e-15` and ends
/// with that remaining mass, so it still sums to one.
pub fn build_w(gamma: f64, n: Truncation) -> Result<MajorizationVector> {
    check_gamma(gamma)?;
    match n {
        Truncation::Finite(k) => {
            if k < 2 {
                return Err(domain(format!("truncation index must be >= 2, got {k}")));
            }
            let terms = (1..=k)
                .map(|j| f_term(gamma, j))
                .collect::<Result<Vec<_>>>()?;
            assemble(gamma, n, &terms)
        }
        Truncation::Unbounded => {
            let mut terms = vec![f_term(gamma, 1)?];
            loop {
                let j = terms.len() + 1;
                if j > MAX_TERMS {
                    return Err(Error::Resource(format!(
                        "W(γ = {gamma}) not saturated after {MAX_TERMS} terms; use a finite truncation"
                    )));
                }
                let t = f_term(gamma, j)?;
                terms.push(t);
                if t.complement < TAIL_CUTOFF {
                    break;
                }
            }
            assemble(gamma, n, &terms)
        }
    }
}

/// `x ≺ y`: every prefix sum of the descending-sorted `x` is at most the
/// matching prefix sum of `y` plus `slack`, and the totals agree within
/// `slack`. The shorter vector is padded with zeros.
pub fn majorizes(x: &[f64], y: &[f64], slack: f64) -> Result<bool> {
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(domain(format!(
            "slack must be finite and >= 0, got {slack}"
        )));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if let Some(bad) = v.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(domain(format!("{name} has an invalid entry {bad}")));
        }
    }
    let sorted_desc = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let len = xs.len().max(ys.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..len {
        sx += xs.get(k).copied().unwrap_or(0.0);
        sy += ys.get(k).copied().unwrap_or(0.0);
        if sx > sy + slack {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= slack)
}

/// Checks `W⁽ᵏ⁺¹⁾ ≺ W⁽ᵏ⁾` for `2 ≤ k < n_max` with the theorem slack.
pub fn check_chain(gamma: f64, n_max: usize) -> Result<bool> {
    check_gamma(gamma)?;
    if n_max < 3 {
        return Err(domain(format!("chain needs n_max >= 3, got {n_max}")));
    }
    let terms = (1..=n_max)
        .map(|j| f_term(gamma, j))
        .collect::<Result<Vec<_>>>()?;
    let family = (2..=n_max)
        .map(|k| assemble(gamma, Truncation::Finite(k), &terms[..k]))
        .collect::<Result<Vec<_>>>()?;
    for pair in family.windows(2) {
        if !majorizes(&pair[1].coeffs, &pair[0].coeffs, THEOREM_SLACK)? {
            log::warn!(
                "chain broken at γ = {gamma}: W({}) not majorized by W({})",
                pair[1].n,
                pair[0].n
            );
            return Ok(false);
        }
    }
    Ok(true)
}
