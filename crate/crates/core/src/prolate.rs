//! The top eigenvalue `λ₀(c)` of the time- and band-limiting operator
//!
//! ```text
//!     (K f)(x) = ∫_{-1}^{1} sin(c (x - y)) / (π (x - y)) f(y) dy
//! ```
//!
//! which equals `(2c/π) [R₀₀(c, 1)]²` in terms of the radial prolate
//! spheroidal function. Three independent routes are provided:
//!
//! * **series**: the even prolate function is expanded in normalized
//!   Legendre polynomials; the expansion coefficients are the lowest
//!   eigenvector of a symmetric tridiagonal matrix, and `λ₀` follows from the
//!   Fourier-type eigenvalue `μ₀ = ∫ψ₀ / ψ₀(0)` via `λ₀ = c μ₀² / 2π`.
//! * **nystrom**: Gauss–Legendre discretization of `K`, symmetrized with the
//!   square roots of the weights, top eigenvalue by power iteration.
//! * **asymptotic**: `1 - λ₀ ≈ 4 √(πc) e^{-2c}` for large `c`.
//!
//! Every result carries the deficit `1 - λ₀` alongside `λ₀`. Once the
//! deficit drops below `1e-12` it can no longer be read off `1 - λ₀` in
//! double precision, so [`lambda0`] switches the deficit to the large-`c`
//! expansion, refined by a `1/c` correction calibrated against the series at
//! moderate `c`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::quadrature::GaussLegendre;

/// Below this bandwidth the two-term small-`c` expansion is used.
pub const SMALL_C: f64 = 1e-6;
/// Largest bandwidth handled by the Legendre series.
pub const SERIES_MAX_C: f64 = 40.0;
/// Deficits smaller than this are taken from the large-`c` expansion.
pub const TAIL_DEFICIT: f64 = 1e-12;
/// Smallest bandwidth accepted by [`lambda0_asymptotic`].
pub const ASYMPTOTIC_MIN_C: f64 = 5.0;
pub const DEFAULT_NODES: usize = 512;
pub const MIN_NODES: usize = 8;
pub const MAX_NODES: usize = 8192;

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Nystrom,
    Asymptotic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Nystrom => "nystrom",
            Method::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "series" => Ok(Method::Series),
            "nystrom" => Ok(Method::Nystrom),
            "asymptotic" => Ok(Method::Asymptotic),
            other => Err(domain(format!("unknown prolate method `{other}`"))),
        }
    }
}

/// `λ₀(c)` together with its deficit `1 - λ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProlateEvaluation {
    pub c: f64,
    pub lambda0: f64,
    pub deficit: f64,
    pub method: Method,
}

impl ProlateEvaluation {
    fn from_lambda(c: f64, lambda0: f64, method: Method) -> Self {
        let lambda0 = lambda0.clamp(0.0, 1.0);
        ProlateEvaluation {
            c,
            lambda0,
            deficit: 1.0 - lambda0,
            method,
        }
    }

    fn from_deficit(c: f64, deficit: f64, method: Method) -> Self {
        let deficit = deficit.clamp(0.0, 1.0);
        ProlateEvaluation {
            c,
            lambda0: 1.0 - deficit,
            deficit,
            method,
        }
    }

    /// `R₀₀(c, 1)` recovered as `√(π λ₀ / 2c)`; `None` at `c = 0`.
    pub fn r00(&self) -> Option<f64> {
        (self.c > 0.0).then(|| (PI * self.lambda0 / (2.0 * self.c)).sqrt())
    }

    /// `√λ₀` and `1 - √λ₀`, the latter without cancellation.
    pub fn sqrt_pair(&self) -> (f64, f64) {
        let s = self.lambda0.sqrt();
        let complement = if self.lambda0 > 0.5 {
            self.deficit / (1.0 + s)
        } else {
            1.0 - s
        };
        (s, complement)
    }
}

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() || c < 0.0 {
        return Err(domain(format!(
            "bandwidth c must be finite and >= 0, got {c}"
        )));
    }
    Ok(())
}

/// `λ₀(c)` by the most accurate route available for this `c`.
///
/// * `c = 0`: exactly zero.
/// * `0 < c < 1e-6`: `(2c/π)(1 - c²/9)`.
/// * `c ≤ 40`: Legendre series; the deficit switches to the corrected
///   large-`c` expansion once it falls below `1e-12`.
/// * `c > 40`: corrected large-`c` expansion.
pub fn lambda0(c: f64) -> Result<ProlateEvaluation> {
    check_c(c)?;
    if c == 0.0 {
        return Ok(ProlateEvaluation::from_lambda(0.0, 0.0, Method::Series));
    }
    if c < SMALL_C {
        let lam = 2.0 * c / PI * (1.0 - c * c / 9.0);
        return Ok(ProlateEvaluation::from_lambda(c, lam, Method::Series));
    }
    if c <= SERIES_MAX_C {
        let eval = lambda0_series(c)?;
        if eval.deficit >= TAIL_DEFICIT {
            return Ok(eval);
        }
    }
    Ok(ProlateEvaluation::from_deficit(
        c,
        tail_deficit(c),
        Method::Asymptotic,
    ))
}

/// Evaluates `λ₀(c)` by an explicitly chosen method.
pub fn lambda0_by(c: f64, method: Method, nodes: usize) -> Result<ProlateEvaluation> {
    match method {
        Method::Series => lambda0_series(c),
        Method::Nystrom => lambda0_nystrom(c, nodes),
        Method::Asymptotic => lambda0_asymptotic(c),
    }
}

/// Leading large-`c` deficit `4 √(πc) e^{-2c}`.
pub fn asymptotic_deficit(c: f64) -> f64 {
    4.0 * (PI * c).sqrt() * (-2.0 * c).exp()
}

/// Large-`c` expansion with no correction terms.
pub fn lambda0_asymptotic(c: f64) -> Result<ProlateEvaluation> {
    check_c(c)?;
    if c < ASYMPTOTIC_MIN_C {
        return Err(domain(format!(
            "asymptotic expansion needs c >= {ASYMPTOTIC_MIN_C}, got {c}"
        )));
    }
    Ok(ProlateEvaluation::from_deficit(
        c,
        asymptotic_deficit(c),
        Method::Asymptotic,
    ))
}

/// Coefficients `(k1, k2)` of the relative correction `1 - k1/c - k2/c²`
/// to the leading deficit, fitted to the series at `c = 10` and `c = 14`
/// where the series deficit is still accurate to better than `1e-5`.
fn tail_correction() -> (f64, f64) {
    static CORRECTION: OnceLock<(f64, f64)> = OnceLock::new();
    *CORRECTION.get_or_init(|| {
        let scaled_gap = |c: f64| {
            let d = lambda0_series(c)
                .expect("series at calibration point")
                .deficit;
            (1.0 - d / asymptotic_deficit(c)) * c
        };
        let (c1, c2) = (10.0, 14.0);
        let (y1, y2) = (scaled_gap(c1), scaled_gap(c2));
        let k2 = (y1 - y2) / (1.0 / c1 - 1.0 / c2);
        (y1 - k2 / c1, k2)
    })
}

/// Deficit used beyond the reach of the series.
pub(crate) fn tail_deficit(c: f64) -> f64 {
    let (k1, k2) = tail_correction();
    let factor = (1.0 - k1 / c - k2 / (c * c)).max(0.0);
    asymptotic_deficit(c) * factor
}

/// Symmetric tridiagonal matrix of the prolate differential operator in the
/// basis of even normalized Legendre polynomials `P̄_{2j}`.
fn even_prolate_matrix(c: f64, terms: usize) -> (Vec<f64>, Vec<f64>) {
    let c2 = c * c;
    let diag = (0..terms)
        .map(|j| {
            let k = 2.0 * j as f64;
            k * (k + 1.0) + c2 * (2.0 * k * (k + 1.0) - 1.0) / ((2.0 * k + 3.0) * (2.0 * k - 1.0))
        })
        .collect();
    let off = (0..terms - 1)
        .map(|j| {
            let k = 2.0 * j as f64;
            c2 * (k + 2.0) * (k + 1.0)
                / ((2.0 * k + 3.0) * ((2.0 * k + 1.0) * (2.0 * k + 5.0)).sqrt())
        })
        .collect();
    (diag, off)
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 {
            0.0
        } else {
            off[i - 1] * off[i - 1] / q
        };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenpair of a symmetric tridiagonal matrix: bisection on the
/// Sturm count, then inverse iteration from just below the eigenvalue.
fn lowest_eigenpair(diag: &[f64], off: &[f64]) -> (f64, Vec<f64>) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
    }
    // Rayleigh quotient of e_0 bounds the lowest eigenvalue from above.
    let mut hi = diag[0] + f64::EPSILON * diag[0].abs().max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // (T - σ) is positive definite for σ below the lowest eigenvalue, so the
    // LDLᵀ recurrence needs no pivoting.
    let sigma = lo - 4.0 * f64::EPSILON * lo.abs().max(1.0);
    let mut v = vec![1.0; n];
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    d[0] = diag[0] - sigma;
    for i in 1..n {
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - sigma - l[i - 1] * off[i - 1];
    }
    for _ in 0..3 {
        for i in 1..n {
            v[i] -= l[i - 1] * v[i - 1];
        }
        for i in 0..n {
            v[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            v[i] -= l[i] * v[i + 1];
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    (0.5 * (lo + hi), v)
}

/// `λ₀(c)` from the Legendre expansion of the even prolate function,
/// without any switch to asymptotics.
pub fn lambda0_series(c: f64) -> Result<ProlateEvaluation> {
    check_c(c)?;
    if c == 0.0 {
        return Ok(ProlateEvaluation::from_lambda(0.0, 0.0, Method::Series));
    }
    if c > 1e4 {
        return Err(Error::Resource(format!(
            "Legendre series for c = {c} would need more than 10^4 terms"
        )));
    }
    let terms = c.ceil() as usize + 40;
    let (diag, off) = even_prolate_matrix(c, terms);
    let (_, beta) = lowest_eigenpair(&diag, &off);

    // ψ₀(0) = Σ β_j √(2j + ½) P_{2j}(0),  P_{2j}(0) = (-1)^j (2j)! / (4^j j!²).
    let mut p_at_zero = 1.0;
    let mut psi_zero = 0.0;
    for (j, b) in beta.iter().enumerate() {
        if j > 0 {
            let jf = j as f64;
            p_at_zero *= -(2.0 * jf - 1.0) / (2.0 * jf);
        }
        psi_zero += b * (2.0 * j as f64 + 0.5).sqrt() * p_at_zero;
    }
    // ∫ψ₀ = √2 β₀ because P̄₀ = 1/√2.
    let mu = std::f64::consts::SQRT_2 * beta[0] / psi_zero;
    let lam = c * mu * mu / (2.0 * PI);
    Ok(ProlateEvaluation::from_lambda(c, lam, Method::Series))
}

/// `λ₀(c)` by Nyström discretization on `nodes` Gauss–Legendre points and
/// power iteration.
pub fn lambda0_nystrom(c: f64, nodes: usize) -> Result<ProlateEvaluation> {
    lambda0_nystrom_with(c, nodes, Execution::default())
}

pub fn lambda0_nystrom_with(c: f64, nodes: usize, exec: Execution) -> Result<ProlateEvaluation> {
    check_c(c)?;
    if nodes < MIN_NODES {
        return Err(domain(format!(
            "Nyström needs at least {MIN_NODES} nodes, got {nodes}"
        )));
    }
    if nodes > MAX_NODES {
        return Err(Error::Resource(format!(
            "Nyström with {nodes} nodes exceeds the {MAX_NODES}-node limit"
        )));
    }
    if c == 0.0 {
        return Ok(ProlateEvaluation::from_lambda(0.0, 0.0, Method::Nystrom));
    }
    let gl = GaussLegendre::new(nodes);
    let x = &gl.nodes;
    let sw: Vec<f64> = gl.weights.iter().map(|w| w.sqrt()).collect();
    let n = nodes;

    let mut a = vec![0.0; n * n];
    exec.fill(&mut a, |idx| {
        let (i, j) = (idx / n, idx % n);
        let k = if i == j {
            c / PI
        } else {
            let d = x[i] - x[j];
            (c * d).sin() / (PI * d)
        };
        sw[i] * k * sw[j]
    });

    // Even start vector: the eigenfunction is even and roughly Gaussian.
    let mut v: Vec<f64> = x
        .iter()
        .zip(&sw)
        .map(|(xi, s)| s * (-0.5 * c * xi * xi).exp())
        .collect();
    let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    v.iter_mut().for_each(|t| *t /= norm);

    let mut u = vec![0.0; n];
    let mut rho_prev = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        exec.fill(&mut u, |i| {
            a[i * n..(i + 1) * n]
                .iter()
                .zip(&v)
                .map(|(aij, vj)| aij * vj)
                .sum::<f64>()
        });
        let rho: f64 = v.iter().zip(&u).map(|(p, q)| p * q).sum();
        let norm = u.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(ProlateEvaluation::from_lambda(c, 0.0, Method::Nystrom));
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / norm;
        }
        if (rho - rho_prev).abs() <= POWER_TOL {
            return Ok(ProlateEvaluation::from_lambda(c, rho, Method::Nystrom));
        }
        rho_prev = rho;
    }
    Err(Error::NoConvergence {
        method: "Nyström power iteration",
        iterations: POWER_MAX_ITER,
    })
}

/// One line of the reference-value file: `c lambda0 deficit nodes`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenRecord {
    pub c: f64,
    pub lambda0: f64,
    pub deficit: f64,
    pub nodes: usize,
}

impl From<(&ProlateEvaluation, usize)> for GoldenRecord {
    fn from((e, nodes): (&ProlateEvaluation, usize)) -> Self {
        GoldenRecord {
            c: e.c,
            lambda0: e.lambda0,
            deficit: e.deficit,
            nodes,
        }
    }
}

/// Writes records with 17 significant digits.
pub fn write_golden<W: Write>(mut out: W, records: &[GoldenRecord]) -> Result<()> {
    for r in records {
        writeln!(
            out,
            "{:.16e} {:.16e} {:.16e} {}",
            r.c, r.lambda0, r.deficit, r.nodes
        )?;
    }
    Ok(())
}

/// Reads records; blank lines and lines starting with `#` are skipped.
pub fn read_golden<R: BufRead>(input: R) -> Result<Vec<GoldenRecord>> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        records.push(GoldenRecord {
            c: num(fields[0])?,
            lambda0: num(fields[1])?,
            deficit: num(fields[2])?,
            nodes: fields[3]
                .parse()
                .map_err(|e| bad(format!("`{}`: {e}", fields[3])))?,
        });
    }
    Ok(records)
}
