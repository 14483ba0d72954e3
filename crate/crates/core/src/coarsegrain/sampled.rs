//! Wave functions given as samples on a uniform grid.
//!
//! The momentum amplitude uses the unitary convention
//! `ψ̃(p) = (2π)^{-1/2} ∫ ψ(x) e^{-ipx} dx`, evaluated on the FFT grid with
//! continuum normalization and, between grid points, by the same sum taken
//! at arbitrary `p`. Position values between samples come from
//! trigonometric interpolation.
//!
//! File format: a header line `n_points x_min x_max`, then one `re im` pair
//! per line, samples at `x_min + i (x_max - x_min) / (n_points - 1)`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};

/// Default number of grid points for generated sampled states.
pub const DEFAULT_POINTS: usize = 1 << 14;
/// Densities above this at the grid edges (either space) are rejected.
pub const EDGE_DENSITY: f64 = 1e-16;
/// Densities below this are treated as outside the support.
pub(crate) const SUPPORT_DENSITY: f64 = 1e-24;
pub const MIN_POINTS: usize = 16;
pub const MAX_POINTS: usize = 1 << 24;

/// A normalized wave function on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledState {
    x_min: f64,
    spacing: f64,
    amps: Vec<Complex64>,
}

/// Amplitude terms `(frequency, coefficient)` of a sparse Fourier-type sum.
#[derive(Clone, Debug)]
pub(crate) struct Expansion {
    terms: Vec<(f64, Complex64)>,
    /// Overall factor applied after summation.
    scale: f64,
    /// `+1` for `e^{+i k t}`, `-1` for `e^{-i k t}`.
    sign: f64,
    /// Origin subtracted from the evaluation point.
    origin: f64,
}

impl Expansion {
    pub(crate) fn eval(&self, t: f64) -> Complex64 {
        let s: Complex64 = self
            .terms
            .iter()
            .map(|(k, a)| a * Complex64::cis(self.sign * k * (t - self.origin)))
            .sum();
        s * self.scale
    }

    fn sparse(terms: Vec<(f64, Complex64)>, scale: f64, sign: f64, origin: f64) -> Self {
        let max = terms.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max);
        let terms = terms
            .into_iter()
            .filter(|(_, a)| a.norm() > 1e-17 * max)
            .collect();
        Expansion {
            terms,
            scale,
            sign,
            origin,
        }
    }
}

impl SampledState {
    /// Builds a state from raw samples on `[x_min, x_max]` (endpoints
    /// included) and normalizes it.
    pub fn new(x_min: f64, x_max: f64, amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len();
        if n < MIN_POINTS {
            return Err(domain(format!(
                "need at least {MIN_POINTS} samples, got {n}"
            )));
        }
        if n > MAX_POINTS {
            return Err(Error::Resource(format!(
                "{n} samples exceed the {MAX_POINTS} limit"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(domain(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(domain("non-finite amplitude"));
        }
        let spacing = (x_max - x_min) / (n - 1) as f64;
        let norm2: f64 = spacing * amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if norm2 == 0.0 {
            return Err(domain("sampled state is identically zero"));
        }
        let s = norm2.sqrt().recip();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a * s).collect();
        let edge = amps[0].norm_sqr().max(amps[n - 1].norm_sqr());
        if edge > EDGE_DENSITY {
            return Err(Error::Resource(format!(
                "position density {edge:e} at the grid edge; widen the grid"
            )));
        }
        let state = SampledState {
            x_min,
            spacing,
            amps,
        };
        state.check_momentum_band()?;
        Ok(state)
    }

    /// Samples `f` on `points` grid points spanning `[x_min, x_max]`.
    pub fn from_fn<F: Fn(f64) -> Complex64>(
        points: usize,
        x_min: f64,
        x_max: f64,
        f: F,
    ) -> Result<Self> {
        if points < 2 {
            return Err(domain("need at least two grid points"));
        }
        let h = (x_max - x_min) / (points - 1) as f64;
        let amps = (0..points).map(|i| f(x_min + i as f64 * h)).collect();
        SampledState::new(x_min, x_max, amps)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.spacing * (self.amps.len() - 1) as f64
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing
    }

    /// `h Σ |ψ_i|²`.
    pub fn l2_norm(&self) -> f64 {
        (self.spacing * self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
    }

    fn fft_frequencies(&self) -> Vec<f64> {
        let n = self.amps.len();
        let dp = 2.0 * PI / (n as f64 * self.spacing);
        (0..n)
            .map(|j| {
                let signed = if j < n.div_ceil(2) {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                signed as f64 * dp
            })
            .collect()
    }

    fn fft(&self) -> Vec<Complex64> {
        let mut buf = self.amps.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        buf
    }

    /// `(p_j, ψ̃(p_j))` on the FFT grid, ordered by increasing `p`.
    pub fn momentum_grid(&self) -> Vec<(f64, Complex64)> {
        let scale = self.spacing / (2.0 * PI).sqrt();
        let mut grid: Vec<(f64, Complex64)> = self
            .fft_frequencies()
            .into_iter()
            .zip(self.fft())
            .map(|(p, a)| (p, a * Complex64::cis(-p * self.x_min) * scale))
            .collect();
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        grid
    }

    /// Spacing of the FFT momentum grid.
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / (self.amps.len() as f64 * self.spacing)
    }

    /// Rejects grids whose momentum density has not decayed well inside
    /// the Nyquist band.
    fn check_momentum_band(&self) -> Result<()> {
        let grid = self.momentum_grid();
        let n = grid.len();
        let guard = (n / 20).max(1);
        let edge = grid[..guard]
            .iter()
            .chain(&grid[n - guard..])
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, f64::max);
        if edge > EDGE_DENSITY {
            return Err(Error::Resource(format!(
                "momentum density {edge:e} near the Nyquist edge; refine the grid"
            )));
        }
        Ok(())
    }

    /// Continuous trigonometric interpolant of `ψ(x)`.
    pub(crate) fn position_expansion(&self) -> Expansion {
        let n = self.amps.len() as f64;
        let terms = self.fft_frequencies().into_iter().zip(self.fft()).collect();
        Expansion::sparse(terms, 1.0 / n, 1.0, self.x_min)
    }

    /// `ψ̃(p)` at arbitrary `p` as the continuum sum over samples.
    pub(crate) fn momentum_expansion(&self) -> Expansion {
        let terms = (0..self.amps.len())
            .map(|i| (self.position(i), self.amps[i]))
            .collect();
        Expansion::sparse(terms, self.spacing / (2.0 * PI).sqrt(), -1.0, 0.0)
    }

    /// Support `[lo, hi]` of the position density on the sample grid.
    pub(crate) fn position_support(&self) -> (f64, f64) {
        let idx: Vec<usize> = (0..self.amps.len())
            .filter(|&i| self.amps[i].norm_sqr() > SUPPORT_DENSITY)
            .collect();
        match (idx.first(), idx.last()) {
            (Some(&a), Some(&b)) => (self.position(a), self.position(b)),
            _ => (self.x_min, self.x_max()),
        }
    }

    /// Support `[lo, hi]` of the momentum density on the FFT grid.
    pub(crate) fn momentum_support(&self) -> (f64, f64) {
        let grid = self.momentum_grid();
        let sig: Vec<f64> = grid
            .iter()
            .filter(|(_, a)| a.norm_sqr() > SUPPORT_DENSITY)
            .map(|(p, _)| *p)
            .collect();
        match (sig.first(), sig.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (grid[0].0, grid[grid.len() - 1].0),
        }
    }

    /// Reads the plain-text sample format.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let header = header?;
        let bad = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(hline, "header must be `n_points x_min x_max`".into()));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| bad(hline, format!("n_points: {e}")))?;
        let x_min: f64 = fields[1]
            .parse()
            .map_err(|e| bad(hline, format!("x_min: {e}")))?;
        let x_max: f64 = fields[2]
            .parse()
            .map_err(|e| bad(hline, format!("x_max: {e}")))?;
        if n > MAX_POINTS {
            return Err(Error::Resource(format!(
                "{n} samples exceed the {MAX_POINTS} limit"
            )));
        }
        let mut amps = Vec::with_capacity(n);
        for (idx, line) in lines {
            let line = line?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(bad(idx, "expected `re im`".into()));
            }
            let re: f64 = parts[0].parse().map_err(|e| bad(idx, format!("re: {e}")))?;
            let im: f64 = parts[1].parse().map_err(|e| bad(idx, format!("im: {e}")))?;
            amps.push(Complex64::new(re, im));
        }
        if amps.len() != n {
            return Err(Error::Parse {
                line: hline + 1,
                message: format!("header announces {n} samples, found {}", amps.len()),
            });
        }
        SampledState::new(x_min, x_max, amps)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{} {:.16e} {:.16e}",
            self.amps.len(),
            self.x_min,
            self.x_max()
        )?;
        for a in &self.amps {
            writeln!(out, "{:.16e} {:.16e}", a.re, a.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(sigma: f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
    }

    #[test]
    fn normalizes_and_interpolates() {
        let s = SampledState::from_fn(1024, -20.0, 20.0, gaussian(1.0)).unwrap();
        assert!((s.l2_norm() - 1.0).abs() < 1e-12);
        let interp = s.position_expansion();
        let amp0 = (2.0 * PI).powf(-0.25);
        for x in [0.0f64, 0.123, -1.7, 3.3] {
            let want = amp0 * (-x * x / 4.0).exp();
            assert!((interp.eval(x).re - want).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn momentum_amplitude_of_gaussian() {
        let s = SampledState::from_fn(2048, -25.0, 15.0, gaussian(1.0)).unwrap();
        // σ_p = 1/2: ψ̃(p) = (2π σ_p²)^{-1/4} e^{-p²/(4σ_p²)}
        let m = s.momentum_expansion();
        let amp0 = (2.0 * PI * 0.25f64).powf(-0.25);
        for p in [0.0f64, 0.4, -1.1, 2.0] {
            let want = amp0 * (-p * p).exp();
            assert!((m.eval(p).norm() - want).abs() < 1e-12, "p={p}");
        }
        for (p, a) in s.momentum_grid() {
            assert!((a.norm() - amp0 * (-p * p).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            SampledState::from_fn(256, -2.0, 2.0, gaussian(1.0)),
            Err(Error::Resource(_))
        ));
        // too coarse for a narrow state: aliasing
        assert!(matches!(
            SampledState::from_fn(64, -20.0, 20.0, gaussian(0.2)),
            Err(Error::Resource(_))
        ));
        assert!(SampledState::new(0.0, 1.0, vec![Complex64::new(0.0, 0.0); 32]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let s = SampledState::from_fn(128, -16.0, 16.0, gaussian(1.5)).unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let back = SampledState::read_from(&buf[..]).unwrap();
        assert_eq!(back.len(), 128);
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let err = SampledState::read_from(&b"3 0 1\n1 0\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
