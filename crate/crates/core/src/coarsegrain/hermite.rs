//! Hermite functions `h_m(x) = (2^m m! √π)^{-1/2} H_m(x) e^{-x²/2}` and their
//! exact overlap integrals on intervals.

use std::f64::consts::PI;

/// `erf(b) - erf(a)` without cancellation in either tail.
pub(crate) fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if b <= 0.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) - libm::erf(a)
    }
}

/// Mass of the normal law `N(mean, sd²)` on `[a, b]`.
pub(crate) fn normal_mass(mean: f64, sd: f64, a: f64, b: f64) -> f64 {
    let s = sd * std::f64::consts::SQRT_2;
    0.5 * erf_diff((a - mean) / s, (b - mean) / s)
}

/// `h_0(x) … h_{count-1}(x)`; all zero at `x = ±∞`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut h = vec![0.0; count];
    if count == 0 || !x.is_finite() {
        return h;
    }
    h[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if count > 1 {
        h[1] = std::f64::consts::SQRT_2 * x * h[0];
    }
    for m in 1..count.saturating_sub(1) {
        let mf = m as f64;
        h[m + 1] = (2.0 / (mf + 1.0)).sqrt() * x * h[m] - (mf / (mf + 1.0)).sqrt() * h[m - 1];
    }
    h
}

/// Row-major `count × count` matrix of `∫_a^b h_m h_n dx`; `a` may be `-∞`
/// and `b` may be `+∞`.
///
/// Off the diagonal the Wronskian identity
/// `(h_n h_m' - h_m h_n')' = 2(n - m) h_m h_n` gives the integral from the
/// endpoint values; the diagonal follows from
/// `I_{m+1,m+1} = I_{mm} - [h_m h_{m+1}]_a^b / √(2(m+1))`, started from
/// `I_00 = (erf b - erf a)/2`.
pub fn interval_overlaps(a: f64, b: f64, count: usize) -> Vec<f64> {
    let ha = hermite_functions(a, count + 1);
    let hb = hermite_functions(b, count + 1);
    let deriv = |h: &[f64], m: usize| {
        let mf = m as f64;
        let down = if m > 0 {
            (mf / 2.0).sqrt() * h[m - 1]
        } else {
            0.0
        };
        down - ((mf + 1.0) / 2.0).sqrt() * h[m + 1]
    };
    let da: Vec<f64> = (0..count).map(|m| deriv(&ha, m)).collect();
    let db: Vec<f64> = (0..count).map(|m| deriv(&hb, m)).collect();

    let mut out = vec![0.0; count * count];
    if count == 0 {
        return out;
    }
    let mut diag = 0.5 * erf_diff(a, b);
    out[0] = diag;
    for m in 0..count - 1 {
        let jump = hb[m] * hb[m + 1] - ha[m] * ha[m + 1];
        diag -= jump / (2.0 * (m as f64 + 1.0)).sqrt();
        out[(m + 1) * count + m + 1] = diag;
    }
    for m in 0..count {
        for n in m + 1..count {
            let wb = hb[n] * db[m] - hb[m] * db[n];
            let wa = ha[n] * da[m] - ha[m] * da[n];
            let v = (wb - wa) / (2.0 * (n - m) as f64);
            out[m * count + n] = v;
            out[n * count + m] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn orthonormal_on_the_line() {
        let k = 12;
        let full = interval_overlaps(f64::NEG_INFINITY, f64::INFINITY, k);
        for m in 0..k {
            for n in 0..k {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((full[m * k + n] - want).abs() < 1e-14, "({m},{n})");
            }
        }
    }

    #[test]
    fn overlaps_match_quadrature() {
        let k = 10;
        let gl = GaussLegendre::new(64);
        for (a, b) in [(-0.5, 0.5), (0.3, 2.9), (-4.0, -1.0), (2.5, 7.0)] {
            let exact = interval_overlaps(a, b, k);
            for m in 0..k {
                for n in 0..k {
                    let q = gl.integrate(a, b, |x| {
                        let h = hermite_functions(x, k);
                        h[m] * h[n]
                    });
                    assert!((exact[m * k + n] - q).abs() < 1e-13, "[{a},{b}] ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn erf_diff_tails() {
        let d = erf_diff(6.0, 7.0);
        assert!(d > 0.0 && (d / (libm::erfc(6.0) - libm::erfc(7.0)) - 1.0).abs() < 1e-15);
        assert_eq!(erf_diff(-7.0, -6.0), d);
        assert!(
            (normal_mass(0.0, 1.0, -0.5, 0.5) - libm::erf(0.5 / std::f64::consts::SQRT_2)).abs()
                < 1e-16
        );
    }
}
