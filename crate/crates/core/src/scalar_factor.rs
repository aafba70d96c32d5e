//! Outer (minimum-phase) factor of a positive weight on the circle, by
//! exponentiating the analytic completion of `½ log w`.

use crate::circle_fourier::{fft_forward, fft_inverse, sample_analytic, AnalyticPoly, GridFn, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFactorConfig {
    /// Weights must exceed `floor * max w` at every node.
    pub floor: f64,
    /// Accepted `max | |g|² - w |` relative to `max w`.
    pub tol_factor: f64,
}

impl Default for ScalarFactorConfig {
    fn default() -> Self {
        Self {
            floor: 1e-12,
            tol_factor: 1e-9,
        }
    }
}

/// Outer factor `g⁺` with `|g⁺|² = w` and `g⁺(0) > 0`.
#[derive(Debug, Clone)]
pub struct ScalarFactor {
    pub series: AnalyticPoly,
    pub grid_values: GridFn,
    /// `max_j | |g⁺(e^{it_j})|² - w_j |`.
    pub weight_residual: f64,
}

/// Nyquist-limited truncation degree `N/2 - 1`.
pub fn default_degree(w: &GridFn) -> usize {
    w.grid().max_band()
}

pub fn scalar_spectral_factor(
    w: &GridFn,
    degree: usize,
    config: &ScalarFactorConfig,
) -> Result<ScalarFactor> {
    let grid = w.grid();
    let n = grid.size();
    if degree > grid.max_band() {
        return Err(Error::Resolution {
            requested: 2 * degree + 2,
            grid: n,
        });
    }

    let w_max = w.values().iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let imag_tol = 1e-10 * w.sup_abs();
    if let Some((node, v)) = w.values().iter().enumerate().find(|(_, v)| v.im.abs() > imag_tol) {
        return Err(Error::NonRealWeight { node, imag: v.im });
    }
    let floor = config.floor * w_max.max(0.0);
    if let Some((node, v)) = w
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.re > floor) || !v.re.is_finite())
    {
        return Err(Error::WeightFloor {
            node,
            value: v.re,
            floor,
        });
    }

    // Fourier coefficients of u = log w.
    let mut buf: Vec<C64> = w.values().iter().map(|v| C64::new(v.re.ln(), 0.0)).collect();
    fft_forward(&mut buf);
    let scale = 1.0 / n as f64;
    let c0 = buf[0].re * scale;

    // Analytic completion c_0/2 + Σ_{1 <= k < N/2} c_k z^k; negative indices and
    // the Nyquist bin are dropped.
    let mut completion = vec![C64::new(0.0, 0.0); n];
    completion[0] = C64::new(0.5 * c0, 0.0);
    for k in 1..n / 2 {
        completion[k] = buf[k] * scale;
    }
    fft_inverse(&mut completion);
    for v in &mut completion {
        *v = v.exp();
    }
    fft_forward(&mut completion);
    let mut coeffs: Vec<C64> = completion[..=degree].iter().map(|c| c * scale).collect();
    coeffs[0] = C64::new((0.5 * c0).exp(), 0.0);

    let series = AnalyticPoly::new(coeffs);
    let grid_values = sample_analytic(&series, grid)?;
    let weight_residual = grid_values
        .values()
        .iter()
        .zip(w.values())
        .map(|(g, w)| (g.norm_sqr() - w.re).abs())
        .fold(0.0, f64::max);
    let tol = config.tol_factor * w_max;
    if weight_residual > tol {
        return Err(Error::TruncationTooSmall {
            degree,
            residual: weight_residual,
            tol,
        });
    }
    Ok(ScalarFactor {
        series,
        grid_values,
        weight_residual,
    })
}
