//! End-to-end pipeline: triangular factorization, truncation of `φ`, unitary
//! completion, assembly of `χ_n⁺`, the a-posteriori bound and diagnostics.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::circle_fourier::{
    matrix_l1_norm, sample, sample_analytic, AnalyticPoly, CircleGrid, GridFn, GridMatrix,
    LaurentPoly, C64,
};
use crate::completion::{build_system, solve_completion, CompletionConfig, UnitaryCompletion};
use crate::error::{Error, Result};
use crate::triangular::{
    triangular_factorize, truncate_phi, HermitianTrigMatrix, PhiTruncation, TriangularConfig,
    TriangularFactorization, ROUNDING_REL,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `sup|det χ_n - g⁺f⁺| / sup|g⁺f⁺|`.
    pub det_rel: f64,
    /// Largest negative coefficient of `Ψ₁, Ψ₂`, relative to `max(1, sup|χ_n|)`.
    pub leakage: f64,
    /// `‖χ_nχ_n* - S_n‖_{L₁} / ‖S‖_{L₁}`.
    pub sn_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            det_rel: 1e-8,
            leakage: 1e-9,
            sn_rel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactorizeConfig {
    pub triangular: TriangularConfig,
    pub completion: CompletionConfig,
    pub tolerances: Tolerances,
}

/// Right-hand side of the a-posteriori estimate
/// `‖χ_n - χ⁺‖_{L₁} <= √2 ‖S‖^{1/2} ‖S⁻¹‖^{1/4} ‖φ_n - φ‖_{L₂}^{1/2} + ‖φ_n - φ‖_{L₁}`.
///
/// The components already include their quadrature slack, so `value` is an
/// upper estimate of the exact right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub value: f64,
    pub s_l1: f64,
    pub s_inv_l1: f64,
    pub tail_l2: f64,
    pub tail_l1: f64,
}

impl ErrorBound {
    pub fn from_components(s_l1: f64, s_inv_l1: f64, tail_l2: f64, tail_l1: f64) -> Self {
        Self {
            value: Self::formula(s_l1, s_inv_l1, tail_l2, tail_l1),
            s_l1,
            s_inv_l1,
            tail_l2,
            tail_l1,
        }
    }

    pub fn formula(s_l1: f64, s_inv_l1: f64, tail_l2: f64, tail_l1: f64) -> f64 {
        SQRT_2 * s_l1.sqrt() * s_inv_l1.powf(0.25) * tail_l2.sqrt() + tail_l1
    }
}

pub fn error_bound(t: &TriangularFactorization, pt: &PhiTruncation) -> ErrorBound {
    ErrorBound::from_components(t.s_l1.upper(), t.s_inv_l1.upper(), pt.tail_l2, pt.tail_l1)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    /// `‖χ_nχ_n* - S‖_{L₁}`
    pub residual_s_l1: f64,
    /// `‖χ_nχ_n* - S_n‖_{L₁}`
    pub residual_sn_l1: f64,
    /// Largest modulus of a negative Fourier coefficient of `Ψ₁, Ψ₂`.
    pub psi_leakage: f64,
    /// `sup|det χ_n - g⁺f⁺| / sup|g⁺f⁺|` on the grid.
    pub det_residual: f64,
    pub unitarity_residual: f64,
    /// `‖S‖^{1/2} - max{‖g⁺‖₂, ‖f⁺‖₂, ‖φ‖₂}`
    pub eq17_margin: f64,
    pub eq17_slack: f64,
    /// `1 - max{sup|α|, sup|β|}`
    pub eq26_margin: f64,
    /// `‖S⁻¹‖_{L₁} - ‖1/f⁺‖₂²`
    pub eq32_margin: f64,
    pub eq32_slack: f64,
    /// Accuracy floor of the floating-point pipeline, `2π · 1e-12 · max(1, sup|χ_n|)`.
    /// The bound is exact-arithmetic; compare measured errors against
    /// `bound.value + rounding_floor`.
    pub rounding_floor: f64,
}

/// Approximate spectral factor `χ_n⁺ = [g⁺α, g⁺β; Ψ₁, Ψ₂]`.
#[derive(Debug, Clone)]
pub struct ApproxSpectralFactor {
    pub n: usize,
    pub entries: [[AnalyticPoly; 2]; 2],
    pub grid: CircleGrid,
    pub values: GridMatrix,
    pub completion: UnitaryCompletion,
    pub diagnostics: DiagnosticsReport,
    pub bound: ErrorBound,
}

impl ApproxSpectralFactor {
    /// `χ_n⁺(0)`.
    pub fn at_origin(&self) -> [[C64; 2]; 2] {
        [
            [self.entries[0][0].coeff(0), self.entries[0][1].coeff(0)],
            [self.entries[1][0].coeff(0), self.entries[1][1].coeff(0)],
        ]
    }
}

/// `x·y` restricted to the band `[lo, hi]`.
fn product(x: &LaurentPoly, y: &LaurentPoly, lo: i64, hi: i64) -> LaurentPoly {
    (x * y).restrict(lo, hi)
}

fn max_negative(p: &LaurentPoly) -> f64 {
    p.terms()
        .filter(|(k, _)| *k < 0)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

fn to_analytic(p: &LaurentPoly, degree: usize) -> AnalyticPoly {
    AnalyticPoly::new((0..=degree as i64).map(|k| p.coeff(k)).collect())
}

/// Assembles `χ_n⁺` from the triangular data, the truncation `pt` and the
/// completion `u`, verifies it, and attaches the error bound.
pub fn assemble_chi(
    t: &TriangularFactorization,
    pt: &PhiTruncation,
    u: &UnitaryCompletion,
    config: &FactorizeConfig,
) -> Result<ApproxSpectralFactor> {
    let grid = t.grid;
    let n = pt.n;
    let top = grid.max_band();
    if t.order + n > top {
        return Err(Error::InvalidInput(format!(
            "order {} plus truncation {n} exceeds the grid band {top}; use a larger grid",
            t.order
        )));
    }
    let top_i = top as i64;
    let g = t.g_plus.series.to_laurent();
    let f = t.f_plus.series.to_laurent();
    let alpha = u.alpha.to_laurent();
    let beta = u.beta.to_laurent();
    let alpha_bar = alpha.conj_reflect();
    let beta_bar = beta.conj_reflect();

    let chi11 = product(&g, &alpha, 0, top_i);
    let chi12 = product(&g, &beta, 0, top_i);
    let psi1 = &product(&pt.phi_n, &alpha, -top_i, top_i) - &product(&f, &beta_bar, -top_i, top_i);
    let psi2 = &product(&pt.phi_n, &beta, -top_i, top_i) + &product(&f, &alpha_bar, -top_i, top_i);
    let psi_leakage = max_negative(&psi1).max(max_negative(&psi2));

    let trim = |p: &LaurentPoly| {
        let a = to_analytic(p, top);
        let scale = a.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        a.trimmed(4.0 * f64::EPSILON * scale)
    };
    let mut entries = [[trim(&chi11), trim(&chi12)], [trim(&psi1), trim(&psi2)]];

    // χ_n⁺(0) is lower triangular with a positive diagonal: [1,2] = g⁺(0)β(0) = 0
    // holds exactly, and Ψ₂(0) = f⁺(0)/α(0) is real up to rounding.
    let psi2_0 = entries[1][1].coeff(0);
    if !(psi2_0.re > 0.0) || psi2_0.im.abs() > 1e-9 * psi2_0.re {
        return Err(Error::AssemblyVerification {
            failed: vec![format!("Psi2(0) = {psi2_0} is not real positive")],
        });
    }
    let mut c22 = entries[1][1].coeffs().to_vec();
    c22[0] = C64::new(psi2_0.re, 0.0);
    entries[1][1] = AnalyticPoly::new(c22);

    let values = [
        [sample_analytic(&entries[0][0], grid)?, sample_analytic(&entries[0][1], grid)?],
        [sample_analytic(&entries[1][0], grid)?, sample_analytic(&entries[1][1], grid)?],
    ];

    let phi_n_values = sample(&pt.phi_n, grid)?;
    let alpha_values = sample(&alpha, grid)?;
    let beta_values = sample(&beta, grid)?;
    let diagnostics = DiagnosticsReport {
        residual_s_l1: matrix_l1_norm(&sub(&gram(&values), &t.density))?,
        residual_sn_l1: matrix_l1_norm(&sub(&gram(&values), &gram(&t.lower_factor(&phi_n_values))))?,
        psi_leakage,
        det_residual: det_residual(&values, &t.g_plus.grid_values, &t.f_plus.grid_values),
        unitarity_residual: u.unitarity_residual,
        eq17_margin: t.l2_norms_check().margin,
        eq17_slack: t.l2_norms_check().slack,
        eq26_margin: 1.0 - alpha_values.sup_abs().max(beta_values.sup_abs()),
        eq32_margin: t.inverse_norm_check().margin,
        eq32_slack: t.inverse_norm_check().slack,
        rounding_floor: 2.0 * PI * ROUNDING_REL * values.iter().flatten().map(GridFn::sup_abs).fold(1.0, f64::max),
    };

    let failed = failed_checks(&diagnostics, &values, t.s_l1.value, config);
    if !failed.is_empty() {
        return Err(Error::AssemblyVerification { failed });
    }
    Ok(ApproxSpectralFactor {
        n,
        entries,
        grid,
        values,
        completion: u.clone(),
        diagnostics,
        bound: error_bound(t, pt),
    })
}

fn failed_checks(
    d: &DiagnosticsReport,
    values: &GridMatrix,
    s_l1: f64,
    config: &FactorizeConfig,
) -> Vec<String> {
    let tol = &config.tolerances;
    let tol_unitary = config.completion.tol_unitary;
    let chi_sup = values.iter().flatten().map(GridFn::sup_abs).fold(1.0, f64::max);
    let mut failed = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failed.push(what);
        }
    };
    check(
        d.unitarity_residual <= tol_unitary,
        format!("unitarity residual {:e}", d.unitarity_residual),
    );
    check(d.eq26_margin >= -tol_unitary, format!("sup|alpha|, sup|beta| <= 1 (margin {:e})", d.eq26_margin));
    check(d.det_residual <= tol.det_rel, format!("det chi = g f (residual {:e})", d.det_residual));
    check(
        d.psi_leakage <= tol.leakage * chi_sup,
        format!("Psi analyticity (leakage {:e})", d.psi_leakage),
    );
    check(
        d.residual_sn_l1 <= tol.sn_rel * s_l1,
        format!("chi chi* = S_n (residual {:e})", d.residual_sn_l1),
    );
    check(d.eq17_margin >= -d.eq17_slack, format!("L2 norms vs |S|_L1 (margin {:e})", d.eq17_margin));
    check(d.eq32_margin >= -d.eq32_slack, format!("|1/f|^2 vs |S^-1|_L1 (margin {:e})", d.eq32_margin));
    failed
}

/// `M M*` pointwise.
pub fn gram(m: &GridMatrix) -> GridMatrix {
    let e = |i: usize, j: usize| &(&m[i][0] * &m[j][0].conj()) + &(&m[i][1] * &m[j][1].conj());
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn sub(x: &GridMatrix, y: &GridMatrix) -> GridMatrix {
    let e = |i: usize, j: usize| &x[i][j] - &y[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn det(m: &GridMatrix) -> GridFn {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

fn det_residual(values: &GridMatrix, g: &GridFn, f: &GridFn) -> f64 {
    let gf = g * f;
    let scale = gf.sup_abs();
    det(values).sup_abs_diff(&gf).expect("same grid") / scale
}

/// Runs the pipeline at truncation order `n` on an existing triangular factorization.
pub fn factorize_triangular(
    t: &TriangularFactorization,
    n: usize,
    config: &FactorizeConfig,
) -> Result<ApproxSpectralFactor> {
    let pt = truncate_phi(t, n)?;
    let sys = build_system(&pt.zeta, &t.f_plus.series, n)?;
    let u = solve_completion(&sys, &config.completion)?;
    assemble_chi(t, &pt, &u, config)
}

pub fn factorize(
    s: &HermitianTrigMatrix,
    n: usize,
    grid: CircleGrid,
    config: &FactorizeConfig,
) -> Result<ApproxSpectralFactor> {
    let t = triangular_factorize(s, grid, &config.triangular)?;
    factorize_triangular(&t, n, config)
}

/// Smallest `n <= n_max` whose bound is `<= target`, by doubling then bisection
/// (the bound is nonincreasing in `n`).
pub fn choose_order(t: &TriangularFactorization, target: f64, n_max: usize) -> Result<usize> {
    if !(target > 0.0) {
        return Err(Error::InvalidInput(format!("target must be positive, got {target}")));
    }
    let n_max = n_max.min(t.phi_band);
    let bound = |n: usize| -> Result<f64> { Ok(error_bound(t, &truncate_phi(t, n)?).value) };
    if bound(0)? <= target {
        return Ok(0);
    }
    let mut lo = 0;
    let mut hi = 1;
    loop {
        if hi >= n_max {
            hi = n_max;
            let best = bound(hi)?;
            if best > target {
                return Err(Error::UnreachableTarget { target, best, n_max });
            }
            break;
        }
        if bound(hi)? <= target {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Chooses the order for `target` with [`choose_order`] (capped at the stored
/// band of `φ`) and runs the pipeline there.
pub fn factorize_to_target(
    s: &HermitianTrigMatrix,
    target: f64,
    grid: CircleGrid,
    config: &FactorizeConfig,
) -> Result<ApproxSpectralFactor> {
    let t = triangular_factorize(s, grid, &config.triangular)?;
    let n_max = t.phi_band.min(grid.max_band().saturating_sub(t.order));
    let n = choose_order(&t, target, n_max)?;
    factorize_triangular(&t, n, config)
}
