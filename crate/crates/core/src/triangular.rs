//! Lower-triangular factorization `S = L L*` with `L = (g⁺, 0; φ, f⁺)`, and
//! truncation of `φ` to the indices `k >= -n`.

use std::f64::consts::PI;

use crate::circle_fourier::{
    fft_inverse, lp_norm_estimate, matrix_l1_norm_estimate, sample, AnalyticPoly, CircleGrid,
    GridFn, GridMatrix, LaurentPoly, Norm, NormEstimate, C64,
};
use crate::error::{Error, Result};
use crate::scalar_factor::{default_degree, scalar_spectral_factor, ScalarFactor, ScalarFactorConfig};

/// Constant 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);

pub fn mat2_zero() -> Mat2 {
    [[ZERO; 2]; 2]
}

pub fn mat2_adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn mat2_max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Trigonometric matrix polynomial `S(z) = Σ_{k=-N}^{N} σ_k z^k` with
/// `σ_{-k} = σ_k^*`, so that `S(e^{it})` is Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTrigMatrix {
    order: usize,
    /// `σ_k` at index `k + order`.
    coeffs: Vec<Mat2>,
}

impl HermitianTrigMatrix {
    /// Absolute tolerance (scaled by `max(1, max |σ|)`) for the symmetry check.
    pub const HERMITIAN_TOL: f64 = 1e-12;

    /// `coeffs[i]` is `σ_{i - order}`. Near-symmetric input is symmetrized.
    pub fn new(order: usize, coeffs: Vec<Mat2>) -> Result<Self> {
        if coeffs.len() != 2 * order + 1 {
            return Err(Error::InvalidInput(format!(
                "order {order} needs {} coefficient matrices, got {}",
                2 * order + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().flatten().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let scale = coeffs.iter().map(mat2_max_abs).fold(1.0, f64::max);
        let mut sym = coeffs.clone();
        for k in 0..=order {
            let pos = order + k;
            let neg = order - k;
            let adj = mat2_adjoint(&coeffs[neg]);
            let mut dev = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    dev = dev.max((coeffs[pos][i][j] - adj[i][j]).norm());
                    sym[pos][i][j] = 0.5 * (coeffs[pos][i][j] + adj[i][j]);
                }
            }
            if dev > Self::HERMITIAN_TOL * scale {
                return Err(Error::NotHermitian {
                    k: k as i64,
                    deviation: dev,
                });
            }
            sym[neg] = mat2_adjoint(&sym[pos]);
        }
        Ok(Self { order, coeffs: sym })
    }

    /// Builds from sparse `(k, σ_k)` terms. A term at `k` implies `σ_{-k} = σ_k^*`;
    /// if both are given they must agree.
    pub fn from_terms(order: usize, terms: impl IntoIterator<Item = (i64, Mat2)>) -> Result<Self> {
        let mut slots: Vec<Option<Mat2>> = vec![None; 2 * order + 1];
        for (k, m) in terms {
            if k.unsigned_abs() as usize > order {
                return Err(Error::InvalidInput(format!(
                    "coefficient index {k} outside the declared order {order}"
                )));
            }
            let idx = (k + order as i64) as usize;
            if slots[idx].is_some() {
                return Err(Error::InvalidInput(format!("coefficient index {k} given twice")));
            }
            slots[idx] = Some(m);
        }
        let coeffs = (0..=2 * order)
            .map(|i| match (slots[i], slots[2 * order - i]) {
                (Some(m), _) => m,
                (None, Some(mirror)) => mat2_adjoint(&mirror),
                (None, None) => mat2_zero(),
            })
            .collect();
        Self::new(order, coeffs)
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        Self {
            order: 0,
            coeffs: vec![[[one, ZERO], [ZERO, one]]],
        }
    }

    /// Exact coefficient-level product `A A*` for an analytic matrix polynomial.
    pub fn from_factor(a: &[[AnalyticPoly; 2]; 2]) -> Self {
        let d = a.iter().flatten().map(|p| p.degree()).max().unwrap_or(0);
        let coeff_at = |k: usize| -> Mat2 {
            [
                [a[0][0].coeff(k), a[0][1].coeff(k)],
                [a[1][0].coeff(k), a[1][1].coeff(k)],
            ]
        };
        let mut coeffs = vec![mat2_zero(); 2 * d + 1];
        for m in 0..=d {
            let mut acc = mat2_zero();
            for k in 0..=d - m {
                let term = mat2_mul(&coeff_at(k + m), &mat2_adjoint(&coeff_at(k)));
                for i in 0..2 {
                    for j in 0..2 {
                        acc[i][j] += term[i][j];
                    }
                }
            }
            coeffs[d + m] = acc;
            coeffs[d - m] = mat2_adjoint(&acc);
        }
        // The diagonal of σ_0 is real by construction; clear rounding in the
        // imaginary parts so the symmetry is exact.
        coeffs[d][0][0].im = 0.0;
        coeffs[d][1][1].im = 0.0;
        let off = 0.5 * (coeffs[d][0][1] + coeffs[d][1][0].conj());
        coeffs[d][0][1] = off;
        coeffs[d][1][0] = off.conj();
        Self { order: d, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `σ_k`, zero outside `[-order, order]`.
    pub fn coeff(&self, k: i64) -> Mat2 {
        if k.unsigned_abs() as usize > self.order {
            mat2_zero()
        } else {
            self.coeffs[(k + self.order as i64) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Mat2)> + '_ {
        let order = self.order as i64;
        self.coeffs.iter().enumerate().map(move |(i, m)| (i as i64 - order, *m))
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::new(-(self.order as i64), self.coeffs.iter().map(|m| m[i][j]).collect())
    }

    pub fn sample(&self, grid: CircleGrid) -> Result<GridMatrix> {
        let s = |i, j| sample(&self.entry(i, j), grid);
        Ok([[s(0, 0)?, s(0, 1)?], [s(1, 0)?, s(1, 1)?]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TriangularConfig {
    pub scalar: ScalarFactorConfig,
    /// Stored band `[-K, N]` of `φ`; default `min(4(N + 64), grid/2 - 1)`.
    pub phi_band: Option<usize>,
}

impl TriangularConfig {
    pub fn resolve_phi_band(&self, order: usize, grid: CircleGrid) -> Result<usize> {
        match self.phi_band {
            Some(k) if k > grid.max_band() => Err(Error::InvalidInput(format!(
                "phi band {k} exceeds the grid resolution {}",
                grid.max_band()
            ))),
            Some(k) => Ok(k),
            None => Ok((4 * (order + 64)).min(grid.max_band())),
        }
    }
}

/// A one-sided inequality `lhs <= rhs` checked numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    /// `rhs - lhs`; negative means violated.
    pub margin: f64,
    /// Discretization and rounding allowance.
    pub slack: f64,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        self.margin >= -self.slack
    }
}

/// Rounding allowance for inequalities that can hold with equality.
pub const ROUNDING_REL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TriangularFactorization {
    pub grid: CircleGrid,
    pub order: usize,
    /// Outer factor of `a`.
    pub g_plus: ScalarFactor,
    /// Outer factor of `Δ/a`.
    pub f_plus: ScalarFactor,
    /// Coefficients of `φ = b̄/ḡ⁺` on the band `[-K, N]`.
    pub phi: LaurentPoly,
    pub phi_band: usize,
    /// Upper bound on `‖φ - φ_band‖_{L₂}` (the part below `-K`).
    pub phi_remainder: f64,
    /// `φ` evaluated pointwise on the grid.
    pub phi_values: GridFn,
    pub s_l1: NormEstimate,
    pub s_inv_l1: NormEstimate,
    /// `S` on the grid.
    pub density: GridMatrix,
    /// `det S = ac - |b|²` on the grid.
    pub delta: GridFn,
}

impl TriangularFactorization {
    /// `max{‖g⁺‖₂, ‖f⁺‖₂, ‖φ‖₂} <= ‖S‖_{L₁}^{1/2}`.
    pub fn l2_norms_check(&self) -> InequalityCheck {
        let g = lp_norm_estimate(&self.g_plus.grid_values, Norm::L2);
        let f = lp_norm_estimate(&self.f_plus.grid_values, Norm::L2);
        let phi = lp_norm_estimate(&self.phi_values, Norm::L2);
        let lhs = g.value.max(f.value).max(phi.value);
        let rhs = self.s_l1.value.sqrt();
        InequalityCheck {
            margin: rhs - lhs,
            slack: (self.s_l1.upper().sqrt() - rhs) + g.slack.max(f.slack).max(phi.slack) + ROUNDING_REL * rhs,
        }
    }

    /// `‖1/f⁺‖₂² <= ‖S⁻¹‖_{L₁}`.
    pub fn inverse_norm_check(&self) -> InequalityCheck {
        let inv = lp_norm_estimate(&self.f_plus.grid_values.map(|v| v.inv()), Norm::L2);
        let lhs = inv.value.powi(2);
        InequalityCheck {
            margin: self.s_inv_l1.value - lhs,
            slack: self.s_inv_l1.slack
                + (inv.upper().powi(2) - lhs)
                + ROUNDING_REL * self.s_inv_l1.value,
        }
    }

    /// `L = (g⁺, 0; φ, f⁺)` on the grid with `φ` replaced by `phi`.
    pub fn lower_factor(&self, phi: &GridFn) -> GridMatrix {
        let zero = GridFn::constant(self.grid, ZERO);
        [
            [self.g_plus.grid_values.clone(), zero],
            [phi.clone(), self.f_plus.grid_values.clone()],
        ]
    }
}

pub fn triangular_factorize(
    s: &HermitianTrigMatrix,
    grid: CircleGrid,
    config: &TriangularConfig,
) -> Result<TriangularFactorization> {
    let order = s.order();
    let phi_band = config.resolve_phi_band(order, grid)?;
    let density = s.sample(grid)?;
    let a = density[0][0].map(|v| C64::new(v.re, 0.0));
    let b = density[0][1].clone();
    let c = density[1][1].map(|v| C64::new(v.re, 0.0));
    let delta = GridFn::new(
        grid,
        a.values()
            .iter()
            .zip(c.values())
            .zip(b.values())
            .map(|((a, c), b)| C64::new(a.re * c.re - b.norm_sqr(), 0.0))
            .collect(),
    )?;
    check_floor("a", &a, config.scalar.floor)?;
    check_floor("det S", &delta, config.scalar.floor)?;

    // a is a trigonometric polynomial of degree <= order, so its outer factor is
    // a polynomial of the same degree.
    let g_plus = scalar_spectral_factor(&a, order, &config.scalar)?;
    let ratio = delta.zip_with(&a, |d, a| d / a)?;
    let f_plus = scalar_spectral_factor(&ratio, default_degree(&ratio), &config.scalar)?;

    // φ = b̄ · conj(1/g⁺) at coefficient level; indices below -K need h_i with
    // i > K - order, which the remainder bound covers.
    let h = g_plus.series.reciprocal_series(phi_band + order);
    let h_bar = LaurentPoly::new(0, h).conj_reflect();
    let b_poly = s.entry(0, 1);
    let phi = (&b_poly.conj_reflect() * &h_bar).restrict(-(phi_band as i64), order as i64);
    let b_sup: f64 = b_poly.coeffs().iter().map(|c| c.norm()).sum();
    let phi_remainder = if b_sup == 0.0 {
        0.0
    } else {
        b_sup * reciprocal_tail_l2(&g_plus.series, (phi_band + 1).saturating_sub(order))
    };
    let phi_values = b.zip_with(&g_plus.grid_values, |b, g| b.conj() / g.conj())?;

    let s_l1 = matrix_l1_norm_estimate(&density)?;
    let inverse = [
        [c.zip_with(&delta, |c, d| c / d)?, b.zip_with(&delta, |b, d| -b / d)?],
        [b.zip_with(&delta, |b, d| -b.conj() / d)?, a.zip_with(&delta, |a, d| a / d)?],
    ];
    let s_inv_l1 = matrix_l1_norm_estimate(&inverse)?;

    let t = TriangularFactorization {
        grid,
        order,
        g_plus,
        f_plus,
        phi,
        phi_band,
        phi_remainder,
        phi_values,
        s_l1,
        s_inv_l1,
        density,
        delta,
    };
    let norms = t.l2_norms_check();
    if !norms.holds() {
        return Err(Error::InternalConsistency {
            relation: "max(|g|, |f|, |phi|)_L2 <= |S|_L1^(1/2)",
            margin: norms.margin,
            slack: norms.slack,
        });
    }
    Ok(t)
}

fn check_floor(quantity: &'static str, w: &GridFn, floor_rel: f64) -> Result<()> {
    let max = w.values().iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let floor = floor_rel * max.max(0.0);
    match w
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.re > floor))
    {
        Some((node, v)) => Err(Error::NotPositive {
            quantity,
            node,
            value: v.re,
            floor,
        }),
        None => Ok(()),
    }
}

/// Upper bound on `‖Σ_{i >= start} h_i z^i‖_{L₂}` where `h = 1/g`.
///
/// Uses the Cauchy estimate `|h_i| <= r^{-i} / min_{|z|=r} |g|` on circles
/// `|z| = r > 1` on which `g` is certified zero-free with no zeros inside.
/// Returns infinity if no radius can be certified.
pub fn reciprocal_tail_l2(g: &AnalyticPoly, start: usize) -> f64 {
    let coeffs = g.coeffs();
    let g0 = coeffs[0];
    if coeffs[1..].iter().all(|c| c.norm() == 0.0) {
        return if start == 0 {
            (2.0 * PI).sqrt() / g0.norm()
        } else {
            0.0
        };
    }
    let mut radii: Vec<f64> = [16.0, 8.0, 4.0, 2.0].to_vec();
    radii.extend((1..=14).map(|j| 1.0 + 0.5f64.powi(j)));
    radii
        .into_iter()
        .filter_map(|r| {
            let m = certified_min_modulus(g, r)?;
            // ln of sqrt(2π Σ_{i>=start} r^{-2i}) / m
            let ln = 0.5 * (2.0 * PI).ln() - start as f64 * r.ln()
                - 0.5 * (1.0 - r.powi(-2)).ln()
                - m.ln();
            Some(ln.exp())
        })
        .fold(f64::INFINITY, f64::min)
}

/// Certified lower bound on `min_{|z|=r} |g(z)|`, provided `g` also has no zeros
/// inside `|z| < r` (zero winding number).
pub fn certified_min_modulus(g: &AnalyticPoly, r: f64) -> Option<f64> {
    let d = g.degree();
    let mut scaled = Vec::with_capacity(d + 1);
    let mut rk = 1.0;
    let mut deriv = 0.0;
    for (k, &c) in g.coeffs().iter().enumerate() {
        scaled.push(c * rk);
        if k > 0 {
            deriv += k as f64 * c.norm() * rk / r;
        }
        rk *= r;
    }
    if !rk.is_finite() {
        return None;
    }
    // Refine the sampling until the certificate closes.
    let mut q = (16 * (d + 1)).next_power_of_two().max(2048);
    while q <= 1 << 18 {
        let mut buf = vec![ZERO; q];
        buf[..=d].copy_from_slice(&scaled);
        fft_inverse(&mut buf);
        let min_sample = buf.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let step = 2.0 * PI * r / q as f64;
        let lower = min_sample - 0.5 * step * deriv;
        // Along each arc the argument moves by at most (arc length · sup|g'|) / min|g|.
        if lower > 0.0 && step * deriv < PI * lower {
            let winding: f64 = (0..q).map(|j| (buf[(j + 1) % q] / buf[j]).arg()).sum::<f64>() / (2.0 * PI);
            return (winding.round() == 0.0).then_some(lower);
        }
        if min_sample <= 0.0 {
            return None;
        }
        q *= 2;
    }
    None
}

/// `φ_n`: coefficients of `φ` with index `>= -n`, and the tail norms.
#[derive(Debug, Clone)]
pub struct PhiTruncation {
    pub n: usize,
    pub phi_n: LaurentPoly,
    /// Principal part of `φ_n` (indices `-n..=-1`).
    pub zeta: LaurentPoly,
    /// Upper estimate of `‖φ_n - φ‖_{L₂}`.
    pub tail_l2: f64,
    /// Upper estimate of `‖φ_n - φ‖_{L₁}`.
    pub tail_l1: f64,
}

pub fn truncate_phi(t: &TriangularFactorization, n: usize) -> Result<PhiTruncation> {
    if n > t.phi_band {
        return Err(Error::BandExhausted {
            requested: n,
            band: t.phi_band,
        });
    }
    let n_i = n as i64;
    let phi_n = t.phi.restrict(-n_i, t.phi.k_max());
    let zeta = if n == 0 {
        LaurentPoly::zero()
    } else {
        t.phi.restrict(-n_i, -1)
    };
    let dropped = t.phi.restrict(t.phi.k_min(), -n_i - 1);
    // Smallest terms first.
    let energy: f64 = dropped.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let remainder = t.phi_remainder;
    let tail_l2 = (2.0 * PI * energy + remainder * remainder).sqrt();
    let tail_l1 = if tail_l2 == 0.0 {
        0.0
    } else {
        let quad = lp_norm_estimate(&sample(&dropped, t.grid)?, Norm::L1);
        let root = (2.0 * PI).sqrt();
        (quad.upper() + root * remainder).min(root * tail_l2)
    };
    Ok(PhiTruncation {
        n,
        phi_n,
        zeta,
        tail_l2,
        tail_l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one() -> C64 {
        c(1.0, 0.0)
    }

    /// `S = A A*` with `A = [[1 + z/2, z], [0, 1]]`.
    fn pq_density() -> HermitianTrigMatrix {
        let a = [
            [AnalyticPoly::from_real(&[1.0, 0.5]), AnalyticPoly::from_real(&[0.0, 1.0])],
            [AnalyticPoly::zero(), AnalyticPoly::from_real(&[1.0])],
        ];
        HermitianTrigMatrix::from_factor(&a)
    }

    fn pq() -> (f64, f64) {
        let p = ((9.0 + 65f64.sqrt()) / 8.0).sqrt();
        (p, 0.5 / p)
    }

    #[test]
    fn from_terms_fills_mirror() {
        let s = HermitianTrigMatrix::from_terms(
            1,
            [(0, [[one(), c(0.0, 0.0)], [c(0.0, 0.0), one()]]), (1, [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]])],
        )
        .unwrap();
        assert_eq!(s.coeff(-1)[0][1], c(0.5, 0.0));
        assert_eq!(s.coeff(-1)[1][0], c(0.0, 0.0));
    }

    #[test]
    fn non_hermitian_terms_rejected() {
        let m = [[one(), c(0.0, 0.0)], [c(0.0, 0.0), one()]];
        let bad = [[one(), c(0.1, 0.0)], [c(0.0, 0.0), one()]];
        let err = HermitianTrigMatrix::from_terms(1, [(0, m), (1, bad), (-1, bad)]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { k: 1, .. }));
        let err = HermitianTrigMatrix::from_terms(0, [(0, bad)]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { k: 0, .. }));
    }

    #[test]
    fn identity_density() {
        let grid = CircleGrid::new(256).unwrap();
        let t = triangular_factorize(&HermitianTrigMatrix::identity(), grid, &Default::default()).unwrap();
        assert!(t.g_plus.series.max_abs_diff(&AnalyticPoly::constant(one())) < 1e-15);
        assert!(t.f_plus.series.max_abs_diff(&AnalyticPoly::constant(one())) < 1e-14);
        assert!(t.phi.is_zero());
        assert!((t.s_l1.value - 2.0 * PI).abs() < 1e-12);
        assert!((t.s_inv_l1.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn analytic_phi_density() {
        // A = [[1, 0], [z/2, 1]]
        let a = [
            [AnalyticPoly::from_real(&[1.0]), AnalyticPoly::zero()],
            [AnalyticPoly::from_real(&[0.0, 0.5]), AnalyticPoly::from_real(&[1.0])],
        ];
        let s = HermitianTrigMatrix::from_factor(&a);
        assert_eq!(s.coeff(1)[1][0], c(0.5, 0.0));
        assert_eq!(s.coeff(0)[1][1], c(1.25, 0.0));
        let grid = CircleGrid::new(512).unwrap();
        let t = triangular_factorize(&s, grid, &Default::default()).unwrap();
        assert!(t.g_plus.series.max_abs_diff(&AnalyticPoly::constant(one())) < 1e-14);
        assert!(t.f_plus.series.max_abs_diff(&AnalyticPoly::constant(one())) < 1e-12);
        assert!(t.phi.max_abs_diff(&LaurentPoly::monomial(1, c(0.5, 0.0))) < 1e-15);
        assert_eq!(t.phi_remainder, 0.0);
        let pt = truncate_phi(&t, 3).unwrap();
        assert!(pt.zeta.is_zero());
        assert_eq!(pt.tail_l2, 0.0);
        assert_eq!(pt.tail_l1, 0.0);
    }

    #[test]
    fn geometric_phi_density() {
        let s = pq_density();
        assert_eq!(s.coeff(0)[0][0], c(2.25, 0.0));
        assert_eq!(s.coeff(1)[0][1], one());
        let grid = CircleGrid::new(4096).unwrap();
        let t = triangular_factorize(&s, grid, &Default::default()).unwrap();
        let (p, q) = pq();
        assert!((t.g_plus.series.coeff(0).re - p).abs() < 1e-13);
        assert!((t.g_plus.series.coeff(1).re - q).abs() < 1e-13);
        assert_eq!(t.g_plus.series.degree(), 1);
        for k in 0..30 {
            let want = (1.0 / p) * (-q / p).powi(k);
            let got = t.phi.coeff(-(k as i64) - 1);
            assert!((got.re - want).abs() <= 1e-12 * want.abs(), "k={k}: {got} vs {want}");
        }
        assert!(t.phi.coeff(0).norm() < 1e-15 && t.phi.coeff(1).norm() < 1e-15);

        for n in [0usize, 1, 5, 10, 25, 40] {
            let pt = truncate_phi(&t, n).unwrap();
            let r2 = (q / p).powi(2);
            let want = (2.0 * PI / (p * p) * r2.powi(n as i32) / (1.0 - r2)).sqrt();
            assert!((pt.tail_l2 - want).abs() <= 1e-10 * want, "n={n}");
            assert!(pt.tail_l1 <= (2.0 * PI).sqrt() * pt.tail_l2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn single_negative_mode() {
        // a = 1, b = z, c = 2: φ = z̄.
        let z = c(0.0, 0.0);
        let s = HermitianTrigMatrix::from_terms(
            1,
            [(0, [[one(), z], [z, c(2.0, 0.0)]]), (1, [[z, one()], [z, z]])],
        )
        .unwrap();
        let grid = CircleGrid::new(1024).unwrap();
        let t = triangular_factorize(&s, grid, &Default::default()).unwrap();
        assert!(t.phi.max_abs_diff(&LaurentPoly::monomial(-1, one())) < 1e-14);
        let p0 = truncate_phi(&t, 0).unwrap();
        assert!(p0.zeta.is_zero());
        assert!((p0.tail_l2 - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((p0.tail_l1 - 2.0 * PI).abs() < 1e-9);
        let p1 = truncate_phi(&t, 1).unwrap();
        assert!(p1.zeta.max_abs_diff(&LaurentPoly::monomial(-1, one())) < 1e-14);
        assert!(p1.tail_l2 < 1e-14 && p1.tail_l1 < 1e-13);
    }

    #[test]
    fn band_exhaustion() {
        let grid = CircleGrid::new(256).unwrap();
        let cfg = TriangularConfig {
            phi_band: Some(10),
            ..Default::default()
        };
        let t = triangular_factorize(&pq_density(), grid, &cfg).unwrap();
        // Exact dropped tail: sqrt(2π Σ_{k>=10} |φ_{-k-1}|²) with φ_{-k-1} = (1/p)(-q/p)^k.
        let (p, q) = pq();
        let r2 = (q / p).powi(2);
        let exact = (2.0 * PI * r2.powi(10) / (p * p * (1.0 - r2))).sqrt();
        assert!(t.phi_remainder >= exact && t.phi_remainder < 100.0 * exact);
        assert!(matches!(
            truncate_phi(&t, 11),
            Err(Error::BandExhausted { requested: 11, band: 10 })
        ));
    }

    #[test]
    fn singular_density_rejected() {
        // det S = |1 - z|² vanishes at t = 0.
        let a = [
            [AnalyticPoly::from_real(&[1.0, -1.0]), AnalyticPoly::zero()],
            [AnalyticPoly::zero(), AnalyticPoly::from_real(&[1.0])],
        ];
        let s = HermitianTrigMatrix::from_factor(&a);
        let grid = CircleGrid::new(64).unwrap();
        let err = triangular_factorize(&s, grid, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::NotPositive { quantity: "a", node: 0, .. }), "{err:?}");
    }

    #[test]
    fn reconstruction_and_inequalities() {
        let grid = CircleGrid::new(2048).unwrap();
        let a = [
            [
                AnalyticPoly::new(vec![c(1.2, 0.0), c(0.3, 0.2), c(-0.1, 0.1)]),
                AnalyticPoly::new(vec![c(0.1, 0.4), c(0.2, 0.0)]),
            ],
            [
                AnalyticPoly::new(vec![c(0.5, -0.3), c(0.0, 0.3), c(0.2, 0.0)]),
                AnalyticPoly::new(vec![c(0.9, 0.1), c(-0.3, 0.0), c(0.05, 0.05)]),
            ],
        ];
        let s = HermitianTrigMatrix::from_factor(&a);
        let t = triangular_factorize(&s, grid, &Default::default()).unwrap();
        let l = t.lower_factor(&t.phi_values);
        for i in 0..2 {
            for j in 0..2 {
                let prod = &(&l[i][0] * &l[j][0].conj()) + &(&l[i][1] * &l[j][1].conj());
                let err = prod.sup_abs_diff(&t.density[i][j]).unwrap();
                assert!(err <= 1e-8, "({i},{j}) residual {err}");
            }
        }
        let c_check = &(&t.phi_values * &t.phi_values.conj())
            + &(&t.f_plus.grid_values * &t.f_plus.grid_values.conj());
        assert!(c_check.sup_abs_diff(&t.density[1][1]).unwrap() < 1e-9);
        assert!(t.l2_norms_check().holds());
        assert!(t.inverse_norm_check().holds());
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in 0..40 {
            let pt = truncate_phi(&t, n).unwrap();
            assert!(pt.tail_l2 <= prev.0);
            assert!(pt.tail_l1 <= prev.1 * (1.0 + 1e-9));
            prev = (pt.tail_l2, pt.tail_l1);
        }
    }

    #[test]
    fn cauchy_tail_bound_dominates_true_tail() {
        let g = AnalyticPoly::from_real(&[1.0, 0.8]);
        let h = g.reciprocal_series(400);
        for start in [0usize, 5, 20, 60] {
            let exact: f64 = (2.0 * PI * h[start..].iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
            let bound = reciprocal_tail_l2(&g, start);
            assert!(bound >= exact, "start {start}: {bound} < {exact}");
            assert!(bound.is_finite());
        }
    }
}
