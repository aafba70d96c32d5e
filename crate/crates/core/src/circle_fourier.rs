//! Functions on the unit circle: uniform grid samples, Laurent coefficient
//! sequences, the transforms between them, and the integral norms.
//!
//! Conventions: `c_k(f) = (1/2π) ∫ f(e^{it}) e^{-ikt} dt` and
//! `‖f‖_p^p = ∫_0^{2π} |f(e^{it})|^p dt` with no `1/2π` factor. Integrals are
//! evaluated with the rectangle rule on the grid nodes `t_j = 2πj/N`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place `X_k = Σ_j x_j e^{-2πi jk/N}`.
pub(crate) fn fft_forward(buf: &mut [C64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// In-place `x_j = Σ_k X_k e^{2πi jk/N}` (unnormalized).
pub(crate) fn fft_inverse(buf: &mut [C64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// Uniform grid `t_j = 2πj/N` on the circle, `N` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircleGrid {
    size: usize,
}

impl CircleGrid {
    pub const MIN_SIZE: usize = 4;

    pub fn new(size: usize) -> Result<Self> {
        if size < Self::MIN_SIZE || !size.is_power_of_two() {
            return Err(Error::InvalidGrid {
                size,
                min: Self::MIN_SIZE,
            });
        }
        Ok(Self { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    pub fn node(self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.size as f64
    }

    pub fn nodes(self) -> impl Iterator<Item = f64> {
        (0..self.size).map(move |j| self.node(j))
    }

    /// `e^{i t_j}`.
    pub fn point(self, j: usize) -> C64 {
        C64::from_polar(1.0, self.node(j))
    }

    /// Largest `|k|` that [`sample`] accepts on this grid.
    pub fn max_band(self) -> usize {
        self.size / 2 - 1
    }
}

/// Samples `f(e^{i t_j})` of a function on a [`CircleGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: CircleGrid,
    values: Vec<C64>,
}

impl GridFn {
    pub fn new(grid: CircleGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::InvalidInput(format!(
                "{} samples for a grid of size {}",
                values.len(),
                grid.size()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: CircleGrid, f: impl Fn(f64) -> C64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    pub fn constant(grid: CircleGrid, c: C64) -> Self {
        Self {
            grid,
            values: vec![c; grid.size()],
        }
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> GridFn {
        GridFn {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridFn, f: impl Fn(C64, C64) -> C64) -> Result<GridFn> {
        same_grid(self, other)?;
        Ok(GridFn {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }

    pub fn conj(&self) -> GridFn {
        self.map(|v| v.conj())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sup_abs_diff(&self, other: &GridFn) -> Result<f64> {
        same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }
}

fn same_grid(x: &GridFn, y: &GridFn) -> Result<()> {
    if x.grid != y.grid {
        return Err(Error::GridMismatch {
            left: x.grid.size(),
            right: y.grid.size(),
        });
    }
    Ok(())
}

macro_rules! gridfn_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&GridFn> for &GridFn {
            type Output = GridFn;

            /// Panics if the operands live on different grids.
            fn $method(self, rhs: &GridFn) -> GridFn {
                self.zip_with(rhs, |x, y| x $op y)
                    .expect("grid functions on different grids")
            }
        }
    };
}

gridfn_binop!(Add, add, +);
gridfn_binop!(Sub, sub, -);
gridfn_binop!(Mul, mul, *);

/// Finite Laurent sum `Σ_{k=k_min}^{k_max} c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    k_min: i64,
    coeffs: Vec<C64>,
}

impl LaurentPoly {
    /// An empty coefficient vector is read as the zero polynomial.
    pub fn new(k_min: i64, coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { k_min, coeffs }
    }

    pub fn zero() -> Self {
        Self {
            k_min: 0,
            coeffs: vec![ZERO],
        }
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Self {
            k_min: k,
            coeffs: vec![c],
        }
    }

    /// Builds from `(k, c_k)` pairs; repeated indices accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, C64)>) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self { k_min: lo, coeffs }
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `c_k`, zero outside the stored band.
    pub fn coeff(&self, k: i64) -> C64 {
        if k < self.k_min || k > self.k_max() {
            ZERO
        } else {
            self.coeffs[(k - self.k_min) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_min + i as i64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Largest `|k|` in the stored band.
    pub fn band_radius(&self) -> usize {
        self.k_min.unsigned_abs().max(self.k_max().unsigned_abs()) as usize
    }

    /// Coefficients with `lo <= k <= hi`; zero if the window misses the band.
    pub fn restrict(&self, lo: i64, hi: i64) -> LaurentPoly {
        let lo = lo.max(self.k_min);
        let hi = hi.min(self.k_max());
        if lo > hi {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            k_min: lo,
            coeffs: (lo..=hi).map(|k| self.coeff(k)).collect(),
        }
    }

    /// The function `conj(f(z))` on `|z| = 1`: coefficients `conj(c_{-k})`.
    pub fn conj_reflect(&self) -> LaurentPoly {
        LaurentPoly {
            k_min: -self.k_max(),
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> LaurentPoly {
        LaurentPoly {
            k_min: self.k_min,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let horner = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c);
        horner * z.powi(self.k_min as i32)
    }

    pub fn max_abs_diff(&self, other: &LaurentPoly) -> f64 {
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |c_k|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let lo = self.k_min.min(rhs.k_min);
        let hi = self.k_max().max(rhs.k_max());
        LaurentPoly {
            k_min: lo,
            coeffs: (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    // Index offsets add under convolution.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly {
            k_min: self.k_min + rhs.k_min,
            coeffs: convolve(&self.coeffs, &rhs.coeffs),
        }
    }
}

fn convolve(x: &[C64], y: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; x.len() + y.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == ZERO {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            out[i + j] += xi * yj;
        }
    }
    out
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms().filter(|(_, c)| *c != ZERO) {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})z^{k}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Polynomial `Σ_{k=0}^{d} c_k z^k`: the boundary values of a Hardy-space element.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPoly {
    coeffs: Vec<C64>,
}

impl AnalyticPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Keeps `c_0..c_degree`, padding with zeros if needed.
    pub fn truncate(&self, degree: usize) -> AnalyticPoly {
        AnalyticPoly {
            coeffs: (0..=degree).map(|k| self.coeff(k)).collect(),
        }
    }

    /// Drops trailing coefficients with modulus `<= tol`, keeping at least `c_0`.
    pub fn trimmed(&self, tol: f64) -> AnalyticPoly {
        let mut end = self.coeffs.len();
        while end > 1 && self.coeffs[end - 1].norm() <= tol {
            end -= 1;
        }
        AnalyticPoly {
            coeffs: self.coeffs[..end].to_vec(),
        }
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::new(0, self.coeffs.clone())
    }

    pub fn max_abs_diff(&self, other: &AnalyticPoly) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &AnalyticPoly) -> AnalyticPoly {
        AnalyticPoly {
            coeffs: convolve(&self.coeffs, &other.coeffs),
        }
    }

    /// Taylor coefficients `0..=degree` of `1/self`. Requires `c_0 != 0`.
    pub fn reciprocal_series(&self, degree: usize) -> Vec<C64> {
        let g0 = self.coeffs[0];
        let mut h = Vec::with_capacity(degree + 1);
        h.push(g0.inv());
        for k in 1..=degree {
            let mut acc = ZERO;
            for j in 1..=k.min(self.degree()) {
                acc += self.coeffs[j] * h[k - j];
            }
            h.push(-acc / g0);
        }
        h
    }
}

impl From<AnalyticPoly> for LaurentPoly {
    fn from(p: AnalyticPoly) -> Self {
        LaurentPoly::new(0, p.coeffs)
    }
}

/// Samples `p` on the grid.
pub fn sample(p: &LaurentPoly, grid: CircleGrid) -> Result<GridFn> {
    let n = grid.size();
    let required = 2 * p.band_radius() + 2;
    if n < required {
        return Err(Error::Aliasing {
            k_min: p.k_min(),
            k_max: p.k_max(),
            grid: n,
            required,
        });
    }
    let mut buf = vec![ZERO; n];
    for (k, c) in p.terms() {
        buf[k.rem_euclid(n as i64) as usize] += c;
    }
    fft_inverse(&mut buf);
    Ok(GridFn { grid, values: buf })
}

pub fn sample_analytic(p: &AnalyticPoly, grid: CircleGrid) -> Result<GridFn> {
    sample(&p.to_laurent(), grid)
}

/// Discrete Fourier coefficients `c_k`, `k_min <= k <= k_max`.
pub fn fourier_coeffs(f: &GridFn, k_min: i64, k_max: i64) -> Result<LaurentPoly> {
    if k_max < k_min {
        return Err(Error::InvalidInput(format!(
            "empty band [{k_min}, {k_max}]"
        )));
    }
    let n = f.grid.size();
    let requested = (k_max - k_min + 1) as usize;
    if requested > n {
        return Err(Error::Resolution { requested, grid: n });
    }
    let spectrum = spectrum(f);
    Ok(LaurentPoly::new(
        k_min,
        (k_min..=k_max)
            .map(|k| spectrum[k.rem_euclid(n as i64) as usize])
            .collect(),
    ))
}

/// All `N` discrete coefficients, stored at index `k mod N`.
pub(crate) fn spectrum(f: &GridFn) -> Vec<C64> {
    let n = f.grid.size() as f64;
    let mut buf = f.values.clone();
    fft_forward(&mut buf);
    for c in &mut buf {
        *c /= n;
    }
    buf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

/// `‖f‖_{L_p}` by the rectangle rule (no `1/2π` normalization).
pub fn lp_norm(f: &GridFn, p: Norm) -> f64 {
    rectangle_norm(f.values.iter().copied(), f.grid.size(), p)
}

fn rectangle_norm(values: impl Iterator<Item = C64>, n: usize, p: Norm) -> f64 {
    let h = 2.0 * PI / n as f64;
    match p {
        Norm::L1 => h * values.map(|v| v.norm()).sum::<f64>(),
        Norm::L2 => (h * values.map(|v| v.norm_sqr()).sum::<f64>()).sqrt(),
        Norm::Inf => values.map(|v| v.norm()).fold(0.0, f64::max),
    }
}

/// A grid quadrature together with its estimated discretization error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormEstimate {
    pub value: f64,
    pub slack: f64,
}

impl NormEstimate {
    pub fn upper(&self) -> f64 {
        self.value + self.slack
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.slack).max(0.0)
    }
}

/// [`lp_norm`] plus the slack `|Q_N - Q_{N/2}|`, where `Q_{N/2}` uses the even
/// nodes only.
pub fn lp_norm_estimate(f: &GridFn, p: Norm) -> NormEstimate {
    let n = f.grid.size();
    let fine = lp_norm(f, p);
    let coarse = rectangle_norm(f.values.iter().step_by(2).copied(), n / 2, p);
    NormEstimate {
        value: fine,
        slack: (fine - coarse).abs(),
    }
}

/// 2×2 matrix of grid functions, row-major.
pub type GridMatrix = [[GridFn; 2]; 2];

fn check_matrix_grid(m: &GridMatrix) -> Result<()> {
    for e in m.iter().flatten() {
        same_grid(&m[0][0], e)?;
    }
    Ok(())
}

/// Largest entrywise `L_1` norm.
pub fn matrix_l1_norm(m: &GridMatrix) -> Result<f64> {
    check_matrix_grid(m)?;
    Ok(m.iter()
        .flatten()
        .map(|e| lp_norm(e, Norm::L1))
        .fold(0.0, f64::max))
}

pub fn matrix_l1_norm_estimate(m: &GridMatrix) -> Result<NormEstimate> {
    check_matrix_grid(m)?;
    Ok(m.iter().flatten().map(|e| lp_norm_estimate(e, Norm::L1)).fold(
        NormEstimate::default(),
        |acc, e| NormEstimate {
            value: acc.value.max(e.value),
            slack: acc.slack.max(e.slack),
        },
    ))
}

/// Splits `f` into its `k >= 0` and `k < 0` parts.
pub fn riesz_split(f: &LaurentPoly) -> (AnalyticPoly, LaurentPoly) {
    let analytic = if f.k_max() >= 0 {
        AnalyticPoly::new((0..=f.k_max()).map(|k| f.coeff(k)).collect())
    } else {
        AnalyticPoly::zero()
    };
    let antianalytic = if f.k_min() < 0 {
        f.restrict(f.k_min(), -1)
    } else {
        LaurentPoly::zero()
    };
    (analytic, antianalytic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol
    }

    fn two_cos() -> LaurentPoly {
        LaurentPoly::from_terms([(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))])
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(CircleGrid::new(2).is_err());
        assert!(CircleGrid::new(12).is_err());
        assert!(CircleGrid::new(16).is_ok());
    }

    #[test]
    fn grid_nodes_are_uniform() {
        let g = CircleGrid::new(8).unwrap();
        for (j, t) in g.nodes().enumerate() {
            assert_eq!(t, 2.0 * PI * j as f64 / 8.0);
        }
    }

    #[test]
    fn sample_small_examples() {
        let g = CircleGrid::new(4).unwrap();
        let one = sample(&LaurentPoly::monomial(0, c(1.0, 0.0)), g).unwrap();
        assert!(one.values().iter().all(|&v| close(v, c(1.0, 0.0), 1e-15)));

        let z = sample(&LaurentPoly::monomial(1, c(1.0, 0.0)), g).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, w) in z.values().iter().zip(want) {
            assert!(close(*v, w, 1e-15), "{v} vs {w}");
        }

        let cos = sample(&two_cos(), g).unwrap();
        let want = [2.0, 0.0, -2.0, 0.0];
        for (v, w) in cos.values().iter().zip(want) {
            assert!(close(*v, c(w, 0.0), 1e-15));
        }
    }

    #[test]
    fn sample_detects_aliasing() {
        let g = CircleGrid::new(4).unwrap();
        let p = LaurentPoly::monomial(2, c(1.0, 0.0));
        assert!(matches!(sample(&p, g), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn fourier_coeffs_of_cosine_and_constant() {
        let g = CircleGrid::new(8).unwrap();
        let f = sample(&two_cos(), g).unwrap();
        let coeffs = fourier_coeffs(&f, -2, 2).unwrap();
        let want = [0.0, 1.0, 0.0, 1.0, 0.0];
        for (k, w) in (-2..=2).zip(want) {
            assert!(close(coeffs.coeff(k), c(w, 0.0), 1e-15));
        }

        let one = GridFn::constant(g, c(1.0, 0.0));
        let coeffs = fourier_coeffs(&one, -3, 3).unwrap();
        for k in -3..=3 {
            let w = if k == 0 { 1.0 } else { 0.0 };
            assert!(close(coeffs.coeff(k), c(w, 0.0), 1e-15));
        }
    }

    #[test]
    fn fourier_coeffs_resolution_error() {
        let g = CircleGrid::new(8).unwrap();
        let f = GridFn::constant(g, c(1.0, 0.0));
        assert!(matches!(
            fourier_coeffs(&f, -4, 4),
            Err(Error::Resolution { requested: 9, grid: 8 })
        ));
    }

    #[test]
    fn norm_examples() {
        let g = CircleGrid::new(64).unwrap();
        let one = GridFn::constant(g, c(1.0, 0.0));
        assert!((lp_norm(&one, Norm::L1) - 2.0 * PI).abs() < 1e-13);

        let z = sample(&LaurentPoly::monomial(1, c(1.0, 0.0)), g).unwrap();
        assert!((lp_norm(&z, Norm::L2) - (2.0 * PI).sqrt()).abs() < 1e-13);

        let p = LaurentPoly::from_terms([(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        let f = sample(&p, g).unwrap();
        assert!((lp_norm(&f, Norm::L2) - 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((lp_norm(&f, Norm::Inf) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn matrix_norm_examples() {
        let g = CircleGrid::new(4096).unwrap();
        let one = GridFn::constant(g, c(1.0, 0.0));
        let zero = GridFn::constant(g, c(0.0, 0.0));
        let id = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
        assert!((matrix_l1_norm(&id).unwrap() - 2.0 * PI).abs() < 1e-12);

        // ∫|2cos t| dt = 8; the rectangle rule hits the kinks exactly on this grid.
        let cos = sample(&two_cos(), g).unwrap();
        let m = [[zero.clone(), zero.clone()], [zero.clone(), cos]];
        let est = matrix_l1_norm_estimate(&m).unwrap();
        assert!((est.value - 8.0).abs() < 1e-5, "{}", est.value);
        assert!((est.value - 8.0).abs() <= est.slack + 1e-12);
    }

    #[test]
    fn matrix_norm_rejects_mixed_grids() {
        let g = CircleGrid::new(8).unwrap();
        let h = CircleGrid::new(16).unwrap();
        let a = GridFn::constant(g, c(1.0, 0.0));
        let b = GridFn::constant(h, c(1.0, 0.0));
        let m = [[a.clone(), a.clone()], [a, b]];
        assert!(matches!(matrix_l1_norm(&m), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn riesz_split_examples() {
        let (an, anti) = riesz_split(&two_cos());
        assert_eq!(an.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(anti, LaurentPoly::monomial(-1, c(1.0, 0.0)));

        let p = LaurentPoly::new(0, vec![c(1.0, 0.0), c(2.0, 1.0)]);
        let (an, anti) = riesz_split(&p);
        assert_eq!(an.coeffs(), p.coeffs());
        assert!(anti.is_zero());

        let f = LaurentPoly::from_terms([(-2, c(3.0, 0.0)), (0, c(5.0, 0.0)), (3, c(1.0, 0.0))]);
        let (an, anti) = riesz_split(&f);
        assert_eq!(an, AnalyticPoly::from_real(&[5.0, 0.0, 0.0, 1.0]));
        assert_eq!(anti, LaurentPoly::new(-2, vec![c(3.0, 0.0), c(0.0, 0.0)]));
    }

    #[test]
    fn reciprocal_series_of_linear_factor() {
        let g = AnalyticPoly::from_real(&[2.0, 1.0]);
        let h = g.reciprocal_series(10);
        for (k, hk) in h.iter().enumerate() {
            let want = 0.5 * (-0.5f64).powi(k as i32);
            assert!((hk.re - want).abs() <= 1e-16 * want.abs().max(1e-300) * 16.0);
        }
    }

    fn laurent_strategy(radius: i64) -> impl Strategy<Value = LaurentPoly> {
        let len = (2 * radius + 1) as usize;
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
            .prop_map(move |v| LaurentPoly::new(-radius, v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn round_trip_recovers_coefficients(p in laurent_strategy(5)) {
            let g = CircleGrid::new(32).unwrap();
            let back = fourier_coeffs(&sample(&p, g).unwrap(), -5, 5).unwrap();
            prop_assert!(back.max_abs_diff(&p) <= 1e-12);
        }

        #[test]
        fn parseval_holds(p in laurent_strategy(7), log_n in 4u32..9) {
            let g = CircleGrid::new(1 << log_n).unwrap();
            let f = sample(&p, g).unwrap();
            let lhs = lp_norm(&f, Norm::L2).powi(2);
            let rhs = 2.0 * PI * p.energy();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
        }

        #[test]
        fn riesz_parts_sum_exactly(p in laurent_strategy(4), shift in -6i64..6) {
            let p = LaurentPoly::new(p.k_min() + shift, p.coeffs().to_vec());
            let (an, anti) = riesz_split(&p);
            let sum = &an.to_laurent() + &anti;
            prop_assert_eq!(sum.max_abs_diff(&p), 0.0);
        }

        #[test]
        fn norms_monotone_in_p(p in laurent_strategy(3)) {
            let g = CircleGrid::new(64).unwrap();
            let f = sample(&p, g).unwrap();
            let l1 = lp_norm(&f, Norm::L1) / (2.0 * PI);
            let l2 = (lp_norm(&f, Norm::L2).powi(2) / (2.0 * PI)).sqrt();
            let linf = lp_norm(&f, Norm::Inf);
            prop_assert!(l1 <= l2 * (1.0 + 1e-12) + 1e-15);
            prop_assert!(l2 <= linf * (1.0 + 1e-12) + 1e-15);
        }
    }
}
