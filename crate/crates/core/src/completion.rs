//! Polynomial unitary completion `(α, β)`.
//!
//! With `φ_n = ζ + (analytic part)`, the second row of
//! `(g⁺, 0; φ_n, f⁺) · (α, β; -β̄, ᾱ)` is
//!
//! ```text
//! Ψ₁ = φ_n α - f⁺ β̄,    Ψ₂ = φ_n β + f⁺ ᾱ.
//! ```
//!
//! Both must be analytic. Only `ζ` and `f_0..f_{n-1}` reach the indices
//! `-n..=-1`, so for `m = 1..=n`:
//!
//! ```text
//! Σ_k ζ_{-m-k} a_k - Σ_{j=0}^{n-m} f_j conj(b_{j+m}) = 0
//! Σ_k ζ_{-m-k} b_k + Σ_{j=0}^{n-m} f_j conj(a_{j+m}) = 0
//! ```
//!
//! The conjugates make this real-linear, so it is assembled over the real and
//! imaginary parts of `a_0..a_n, b_1..b_n` (`b_0 = 0` is eliminated).

use nalgebra::DMatrix;

use crate::circle_fourier::{AnalyticPoly, LaurentPoly, C64};
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionConfig {
    pub tol_unitary: f64,
    /// Singular values `<= rank_tol * σ_max` count as zero.
    pub rank_tol: f64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            tol_unitary: 1e-9,
            rank_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `Ψ₁ = φ_n α - f⁺ β̄`
    Psi1,
    /// `Ψ₂ = φ_n β + f⁺ ᾱ`
    Psi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// Which Fourier coefficient of which condition a row enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowSource {
    pub condition: Condition,
    /// Negative Fourier index `-m`.
    pub index: i64,
    pub part: Part,
}

#[derive(Debug, Clone)]
pub struct CompletionSystem {
    pub n: usize,
    /// `4n × (4n + 2)` real matrix.
    pub matrix: DMatrix<f64>,
    pub provenance: Vec<RowSource>,
}

impl CompletionSystem {
    pub fn unknown_count(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn equation_count(&self) -> usize {
        self.matrix.nrows()
    }

    /// Column of `Re a_k` (`Im a_k` is the next one).
    pub fn column_of_a(n: usize, k: usize) -> usize {
        debug_assert!(k <= n);
        2 * k
    }

    /// Column of `Re b_j`, `1 <= j <= n`.
    pub fn column_of_b(n: usize, j: usize) -> usize {
        debug_assert!((1..=n).contains(&j));
        2 * (n + 1) + 2 * (j - 1)
    }

    /// Row of `Re` of condition `cond` at index `-m`.
    pub fn row_of(cond: Condition, m: usize) -> usize {
        let offset = match cond {
            Condition::Psi1 => 0,
            Condition::Psi2 => 2,
        };
        4 * (m - 1) + offset
    }
}

/// Adds `w·x` (or `w·conj(x)`) for the complex unknown whose real part sits
/// in column `col`, to the equation pair starting at `row`.
fn add_term(mat: &mut DMatrix<f64>, row: usize, col: usize, w: C64, conjugated: bool) {
    let (wr, wi) = (w.re, w.im);
    if conjugated {
        mat[(row, col)] += wr;
        mat[(row, col + 1)] += wi;
        mat[(row + 1, col)] += wi;
        mat[(row + 1, col + 1)] -= wr;
    } else {
        mat[(row, col)] += wr;
        mat[(row, col + 1)] -= wi;
        mat[(row + 1, col)] += wi;
        mat[(row + 1, col + 1)] += wr;
    }
}

pub fn build_system(zeta: &LaurentPoly, f_plus: &AnalyticPoly, n: usize) -> Result<CompletionSystem> {
    if let Some((lo, hi)) = support(zeta) {
        if lo < -(n as i64) || hi > -1 {
            return Err(Error::BandMismatch { k_min: lo, k_max: hi, n });
        }
    }
    let rows = 4 * n;
    let cols = 4 * n + 2;
    let mut matrix = DMatrix::zeros(rows, cols);
    let mut provenance = Vec::with_capacity(rows);
    for m in 1..=n {
        let mi = m as i64;
        for cond in [Condition::Psi1, Condition::Psi2] {
            for part in [Part::Re, Part::Im] {
                provenance.push(RowSource {
                    condition: cond,
                    index: -mi,
                    part,
                });
            }
        }
        let r1 = CompletionSystem::row_of(Condition::Psi1, m);
        let r2 = CompletionSystem::row_of(Condition::Psi2, m);
        for k in 0..=n - m {
            let z = zeta.coeff(-mi - k as i64);
            if z != ZERO {
                add_term(&mut matrix, r1, CompletionSystem::column_of_a(n, k), z, false);
                if k >= 1 {
                    add_term(&mut matrix, r2, CompletionSystem::column_of_b(n, k), z, false);
                }
            }
        }
        for j in 0..=n - m {
            let f = f_plus.coeff(j);
            if f != ZERO {
                add_term(&mut matrix, r1, CompletionSystem::column_of_b(n, j + m), -f, true);
                add_term(&mut matrix, r2, CompletionSystem::column_of_a(n, j + m), f, true);
            }
        }
    }
    Ok(CompletionSystem { n, matrix, provenance })
}

/// Index range of the nonzero coefficients.
fn support(p: &LaurentPoly) -> Option<(i64, i64)> {
    let mut nz = p.terms().filter(|(_, c)| *c != ZERO).map(|(k, _)| k);
    let first = nz.next()?;
    let last = nz.last().unwrap_or(first);
    Some((first, last))
}

/// `(α_n⁺, β_n⁺)` with `|α|² + |β|² = 1` on the circle, `α(0) > 0`, `β(0) = 0`.
#[derive(Debug, Clone)]
pub struct UnitaryCompletion {
    pub alpha: AnalyticPoly,
    pub beta: AnalyticPoly,
    /// `max_m |Σ_k (a_{k+m} ā_k + b_{k+m} b̄_k) - δ_{m0}|`.
    pub unitarity_residual: f64,
}

impl UnitaryCompletion {
    pub fn identity() -> Self {
        Self {
            alpha: AnalyticPoly::constant(C64::new(1.0, 0.0)),
            beta: AnalyticPoly::zero(),
            unitarity_residual: 0.0,
        }
    }
}

/// Coefficient-level residual of `|α|² + |β|² = 1`.
pub fn unitarity_residual(alpha: &AnalyticPoly, beta: &AnalyticPoly) -> f64 {
    let len = alpha.coeffs().len().max(beta.coeffs().len());
    (0..len)
        .map(|m| {
            let mut acc = ZERO;
            for k in 0..len - m {
                acc += alpha.coeff(k + m) * alpha.coeff(k).conj()
                    + beta.coeff(k + m) * beta.coeff(k).conj();
            }
            if m == 0 {
                (acc - 1.0).norm()
            } else {
                acc.norm()
            }
        })
        .fold(0.0, f64::max)
}

/// Fixes the `(cα, c̄β)` freedom: unit coefficient norm and `a_0 > 0`.
pub fn gauge_fix(mut a: Vec<C64>, mut b: Vec<C64>) -> Result<(AnalyticPoly, AnalyticPoly)> {
    let norm = (a.iter().chain(&b).map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    if norm == 0.0 || a[0].norm() <= f64::EPSILON * norm {
        return Err(Error::NormalizationImpossible);
    }
    let phase = a[0].conj() / a[0].norm();
    for x in &mut a {
        *x *= phase / norm;
    }
    for x in &mut b {
        *x *= phase.conj() / norm;
    }
    a[0] = C64::new(a[0].re, 0.0);
    Ok((AnalyticPoly::new(a), AnalyticPoly::new(b)))
}

pub fn solve_completion(sys: &CompletionSystem, config: &CompletionConfig) -> Result<UnitaryCompletion> {
    let n = sys.n;
    let cols = sys.unknown_count();
    // Pad to square so the SVD returns a full set of right singular vectors.
    let mut padded = DMatrix::zeros(cols, cols);
    padded.rows_mut(0, sys.equation_count()).copy_from(&sys.matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = config.rank_tol * sigma_max;
    let kernel: Vec<usize> = (0..cols).filter(|&i| sigma[i] <= threshold).collect();
    if kernel.len() != 2 {
        let mut smallest: Vec<f64> = sigma.iter().copied().collect();
        smallest.sort_by(f64::total_cmp);
        smallest.truncate(4);
        return Err(Error::DegenerateKernel {
            dimension: kernel.len(),
            singular_values: smallest,
        });
    }

    let unpack = |row: usize| -> (Vec<C64>, Vec<C64>) {
        let v = v_t.row(row);
        let a = (0..=n)
            .map(|k| {
                let c = CompletionSystem::column_of_a(n, k);
                C64::new(v[c], v[c + 1])
            })
            .collect();
        let b = std::iter::once(ZERO)
            .chain((1..=n).map(|j| {
                let c = CompletionSystem::column_of_b(n, j);
                C64::new(v[c], v[c + 1])
            }))
            .collect();
        (a, b)
    };
    // The kernel is the orbit {c·v}; take the basis vector with the larger a_0.
    let (a, b) = kernel
        .iter()
        .map(|&row| unpack(row))
        .max_by(|x, y| x.0[0].norm().total_cmp(&y.0[0].norm()))
        .expect("kernel has two vectors");
    let (alpha, beta) = gauge_fix(a, b)?;
    let residual = unitarity_residual(&alpha, &beta);
    if !(residual <= config.tol_unitary) {
        return Err(Error::PrecisionFailure {
            residual,
            tol: config.tol_unitary,
        });
    }
    Ok(UnitaryCompletion {
        alpha,
        beta,
        unitarity_residual: residual,
    })
}
