//! Test instances with known exact factors, and independent oracles.
//!
//! Nothing here reuses the system assembly or the null-space solver of
//! [`crate::completion`]; the brute-force completion extracts the conditions
//! numerically from sampled products and solves them by Gaussian elimination.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle_fourier::{
    fourier_coeffs, matrix_l1_norm_estimate, sample, sample_analytic, AnalyticPoly, CircleGrid,
    LaurentPoly, NormEstimate, C64,
};
use crate::completion::{gauge_fix, unitarity_residual, UnitaryCompletion};
use crate::error::{Error, Result};
use crate::factorize::ApproxSpectralFactor;
use crate::triangular::{mat2_mul, HermitianTrigMatrix, Mat2};

pub type PolyMatrix = [[AnalyticPoly; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);

/// Density `S = A A*` with its normalized exact factor `A`.
#[derive(Debug, Clone)]
pub struct PolynomialInstance {
    pub exact_factor: PolyMatrix,
    pub density: HermitianTrigMatrix,
    pub seed: u64,
    pub degree: usize,
}

fn poly_sub(x: &AnalyticPoly, y: &AnalyticPoly) -> AnalyticPoly {
    let len = x.coeffs().len().max(y.coeffs().len());
    AnalyticPoly::new((0..len).map(|k| x.coeff(k) - y.coeff(k)).collect())
}

fn poly_add(x: &AnalyticPoly, y: &AnalyticPoly) -> AnalyticPoly {
    let len = x.coeffs().len().max(y.coeffs().len());
    AnalyticPoly::new((0..len).map(|k| x.coeff(k) + y.coeff(k)).collect())
}

fn poly_scale(x: &AnalyticPoly, s: C64) -> AnalyticPoly {
    AnalyticPoly::new(x.coeffs().iter().map(|&c| c * s).collect())
}

pub fn poly_det(a: &PolyMatrix) -> AnalyticPoly {
    poly_sub(&a[0][0].mul(&a[1][1]), &a[0][1].mul(&a[1][0]))
}

/// `A(0)`.
pub fn constant_term(a: &PolyMatrix) -> Mat2 {
    [
        [a[0][0].coeff(0), a[0][1].coeff(0)],
        [a[1][0].coeff(0), a[1][1].coeff(0)],
    ]
}

/// `c · Π (1 - z/ρ_i)` with `|ρ_i|` uniform in `[1.1, 3]` and `c` in `[0.5, 1.5]`.
pub fn random_outer_poly(rng: &mut impl Rng, degree: usize) -> AnalyticPoly {
    let mut p = AnalyticPoly::constant(C64::new(rng.random_range(0.5..1.5), 0.0));
    for _ in 0..degree {
        let root = C64::from_polar(rng.random_range(1.1..3.0), rng.random_range(0.0..2.0 * PI));
        p = p.mul(&AnalyticPoly::new(vec![C64::new(1.0, 0.0), -root.inv()]));
    }
    p
}

fn random_unitary(rng: &mut impl Rng) -> Mat2 {
    let theta: f64 = rng.random_range(0.0..PI / 2.0);
    let a = C64::from_polar(theta.cos(), rng.random_range(0.0..2.0 * PI));
    let b = C64::from_polar(theta.sin(), rng.random_range(0.0..2.0 * PI));
    let ph = C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    [[ph * a, ph * b], [-ph * b.conj(), ph * a.conj()]]
}

/// `U diag(s1, s2) V` with singular values in `[0.5, 1.5]`.
fn random_well_conditioned(rng: &mut impl Rng) -> Mat2 {
    let u = random_unitary(rng);
    let v = random_unitary(rng);
    let s = [[C64::new(rng.random_range(0.5..1.5), 0.0), ZERO], [ZERO, C64::new(rng.random_range(0.5..1.5), 0.0)]];
    mat2_mul(&mat2_mul(&u, &s), &v)
}

/// `A = B diag(p, q) C`, normalized so `A(0)` is lower triangular with a
/// positive diagonal. Deterministic in `seed`.
pub fn gen_polynomial_instance(degree: usize, seed: u64) -> PolynomialInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_outer_poly(&mut rng, degree);
    let q_degree = rng.random_range(0..=degree);
    let q = random_outer_poly(&mut rng, q_degree);
    let b = random_well_conditioned(&mut rng);
    let c = random_well_conditioned(&mut rng);
    let entry = |i: usize, j: usize| {
        poly_add(&poly_scale(&p, b[i][0] * c[0][j]), &poly_scale(&q, b[i][1] * c[1][j]))
    };
    let a = [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]];
    let a = normalize_exact_factor(&a).expect("B, C and p(0), q(0) are invertible");
    let det = poly_det(&a);
    assert_eq!(zero_count_inside(&det, 1.0, 4096), Some(0), "det A has zeros in the disk");
    assert_eq!(zero_count_inside(&det, 1.0 - 1e-3, 4096), Some(0), "det A has zeros in the disk");
    PolynomialInstance {
        density: HermitianTrigMatrix::from_factor(&a),
        exact_factor: a,
        seed,
        degree,
    }
}

/// `S = A A*` with `A = [[1 + z/2, z], [0, 1]]`: `a = 9/4 + cos t`, `b = z`, `c = 1`.
/// Its `φ` is a geometric series in `z̄` with ratio `-q/p`, where
/// `p + qz` is the outer factor of `9/4 + cos t`.
pub fn pq_instance() -> PolynomialInstance {
    let a = [
        [AnalyticPoly::from_real(&[1.0, 0.5]), AnalyticPoly::from_real(&[0.0, 1.0])],
        [AnalyticPoly::zero(), AnalyticPoly::from_real(&[1.0])],
    ];
    PolynomialInstance {
        density: HermitianTrigMatrix::from_factor(&a),
        exact_factor: a,
        seed: 0,
        degree: 1,
    }
}

/// `(p, q)` with `|p + q e^{it}|² = 9/4 + cos t`, `p > q > 0`.
pub fn pq_constants() -> (f64, f64) {
    let p = ((9.0 + 65f64.sqrt()) / 8.0).sqrt();
    (p, 0.5 / p)
}

/// Number of zeros of `p` inside `|z| < radius`, by the argument principle on
/// `samples` points. `None` if `p` (nearly) vanishes on the circle.
pub fn zero_count_inside(p: &AnalyticPoly, radius: f64, samples: usize) -> Option<i64> {
    let vals: Vec<C64> = (0..samples)
        .map(|j| p.eval(C64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64)))
        .collect();
    let scale = p.coeffs().iter().map(|c| c.norm()).sum::<f64>();
    if vals.iter().any(|v| v.norm() <= 1e-12 * scale) {
        return None;
    }
    let total: f64 = (0..samples).map(|j| (vals[(j + 1) % samples] / vals[j]).arg()).sum();
    Some((total / (2.0 * PI)).round() as i64)
}

/// Right-multiplies by the constant unitary that makes `A(0)` lower triangular
/// with a real positive diagonal.
pub fn normalize_exact_factor(a: &PolyMatrix) -> Result<PolyMatrix> {
    let m = constant_term(a);
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let row = (m[0][0].norm_sqr() + m[0][1].norm_sqr()).sqrt();
    let scale = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if row == 0.0 || d.norm() <= 1e-14 * scale * scale {
        return Err(Error::SingularLeading);
    }
    // Columns: conj(first row)/|row|, and its orthogonal complement rotated so
    // that the (2,2) entry of A(0)U equals |det|/|row|.
    let ph = d.conj() / d.norm();
    let u = [
        [m[0][0].conj() / row, -m[0][1] / row * ph],
        [m[0][1].conj() / row, m[0][0] / row * ph],
    ];
    let mul = |i: usize, j: usize| poly_add(&poly_scale(&a[i][0], u[0][j]), &poly_scale(&a[i][1], u[1][j]));
    let mut out = [[mul(0, 0), mul(0, 1)], [mul(1, 0), mul(1, 1)]];
    // Clear rounding in the normalized constant terms.
    let clean = |p: &AnalyticPoly, c0: C64| {
        let mut c = p.coeffs().to_vec();
        c[0] = c0;
        AnalyticPoly::new(c)
    };
    out[0][0] = clean(&out[0][0], C64::new(row, 0.0));
    out[0][1] = clean(&out[0][1], ZERO);
    out[1][1] = clean(&out[1][1], C64::new(d.norm() / row, 0.0));
    Ok(out)
}

fn check_normalized(m: &Mat2, what: &str) -> Result<()> {
    let scale = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    if m[0][1].norm() > tol
        || !(m[0][0].re > 0.0)
        || !(m[1][1].re > 0.0)
        || m[0][0].im.abs() > tol
        || m[1][1].im.abs() > tol
    {
        return Err(Error::NotNormalized(format!("{what}(0) = {m:?}")));
    }
    Ok(())
}

/// `‖χ_n - A‖_{L₁}` (largest entrywise norm) with its quadrature slack.
pub fn compare_factors(x: &ApproxSpectralFactor, a: &PolyMatrix) -> Result<NormEstimate> {
    check_normalized(&x.at_origin(), "chi_n")?;
    check_normalized(&constant_term(a), "A")?;
    let grid = x.grid;
    let diff = |i: usize, j: usize| -> Result<_> { Ok(&x.values[i][j] - &sample_analytic(&a[i][j], grid)?) };
    matrix_l1_norm_estimate(&[[diff(0, 0)?, diff(0, 1)?], [diff(1, 0)?, diff(1, 1)?]])
}

/// Random `(ζ, f⁺)`: `ζ` on `[-n, -1]`, `f⁺` of degree `n` with `f_0 > 0`.
pub fn random_completion_input(n: usize, seed: u64) -> (LaurentPoly, AnalyticPoly) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cplx = |s: f64| C64::new(rng.random_range(-s..s), rng.random_range(-s..s));
    let zeta = LaurentPoly::new(-(n as i64), (0..n).map(|_| cplx(1.0)).collect());
    let mut f: Vec<C64> = (0..=n).map(|_| cplx(0.3)).collect();
    f[0] = C64::new(1.0 + f[0].re.abs(), 0.0);
    (zeta, AnalyticPoly::new(f))
}

/// Negative coefficients `-1..=-n` of `Ψ₁ = ζα - f⁺β̄` and `Ψ₂ = ζβ + f⁺ᾱ`,
/// read off a sampled product.
fn psi_negative_coeffs(
    zeta: &LaurentPoly,
    f_plus: &AnalyticPoly,
    a: &[C64],
    b: &[C64],
    n: usize,
) -> Vec<(C64, C64)> {
    let alpha = LaurentPoly::new(0, a.to_vec());
    let beta = LaurentPoly::new(0, b.to_vec());
    // Terms of f⁺ beyond degree n cannot reach negative indices.
    let f = f_plus.truncate(n).to_laurent();
    let psi1 = &(zeta * &alpha) - &(&f * &beta.conj_reflect());
    let psi2 = &(zeta * &beta) + &(&f * &alpha.conj_reflect());
    let size = (4 * (n + 1)).next_power_of_two().max(8);
    let grid = CircleGrid::new(size).expect("power of two");
    let neg = |p: &LaurentPoly| {
        let vals = sample(p, grid).expect("grid wide enough");
        fourier_coeffs(&vals, -(n as i64), -1).expect("band fits")
    };
    let (c1, c2) = (neg(&psi1), neg(&psi2));
    (1..=n as i64).map(|m| (c1.coeff(-m), c2.coeff(-m))).collect()
}

/// Real unknowns: `a_0..a_n` then `b_0..b_n`, each as (re, im).
fn unknown_vector(n: usize, index: usize) -> (Vec<C64>, Vec<C64>) {
    let mut a = vec![ZERO; n + 1];
    let mut b = vec![ZERO; n + 1];
    let slot = index / 2;
    let unit = if index.is_multiple_of(2) { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
    if slot <= n {
        a[slot] = unit;
    } else {
        b[slot - n - 1] = unit;
    }
    (a, b)
}

/// Column-by-column image of the condition map on all `4n + 4` real unknowns
/// (including `b_0`), rows ordered `Re Ψ₁, Im Ψ₁, Re Ψ₂, Im Ψ₂` per index.
fn full_condition_matrix(zeta: &LaurentPoly, f_plus: &AnalyticPoly, n: usize) -> DMatrix<f64> {
    let cols = 4 * n + 4;
    let mut mat = DMatrix::zeros(4 * n, cols);
    for col in 0..cols {
        let (a, b) = unknown_vector(n, col);
        for (m, (e1, e2)) in psi_negative_coeffs(zeta, f_plus, &a, &b, n).into_iter().enumerate() {
            mat[(4 * m, col)] = e1.re;
            mat[(4 * m + 1, col)] = e1.im;
            mat[(4 * m + 2, col)] = e2.re;
            mat[(4 * m + 3, col)] = e2.im;
        }
    }
    mat
}

/// The condition matrix in the column layout of
/// [`crate::completion::CompletionSystem`] (`b_0` dropped).
pub fn brute_force_system(zeta: &LaurentPoly, f_plus: &AnalyticPoly, n: usize) -> DMatrix<f64> {
    let full = full_condition_matrix(zeta, f_plus, n);
    let keep: Vec<usize> = (0..2 * (n + 1)).chain(2 * (n + 2)..4 * n + 4).collect();
    full.select_columns(keep.iter())
}

/// Basis of the null space by Gauss-Jordan elimination with full pivoting.
pub fn null_space(mat: &DMatrix<f64>, rel_tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = mat.shape();
    let mut m = mat.clone();
    let tol = rel_tol * m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best = (rank, rank, 0.0);
        for i in rank..rows {
            for j in rank..cols {
                if m[(i, j)].abs() > best.2 {
                    best = (i, j, m[(i, j)].abs());
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        m.swap_rows(rank, best.0);
        m.swap_columns(rank, best.1);
        col_perm.swap(rank, best.1);
        let pivot = m[(rank, rank)];
        for j in 0..cols {
            m[(rank, j)] /= pivot;
        }
        for i in 0..rows {
            if i != rank {
                let factor = m[(i, rank)];
                if factor != 0.0 {
                    for j in 0..cols {
                        let v = m[(rank, j)];
                        m[(i, j)] -= factor * v;
                    }
                }
            }
        }
        rank += 1;
    }
    // Reduced form [I F; 0 0] in permuted coordinates: kernel vectors (-F e_j, e_j).
    (rank..cols)
        .map(|free| {
            let mut v = vec![0.0; cols];
            v[col_perm[free]] = 1.0;
            for r in 0..rank {
                v[col_perm[r]] = -m[(r, free)];
            }
            v
        })
        .collect()
}

/// Independent oracle for [`crate::completion::solve_completion`], for small `n`.
pub fn brute_force_completion(zeta: &LaurentPoly, f_plus: &AnalyticPoly, n: usize) -> Result<UnitaryCompletion> {
    let conditions = full_condition_matrix(zeta, f_plus, n);
    // Append b_0 = 0 as two extra real equations.
    let cols = 4 * n + 4;
    let mut system = DMatrix::zeros(4 * n + 2, cols);
    system.rows_mut(0, 4 * n).copy_from(&conditions);
    let b0 = 2 * (n + 1);
    system[(4 * n, b0)] = 1.0;
    system[(4 * n + 1, b0 + 1)] = 1.0;
    let kernel = null_space(&system, 1e-10);
    if kernel.len() != 2 {
        return Err(Error::DegenerateKernel {
            dimension: kernel.len(),
            singular_values: Vec::new(),
        });
    }
    let split = |v: &[f64]| -> (Vec<C64>, Vec<C64>) {
        let c = |i: usize| C64::new(v[2 * i], v[2 * i + 1]);
        ((0..=n).map(c).collect(), (n + 1..=2 * n + 1).map(c).collect())
    };
    let (a, b) = kernel
        .iter()
        .map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (split(v), norm)
        })
        .max_by(|x, y| (x.0 .0[0].norm() / x.1).total_cmp(&(y.0 .0[0].norm() / y.1)))
        .map(|(ab, _)| ab)
        .expect("two kernel vectors");
    let (alpha, beta) = gauge_fix(a, b)?;
    let residual = unitarity_residual(&alpha, &beta);
    Ok(UnitaryCompletion {
        alpha,
        beta,
        unitarity_residual: residual,
    })
}
