//! Re-checks a stored factor against its density, pointwise on a grid,
//! without running the factorization pipeline.

use std::process::ExitCode;

use serde_json::json;
use specfact::circle_fourier::{matrix_l1_norm_estimate, sample_analytic, GridMatrix};
use specfact::factorize::ErrorBound;
use specfact::scalar_factor::{default_degree, scalar_spectral_factor};
use specfact::{CircleGrid, GridFn, C64};

use crate::commands::{read_density, read_factor, CliResult};
use crate::VerifyArgs;

/// Relative tolerance of the pointwise identities.
const REL_TOL: f64 = 1e-8;

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.value <= self.limit
    }
}

fn gram(m: &GridMatrix) -> GridMatrix {
    let entry = |i: usize, j: usize| {
        let x = &m[i][0] * &m[j][0].conj();
        let y = &m[i][1] * &m[j][1].conj();
        &x + &y
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

fn det(m: &GridMatrix) -> GridFn {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

fn choose_grid(requested: usize, factor_degree: usize, order: usize) -> CliResult<CircleGrid> {
    let needed = (2 * factor_degree.max(order) + 2).next_power_of_two();
    Ok(CircleGrid::new(requested.max(needed))?)
}

pub fn run(args: &VerifyArgs) -> CliResult<ExitCode> {
    let density = read_density(&args.density)?;
    let file = read_factor(&args.factor)?;
    let chi = file.polys()?;
    let degree = chi.iter().flatten().map(|p| p.degree()).max().unwrap_or(0);
    let grid = choose_grid(file.config.map_or(args.grid, |c| c.grid), degree, density.order())?;

    let s = density.sample(grid)?;
    let values = |i: usize, j: usize| sample_analytic(&chi[i][j], grid);
    let x: GridMatrix = [[values(0, 0)?, values(0, 1)?], [values(1, 0)?, values(1, 1)?]];
    let mut checks = Vec::new();

    // χ(0) lower triangular with a positive diagonal.
    let at0 = |i: usize, j: usize| chi[i][j].coeff(0);
    let scale = [at0(0, 0), at0(0, 1), at0(1, 0), at0(1, 1)].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let diag_ok = |c: C64| c.re > 0.0 && c.im.abs() <= 1e-12 * c.re;
    checks.push(Check {
        name: "normalization: chi(0) lower triangular, positive diagonal",
        value: if diag_ok(at0(0, 0)) && diag_ok(at0(1, 1)) { at0(0, 1).norm() } else { f64::INFINITY },
        limit: 1e-12 * scale,
    });

    // det χ is the outer factor of det S.
    let det_s = det(&s).map(|v| C64::new(v.re, 0.0));
    let outer = scalar_spectral_factor(&det_s, default_degree(&det_s), &Default::default())?;
    let det_x = det(&x);
    checks.push(Check {
        name: "determinant: det chi equals the outer factor of det S",
        value: det_x.sup_abs_diff(&outer.grid_values)?,
        limit: REL_TOL * outer.grid_values.sup_abs(),
    });

    // First row of χχ* reproduces S₁₁ (unit-modulus completion).
    let g = gram(&x);
    checks.push(Check {
        name: "unitarity: (chi chi*)_11 equals S_11",
        value: g[0][0].sup_abs_diff(&s[0][0])?,
        limit: REL_TOL * s[0][0].sup_abs(),
    });

    // χχ* = S up to the truncation of φ: the difference is bounded by
    // 2‖φ - φ_n‖₂‖S‖^{1/2} + ‖φ - φ_n‖₂².
    let s_l1 = matrix_l1_norm_estimate(&s)?.upper();
    let diff = [
        [&g[0][0] - &s[0][0], &g[0][1] - &s[0][1]],
        [&g[1][0] - &s[1][0], &g[1][1] - &s[1][1]],
    ];
    let tail = file.bound.map_or(0.0, |b| b.tail_l2);
    checks.push(Check {
        name: "reconstruction: |chi chi* - S|_L1 within the truncation allowance",
        value: matrix_l1_norm_estimate(&diff)?.lower(),
        limit: 2.0 * tail * s_l1.sqrt() + tail * tail + REL_TOL * s_l1,
    });

    if let Some(b) = file.bound {
        let formula = ErrorBound::formula(b.s_l1, b.s_inv_l1, b.tail_l2, b.tail_l1);
        checks.push(Check {
            name: "bound: value reproduces the formula from its components",
            value: (b.value - formula).abs(),
            limit: 1e-12 * b.value.abs(),
        });
    }

    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass()).map(|c| c.name).collect();
    let report = json!({
        "ok": failed.is_empty(),
        "grid": grid.size(),
        "checks": checks
            .iter()
            .map(|c| json!({ "check": c.name, "value": c.value, "limit": c.limit, "pass": c.pass() }))
            .collect::<Vec<_>>(),
        "failed": failed,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
