//! JSON interchange formats for densities and factors.

use serde::{Deserialize, Serialize};

use crate::circle_fourier::{AnalyticPoly, C64};
use crate::error::{Error, Result};
use crate::factorize::{ApproxSpectralFactor, DiagnosticsReport, ErrorBound, FactorizeConfig, Tolerances};
use crate::testkit::{PolyMatrix, PolynomialInstance};
use crate::triangular::{HermitianTrigMatrix, Mat2};

pub const DENSITY_FORMAT: &str = "trig-poly-2x2";
pub const FACTOR_FORMAT: &str = "spectral-factor-2x2";

pub type Pair = [f64; 2];

fn to_pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn from_pair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn check_format(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::InvalidInput(format!(
            "format is {found:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTerm {
    pub k: i64,
    pub m: [[Pair; 2]; 2],
}

/// `S(z) = Σ σ_k z^k`; each stored `σ_k` implies `σ_{-k} = σ_k^*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub format: String,
    pub order: usize,
    pub coeffs: Vec<DensityTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DensityFile {
    /// Stores `σ_k` for `k >= 0` only.
    pub fn from_density(s: &HermitianTrigMatrix) -> Self {
        let coeffs = (0..=s.order() as i64)
            .map(|k| {
                let m = s.coeff(k);
                DensityTerm {
                    k,
                    m: m.map(|row| row.map(to_pair)),
                }
            })
            .collect();
        Self {
            format: DENSITY_FORMAT.into(),
            order: s.order(),
            coeffs,
            seed: None,
        }
    }

    pub fn to_density(&self) -> Result<HermitianTrigMatrix> {
        check_format(&self.format, DENSITY_FORMAT)?;
        let terms = self.coeffs.iter().map(|t| (t.k, t.m.map(|row| row.map(from_pair))));
        HermitianTrigMatrix::from_terms(self.order, terms.collect::<Vec<(i64, Mat2)>>())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("density file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite numbers serialize")
    }
}

/// Settings a factor was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub grid: usize,
    pub phi_band: usize,
    pub tol_unitary: f64,
    pub rank_tol: f64,
    pub floor: f64,
    pub tol_factor: f64,
    pub tolerances: Tolerances,
}

impl ConfigRecord {
    pub fn new(grid: usize, phi_band: usize, config: &FactorizeConfig) -> Self {
        Self {
            grid,
            phi_band,
            tol_unitary: config.completion.tol_unitary,
            rank_tol: config.completion.rank_tol,
            floor: config.triangular.scalar.floor,
            tol_factor: config.triangular.scalar.tol_factor,
            tolerances: config.tolerances,
        }
    }
}

/// A 2×2 analytic matrix polynomial; entries are coefficient arrays by
/// ascending power. Exact factors written by the generator leave `n`,
/// `bound`, `diagnostics` and `config` null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorFile {
    pub format: String,
    pub n: Option<usize>,
    pub entries: [[Vec<Pair>; 2]; 2],
    pub bound: Option<ErrorBound>,
    pub diagnostics: Option<DiagnosticsReport>,
    pub config: Option<ConfigRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

fn entries_of(a: &PolyMatrix) -> [[Vec<Pair>; 2]; 2] {
    let e = |p: &AnalyticPoly| p.coeffs().iter().copied().map(to_pair).collect();
    [[e(&a[0][0]), e(&a[0][1])], [e(&a[1][0]), e(&a[1][1])]]
}

impl FactorFile {
    pub fn from_factor(x: &ApproxSpectralFactor, config: ConfigRecord) -> Self {
        Self {
            format: FACTOR_FORMAT.into(),
            n: Some(x.n),
            entries: entries_of(&x.entries),
            bound: Some(x.bound),
            diagnostics: Some(x.diagnostics),
            config: Some(config),
            seed: None,
            degree: None,
        }
    }

    pub fn from_instance(inst: &PolynomialInstance) -> Self {
        Self {
            format: FACTOR_FORMAT.into(),
            n: None,
            entries: entries_of(&inst.exact_factor),
            bound: None,
            diagnostics: None,
            config: None,
            seed: Some(inst.seed),
            degree: Some(inst.degree),
        }
    }

    pub fn polys(&self) -> Result<PolyMatrix> {
        check_format(&self.format, FACTOR_FORMAT)?;
        let p = |c: &Vec<Pair>| -> Result<AnalyticPoly> {
            if c.is_empty() {
                return Err(Error::InvalidInput("empty coefficient array".into()));
            }
            Ok(AnalyticPoly::new(c.iter().copied().map(from_pair).collect()))
        };
        let e = &self.entries;
        Ok([[p(&e[0][0])?, p(&e[0][1])?], [p(&e[1][0])?, p(&e[1][1])?]])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("factor file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite numbers serialize")
    }

    /// One line per coefficient: `row,col,k,re,im` (1-based row and column).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,k,re,im\n");
        for (i, row) in self.entries.iter().enumerate() {
            for (j, coeffs) in row.iter().enumerate() {
                for (k, c) in coeffs.iter().enumerate() {
                    out.push_str(&format!("{},{},{k},{:e},{:e}\n", i + 1, j + 1, c[0], c[1]));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::gen_polynomial_instance;

    #[test]
    fn density_round_trip() {
        let inst = gen_polynomial_instance(3, 5);
        let file = DensityFile::from_density(&inst.density);
        let back = DensityFile::from_json(&file.to_json()).unwrap().to_density().unwrap();
        assert_eq!(back, inst.density);
    }

    #[test]
    fn mirror_terms_must_agree() {
        let text = r#"{"format":"trig-poly-2x2","order":1,"coeffs":[
            {"k":0,"m":[[[1,0],[0,0]],[[0,0],[1,0]]]},
            {"k":1,"m":[[[0,0],[0.5,0]],[[0,0],[0,0]]]},
            {"k":-1,"m":[[[0,0],[0,0]],[[0.5,0],[0,0]]]}]}"#;
        assert!(DensityFile::from_json(text).unwrap().to_density().is_ok());
        let bad = text.replace("[[0.5,0],[0,0]]]}]", "[[0.6,0],[0,0]]]}]");
        assert!(matches!(
            DensityFile::from_json(&bad).unwrap().to_density(),
            Err(Error::NotHermitian { k: 1, .. })
        ));
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(DensityFile::from_json("{").is_err());
        assert!(DensityFile::from_json(r#"{"format":"x","order":0,"coeffs":[]}"#)
            .unwrap()
            .to_density()
            .is_err());
        let nan = r#"{"format":"trig-poly-2x2","order":0,"coeffs":[{"k":0,"m":[[[NaN,0],[0,0]],[[0,0],[1,0]]]}]}"#;
        assert!(DensityFile::from_json(nan).is_err());
    }

    #[test]
    fn instance_factor_round_trip() {
        let inst = gen_polynomial_instance(2, 11);
        let file = FactorFile::from_instance(&inst);
        let back = FactorFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.polys().unwrap(), inst.exact_factor);
        assert_eq!(back.seed, Some(11));
        assert!(back.bound.is_none());
    }
}
