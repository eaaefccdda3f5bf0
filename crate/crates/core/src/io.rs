//! Problem files (JSON) and result tables (CSV).
//!
//! Every problem file carries a `kind` tag: `"nth_order"`, `"system"` or
//! `"nth_order_param"`. Functions use the piecewise-polynomial layout
//! `{"breakpoints": [...], "pieces": [[[re, im], ...], ...]}` with global
//! monomial coefficients per piece, and complex constants are `[re, im]`.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coeffs::{ParamSpec, PolyMatrix, ProblemSpecN, SystemSpec};
use crate::funcspace::PiecewisePoly;
use crate::spectra::RootSystem;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecFile {
    NthOrder {
        n: usize,
        #[serde(rename = "T")]
        t: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(rename = "N")]
        big_n: usize,
        /// `p_0, ..., p_{n-2}`
        p: Vec<PiecewisePoly>,
    },
    System {
        n: usize,
        #[serde(rename = "T")]
        t: f64,
        #[serde(rename = "N")]
        big_n: usize,
        #[serde(rename = "A0")]
        a0: Vec<Vec<C64>>,
        /// `A_(1), A_(2), ...`
        #[serde(rename = "A", default)]
        a: Vec<PolyMatrix>,
        /// Eigenvector matrix to use for `A_(0)`; columns in root order.
        #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
        omega: Option<Vec<Vec<C64>>>,
    },
    NthOrderParam {
        n: usize,
        #[serde(rename = "T")]
        t: f64,
        #[serde(rename = "N")]
        big_n: usize,
        /// `p_00, ..., p_{n-1,n-1}`
        p_diag: Vec<C64>,
        /// `p[k][j - 1] = p_{k,k+j}`
        p: Vec<Vec<PiecewisePoly>>,
    },
}

/// A validated problem of any of the three kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSpec {
    Nth(ProblemSpecN),
    System(SystemSpec),
    Param(ParamSpec),
}

impl LoadedSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedSpec::Nth(_) => "nth_order",
            LoadedSpec::System(_) => "system",
            LoadedSpec::Param(_) => "nth_order_param",
        }
    }
}

fn matrix(rows: &[Vec<C64>], n: usize, name: &str) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidSpec(format!("{name} must be {n}x{n}")));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Roots of `A_(0)` read off `Omega^{-1} A_(0) Omega`, which must be diagonal.
fn roots_from_omega(a0: &CMatrix, omega: CMatrix) -> Result<RootSystem> {
    let inv = omega
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidSpec("Omega is singular".into()))?;
    let d = &inv * a0 * &omega;
    let scale = d.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for r in 0..d.nrows() {
        for c in 0..d.ncols() {
            if r != c && d[(r, c)].norm() > 1e-10 * scale {
                return Err(Error::InvalidSpec(
                    "columns of Omega are not eigenvectors of A0".into(),
                ));
            }
        }
    }
    Ok(RootSystem {
        roots: d.diagonal().iter().copied().collect(),
        derivative_values: None,
        eigenvectors: Some(omega),
    })
}

/// Parses and validates a problem description.
pub fn parse_spec(text: &str) -> Result<LoadedSpec> {
    let file: SpecFile = serde_json::from_str(text)?;
    match file {
        SpecFile::NthOrder {
            n,
            t,
            alpha,
            big_n,
            p,
        } => Ok(LoadedSpec::Nth(ProblemSpecN::new(n, t, alpha, big_n, p)?)),
        SpecFile::System {
            n,
            t,
            big_n,
            a0,
            a,
            omega,
        } => {
            let a0 = matrix(&a0, n, "A0")?;
            let mut spec = SystemSpec::new(t, big_n, a0, a)?;
            if let Some(o) = omega {
                spec.roots = Some(roots_from_omega(&spec.a0, matrix(&o, n, "Omega")?)?);
            }
            Ok(LoadedSpec::System(spec))
        }
        SpecFile::NthOrderParam {
            n,
            t,
            big_n,
            p_diag,
            p,
        } => {
            if p_diag.len() != n {
                return Err(Error::InvalidSpec(format!(
                    "p_diag must list {n} constants, got {}",
                    p_diag.len()
                )));
            }
            Ok(LoadedSpec::Param(ParamSpec::new(t, big_n, p_diag, p)?))
        }
    }
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<LoadedSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text).map_err(|e| match e {
        Error::Json(j) => Error::InvalidSpec(format!("{}: {j}", path.display())),
        other => other,
    })
}

/// Pretty-printed JSON for any loaded spec.
pub fn spec_to_json(spec: &LoadedSpec) -> Result<String> {
    let file = match spec {
        LoadedSpec::Nth(s) => SpecFile::NthOrder {
            n: s.n,
            t: s.t,
            alpha: s.alpha,
            big_n: s.big_n,
            p: s.p.clone(),
        },
        LoadedSpec::System(s) => SpecFile::System {
            n: s.n,
            t: s.t,
            big_n: s.big_n,
            a0: rows(&s.a0),
            a: s.a.clone(),
            omega: s
                .roots
                .as_ref()
                .and_then(|r| r.eigenvectors.as_ref())
                .map(rows),
        },
        LoadedSpec::Param(s) => SpecFile::NthOrderParam {
            n: s.n,
            t: s.t,
            big_n: s.big_n,
            p_diag: s.p_diag.clone(),
            p: s.p.clone(),
        },
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header plus rows of equal width.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Real and imaginary parts as two cells.
    pub fn complex(z: C64) -> [Cell; 2] {
        [Cell::Real(z.re), Cell::Real(z.im)]
    }

    pub fn write_to<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            if row.len() != self.header.len() {
                return Err(Error::Mismatch(format!(
                    "row has {} cells, header has {}",
                    row.len(),
                    self.header.len()
                )));
            }
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes `table` to `path`. An empty table is an error and leaves no file.
pub fn emit_csv(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidSpec("no results to write".into()));
    }
    let mut buf = Vec::new();
    table.write_to(&mut buf)?;
    std::io::Write::write_all(&mut File::create(path)?, &buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"kind":"nth_order","n":2,"T":1,"N":0,
        "p":[{"breakpoints":[0,1],"pieces":[[[0,0]]]}]}"#;

    #[test]
    fn minimal_spec_loads() {
        let LoadedSpec::Nth(s) = parse_spec(MINIMAL).unwrap() else {
            panic!()
        };
        assert!(s.is_free());
        assert_eq!(crate::nth::rho_threshold(&s, s.alpha).unwrap(), 0.0);
    }

    #[test]
    fn rejections() {
        let p00 = r#"{"kind":"nth_order_param","n":2,"T":1,"N":0,"p_diag":[[0,0],[0,0]],"p":[]}"#;
        assert!(matches!(parse_spec(p00), Err(Error::ConditionI1(_))));
        let bad_breaks = r#"{"kind":"nth_order","n":2,"T":1,"N":0,
            "p":[{"breakpoints":[0,0.7,0.4,1],"pieces":[[[0,0]],[[0,0]],[[0,0]]]}]}"#;
        assert!(parse_spec(bad_breaks).unwrap_err().is_spec_error());
        let unknown = r#"{"kind":"nth_order","n":2,"T":1,"N":0,"q":[],"p":[]}"#;
        assert!(parse_spec(unknown).unwrap_err().to_string().contains("q"));
        let missing = r#"{"kind":"system","n":2,"N":0,"A0":[]}"#;
        assert!(parse_spec(missing).unwrap_err().to_string().contains("T"));
    }

    #[test]
    fn round_trip_all_kinds() {
        let sys = r#"{"kind":"system","n":2,"T":1,"N":1,"A0":[[[0,0],[1,0]],[[1,0],[0,0]]],
            "A":[[[{"breakpoints":[0,1],"pieces":[[[0,0],[1,0]]]},{"breakpoints":[0,1],"pieces":[[[0,0]]]}],
                  [{"breakpoints":[0,1],"pieces":[[[0,0]]]},{"breakpoints":[0,1],"pieces":[[[2,0]]]}]]]}"#;
        let param = r#"{"kind":"nth_order_param","n":2,"T":1,"N":1,"p_diag":[[-1,0],[0.5,0]],
            "p":[[{"breakpoints":[0,1],"pieces":[[[1,0],[1,0]]]}]]}"#;
        for text in [MINIMAL, sys, param] {
            let a = parse_spec(text).unwrap();
            let b = parse_spec(&spec_to_json(&a).unwrap()).unwrap();
            assert_eq!(a, b);
        }
        let reduced = match parse_spec(param).unwrap() {
            LoadedSpec::Param(p) => LoadedSpec::System(p.companion_reduce().unwrap()),
            _ => unreachable!(),
        };
        let once = parse_spec(&spec_to_json(&reduced).unwrap()).unwrap();
        let twice = parse_spec(&spec_to_json(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        assert!(emit_csv(&Table::new(&["a"]), &path).is_err());
        assert!(!path.exists());
        let mut t = Table::new(&["k", "x", "tag"]);
        t.push(vec![Cell::Int(1), Cell::Real(0.1), Cell::Text("ok".into())]);
        emit_csv(&t, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "k,x,tag\n1,1.0000000000000001e-1,ok\n");
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }
}
