use std::path::{Path, PathBuf};

use g2flow::{AnsatzKind, FlowKind};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Initial data. `ccy` starts at `(f, h) = (a, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ccy { a: f64 },
    Heisenberg { f0: f64, a0: f64, b0: f64, c0: f64 },
}

impl Family {
    pub fn kind(&self) -> AnsatzKind {
        match self {
            Family::Ccy { .. } => AnsatzKind::Ccy,
            Family::Heisenberg { .. } => AnsatzKind::Heisenberg,
        }
    }

    pub fn initial_state(&self) -> Vec<f64> {
        match *self {
            Family::Ccy { a } => vec![a, 1.0],
            Family::Heisenberg { f0, a0, b0, c0 } => vec![f0, a0, b0, c0],
        }
    }

    /// Family with the given initial state, in [`Family::initial_state`] order.
    /// A single value for `ccy` is the scale `a`.
    pub fn with_state(&self, y: &[f64]) -> CliResult<Family> {
        match (self, y) {
            (Family::Ccy { .. }, [a]) => Ok(Family::Ccy { a: *a }),
            (Family::Heisenberg { .. }, [f0, a0, b0, c0]) => Ok(Family::Heisenberg {
                f0: *f0,
                a0: *a0,
                b0: *b0,
                c0: *c0,
            }),
            (Family::Ccy { .. }, _) => Err(CliError::Config(format!(
                "ccy sweep points take one value (a), got {}",
                y.len()
            ))),
            (Family::Heisenberg { .. }, _) => Err(CliError::Config(format!(
                "heisenberg sweep points take four values (f0,a0,b0,c0), got {}",
                y.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Frame name; must be the one the family lives on.
    pub frame: String,
    pub flow: FlowKind,
    pub family: Family,
    pub t_span: (f64, f64),
    pub rtol: f64,
    pub atol: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            frame: "formal_ccy".into(),
            flow: FlowKind::Rhf,
            family: Family::Ccy { a: 1.0 },
            t_span: (0.0, 1e4),
            rtol: 1e-10,
            atol: 1e-12,
            k: 0.0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub flow: Option<FlowKind>,
    pub a: Option<f64>,
    pub t1: Option<f64>,
    pub rtol: Option<f64>,
    pub k: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Config from an optional file, with overrides applied and validated.
    pub fn resolve(path: Option<&Path>, o: &Overrides) -> CliResult<Self> {
        let mut c = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(f) = o.flow {
            c.flow = f;
        }
        if let Some(a) = o.a {
            match &mut c.family {
                Family::Ccy { a: slot } => *slot = a,
                Family::Heisenberg { .. } => {
                    return Err(CliError::Config(
                        "--a applies to the ccy family only".into(),
                    ))
                }
            }
        }
        if let Some(t1) = o.t1 {
            c.t_span.1 = t1;
        }
        if let Some(r) = o.rtol {
            c.rtol = r;
        }
        if let Some(k) = o.k {
            c.k = k;
        }
        if let Some(out) = &o.out {
            c.output_dir = out.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let expected = self.family.kind().frame();
        if self.frame != expected.name() {
            return bad(format!(
                "frame {} does not carry the {} family (expected {})",
                self.frame,
                self.family.kind(),
                expected.name()
            ));
        }
        let (t0, t1) = self.t_span;
        if !t0.is_finite() || !t1.is_finite() || t0 == t1 {
            return bad(format!(
                "t_span must be two distinct finite times, got ({t0}, {t1})"
            ));
        }
        if !(self.rtol > 0.0 && self.rtol.is_finite() && self.atol > 0.0 && self.atol.is_finite()) {
            return bad("rtol and atol must be positive and finite".into());
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return bad(format!("K must be finite and non-negative, got {}", self.k));
        }
        let y = self.family.initial_state();
        if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad(format!(
                "initial parameters must be positive and finite, got {y:?}"
            ));
        }
        Ok(())
    }
}
