//! JSON experiment description.

use clap::ValueEnum;
use serde::Deserialize;
use serde_json::Value;

use xps_susy::algebra::DeformedAlgebra;
use xps_susy::shape::ShapeInvariantFamily;
use xps_susy::{Grid, PartnerSign, SuperPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Task {
    Partner,
    Dynamics,
    Groundstate,
    Breaking,
    Instanton,
    ShapeCheck,
    ShapeSpectrum,
    Algebra,
    Selfsimilar,
    Oracle,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Partner => "partner",
            Task::Dynamics => "dynamics",
            Task::Groundstate => "groundstate",
            Task::Breaking => "breaking",
            Task::Instanton => "instanton",
            Task::ShapeCheck => "shape_check",
            Task::ShapeSpectrum => "shape_spectrum",
            Task::Algebra => "algebra",
            Task::Selfsimilar => "selfsimilar",
            Task::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "W")]
    pub w: PotentialSpec,
    #[serde(rename = "V", default)]
    pub v: Option<PotentialSpec>,
}

fn default_domain() -> [f64; 2] {
    [-8.0, 8.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Linear {
        omega: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    ShiftedOscillator {
        omega: f64,
        shift: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    DoubleWell {
        lambda: f64,
        a: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    Morse {
        #[serde(alias = "A")]
        a: f64,
        #[serde(alias = "B")]
        b: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    PoschlTeller {
        #[serde(alias = "A")]
        a: f64,
        #[serde(alias = "B")]
        b: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    Table {
        domain: [f64; 2],
        samples: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn build(&self) -> xps_susy::Result<SuperPotential> {
        match self {
            PotentialSpec::Linear { omega, domain } => SuperPotential::linear(*omega, (domain[0], domain[1])),
            PotentialSpec::ShiftedOscillator { omega, shift, domain } => {
                SuperPotential::shifted_oscillator(*omega, *shift, (domain[0], domain[1]))
            }
            PotentialSpec::DoubleWell { lambda, a, domain } => {
                SuperPotential::double_well(*lambda, *a, (domain[0], domain[1]))
            }
            PotentialSpec::Morse { a, b, domain } => SuperPotential::morse(*a, *b, (domain[0], domain[1])),
            PotentialSpec::PoschlTeller { a, b, domain } => {
                SuperPotential::poschl_teller(*a, *b, (domain[0], domain[1]))
            }
            PotentialSpec::Table { domain, samples } => {
                SuperPotential::table(domain[0], domain[1], samples.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> xps_susy::Result<Grid> {
        Grid::new(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSpec {
    Plus,
    Minus,
    ZeroMode,
}

impl SignSpec {
    /// `ZeroMode` falls back to `Plus` when `w` has none.
    pub fn resolve(self, w: &SuperPotential) -> PartnerSign {
        match self {
            SignSpec::Plus => PartnerSign::Plus,
            SignSpec::Minus => PartnerSign::Minus,
            SignSpec::ZeroMode => w.zero_mode_sign().unwrap_or(PartnerSign::Plus),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialState {
    pub q: f64,
    pub pi_q: f64,
    pub p: f64,
    pub pi_p: f64,
    pub q_soul: f64,
    pub pi_q_soul: f64,
    pub p_soul: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        Self { q: 0.5, pi_q: 0.0, p: 0.0, pi_p: 0.0, q_soul: 0.0, pi_q_soul: 0.0, p_soul: 0.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Harmonic {
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    ShiftedOscillator {
        shift: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    Morse {
        #[serde(alias = "B")]
        b: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
    PoschlTeller {
        #[serde(alias = "B")]
        b: f64,
        #[serde(default = "default_domain")]
        domain: [f64; 2],
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<ShapeInvariantFamily, String> {
        let ok = |d: &[f64; 2]| {
            if d[0].is_finite() && d[1].is_finite() && d[0] < d[1] {
                Ok((d[0], d[1]))
            } else {
                Err(format!("domain must be a finite increasing interval, got {d:?}"))
            }
        };
        Ok(match self {
            FamilySpec::Harmonic { domain } => ShapeInvariantFamily::harmonic(ok(domain)?),
            FamilySpec::ShiftedOscillator { shift, domain } => {
                if !shift.is_finite() {
                    return Err(format!("shift must be finite, got {shift}"));
                }
                ShapeInvariantFamily::shifted_oscillator(*shift, ok(domain)?)
            }
            FamilySpec::Morse { b, domain } => {
                if !(*b > 0.0 && b.is_finite()) {
                    return Err(format!("b must be positive, got {b}"));
                }
                ShapeInvariantFamily::morse(*b, ok(domain)?)
            }
            FamilySpec::PoschlTeller { b, domain } => {
                if !(*b > 0.0 && b.is_finite()) {
                    return Err(format!("b must be positive, got {b}"));
                }
                ShapeInvariantFamily::poschl_teller(*b, ok(domain)?)
            }
        })
    }
}

fn zero() -> f64 {
    0.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    Scaling {
        r1: f64,
        q: f64,
        #[serde(default = "zero")]
        h_min: f64,
    },
    Translational {
        c0: f64,
        c1: f64,
        #[serde(default = "zero")]
        h_min: f64,
    },
}

impl AlgebraSpec {
    pub fn build(&self) -> xps_susy::Result<DeformedAlgebra> {
        match self {
            AlgebraSpec::Scaling { r1, q, h_min } => DeformedAlgebra::scaling(*r1, *q, *h_min),
            AlgebraSpec::Translational { c0, c1, h_min } => DeformedAlgebra::translational(*c0, *c1, *h_min),
        }
    }
}

/// Task parameters; each task reads the subset it needs and defaults the rest.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub grid: Option<GridSpec>,
    pub grid_p: Option<GridSpec>,
    pub sign: Option<SignSpec>,
    pub n_levels: Option<usize>,
    pub extend_domain: Option<bool>,
    pub initial: Option<InitialState>,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub central_charges: Option<[f64; 2]>,
    pub iterations: Option<usize>,
    pub tau_span: Option<f64>,
    pub tau0: Option<f64>,
    pub family: Option<FamilySpec>,
    pub a0: Option<f64>,
    pub n_max: Option<usize>,
    pub algebra: Option<AlgebraSpec>,
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path into the config, e.g. `system.W.a` or `params.algebra.q`.
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        let range = (self.start, self.stop, self.step);
        let pts = match (&self.values, range) {
            (Some(v), (None, None, None)) => v.clone(),
            (None, (Some(start), Some(stop), Some(step))) => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
                    return Err("sweep: start, stop must be finite and step positive".into());
                }
                if stop < start {
                    Vec::new()
                } else {
                    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                    (0..n).map(|i| start + step * i as f64).collect()
                }
            }
            _ => return Err("sweep: give either `values` or all of `start`, `stop`, `step`".into()),
        };
        if let Some(x) = pts.iter().find(|x| !x.is_finite()) {
            return Err(format!("sweep.values: non-finite entry {x}"));
        }
        Ok(pts)
    }
}

/// Set the dotted `path` in `root` to `x`, creating missing objects along the way.
/// A misspelt segment is caught when the result is parsed.
pub fn set_path(root: &mut Value, path: &str, x: f64) -> Result<(), String> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("sweep.parameter: malformed path `{path}`"));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut node = root;
    for (i, k) in parents.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| format!("sweep.parameter: `{}` is not an object", keys[..i].join(".")))?;
        node = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| format!("sweep.parameter: `{}` is not an object", parents.join(".")))?;
    let num = serde_json::Number::from_f64(x).ok_or("sweep: non-finite value")?;
    obj.insert((*last).to_string(), Value::Number(num));
    Ok(())
}
