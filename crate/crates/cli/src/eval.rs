//! Evaluation of a parsed netlist against the network algebra.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use slhnet_core::components::{make_beamsplitter, make_cavity, make_phase_shifter, make_qubit_coupler};
use slhnet_core::json::{matrix_to_rows, FactorJson, MatrixJson, SlhJson, StratJson};
use slhnet_core::network::{close_all_loops, concat, feedback_reduce, series, FeedbackPlan};
use slhnet_core::{slh_to_strat, Error as CoreError, PortSet, SLHModel};
use thiserror::Error;

use crate::ast::{ComponentDecl, Kind, Location, NetworkSpec, StatementKind, Value};

pub const DEFAULT_CAVITY_DIM: usize = 8;

/// Tolerance for the unitarity and Hermiticity checks on emitted models.
pub const OUTPUT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EvalError {
    /// A failure of the algebra, tagged with the declaration or statement
    /// that triggered it.
    #[error("{location}: `{source_text}`: {error}")]
    Model {
        location: Location,
        source_text: String,
        error: CoreError,
    },

    #[error("{location}: cannot load `{}`: {message}", path.display())]
    File {
        location: Location,
        path: PathBuf,
        message: String,
    },

    #[error("emitted model fails its checks: {0}")]
    Unphysical(String),
}

impl EvalError {
    pub fn core_error(&self) -> Option<&CoreError> {
        match self {
            EvalError::Model { error, .. } => Some(error),
            _ => None,
        }
    }
}

fn tag(location: Location, source: &dyn fmt::Display) -> impl FnOnce(CoreError) -> EvalError + '_ {
    move |error| EvalError::Model {
        location,
        source_text: source.to_string(),
        error,
    }
}

fn count(decl: &ComponentDecl, key: &str, default: usize) -> usize {
    decl.num(key).map_or(default, |x| x as usize)
}

fn build_component(decl: &ComponentDecl, base_dir: &Path) -> Result<SLHModel, EvalError> {
    let name = decl.name.as_str();
    let num = |key: &str| decl.num(key).unwrap_or(0.0);
    let built = match decl.kind {
        Kind::Cavity => make_cavity(name, num("omega"), num("gamma"), num("phi"), count(decl, "dim", DEFAULT_CAVITY_DIM)),
        Kind::Phase => make_phase_shifter(name, num("phi"), count(decl, "n", 1)),
        Kind::Beamsplitter => make_beamsplitter(name, num("t"), count(decl, "n", 1)),
        Kind::QubitCoupler => make_qubit_coupler(name, num("gamma"), num("kappa"), num("phi")),
        Kind::Custom => return load_custom(decl, base_dir),
    };
    built.map_err(tag(decl.location, decl))
}

/// Reads an SLH model in the JSON schema of [`SlhJson`]; its ports are
/// renamed `name.0`, `name.1`, ...
fn load_custom(decl: &ComponentDecl, base_dir: &Path) -> Result<SLHModel, EvalError> {
    let Some(Value::Str(file)) = decl.get("file") else {
        unreachable!("parser enforces a string `file`")
    };
    let path = base_dir.join(file);
    let file_error = |message: String| EvalError::File {
        location: decl.location,
        path: path.clone(),
        message,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| file_error(e.to_string()))?;
    let json: SlhJson = serde_json::from_str(&text).map_err(|e| file_error(e.to_string()))?;
    let model = SLHModel::try_from(&json).map_err(tag(decl.location, decl))?;
    let report = model.validate();
    if !report.is_valid() {
        return Err(tag(decl.location, decl)(CoreError::InvalidModel(report.to_string())));
    }
    let n = model.n_ports();
    model
        .with_ports(PortSet::numbered(&decl.name, n))
        .map_err(tag(decl.location, decl))
}

/// The model bound to the output name once every statement has run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub model: SLHModel,
    pub location: Location,
}

/// Runs the program. Custom component files are resolved against `base_dir`.
pub fn evaluate(spec: &NetworkSpec, base_dir: &Path) -> Result<Outcome, EvalError> {
    let mut env: HashMap<String, SLHModel> = HashMap::new();
    for decl in &spec.components {
        env.insert(decl.name.clone(), build_component(decl, base_dir)?);
    }
    let get = |env: &HashMap<String, SLHModel>, name: &str| -> SLHModel {
        env.get(name).cloned().expect("parser checks names")
    };
    for stmt in &spec.statements {
        let wrap = tag(stmt.location, stmt);
        match &stmt.kind {
            StatementKind::Series { first, second, target } => {
                let g = series(&get(&env, second), &get(&env, first)).map_err(wrap)?;
                env.insert(target.clone(), g);
            }
            StatementKind::Concat { parts, target } => {
                let models: Vec<SLHModel> = parts.iter().map(|p| get(&env, p)).collect();
                let g = concat(&models).map_err(wrap)?;
                env.insert(target.clone(), g);
            }
            StatementKind::Feedback { name, pairs, gain } => {
                let g = get(&env, name);
                let eta = gain.as_ref().map(|gname| get(&env, gname).s().clone());
                let reduced = FeedbackPlan::from_wiring(pairs, eta)
                    .and_then(|plan| feedback_reduce(&g, &plan))
                    .map_err(wrap)?;
                env.insert(name.clone(), reduced);
            }
            StatementKind::Loop { name } => {
                let closed = close_all_loops(&get(&env, name)).map_err(wrap)?;
                env.insert(name.clone(), closed);
            }
            StatementKind::Output { .. } => {}
        }
    }
    let (name, location) = spec
        .statements
        .iter()
        .find_map(|s| match &s.kind {
            StatementKind::Output { name } => Some((name.clone(), s.location)),
            _ => None,
        })
        .expect("parser requires an output statement");
    let model = get(&env, &name);
    Ok(Outcome { name, model, location })
}

/// Result of `reduce`: the full model, or only the Hamiltonian once every
/// port has been closed.
#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReduceOutput {
    Slh {
        name: String,
        #[serde(flatten)]
        model: SlhJson,
    },
    Hamiltonian {
        name: String,
        layout: Vec<FactorJson>,
        #[serde(rename = "H")]
        h: MatrixJson,
    },
    Stratonovich {
        name: String,
        #[serde(flatten)]
        model: StratJson,
    },
}

/// Checks the physical invariants of an emitted model.
pub fn check_output(model: &SLHModel) -> Result<(), EvalError> {
    let s_dev = slhnet_core::operator::unitarity_deviation(model.s().data());
    let h_dev = slhnet_core::operator::hermiticity_deviation(model.h().matrix());
    if s_dev > OUTPUT_TOL || h_dev > OUTPUT_TOL {
        return Err(EvalError::Unphysical(format!(
            "S unitarity deviation {s_dev:e}, H Hermiticity deviation {h_dev:e}"
        )));
    }
    Ok(())
}

/// Builds the output document. With `strat` the open model is emitted in
/// Stratonovich form.
pub fn reduce_output(outcome: &Outcome, strat: bool) -> Result<ReduceOutput, EvalError> {
    let model = &outcome.model;
    check_output(model)?;
    let name = outcome.name.clone();
    if model.is_closed() {
        return Ok(ReduceOutput::Hamiltonian {
            name,
            layout: SlhJson::from(model).layout,
            h: matrix_to_rows(model.h().matrix()),
        });
    }
    if strat {
        let e = slh_to_strat(model).map_err(|error| EvalError::Model {
            location: outcome.location,
            source_text: format!("output {name}"),
            error,
        })?;
        return Ok(ReduceOutput::Stratonovich {
            name,
            model: StratJson::from(&e),
        });
    }
    Ok(ReduceOutput::Slh {
        name,
        model: SlhJson::from(model),
    })
}
