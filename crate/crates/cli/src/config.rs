//! JSON scenario files.
//!
//! Agent and subterm numbers in scenario files are 1-based, matching the
//! `x1`/`u1` naming of the expression syntax.

use std::collections::BTreeMap;
use std::path::Path;

use logcons::{
    parse_decision, BoolExpr, BoolMat, BoolVec, DecisionSystem, FaultModel, NetworkSpec,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub description: Option<String>,
    /// `C(i,k) = 1` iff agent `i` receives from agent `k`.
    pub communication: Vec<Vec<u8>>,
    /// `V(i,j) = 1` iff agent `i` measures input `j`.
    pub visibility: Vec<Vec<u8>>,
    /// One expression per decision over `u1..um`; defaults to `y_j = u_j`.
    #[serde(default)]
    pub decisions: Option<Vec<String>>,
    #[serde(default)]
    pub gamma: Option<i64>,
    #[serde(default)]
    pub faults: FaultsFile,
    /// Input assignment `u`, one 0/1 per input; defaults to all zeros.
    #[serde(default)]
    pub inputs: Option<Vec<u8>>,
    /// `X(0)` as `n` rows of `m` bits; defaults to all zeros.
    #[serde(default)]
    pub initial_state: Option<Vec<Vec<u8>>>,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
}

fn default_t_max() -> usize {
    50
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultsFile {
    #[serde(default)]
    pub permanent: Vec<PermanentFault>,
    #[serde(default)]
    pub temporary: Vec<TemporaryFault>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermanentFault {
    pub agent: usize,
    pub value: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporaryFault {
    pub agent: usize,
    pub subterm: usize,
}

/// Validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub description: Option<String>,
    pub network: NetworkSpec,
    pub decision_text: Vec<String>,
    pub decisions: DecisionSystem,
    pub gamma: Option<usize>,
    pub faults: FaultModel,
    pub inputs: BoolVec,
    pub initial_state: BoolMat,
    pub t_max: usize,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn bit(v: u8, what: &str) -> Result<bool, CliError> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(bad(format!("{what}: expected 0 or 1, got {other}"))),
    }
}

fn matrix(rows: &[Vec<u8>], what: &str) -> Result<BoolMat, CliError> {
    BoolMat::from_rows(rows).map_err(|e| bad(format!("{what}: {e}")))
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| bad(format!("invalid scenario JSON: {e}")))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self, CliError> {
        let c = matrix(&file.communication, "communication")?;
        let v = matrix(&file.visibility, "visibility")?;
        let network = NetworkSpec::new(c, v).map_err(|e| bad(e.to_string()))?;
        let (n, m) = (network.n(), network.m());

        let decision_text = file
            .decisions
            .unwrap_or_else(|| (1..=m).map(|j| format!("u{j}")).collect());
        let mut parsed = Vec::with_capacity(decision_text.len());
        for (h, text) in decision_text.iter().enumerate() {
            let e = parse_decision(text)
                .map_err(|e| bad(format!("decision {} `{text}`: {e}", h + 1)))?;
            e.validate(0, m).map_err(|_| {
                bad(format!(
                    "decision {} `{text}` references an input beyond u{m}",
                    h + 1
                ))
            })?;
            parsed.push(e);
        }
        if parsed.is_empty() {
            return Err(bad("at least one decision is required"));
        }
        let decisions =
            DecisionSystem::from_input_decisions(m, &parsed).map_err(|e| bad(e.to_string()))?;

        let gamma = match file.gamma {
            None => None,
            Some(g) if g < 0 => return Err(bad(format!("gamma must be non-negative, got {g}"))),
            Some(g) => Some(g as usize),
        };

        let mut permanent = BTreeMap::new();
        for f in &file.faults.permanent {
            if f.agent == 0 || f.agent > n {
                return Err(bad(format!("faulty agent {} outside 1..={n}", f.agent)));
            }
            if permanent
                .insert(f.agent - 1, bit(f.value, "fault value")?)
                .is_some()
            {
                return Err(bad(format!("agent {} listed twice as faulty", f.agent)));
            }
        }
        if let Some(g) = gamma {
            if permanent.len() > g {
                log::warn!(
                    "{} permanent faults exceed the declared budget gamma = {g}",
                    permanent.len()
                );
            }
        }
        let mut temporary = Vec::new();
        for f in &file.faults.temporary {
            if f.agent == 0 || f.agent > n || f.subterm == 0 || f.subterm > m {
                return Err(bad(format!(
                    "temporary fault ({}, {}) outside 1..={n} x 1..={m}",
                    f.agent, f.subterm
                )));
            }
            temporary.push((f.agent - 1, f.subterm - 1));
        }

        let inputs = match file.inputs {
            None => BoolVec::zeros(m),
            Some(u) => {
                if u.len() != m {
                    return Err(bad(format!("{} input values for {m} inputs", u.len())));
                }
                u.iter()
                    .map(|&b| bit(b, "input value"))
                    .collect::<Result<Vec<bool>, _>>()
                    .map(|bs| BoolVec::from_bools(&bs))?
            }
        };

        let initial_state = match file.initial_state {
            None => BoolMat::zeros(n, m),
            Some(rows) => {
                let x = matrix(&rows, "initial_state")?;
                if x.rows() != n || x.cols() != m {
                    return Err(bad(format!(
                        "initial_state is {}x{}, expected {n}x{m}",
                        x.rows(),
                        x.cols()
                    )));
                }
                x
            }
        };

        if file.t_max == 0 {
            return Err(bad("t_max must be at least 1"));
        }

        Ok(Self {
            description: file.description,
            network,
            decision_text,
            decisions,
            gamma,
            faults: FaultModel {
                temporary,
                permanent,
            },
            inputs,
            initial_state,
            t_max: file.t_max,
        })
    }

    pub fn decision_exprs(&self) -> Vec<BoolExpr> {
        self.decision_text
            .iter()
            .map(|t| parse_decision(t).expect("validated at load"))
            .collect()
    }
}
