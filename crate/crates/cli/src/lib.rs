//! Front end for the `logcons` toolkit: scenario files, rule files and the
//! `analyze` / `synthesize` / `simulate` commands.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 infeasible specification,
//! 3 simulated network failed to agree.

pub mod config;
pub mod rules;

use std::fmt::Write as _;

use logcons::{
    analyze, r_reachable, run, synthesize_linear, synthesize_robust, BoolVec, ConsensusSystem,
    Error as CoreError,
};

pub use config::ScenarioConfig;
pub use rules::{Mode, RuleFile, SubtermRules};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_DISAGREEMENT: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario: {0}")]
    Config(String),
    #[error("rule file line {line}: {message}")]
    Rules { line: usize, message: String },
    #[error("rule file does not match scenario: {0}")]
    Mismatch(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }
}

/// Text produced by a command together with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn agent_set(agents: &[usize]) -> String {
    let names: Vec<String> = agents.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

pub fn cmd_analyze(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let spec = &cfg.network;
    let mut out = String::new();
    if let Some(d) = &cfg.description {
        let _ = writeln!(out, "# {d}");
    }
    let _ = writeln!(out, "agents: {}", spec.n());
    let _ = writeln!(out, "inputs: {}", spec.m());
    let mut ok = true;
    let mut vis_diam = 0;
    for j in 0..spec.m() {
        let rep = analyze(spec, j)?;
        vis_diam = vis_diam.max(rep.kappa);
        let _ = writeln!(out, "\ninput u{}", j + 1);
        let _ = writeln!(out, "  roots: {} (nu = {})", agent_set(&rep.roots), rep.nu);
        let _ = writeln!(out, "  reachable: {}", agent_set(&rep.reachable));
        let _ = writeln!(out, "  unreachable: {}", agent_set(&rep.unreachable));
        let _ = writeln!(out, "  kappa: {}", rep.kappa);
        let layers: Vec<String> = rep.layers.iter().map(|l| agent_set(l)).collect();
        let _ = writeln!(out, "  layers: {}", layers.join(" "));
        if !rep.roots.is_empty() {
            let lin = synthesize_linear(spec, j)?;
            let per_root: Vec<String> = lin
                .kappa_per_root
                .iter()
                .map(|(r, k)| format!("{}:{k}", r + 1))
                .collect();
            let _ = writeln!(out, "  kappa per root: {}", per_root.join(" "));
        }
        let complete = rep.is_complete();
        ok &= complete;
        let _ = writeln!(
            out,
            "  completely reachable: {}",
            if complete { "yes" } else { "no" }
        );
        if let Some(g) = cfg.gamma {
            let r = 2 * g + 1;
            let red = r_reachable(spec, j, r)?;
            ok &= red.complete;
            let _ = writeln!(out, "  r = {r}: secured {}", agent_set(&red.secured));
            let _ = writeln!(
                out,
                "  completely {r}-reachable: {}",
                if red.complete { "yes" } else { "no" }
            );
        }
    }
    let _ = writeln!(out, "\nvis-diam: {vis_diam}");
    let _ = writeln!(
        out,
        "result: {}",
        if ok { "feasible" } else { "infeasible" }
    );
    Ok(Outcome {
        text: out,
        code: if ok { EXIT_OK } else { EXIT_INFEASIBLE },
    })
}

/// One rule block per input (each decision input is its own subterm).
pub fn synthesize(cfg: &ScenarioConfig, mode: Mode) -> Result<RuleFile, CliError> {
    let spec = &cfg.network;
    let (n, m) = (spec.n(), spec.m());
    let mut subterms = Vec::with_capacity(m);
    let gamma = match mode {
        Mode::Linear => None,
        Mode::Robust => Some(cfg.gamma.ok_or_else(|| {
            CliError::Config("robust synthesis needs `gamma` in the scenario".into())
        })?),
    };
    for j in 0..m {
        let st = match gamma {
            None => {
                let lin = synthesize_linear(spec, j).map_err(|e| match e {
                    CoreError::NoRoot { .. } => {
                        CliError::Infeasible(format!("no agent measures input u{}", j + 1))
                    }
                    other => other.into(),
                })?;
                if lin.has_unreachable() {
                    log::warn!(
                        "input u{}: agents {} cannot be reached and keep their own state",
                        j + 1,
                        agent_set(&lin.unreachable)
                    );
                }
                SubtermRules {
                    input: j,
                    map: lin.to_bool_map(),
                    unreachable: lin.unreachable.clone(),
                }
            }
            Some(g) => {
                let sys = synthesize_robust(spec, j, g).map_err(|e| match e {
                    CoreError::Infeasible {
                        redundancy, agent, ..
                    } => CliError::Infeasible(format!(
                        "input u{} is not {redundancy}-reachable: agent {} cannot hear {redundancy} secured agents",
                        j + 1,
                        agent + 1
                    )),
                    other => other.into(),
                })?;
                SubtermRules {
                    input: j,
                    map: sys.to_bool_map(),
                    unreachable: Vec::new(),
                }
            }
        };
        subterms.push(st);
    }
    Ok(RuleFile {
        mode,
        n_agents: n,
        n_inputs: m,
        gamma,
        subterms,
    })
}

pub fn cmd_synthesize(cfg: &ScenarioConfig, mode: Mode) -> Result<String, CliError> {
    Ok(synthesize(cfg, mode)?.to_text())
}

/// Result of `simulate`: the CSV trace plus a one-line summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutcome {
    pub csv: String,
    pub summary: String,
    pub code: u8,
}

fn bits(v: &BoolVec) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}

pub fn cmd_simulate(cfg: &ScenarioConfig, rules: &RuleFile) -> Result<SimOutcome, CliError> {
    let spec = &cfg.network;
    let (n, m) = (spec.n(), spec.m());
    if rules.n_agents != n || rules.n_inputs != m {
        return Err(CliError::Mismatch(format!(
            "rules are for {} agents and {} inputs, scenario has {n} and {m}",
            rules.n_agents, rules.n_inputs
        )));
    }
    let q = cfg.decisions.q();
    if rules.subterms.len() != q {
        return Err(CliError::Mismatch(format!(
            "{} subterm blocks, scenario needs {q}",
            rules.subterms.len()
        )));
    }
    let mut unreachable = Vec::new();
    for (h, st) in rules.subterms.iter().enumerate() {
        let j = cfg.decisions.subterm_input(h);
        if st.input != j {
            return Err(CliError::Mismatch(format!(
                "subterm {} is driven by u{}, scenario expects u{}",
                h + 1,
                st.input + 1,
                j + 1
            )));
        }
        // Occurrence-based check: exact incidence needs a truth table per agent.
        if !st
            .map
            .structural_incidence()
            .le(&spec.c().hcat(spec.v())?)?
        {
            log::warn!("subterm {} rules mention links outside the network", h + 1);
        }
        unreachable.extend(analyze(spec, j)?.unreachable);
    }
    unreachable.sort_unstable();
    unreachable.dedup();

    let mut sys = ConsensusSystem::new(rules.consensus_rules(), cfg.decisions.clone(), spec.v())?;
    sys.exclude(&unreachable)?;
    let trace = run(
        &sys,
        &cfg.initial_state,
        &cfg.inputs,
        &cfg.faults,
        cfg.t_max,
    )?;
    log::info!("e(t) = {:?}", trace.disagreement);

    let target = bits(&trace.centralized);
    let mut summary = match trace.converged_at {
        Some(t) if trace.final_disagreement() == 0 => {
            format!("converged at t={t}, match: consensus f(u)={target}")
        }
        Some(t) => format!(
            "converged at t={t}, mismatch: no agreement on f(u)={target} (e={})",
            trace.final_disagreement()
        ),
        None => format!(
            "no convergence within t_max={}, mismatch: no agreement on f(u)={target} (e={})",
            cfg.t_max,
            trace.final_disagreement()
        ),
    };
    let excluded = trace.excluded();
    if !excluded.is_empty() {
        let _ = write!(summary, "; excluded agents {}", agent_set(&excluded));
    }
    Ok(SimOutcome {
        csv: trace.to_csv(),
        summary,
        code: if trace.agrees() {
            EXIT_OK
        } else {
            EXIT_DISAGREEMENT
        },
    })
}
