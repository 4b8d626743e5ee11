//! Rule files: one block per subterm, one `x<i> <- <expr>` line per agent.
//!
//! ```text
//! mode robust
//! agents 5
//! inputs 1
//! gamma 1
//!
//! subterm 1 input u1
//! x1 <- u1
//! x3 <- x1 & x2 | x1 & x4 | x2 & x4
//! ...
//! ```
//!
//! Inside a block `x<i>` is agent `i`'s value of that subterm and `u<j>` the
//! value fed by input `j`. An optional `unreachable x<i> ...` line lists
//! agents the synthesizer could not reach. `#` starts a comment.

use std::fmt::Write as _;

use logcons::{parse_expr, BoolExpr, BoolMap, ConsensusRule};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Linear,
    Robust,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Robust => "robust",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtermRules {
    /// Zero-based driving input.
    pub input: usize,
    pub map: BoolMap,
    /// Agents the synthesizer could not reach (informational).
    pub unreachable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFile {
    pub mode: Mode,
    pub n_agents: usize,
    pub n_inputs: usize,
    pub gamma: Option<usize>,
    pub subterms: Vec<SubtermRules>,
}

impl RuleFile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode {}", self.mode.as_str());
        let _ = writeln!(out, "agents {}", self.n_agents);
        let _ = writeln!(out, "inputs {}", self.n_inputs);
        if let Some(g) = self.gamma {
            let _ = writeln!(out, "gamma {g}");
        }
        for (h, st) in self.subterms.iter().enumerate() {
            let _ = writeln!(out, "\nsubterm {} input u{}", h + 1, st.input + 1);
            if !st.unreachable.is_empty() {
                let names: Vec<String> = st
                    .unreachable
                    .iter()
                    .map(|i| format!("x{}", i + 1))
                    .collect();
                let _ = writeln!(out, "unreachable {}", names.join(" "));
            }
            for (i, c) in st.map.components().iter().enumerate() {
                let _ = writeln!(out, "x{} <- {c}", i + 1);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut mode = None;
        let mut n_agents = None;
        let mut n_inputs = None;
        let mut gamma = None;
        let mut blocks: Vec<Block> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let err = |msg: String| CliError::Rules {
                line: lineno + 1,
                message: msg,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((lhs, rhs)) = line.split_once("<-") {
                let (n, m) = match (n_agents, n_inputs) {
                    (Some(n), Some(m)) => (n, m),
                    _ => return Err(err("rule before `agents` and `inputs` headers".into())),
                };
                let Some(block) = blocks.last_mut() else {
                    return Err(err("rule outside a `subterm` block".into()));
                };
                let agent = parse_index(lhs.trim(), 'x', n).map_err(err)?;
                let expr = parse_expr(rhs, n, m).map_err(|e| err(e.to_string()))?;
                if block.comps[agent].replace(expr).is_some() {
                    return Err(err(format!("duplicate rule for x{}", agent + 1)));
                }
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["mode", "linear"] => mode = Some(Mode::Linear),
                ["mode", "robust"] => mode = Some(Mode::Robust),
                ["agents", k] => n_agents = Some(parse_count(k).map_err(err)?),
                ["inputs", k] => n_inputs = Some(parse_count(k).map_err(err)?),
                ["gamma", k] => {
                    gamma = Some(k.parse().map_err(|_| err(format!("bad gamma `{k}`")))?)
                }
                ["unreachable", names @ ..] => {
                    let n = n_agents.unwrap_or(0);
                    let Some(block) = blocks.last_mut() else {
                        return Err(err("`unreachable` outside a `subterm` block".into()));
                    };
                    for name in names {
                        block
                            .unreachable
                            .push(parse_index(name, 'x', n).map_err(err)?);
                    }
                }
                ["subterm", h, "input", u] => {
                    let (n, m) = match (n_agents, n_inputs) {
                        (Some(n), Some(m)) => (n, m),
                        _ => return Err(err("`subterm` before `agents` and `inputs`".into())),
                    };
                    let h: usize = h.parse().map_err(|_| err(format!("bad subterm `{h}`")))?;
                    if h != blocks.len() + 1 {
                        return Err(err(format!(
                            "expected subterm {}, found {h}",
                            blocks.len() + 1
                        )));
                    }
                    let input = parse_index(u, 'u', m).map_err(err)?;
                    blocks.push(Block {
                        line: lineno + 1,
                        input,
                        comps: vec![None; n],
                        unreachable: Vec::new(),
                    });
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }

        let mode = mode.ok_or_else(|| CliError::Rules {
            line: 0,
            message: "missing `mode` header".into(),
        })?;
        let (n, m) = match (n_agents, n_inputs) {
            (Some(n), Some(m)) => (n, m),
            _ => {
                return Err(CliError::Rules {
                    line: 0,
                    message: "missing `agents` or `inputs` header".into(),
                })
            }
        };
        if blocks.is_empty() {
            return Err(CliError::Rules {
                line: 0,
                message: "no subterm blocks".into(),
            });
        }
        let mut subterms = Vec::with_capacity(blocks.len());
        for Block {
            line,
            input,
            comps,
            unreachable,
        } in blocks
        {
            let missing: Vec<String> = comps
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_none())
                .map(|(i, _)| format!("x{}", i + 1))
                .collect();
            if !missing.is_empty() {
                return Err(CliError::Rules {
                    line,
                    message: format!("block has no rule for {}", missing.join(", ")),
                });
            }
            let comps = comps.into_iter().map(Option::unwrap).collect();
            let map = BoolMap::new(n, m, comps).map_err(|e| CliError::Rules {
                line,
                message: e.to_string(),
            })?;
            subterms.push(SubtermRules {
                input,
                map,
                unreachable,
            });
        }
        Ok(Self {
            mode,
            n_agents: n,
            n_inputs: m,
            gamma,
            subterms,
        })
    }

    pub fn consensus_rules(&self) -> Vec<ConsensusRule> {
        self.subterms
            .iter()
            .map(|s| ConsensusRule::Map(s.map.clone()))
            .collect()
    }
}

struct Block {
    line: usize,
    input: usize,
    comps: Vec<Option<BoolExpr>>,
    unreachable: Vec<usize>,
}

fn parse_count(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(format!("expected a positive count, got `{text}`")),
    }
}

fn parse_index(text: &str, prefix: char, limit: usize) -> Result<usize, String> {
    let idx = text
        .strip_prefix(prefix)
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| format!("expected `{prefix}<number>`, got `{text}`"))?;
    if idx == 0 || idx > limit {
        return Err(format!("`{text}` outside {prefix}1..{prefix}{limit}"));
    }
    Ok(idx - 1)
}
