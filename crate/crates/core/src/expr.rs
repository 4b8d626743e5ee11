//! Symbolic Boolean expressions over state and input variables, with a
//! small recursive-descent parser for the textual form.
//!
//! Textual variables are 1-based: `x1` is state variable 0, `u1` is input 0.
//! Operators are `!` (not), `&` (and), `|` (or) with the usual precedence
//! NOT > AND > OR; `0` and `1` are constants.

use std::fmt;

use crate::bits::BoolVec;
use crate::error::{Error, Result};

/// A variable reference inside an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    State(usize),
    Input(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    StateVar(usize),
    InputVar(usize),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Not(Box<BoolExpr>),
}

impl BoolExpr {
    pub fn state(i: usize) -> Self {
        BoolExpr::StateVar(i)
    }

    pub fn input(j: usize) -> Self {
        BoolExpr::InputVar(j)
    }

    /// Conjunction with constant folding; nested conjunctions are flattened.
    pub fn and<I: IntoIterator<Item = BoolExpr>>(children: I) -> Self {
        let mut kept = Vec::new();
        for c in children {
            match c {
                BoolExpr::Const(true) => {}
                BoolExpr::Const(false) => return BoolExpr::Const(false),
                BoolExpr::And(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => BoolExpr::Const(true),
            1 => kept.pop().unwrap(),
            _ => BoolExpr::And(kept),
        }
    }

    /// Disjunction with constant folding; nested disjunctions are flattened.
    pub fn or<I: IntoIterator<Item = BoolExpr>>(children: I) -> Self {
        let mut kept = Vec::new();
        for c in children {
            match c {
                BoolExpr::Const(false) => {}
                BoolExpr::Const(true) => return BoolExpr::Const(true),
                BoolExpr::Or(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => BoolExpr::Const(false),
            1 => kept.pop().unwrap(),
            _ => BoolExpr::Or(kept),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: BoolExpr) -> Self {
        match child {
            BoolExpr::Const(b) => BoolExpr::Const(!b),
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    /// Evaluates with an arbitrary variable lookup.
    pub fn eval_by<F: Fn(Var) -> bool>(&self, lookup: &F) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::StateVar(i) => lookup(Var::State(*i)),
            BoolExpr::InputVar(j) => lookup(Var::Input(*j)),
            BoolExpr::And(cs) => cs.iter().all(|c| c.eval_by(lookup)),
            BoolExpr::Or(cs) => cs.iter().any(|c| c.eval_by(lookup)),
            BoolExpr::Not(c) => !c.eval_by(lookup),
        }
    }

    pub fn eval(&self, state: &BoolVec, input: &BoolVec) -> bool {
        self.eval_by(&|v| match v {
            Var::State(i) => state.get(i),
            Var::Input(j) => input.get(j),
        })
    }

    /// Evaluates against a packed assignment: bit `i` is state variable `i`,
    /// bit `n_state + j` is input variable `j`.
    pub fn eval_packed(&self, bits: u64, n_state: usize) -> bool {
        self.eval_by(&|v| match v {
            Var::State(i) => (bits >> i) & 1 == 1,
            Var::Input(j) => (bits >> (n_state + j)) & 1 == 1,
        })
    }

    /// Replaces every variable by the expression `f` returns, re-folding constants.
    pub fn substitute<F: Fn(Var) -> BoolExpr>(&self, f: &F) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::StateVar(i) => f(Var::State(*i)),
            BoolExpr::InputVar(j) => f(Var::Input(*j)),
            BoolExpr::And(cs) => BoolExpr::and(cs.iter().map(|c| c.substitute(f))),
            BoolExpr::Or(cs) => BoolExpr::or(cs.iter().map(|c| c.substitute(f))),
            BoolExpr::Not(c) => BoolExpr::not(c.substitute(f)),
        }
    }

    /// Visits every variable occurrence.
    pub fn for_each_var<F: FnMut(Var)>(&self, f: &mut F) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::StateVar(i) => f(Var::State(*i)),
            BoolExpr::InputVar(j) => f(Var::Input(*j)),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().for_each(|c| c.for_each_var(f)),
            BoolExpr::Not(c) => c.for_each_var(f),
        }
    }

    /// Sorted, deduplicated list of variables occurring in the expression.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.for_each_var(&mut |v| out.push(v));
        out.sort();
        out.dedup();
        out
    }

    /// Checks arity and variable bounds.
    pub fn validate(&self, n_state: usize, n_input: usize) -> Result<()> {
        match self {
            BoolExpr::Const(_) => Ok(()),
            BoolExpr::StateVar(i) if *i >= n_state => Err(Error::Index {
                index: *i,
                limit: n_state,
            }),
            BoolExpr::InputVar(j) if *j >= n_input => Err(Error::Index {
                index: *j,
                limit: n_input,
            }),
            BoolExpr::StateVar(_) | BoolExpr::InputVar(_) => Ok(()),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => {
                if cs.len() < 2 {
                    return Err(Error::Argument(format!(
                        "and/or node with {} children",
                        cs.len()
                    )));
                }
                cs.iter().try_for_each(|c| c.validate(n_state, n_input))
            }
            BoolExpr::Not(c) => c.validate(n_state, n_input),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(_) => 0,
            BoolExpr::And(_) => 1,
            _ => 2,
        }
    }

    fn fmt_child(&self, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < parent {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            BoolExpr::StateVar(i) => write!(f, "x{}", i + 1),
            BoolExpr::InputVar(j) => write!(f, "u{}", j + 1),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => {
                let (sep, prec) = if matches!(self, BoolExpr::And(_)) {
                    (" & ", 1)
                } else {
                    (" | ", 0)
                };
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    // Same-precedence children need parens only if they were
                    // built without flattening.
                    c.fmt_child(prec + 1, f)?;
                }
                Ok(())
            }
            BoolExpr::Not(c) => {
                f.write_str("!")?;
                c.fmt_child(2, f)
            }
        }
    }
}

/// Parses a decision expression over inputs only (`u1`, `u2`, ...).
pub fn parse_decision(text: &str) -> Result<BoolExpr> {
    Parser::new(text, Some(0), None).parse()
}

/// Parses an expression over `x1..x{n_state}` and `u1..u{n_input}`.
pub fn parse_expr(text: &str, n_state: usize, n_input: usize) -> Result<BoolExpr> {
    Parser::new(text, Some(n_state), Some(n_input)).parse()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    max_state: Option<usize>,
    max_input: Option<usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, max_state: Option<usize>, max_input: Option<usize>) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            max_state,
            max_input,
        }
    }

    fn parse(mut self) -> Result<BoolExpr> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.syntax(format!("unexpected `{}`", self.src[self.pos] as char)));
        }
        Ok(e)
    }

    fn syntax(&self, message: String) -> Error {
        Error::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := term ('|' term)*
    fn expr(&mut self) -> Result<BoolExpr> {
        let mut terms = vec![self.term()?];
        while self.eat(b'|') {
            terms.push(self.term()?);
        }
        Ok(BoolExpr::or(terms))
    }

    // term := factor ('&' factor)*
    fn term(&mut self) -> Result<BoolExpr> {
        let mut factors = vec![self.factor()?];
        while self.eat(b'&') {
            factors.push(self.factor()?);
        }
        Ok(BoolExpr::and(factors))
    }

    // factor := '!' factor | '(' expr ')' | ident | '0' | '1'
    fn factor(&mut self) -> Result<BoolExpr> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.syntax("unexpected end of input".into()));
        };
        match c {
            b'!' => {
                self.pos += 1;
                Ok(BoolExpr::not(self.factor()?))
            }
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`".into()));
                }
                Ok(e)
            }
            b'0' | b'1' if !self.next_is_ident_char(self.pos + 1) => {
                self.pos += 1;
                Ok(BoolExpr::Const(c == b'1'))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            other => Err(self.syntax(format!("unexpected `{}`", other as char))),
        }
    }

    fn next_is_ident_char(&self, at: usize) -> bool {
        self.src
            .get(at)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn ident(&mut self) -> Result<BoolExpr> {
        let start = self.pos;
        while self.next_is_ident_char(self.pos) {
            self.pos += 1;
        }
        // The slice is ASCII by construction.
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let unknown = || Error::UnknownIdentifier {
            offset: start,
            name: name.to_string(),
        };
        let (kind, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        if k == 0 {
            return Err(unknown());
        }
        let in_bounds = |limit: Option<usize>| limit.is_none_or(|l| k <= l);
        match kind {
            "u" if in_bounds(self.max_input) => Ok(BoolExpr::InputVar(k - 1)),
            "x" if in_bounds(self.max_state) => Ok(BoolExpr::StateVar(k - 1)),
            _ => Err(unknown()),
        }
    }
}
