//! Finite Boolean iteration maps `F : 𝔹ⁿ × 𝔹ᵐ → 𝔹ⁿ` and their convergence analysis.

use crate::bits::BoolVec;
use crate::error::{Error, Result};
use crate::expr::{BoolExpr, Var};
use crate::matrix::BoolMat;

/// Above this many variables, dependence falls back to syntactic occurrence.
pub const SEMANTIC_INCIDENCE_MAX_VARS: usize = 20;

/// Largest state count accepted by [`BoolMap::equilibria`].
pub const EQUILIBRIA_MAX_STATE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMap {
    n_state: usize,
    n_input: usize,
    components: Vec<BoolExpr>,
}

impl BoolMap {
    /// One component per state variable; every variable index must be in range.
    pub fn new(n_state: usize, n_input: usize, components: Vec<BoolExpr>) -> Result<Self> {
        if components.len() != n_state {
            return Err(Error::Shape(format!(
                "{} components for {n_state} state variables",
                components.len()
            )));
        }
        for c in &components {
            c.validate(n_state, n_input)?;
        }
        Ok(Self {
            n_state,
            n_input,
            components,
        })
    }

    /// Autonomous map (no inputs).
    pub fn autonomous(components: Vec<BoolExpr>) -> Result<Self> {
        Self::new(components.len(), 0, components)
    }

    pub fn n_state(&self) -> usize {
        self.n_state
    }

    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn components(&self) -> &[BoolExpr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &BoolExpr {
        &self.components[i]
    }

    pub fn apply(&self, x: &BoolVec, u: &BoolVec) -> BoolVec {
        self.check_point(x, u);
        self.components.iter().map(|c| c.eval(x, u)).collect()
    }

    /// `F^k(x)` at fixed input.
    pub fn iterate(&self, x: &BoolVec, u: &BoolVec, k: usize) -> BoolVec {
        let mut x = x.clone();
        for _ in 0..k {
            x = self.apply(&x, u);
        }
        x
    }

    fn check_point(&self, x: &BoolVec, u: &BoolVec) {
        assert_eq!(x.len(), self.n_state, "state length mismatch");
        assert_eq!(u.len(), self.n_input, "input length mismatch");
    }

    /// Incidence matrix over state columns followed by input columns
    /// (`n × (n + m)`).
    ///
    /// Dependence is exact (some assignment where flipping the variable flips
    /// the component) up to [`SEMANTIC_INCIDENCE_MAX_VARS`] variables, and
    /// syntactic occurrence beyond that. The syntactic form is a superset, so
    /// compliance checks stay sound.
    pub fn incidence_matrix(&self) -> BoolMat {
        let total = self.n_state + self.n_input;
        if total <= SEMANTIC_INCIDENCE_MAX_VARS {
            self.semantic_incidence()
        } else {
            self.structural_incidence()
        }
    }

    /// State-only incidence matrix `B(F)` (`n × n`).
    pub fn state_incidence(&self) -> BoolMat {
        self.incidence_matrix().left_columns(self.n_state)
    }

    /// Incidence by variable occurrence, regardless of map size.
    pub fn structural_incidence(&self) -> BoolMat {
        let total = self.n_state + self.n_input;
        let mut b = BoolMat::zeros(self.n_state, total);
        for (i, c) in self.components.iter().enumerate() {
            c.for_each_var(&mut |v| b.set(i, self.column_of(v), true));
        }
        b
    }

    fn column_of(&self, v: Var) -> usize {
        match v {
            Var::State(k) => k,
            Var::Input(j) => self.n_state + j,
        }
    }

    fn semantic_incidence(&self) -> BoolMat {
        let total = self.n_state + self.n_input;
        let size = 1usize << total;
        let mut b = BoolMat::zeros(self.n_state, total);
        let mut table = vec![false; size];
        for (i, c) in self.components.iter().enumerate() {
            // Only variables that occur can matter.
            let candidates: Vec<usize> = c.vars().into_iter().map(|v| self.column_of(v)).collect();
            if candidates.is_empty() {
                continue;
            }
            for (a, t) in table.iter_mut().enumerate() {
                *t = c.eval_packed(a as u64, self.n_state);
            }
            for j in candidates {
                let bit = 1usize << j;
                let depends = (0..size)
                    .filter(|a| a & bit == 0)
                    .any(|a| table[a] != table[a | bit]);
                if depends {
                    b.set(i, j, true);
                }
            }
        }
        b
    }

    /// Discrete derivative `F′(x)`: entry `(i, j)` is `F_i(x) ⊕ F_i(x̃ʲ)`.
    pub fn discrete_derivative(&self, x: &BoolVec, u: &BoolVec) -> BoolMat {
        self.check_point(x, u);
        let fx = self.apply(x, u);
        let mut d = BoolMat::zeros(self.n_state, self.n_state);
        for j in 0..self.n_state {
            let xj = x.flipped(j);
            for (i, c) in self.components.iter().enumerate() {
                if c.eval(&xj, u) != fx.get(i) {
                    d.set(i, j, true);
                }
            }
        }
        d
    }

    /// All fixed points `F(x, u) = x`, in lexicographic order of
    /// `(x_1, …, x_n)`.
    pub fn equilibria(&self, u: &BoolVec) -> Result<Vec<BoolVec>> {
        if self.n_state > EQUILIBRIA_MAX_STATE {
            return Err(Error::Capacity {
                n_state: self.n_state,
                cap: EQUILIBRIA_MAX_STATE,
            });
        }
        assert_eq!(u.len(), self.n_input, "input length mismatch");
        let n = self.n_state;
        let mut out = Vec::new();
        for k in 0..1u64 << n {
            // x_1 is the most significant position.
            let x: BoolVec = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
            if self
                .components
                .iter()
                .enumerate()
                .all(|(i, c)| c.eval(&x, u) == x.get(i))
            {
                out.push(x);
            }
        }
        Ok(out)
    }

    pub fn is_equilibrium(&self, x: &BoolVec, u: &BoolVec) -> bool {
        self.apply(x, u) == *x
    }

    /// Attractiveness in the Von Neumann neighbourhood of the equilibrium `x`:
    /// `ρ(F′(x)) = 0` and no column of `F′(x)` holds more than one 1.
    pub fn is_attractive(&self, x: &BoolVec, u: &BoolVec) -> Result<bool> {
        if !self.is_equilibrium(x, u) {
            return Err(Error::NotEquilibrium(x.to_string()));
        }
        let d = self.discrete_derivative(x, u);
        if d.spectral_radius()? {
            return Ok(false);
        }
        Ok((0..self.n_state).all(|j| d.col(j).count_ones() <= 1))
    }

    /// Global convergence to a unique equilibrium, decided by nilpotency of
    /// the state incidence matrix. When convergent, also returns the smallest
    /// `q` with `B(F)^q = 0`; `F^q` is then constant.
    pub fn global_convergence(&self) -> Result<Option<usize>> {
        if self.n_state == 0 {
            return Ok(Some(0));
        }
        self.state_incidence().nilpotency_index()
    }

    pub fn is_globally_convergent(&self) -> Result<(bool, Option<usize>)> {
        let q = self.global_convergence()?;
        Ok((q.is_some(), q))
    }

    /// `(C, V)`-compliance: `B(F(X, u)) ≤ (C | V)`.
    pub fn is_compliant(&self, c: &BoolMat, v: &BoolMat) -> Result<bool> {
        let n = self.n_state;
        if c.rows() != n || c.cols() != n {
            return Err(Error::Shape(format!(
                "C is {}x{}, map has {n} components",
                c.rows(),
                c.cols()
            )));
        }
        if v.rows() != n || v.cols() != self.n_input {
            return Err(Error::Shape(format!(
                "V is {}x{}, expected {n}x{}",
                v.rows(),
                v.cols(),
                self.n_input
            )));
        }
        self.incidence_matrix().le(&c.hcat(v)?)
    }

    /// Restriction to the listed components; all other components become the
    /// constant 0. Used to analyse a map over a sub-population of agents.
    pub fn restricted_to(&self, keep: &BoolVec) -> Self {
        assert_eq!(keep.len(), self.n_state, "mask length mismatch");
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if keep.get(i) {
                    c.clone()
                } else {
                    BoolExpr::Const(false)
                }
            })
            .collect();
        Self {
            n_state: self.n_state,
            n_input: self.n_input,
            components,
        }
    }
}
