//! Exact linear programming over [`Rational`].
//!
//! Dense two-phase tableau simplex with Bland's smallest-index rule, so it
//! terminates on degenerate problems without perturbation. Intended for
//! desk-sized programs (a few dozen variables and rows).

mod simplex;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub use simplex::{solve_lex, solve_lp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Bounds {
    pub fn nonnegative() -> Self {
        Bounds {
            lo: Some(Rational::zero()),
            hi: None,
        }
    }

    pub fn free() -> Self {
        Bounds { lo: None, hi: None }
    }

    pub fn boxed(lo: Rational, hi: Rational) -> Self {
        Bounds {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= x) && self.hi.as_ref().is_none_or(|hi| x <= hi)
    }
}

/// Maximize `objective · x` subject to `rows` and per-variable `bounds`.
/// Variables default to `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            rows: Vec::new(),
            bounds: vec![Bounds::nonnegative(); n],
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    /// Panics if `coeffs` has the wrong width.
    pub fn add_row(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> &mut Self {
        assert_eq!(
            coeffs.len(),
            self.vars(),
            "row width must match the objective"
        );
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn is_well_formed(&self) -> bool {
        self.bounds.len() == self.vars()
            && self.rows.iter().all(|r| r.coeffs.len() == self.vars())
            && self.bounds.iter().all(|b| match (&b.lo, &b.hi) {
                (Some(lo), Some(hi)) => lo <= hi,
                _ => true,
            })
    }

    /// Whether `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.vars()
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            && self
                .rows
                .iter()
                .all(|r| r.relation.holds(&dot(&r.coeffs, x), &r.rhs))
    }

    pub fn value_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Optimum {
    pub point: Vec<Rational>,
    pub value: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Optimal(Optimum),
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal(_) => LpStatus::Optimal,
            LpResult::Infeasible => LpStatus::Infeasible,
            LpResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpResult::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn into_optimum(self) -> Option<Optimum> {
        match self {
            LpResult::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.optimum().map(|o| &o.value)
    }
}
