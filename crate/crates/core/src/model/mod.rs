//! States, actions, utilities, quotas and the schemes and policies that act
//! on them, plus the evaluation routines every solver shares.
//!
//! Indices are zero-based throughout: state `i` is the conventional
//! `ω_{i+1}` and action `j` is `a_{j+1}`. Matrices are stored row-major as
//! `Vec<Vec<Rational>>`; utility matrices are indexed `[state][action]`,
//! schemes `[state][signal]` and response policies `[signal][action]`.

pub(crate) mod classify;
mod eval;
mod io;

pub use classify::{
    check_constraints, classify_instance, compare_binding, Binding, Classification,
    ConstraintCheck, SenderCase,
};
pub use eval::{evaluate, joint_distribution, posterior, signal_probs, Evaluation};
pub use io::{Axis, ConstraintsFile, InstanceFile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Prior over states plus both players' utilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    prior: Vec<Rational>,
    sender_utility: Matrix,
    receiver_utility: Matrix,
}

impl Instance {
    pub fn new(
        prior: Vec<Rational>,
        sender_utility: Matrix,
        receiver_utility: Matrix,
    ) -> Result<Self> {
        let n = prior.len();
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 states, got {n}"
            )));
        }
        if let Some(i) = prior.iter().position(Rational::is_negative) {
            return Err(Error::InvalidInstance(format!(
                "prior entry {i} is negative"
            )));
        }
        let total: Rational = prior.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!(
                "prior sums to {total}, not 1"
            )));
        }
        let m = sender_utility.first().map_or(0, Vec::len);
        if m < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 actions, got {m}"
            )));
        }
        for (name, mat) in [("sender", &sender_utility), ("receiver", &receiver_utility)] {
            if mat.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} utility has {} rows, prior has {n} states",
                    mat.len()
                )));
            }
            if let Some(i) = mat.iter().position(|row| row.len() != m) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} utility row {i} has {} entries, expected {m}",
                    mat[i].len()
                )));
            }
        }
        Ok(Instance {
            prior,
            sender_utility,
            receiver_utility,
        })
    }

    /// Convenience constructor from integer utilities.
    pub fn from_integers(
        prior: Vec<Rational>,
        sender: &[&[i64]],
        receiver: &[&[i64]],
    ) -> Result<Self> {
        let conv = |rows: &[&[i64]]| -> Matrix {
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from(v)).collect())
                .collect()
        };
        Instance::new(prior, conv(sender), conv(receiver))
    }

    pub fn states(&self) -> usize {
        self.prior.len()
    }

    pub fn actions(&self) -> usize {
        self.sender_utility[0].len()
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn sender_utility(&self) -> &Matrix {
        &self.sender_utility
    }

    pub fn receiver_utility(&self) -> &Matrix {
        &self.receiver_utility
    }

    pub fn is_binary(&self) -> bool {
        self.states() == 2 && self.actions() == 2
    }

    /// Largest minus smallest sender utility entry.
    pub fn sender_spread(&self) -> Rational {
        spread(&self.sender_utility)
    }

    /// Largest minus smallest receiver utility entry.
    pub fn receiver_spread(&self) -> Rational {
        spread(&self.receiver_utility)
    }
}

fn spread(mat: &Matrix) -> Rational {
    let mut it = mat.iter().flatten();
    let first = it.next().expect("validated non-empty matrix").clone();
    let (lo, hi) = it.fold((first.clone(), first), |(lo, hi), x| {
        (lo.min(x.clone()), hi.max(x.clone()))
    });
    hi - lo
}

/// Per-action lower and upper bounds on the overall probability of play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintProfile {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

impl ConstraintProfile {
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} lower bounds vs {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(&zero <= lo && lo <= hi && hi <= &one) {
                return Err(Error::InvalidConstraints(format!(
                    "action {j}: need 0 <= {lo} <= {hi} <= 1"
                )));
            }
        }
        Ok(ConstraintProfile { lower, upper })
    }

    /// `[0, 1]` for every action.
    pub fn vacuous(actions: usize) -> Self {
        ConstraintProfile {
            lower: vec![Rational::zero(); actions],
            upper: vec![Rational::one(); actions],
        }
    }

    /// Vacuous except for `[lower, upper]` on a single action.
    pub fn bounding(
        actions: usize,
        action: usize,
        lower: Rational,
        upper: Rational,
    ) -> Result<Self> {
        let mut c = Self::vacuous(actions);
        c.lower[action] = lower;
        c.upper[action] = upper;
        Self::new(c.lower, c.upper)
    }

    pub fn actions(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn is_vacuous(&self) -> bool {
        self.lower.iter().all(Rational::is_zero) && self.upper.iter().all(Rational::is_one)
    }

    /// For two actions, the bounds on `Pr[a₁]` implied by all four quotas:
    /// `(max(lower₁, 1 − upper₂), min(upper₁, 1 − lower₂))`.
    pub fn effective_binary_bounds(&self) -> Result<(Rational, Rational)> {
        if self.actions() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "effective bounds need 2 actions, got {}",
                self.actions()
            )));
        }
        let one = Rational::one();
        let lb = self.lower[0].clone().max(&one - &self.upper[1]);
        let ub = self.upper[0].clone().min(&one - &self.lower[1]);
        Ok((lb, ub))
    }

    /// Whether `probs` (an action distribution) respects every quota.
    pub fn admits(&self, probs: &[Rational]) -> bool {
        probs.len() == self.actions()
            && probs
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(p, (lo, hi))| lo <= p && p <= hi)
    }
}

fn check_stochastic(probs: &Matrix, what: &str) -> std::result::Result<usize, String> {
    let width = probs.first().map_or(0, Vec::len);
    if width == 0 {
        return Err(format!("{what} has no columns"));
    }
    for (i, row) in probs.iter().enumerate() {
        if row.len() != width {
            return Err(format!(
                "{what} row {i} has {} entries, expected {width}",
                row.len()
            ));
        }
        if let Some(j) = row.iter().position(Rational::is_negative) {
            return Err(format!("{what} entry ({i}, {j}) is negative"));
        }
        let total: Rational = row.iter().sum();
        if !total.is_one() {
            return Err(format!("{what} row {i} sums to {total}"));
        }
    }
    Ok(width)
}

/// `probs[i][s] = Pr[signal s | state i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignalingScheme {
    probs: Matrix,
}

impl SignalingScheme {
    pub fn new(probs: Matrix) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidScheme("no states".into()));
        }
        check_stochastic(&probs, "scheme").map_err(Error::InvalidScheme)?;
        Ok(SignalingScheme { probs })
    }

    /// Signal `i` in state `i`; `n` states and `n` signals.
    pub fn full_revelation(states: usize) -> Self {
        SignalingScheme {
            probs: identity(states),
        }
    }

    /// Every state sends the same signal distribution `row`.
    pub fn uninformative(states: usize, row: Vec<Rational>) -> Result<Self> {
        Self::new(vec![row; states])
    }

    pub fn states(&self) -> usize {
        self.probs.len()
    }

    pub fn signals(&self) -> usize {
        self.probs[0].len()
    }

    pub fn probs(&self) -> &Matrix {
        &self.probs
    }

    pub fn get(&self, state: usize, signal: usize) -> &Rational {
        &self.probs[state][signal]
    }

    pub fn into_probs(self) -> Matrix {
        self.probs
    }
}

/// `probs[s][j] = Pr[action j | signal s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponsePolicy {
    probs: Matrix,
}

impl ResponsePolicy {
    pub fn new(probs: Matrix) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidResponse("no signals".into()));
        }
        check_stochastic(&probs, "response").map_err(Error::InvalidResponse)?;
        Ok(ResponsePolicy { probs })
    }

    /// Obedient response to a direct scheme: play the recommended action.
    pub fn identity(actions: usize) -> Self {
        ResponsePolicy {
            probs: identity(actions),
        }
    }

    /// Deterministic policy: signal `s` triggers action `choice[s]`.
    pub fn deterministic(choice: &[usize], actions: usize) -> Result<Self> {
        let probs = choice
            .iter()
            .map(|&a| {
                if a >= actions {
                    return Err(Error::InvalidResponse(format!("action {a} out of range")));
                }
                let mut row = vec![Rational::zero(); actions];
                row[a] = Rational::one();
                Ok(row)
            })
            .collect::<Result<Matrix>>()?;
        Self::new(probs)
    }

    pub fn signals(&self) -> usize {
        self.probs.len()
    }

    pub fn actions(&self) -> usize {
        self.probs[0].len()
    }

    pub fn probs(&self) -> &Matrix {
        &self.probs
    }

    /// The action played with certainty at each signal, if every row is pure.
    pub fn as_deterministic(&self) -> Option<Vec<usize>> {
        self.probs
            .iter()
            .map(|row| row.iter().position(Rational::is_one))
            .collect()
    }
}

pub(crate) fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Which solver produced a [`Solution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BinaryClosedForm,
    ExpostLp,
    GridOracle,
    Manual,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::BinaryClosedForm => "binary-closed-form",
            Method::ExpostLp => "expost-lp",
            Method::GridOracle => "grid-oracle",
            Method::Manual => "manual",
        })
    }
}

/// A scheme together with the receiver's response and the exact outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub scheme: SignalingScheme,
    pub response: ResponsePolicy,
    pub sender_eu: Rational,
    pub receiver_eu: Rational,
    /// Overall probability of each action.
    pub action_probs: Vec<Rational>,
    /// Probability of each signal.
    pub signal_probs: Vec<Rational>,
    pub method: Method,
}

impl Solution {
    /// Evaluates `(scheme, response)` on `inst` and packages the result.
    pub fn assemble(
        inst: &Instance,
        scheme: SignalingScheme,
        response: ResponsePolicy,
        method: Method,
    ) -> Result<Self> {
        let ev = evaluate(inst, &scheme, &response)?;
        let signal_probs = signal_probs(inst, &scheme)?;
        Ok(Solution {
            scheme,
            response,
            sender_eu: ev.sender_eu,
            receiver_eu: ev.receiver_eu,
            action_probs: ev.action_probs,
            signal_probs,
            method,
        })
    }

    /// Recomputes the outcome from scratch and checks it matches the stored
    /// values exactly.
    pub fn is_consistent(&self, inst: &Instance) -> bool {
        match evaluate(inst, &self.scheme, &self.response) {
            Ok(ev) => {
                ev.sender_eu == self.sender_eu
                    && ev.receiver_eu == self.receiver_eu
                    && ev.action_probs == self.action_probs
            }
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn instance_validation() {
        let ok = Instance::from_integers(
            vec![q("1/4"), q("3/4")],
            &[&[2, 1], &[3, 0]],
            &[&[1, 0], &[0, 1]],
        );
        assert!(ok.is_ok());
        let bad_prior = Instance::from_integers(
            vec![q("1/4"), q("1/4")],
            &[&[2, 1], &[3, 0]],
            &[&[1, 0], &[0, 1]],
        );
        assert!(matches!(bad_prior, Err(Error::InvalidInstance(_))));
        let neg = Instance::from_integers(
            vec![q("-1/4"), q("5/4")],
            &[&[2, 1], &[3, 0]],
            &[&[1, 0], &[0, 1]],
        );
        assert!(matches!(neg, Err(Error::InvalidInstance(_))));
        let ragged = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[2, 1], &[3]],
            &[&[1, 0], &[0, 1]],
        );
        assert!(matches!(ragged, Err(Error::DimensionMismatch(_))));
        let rows =
            Instance::from_integers(vec![q("1/2"), q("1/2")], &[&[2, 1], &[3, 0]], &[&[1, 0]]);
        assert!(matches!(rows, Err(Error::DimensionMismatch(_))));
        let one_state = Instance::from_integers(vec![q("1")], &[&[2, 1]], &[&[1, 0]]);
        assert!(one_state.is_err());
    }

    #[test]
    fn constraint_validation() {
        assert!(ConstraintProfile::new(vec![q("1/2")], vec![q("1/4")]).is_err());
        assert!(ConstraintProfile::new(vec![q("0")], vec![q("3/2")]).is_err());
        assert!(ConstraintProfile::new(vec![q("-1/2")], vec![q("1/2")]).is_err());
        assert!(ConstraintProfile::new(vec![q("0"), q("0")], vec![q("1")]).is_err());
        let c = ConstraintProfile::new(vec![q("1/4"), q("1/3")], vec![q("1"), q("1/2")]).unwrap();
        assert_eq!(c.effective_binary_bounds().unwrap(), (q("1/2"), q("2/3")));
    }

    #[test]
    fn scheme_validation() {
        assert!(SignalingScheme::new(vec![vec![q("1/2"), q("1/3")]]).is_err());
        assert!(SignalingScheme::new(vec![vec![q("3/2"), q("-1/2")]]).is_err());
        assert!(SignalingScheme::new(vec![vec![q("1")], vec![q("1/2"), q("1/2")]]).is_err());
        assert!(ResponsePolicy::deterministic(&[0, 2], 2).is_err());
        let r = ResponsePolicy::deterministic(&[1, 0], 2).unwrap();
        assert_eq!(r.as_deterministic(), Some(vec![1, 0]));
    }
}
