//! The quota-constrained receiver.
//!
//! Given a scheme, the receiver picks a (possibly randomized) policy from
//! the set of policies whose overall action frequencies meet the quotas.
//! Among her optimal policies she breaks ties in the sender's favour. Both
//! stages are linear in the policy, so the response is a two-stage
//! lexicographic LP over `σ[s][j]` for the reachable signals.

pub(crate) mod flow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linprog::{solve_lex, LinearProgram, LpResult, Relation};
use crate::model::{
    check_constraints, joint_distribution, ConstraintProfile, Instance, Matrix, ResponsePolicy,
    SignalingScheme,
};
use crate::rational::Rational;

/// Per-signal, probability-weighted utilities of each action:
/// `receiver[s][j] = Σ_i prior[i]·φ[i][s]·u_R(i, j)` and likewise for the
/// sender. Dividing by `mass[s]` gives the posterior expected utility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalTable {
    pub mass: Vec<Rational>,
    pub receiver: Matrix,
    pub sender: Matrix,
}

impl SignalTable {
    pub fn new(inst: &Instance, scheme: &SignalingScheme) -> Result<Self> {
        if scheme.states() != inst.states() {
            return Err(Error::DimensionMismatch(format!(
                "scheme covers {} states, instance has {}",
                scheme.states(),
                inst.states()
            )));
        }
        Ok(Self::column(inst, scheme.probs().clone()))
    }

    /// Scores for arbitrary nonnegative `probs[state][signal]`; rows need
    /// not sum to one, so single columns can be scored in isolation.
    pub(crate) fn column(inst: &Instance, probs: Matrix) -> Self {
        let signals = probs.first().map_or(0, Vec::len);
        let m = inst.actions();
        let prior = inst.prior();
        let mass = (0..signals)
            .map(|s| {
                prior
                    .iter()
                    .zip(&probs)
                    .filter(|(p, row)| !p.is_zero() && !row[s].is_zero())
                    .map(|(p, row)| p * &row[s])
                    .sum()
            })
            .collect();
        let weighted = |u: &Matrix| -> Matrix {
            (0..signals)
                .map(|s| {
                    (0..m)
                        .map(|j| {
                            prior
                                .iter()
                                .zip(&probs)
                                .zip(u)
                                .filter(|((p, row), _)| !p.is_zero() && !row[s].is_zero())
                                .map(|((p, row), urow)| &(p * &row[s]) * &urow[j])
                                .sum()
                        })
                        .collect()
                })
                .collect()
        };
        SignalTable {
            receiver: weighted(inst.receiver_utility()),
            sender: weighted(inst.sender_utility()),
            mass,
        }
    }

    pub fn signals(&self) -> usize {
        self.mass.len()
    }

    pub fn actions(&self) -> usize {
        self.receiver.first().map_or(0, Vec::len)
    }

    pub fn reachable(&self) -> Vec<usize> {
        (0..self.signals())
            .filter(|&s| !self.mass[s].is_zero())
            .collect()
    }

    /// The receiver's favourite action at each reachable signal, ties broken
    /// toward the sender and then toward the lower index. `None` marks
    /// unreachable signals.
    pub fn greedy_choice(&self) -> Vec<Option<usize>> {
        (0..self.signals())
            .map(|s| {
                if self.mass[s].is_zero() {
                    return None;
                }
                let (r, u) = (&self.receiver[s], &self.sender[s]);
                let mut best = 0;
                for j in 1..r.len() {
                    if r[j] > r[best] || (r[j] == r[best] && u[j] > u[best]) {
                        best = j;
                    }
                }
                Some(best)
            })
            .collect()
    }

    fn action_mass(&self, choice: &[Option<usize>]) -> Vec<Rational> {
        let mut probs = vec![Rational::zero(); self.actions()];
        for (s, c) in choice.iter().enumerate() {
            if let Some(j) = c {
                probs[*j] += &self.mass[s];
            }
        }
        probs
    }

    fn policy_from_choice(&self, choice: &[Option<usize>]) -> ResponsePolicy {
        let m = self.actions();
        let probs = choice
            .iter()
            .map(|c| match c {
                Some(j) => (0..m)
                    .map(|k| {
                        if k == *j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
                None => uniform_row(m),
            })
            .collect();
        ResponsePolicy::new(probs).expect("pure rows are stochastic")
    }

    /// The receiver's LP over the reachable signals; variable `k·m + j` is
    /// `σ[reachable[k]][j]`.
    fn program(&self, c: &ConstraintProfile, reachable: &[usize]) -> LinearProgram {
        let m = self.actions();
        let vars = reachable.len() * m;
        let objective = reachable
            .iter()
            .flat_map(|&s| self.receiver[s].iter().cloned())
            .collect();
        let mut lp = LinearProgram::maximize(objective);
        for k in 0..reachable.len() {
            let mut row = vec![Rational::zero(); vars];
            for x in &mut row[k * m..(k + 1) * m] {
                *x = Rational::one();
            }
            lp.add_row(row, Relation::Eq, Rational::one());
        }
        for j in 0..m {
            let quota_row = || {
                let mut row = vec![Rational::zero(); vars];
                for (k, &s) in reachable.iter().enumerate() {
                    row[k * m + j] = self.mass[s].clone();
                }
                row
            };
            if c.lower()[j].is_positive() {
                lp.add_row(quota_row(), Relation::Ge, c.lower()[j].clone());
            }
            if !c.upper()[j].is_one() {
                lp.add_row(quota_row(), Relation::Le, c.upper()[j].clone());
            }
        }
        lp
    }

    fn policy_from_point(&self, point: &[Rational], reachable: &[usize]) -> ResponsePolicy {
        let m = self.actions();
        let mut probs: Matrix = (0..self.signals()).map(|_| uniform_row(m)).collect();
        for (k, &s) in reachable.iter().enumerate() {
            probs[s] = point[k * m..(k + 1) * m].to_vec();
        }
        ResponsePolicy::new(probs).expect("LP rows are stochastic")
    }

    fn policy_from_masses(&self, x: &Matrix) -> ResponsePolicy {
        let m = self.actions();
        let probs = x
            .iter()
            .zip(&self.mass)
            .map(|(row, mass)| {
                if mass.is_zero() {
                    uniform_row(m)
                } else {
                    row.iter().map(|v| v / mass).collect()
                }
            })
            .collect();
        ResponsePolicy::new(probs).expect("flow conserves each signal's mass")
    }

    fn values(&self, policy: &ResponsePolicy) -> (Rational, Rational) {
        let mut recv = Rational::zero();
        let mut send = Rational::zero();
        for s in self.reachable() {
            for (j, p) in policy.probs()[s].iter().enumerate() {
                if !p.is_zero() {
                    recv += p * &self.receiver[s][j];
                    send += p * &self.sender[s][j];
                }
            }
        }
        (recv, send)
    }
}

fn uniform_row(m: usize) -> Vec<Rational> {
    vec![Rational::new(1, m as i64); m]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponse {
    pub policy: ResponsePolicy,
    pub receiver_eu: Rational,
    pub sender_eu: Rational,
}

fn require_implementable(inst: &Instance, c: &ConstraintProfile) -> Result<()> {
    if !check_constraints(c, inst)?.implementable {
        return Err(Error::NotImplementable);
    }
    Ok(())
}

/// Receiver-optimal, then sender-optimal, quota-respecting response to
/// `scheme`. Unreachable signals get a uniform row that carries no weight.
pub fn best_response_lex(
    inst: &Instance,
    scheme: &SignalingScheme,
    c: &ConstraintProfile,
) -> Result<BestResponse> {
    require_implementable(inst, c)?;
    let table = SignalTable::new(inst, scheme)?;
    lex_response(&table, c)
}

/// As [`best_response_lex`] but always through the LP, without the
/// unconstrained shortcut. Exposed for cross-checking.
pub fn best_response_lex_lp(
    inst: &Instance,
    scheme: &SignalingScheme,
    c: &ConstraintProfile,
) -> Result<BestResponse> {
    require_implementable(inst, c)?;
    let table = SignalTable::new(inst, scheme)?;
    lex_response_lp(&table, c)
}

/// Lexicographic response from precomputed signal scores.
///
/// If the per-signal favourite (ties to the sender) already meets the
/// quotas it is optimal for the receiver over all policies, and among her
/// optimal policies it is the sender's best, so nothing else is needed.
/// Otherwise the favourites are repaired by min-cost flow; the LP is the
/// last resort.
pub fn lex_response(table: &SignalTable, c: &ConstraintProfile) -> Result<BestResponse> {
    let choice = table.greedy_choice();
    if c.admits(&table.action_mass(&choice)) {
        let policy = table.policy_from_choice(&choice);
        let (receiver_eu, sender_eu) = table.values(&policy);
        return Ok(BestResponse {
            policy,
            receiver_eu,
            sender_eu,
        });
    }
    let reachable = table.reachable();
    let posterior = |u: &Matrix, s: usize| -> Vec<Rational> {
        u[s].iter().map(|v| v / &table.mass[s]).collect()
    };
    let post: Vec<(Vec<Rational>, Vec<Rational>)> = reachable
        .iter()
        .map(|&s| (posterior(&table.receiver, s), posterior(&table.sender, s)))
        .collect();
    let sources: Vec<flow::Source<'_, Rational>> = reachable
        .iter()
        .zip(&post)
        .map(|(&s, (r, u))| flow::Source {
            mass: &table.mass[s],
            receiver: r,
            sender: u,
            start: choice[s].expect("reachable signals have a favourite"),
        })
        .collect();
    match flow::solve(&sources, c.lower(), c.upper(), FLOW_ROUNDS) {
        flow::Outcome::Optimal(x) => {
            let mut masses = vec![vec![Rational::zero(); table.actions()]; table.signals()];
            for (&s, row) in reachable.iter().zip(x) {
                masses[s] = row;
            }
            let policy = table.policy_from_masses(&masses);
            let (receiver_eu, sender_eu) = table.values(&policy);
            Ok(BestResponse {
                policy,
                receiver_eu,
                sender_eu,
            })
        }
        flow::Outcome::Infeasible => Err(infeasible()),
        flow::Outcome::GaveUp => lex_response_lp(table, c),
    }
}

/// Cycle-cancelling rounds before handing over to the LP.
const FLOW_ROUNDS: usize = 500;

fn infeasible() -> Error {
    Error::InfeasibleConstraints("no quota-respecting response exists".into())
}

/// [`lex_response`] without the shortcut.
pub fn lex_response_lp(table: &SignalTable, c: &ConstraintProfile) -> Result<BestResponse> {
    let reachable = table.reachable();
    let lp = table.program(c, &reachable);
    let secondary: Vec<Rational> = reachable
        .iter()
        .flat_map(|&s| table.sender[s].iter().cloned())
        .collect();
    match solve_lex(&lp, &secondary) {
        LpResult::Optimal(opt) => {
            let policy = table.policy_from_point(&opt.point, &reachable);
            let (receiver_eu, sender_eu) = table.values(&policy);
            Ok(BestResponse {
                policy,
                receiver_eu,
                sender_eu,
            })
        }
        LpResult::Infeasible => Err(infeasible()),
        LpResult::Unbounded => {
            unreachable!("response LP is bounded: every variable lies in [0, 1]")
        }
    }
}

/// The receiver's best attainable value over all quota-respecting policies.
pub fn receiver_optimum(table: &SignalTable, c: &ConstraintProfile) -> Result<Rational> {
    lex_response(table, c).map(|br| br.receiver_eu)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcReport {
    /// Obedience meets the quotas and no quota-respecting deviation does
    /// strictly better for the receiver.
    pub ic: bool,
    /// Best receiver value over all quota-respecting policies.
    pub best_deviation_value: Rational,
    /// Receiver value of following every recommendation.
    pub obedient_value: Rational,
    /// Following every recommendation would itself break a quota.
    pub obedience_infeasible: bool,
}

/// Ex-ante incentive compatibility of a direct scheme (signal `j`
/// recommends action `j`): obedience must be optimal among all policies
/// that respect the quotas in aggregate.
pub fn check_ex_ante_ic(
    inst: &Instance,
    direct: &SignalingScheme,
    c: &ConstraintProfile,
) -> Result<IcReport> {
    if direct.signals() != inst.actions() {
        return Err(Error::DimensionMismatch(format!(
            "direct scheme needs {} signals, got {}",
            inst.actions(),
            direct.signals()
        )));
    }
    require_implementable(inst, c)?;
    let table = SignalTable::new(inst, direct)?;
    let obedient_value: Rational = (0..table.signals())
        .map(|s| table.receiver[s][s].clone())
        .sum();
    let obedience_infeasible = !c.admits(&table.mass);
    let best_deviation_value = receiver_optimum(&table, c)?;
    let ic = !obedience_infeasible && obedient_value >= best_deviation_value;
    Ok(IcReport {
        ic,
        best_deviation_value,
        obedient_value,
        obedience_infeasible,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derandomized {
    pub direct_scheme: SignalingScheme,
    /// `joint[i][j] = Pr[state i, action j]`.
    pub joint_distribution: Matrix,
}

/// Moves the receiver's randomization into the scheme: signal `(s, j)` is
/// sent with probability `φ[i][s]·resp[s][j]` and recommends `j`.
pub fn expand(
    scheme: &SignalingScheme,
    resp: &ResponsePolicy,
) -> Result<(SignalingScheme, Vec<usize>)> {
    if resp.signals() != scheme.signals() {
        return Err(Error::DimensionMismatch(format!(
            "response covers {} signals, scheme sends {}",
            resp.signals(),
            scheme.signals()
        )));
    }
    let m = resp.actions();
    let probs = scheme
        .probs()
        .iter()
        .map(|row| {
            row.iter()
                .zip(resp.probs())
                .flat_map(|(phi, play)| play.iter().map(move |a| phi * a))
                .collect()
        })
        .collect();
    let recommends = (0..scheme.signals() * m).map(|k| k % m).collect();
    Ok((SignalingScheme::new(probs)?, recommends))
}

/// Merges all signals that recommend the same action.
pub fn compress(
    expanded: &SignalingScheme,
    recommends: &[usize],
    actions: usize,
) -> Result<SignalingScheme> {
    let probs = expanded
        .probs()
        .iter()
        .map(|row| {
            let mut out = vec![Rational::zero(); actions];
            for (p, &j) in row.iter().zip(recommends) {
                out[j] += p;
            }
            out
        })
        .collect();
    SignalingScheme::new(probs)
}

/// Direct scheme with a deterministic (obedient) response that induces the
/// same joint state-action distribution as `(scheme, resp)`.
pub fn derandomize(
    inst: &Instance,
    scheme: &SignalingScheme,
    resp: &ResponsePolicy,
) -> Result<Derandomized> {
    let joint_before = joint_distribution(inst, scheme, resp)?;
    let (expanded, recommends) = expand(scheme, resp)?;
    let direct_scheme = compress(&expanded, &recommends, inst.actions())?;
    let joint_distribution = joint_distribution(
        inst,
        &direct_scheme,
        &ResponsePolicy::identity(inst.actions()),
    )?;
    debug_assert_eq!(joint_before, joint_distribution);
    Ok(Derandomized {
        direct_scheme,
        joint_distribution,
    })
}
