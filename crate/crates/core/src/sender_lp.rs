//! Sender-optimal direct schemes under ex-post obedience and quotas.
//!
//! Variables are `φ[i][j]`, the probability of recommending action `j` in
//! state `i`. Every recommendation must be a best reply to its posterior,
//! and the recommendation frequencies must meet the quotas. The sender's
//! payoff is maximized first, then the receiver's.

use crate::error::{Error, Result};
use crate::linprog::{solve_lex, LinearProgram, LpResult, Relation};
use crate::model::{
    check_constraints, ConstraintProfile, Instance, Method, ResponsePolicy, SignalingScheme,
    Solution,
};
use crate::rational::Rational;

/// The obedience/quota LP and the receiver's objective as the secondary
/// stage. Variable `i·m + j` is `φ[i][j]`.
pub fn expost_program(inst: &Instance, c: &ConstraintProfile) -> (LinearProgram, Vec<Rational>) {
    let (n, m) = (inst.states(), inst.actions());
    let prior = inst.prior();
    let weighted = |u: &Vec<Vec<Rational>>| -> Vec<Rational> {
        (0..n)
            .flat_map(|i| (0..m).map(move |j| &prior[i] * &u[i][j]))
            .collect()
    };
    let mut lp = LinearProgram::maximize(weighted(inst.sender_utility()));
    let secondary = weighted(inst.receiver_utility());
    let zero_row = || vec![Rational::zero(); n * m];
    for i in 0..n {
        let mut row = zero_row();
        for x in &mut row[i * m..(i + 1) * m] {
            *x = Rational::one();
        }
        lp.add_row(row, Relation::Eq, Rational::one());
    }
    let ur = inst.receiver_utility();
    for j in 0..m {
        for k in (0..m).filter(|&k| k != j) {
            let mut row = zero_row();
            for i in 0..n {
                row[i * m + j] = &prior[i] * &(&ur[i][j] - &ur[i][k]);
            }
            if row.iter().any(|x| !x.is_zero()) {
                lp.add_row(row, Relation::Ge, Rational::zero());
            }
        }
    }
    for j in 0..m {
        let quota_row = || {
            let mut row = zero_row();
            for i in 0..n {
                row[i * m + j] = prior[i].clone();
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
    (lp, secondary)
}

/// Sender-optimal, receiver-best ex-post obedient direct scheme.
pub fn solve_expost(inst: &Instance, c: &ConstraintProfile) -> Result<Solution> {
    if !check_constraints(c, inst)?.implementable {
        return Err(Error::NotImplementable);
    }
    let (n, m) = (inst.states(), inst.actions());
    let (lp, secondary) = expost_program(inst, c);
    match solve_lex(&lp, &secondary) {
        LpResult::Optimal(opt) => {
            let probs = opt
                .point
                .chunks(m)
                .map(<[Rational]>::to_vec)
                .collect::<Vec<_>>();
            debug_assert_eq!(probs.len(), n);
            let scheme = SignalingScheme::new(probs)?;
            Solution::assemble(inst, scheme, ResponsePolicy::identity(m), Method::ExpostLp)
        }
        LpResult::Infeasible => Err(Error::InfeasibleConstraints(
            "no ex-post obedient scheme meets the quotas".into(),
        )),
        LpResult::Unbounded => unreachable!("scheme variables lie in [0, 1]"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::response::check_ex_ante_ic;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn ternary_unconstrained() {
        let inst = catalog::ternary_instance();
        let s = solve_expost(&inst, &ConstraintProfile::vacuous(3)).unwrap();
        assert_eq!(s.receiver_eu, q("3"));
        // (2/3)·10 + (1/3)·1
        assert_eq!(
            s.sender_eu,
            &(&q("2/3") * &q("10")) + &(&q("1/3") * &q("1"))
        );
        assert_eq!(s.scheme, catalog::ternary_unconstrained_scheme());
    }

    #[test]
    fn ternary_capped() {
        let inst = catalog::ternary_instance();
        let s = solve_expost(&inst, &catalog::ternary_cap()).unwrap();
        assert_eq!(s.receiver_eu, q("17/6"));
        assert_eq!(s.sender_eu, &(&q("5") + &q("2/3")) + &q("1/6"));
        assert_eq!(s.scheme, catalog::ternary_constrained_scheme());
        assert!(
            check_ex_ante_ic(&inst, &s.scheme, &catalog::ternary_cap())
                .unwrap()
                .ic
        );
    }

    #[test]
    fn obedience_and_exact_quota_conflict() {
        let r = solve_expost(&catalog::always_a1_instance(), &catalog::coin_quota());
        assert!(matches!(r, Err(Error::InfeasibleConstraints(_))));
    }

    #[test]
    fn classical_persuasion_without_quotas() {
        let s = solve_expost(
            &catalog::nonalignment_instance(Rational::zero()),
            &ConstraintProfile::vacuous(2),
        )
        .unwrap();
        assert_eq!(s.receiver_eu, q("3/4"));
        assert_eq!(s.scheme, catalog::nonalignment_unconstrained_scheme());
    }
}
