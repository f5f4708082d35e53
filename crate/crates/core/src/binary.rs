//! Closed-form optimum for two states and two actions with a state-matching
//! receiver and an action-matching sender.
//!
//! The sender pools part of the state where he likes the "wrong" action into
//! the recommendation he prefers, as far as both the receiver's incentive
//! and the quota allow. Among his optimal schemes the one that pools least
//! is returned, which is the one the receiver likes best.

use crate::error::{Error, Result};
use crate::model::{
    check_constraints, classify_instance, ConstraintProfile, Instance, Method, ResponsePolicy,
    SenderCase, SignalingScheme, Solution,
};
use crate::rational::Rational;

/// Largest pooling fraction the receiver's incentive allows: `num/den`, or
/// `None` (unbounded) when `den` is zero.
fn incentive_cap(num: Rational, den: Rational) -> Option<Rational> {
    num.checked_div(&den)
}

fn min_opt(a: Rational, b: Option<Rational>) -> Rational {
    match b {
        Some(b) => a.min(b),
        None => a,
    }
}

/// Sender-optimal, receiver-best direct scheme; the response is obedience.
pub fn solve_binary(inst: &Instance, c: &ConstraintProfile) -> Result<Solution> {
    if !inst.is_binary() {
        return Err(Error::NotBinary {
            states: inst.states(),
            actions: inst.actions(),
        });
    }
    let class = classify_instance(inst);
    if !(class.state_matching && class.action_matching) {
        return Err(Error::NotPartiallyAligned);
    }
    if !check_constraints(c, inst)?.feasible {
        return Err(Error::InfeasibleConstraints(format!(
            "prior {} lies outside the quotas [{}, {}] on a1",
            inst.prior()[0],
            c.lower()[0],
            c.upper()[0]
        )));
    }
    let (lb, ub) = c.effective_binary_bounds()?;
    let p = inst.prior()[0].clone();
    let one = Rational::one();
    let q = &one - &p;
    // Any quota-feasible prior gives Pr[a₁] ≥ p ≥ LB under pooling toward
    // a₁, and Pr[a₁] ≤ p ≤ UB under pooling toward a₂.
    debug_assert!(lb <= p && p <= ub);

    let (us, ur) = (inst.sender_utility(), inst.receiver_utility());
    let d1 = &ur[0][0] - &ur[0][1];
    let d2 = &ur[1][1] - &ur[1][0];

    let mut phi = [
        [one.clone(), Rational::zero()],
        [Rational::zero(), one.clone()],
    ];
    if !p.is_zero() && !p.is_one() {
        match class.sender_case {
            SenderCase::PrefersA1 => {
                let gain = &q * &(&us[1][0] - &us[1][1]);
                if !gain.is_zero() {
                    let quota = &(&ub - &p) / &q;
                    let x = min_opt(one.clone().min(quota), incentive_cap(&p * &d1, &q * &d2));
                    phi[1] = [x.clone(), &one - &x];
                }
            }
            SenderCase::PrefersA2 => {
                let gain = &p * &(&us[0][1] - &us[0][0]);
                if !gain.is_zero() {
                    let quota = &(&p - &lb) / &p;
                    let x = min_opt(one.clone().min(quota), incentive_cap(&q * &d2, &p * &d1));
                    phi[0] = [&one - &x, x.clone()];
                }
            }
            SenderCase::Aligned | SenderCase::Indifferent | SenderCase::None => {}
        }
    }
    let scheme = SignalingScheme::new(phi.iter().map(|r| r.to_vec()).collect())?;
    Solution::assemble(
        inst,
        scheme,
        ResponsePolicy::identity(2),
        Method::BinaryClosedForm,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::response::check_ex_ante_ic;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn matching_instance() -> Instance {
        Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[2, 0], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        )
        .unwrap()
    }

    fn cap(u: &str) -> ConstraintProfile {
        ConstraintProfile::bounding(2, 0, q("0"), q(u)).unwrap()
    }

    #[test]
    fn quota_limits_pooling() {
        let inst = matching_instance();
        let s = solve_binary(&inst, &cap("3/4")).unwrap();
        assert_eq!(s.scheme.get(1, 0), &q("1/2"));
        // by hand: ω₁ and half of ω₂ on a₁ (receiver earns 1/2), rest of ω₂ on a₂ (1/4)
        assert_eq!(s.receiver_eu, q("3/4"));
        assert_eq!(s.action_probs, vec![q("3/4"), q("1/4")]);

        let free = solve_binary(&inst, &cap("1")).unwrap();
        assert_eq!(free.scheme.get(1, 0), &q("1"));
        assert_eq!(free.receiver_eu, q("1/2"));
        assert!(s.receiver_eu >= free.receiver_eu);

        let tight = solve_binary(&inst, &cap("1/2")).unwrap();
        assert_eq!(tight.scheme, SignalingScheme::full_revelation(2));
        assert_eq!(tight.receiver_eu, q("1"));
    }

    #[test]
    fn aligned_sender_reveals() {
        let inst = Instance::from_integers(
            vec![q("1/3"), q("2/3")],
            &[&[3, 1], &[0, 2]],
            &[&[2, 0], &[1, 5]],
        )
        .unwrap();
        let s = solve_binary(&inst, &ConstraintProfile::vacuous(2)).unwrap();
        assert_eq!(s.scheme, SignalingScheme::full_revelation(2));
        assert_eq!(
            s.receiver_eu,
            &(&q("1/3") * &q("2")) + &(&q("2/3") * &q("5"))
        );
    }

    #[test]
    fn prefers_a2_mirrors() {
        // Swap states and actions of the matching instance.
        let inst = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[0, 1], &[0, 2]],
            &[&[1, 0], &[0, 1]],
        )
        .unwrap();
        let c = ConstraintProfile::bounding(2, 1, q("0"), q("3/4")).unwrap();
        let s = solve_binary(&inst, &c).unwrap();
        assert_eq!(s.scheme.get(0, 1), &q("1/2"));
        assert_eq!(s.receiver_eu, q("3/4"));
    }

    #[test]
    fn incentive_binds_before_quota() {
        // Δ₁ = 1, Δ₂ = 3: pooling stops at ρ = (1/2·1)/(1/2·3) = 1/3.
        let inst = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[2, 0], &[1, 0]],
            &[&[1, 0], &[0, 3]],
        )
        .unwrap();
        let s = solve_binary(&inst, &ConstraintProfile::vacuous(2)).unwrap();
        assert_eq!(s.scheme.get(1, 0), &q("1/3"));
    }

    #[test]
    fn zero_gain_keeps_revelation() {
        // Sender indifferent in ω₂: pooling cannot help him, so don't.
        let inst = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[2, 0], &[1, 1]],
            &[&[1, 0], &[0, 1]],
        )
        .unwrap();
        let s = solve_binary(&inst, &ConstraintProfile::vacuous(2)).unwrap();
        assert_eq!(s.scheme, SignalingScheme::full_revelation(2));
    }

    #[test]
    fn degenerate_prior_reveals() {
        let inst = Instance::from_integers(
            vec![q("1"), q("0")],
            &[&[2, 0], &[1, 0]],
            &[&[1, 0], &[0, 1]],
        )
        .unwrap();
        let s = solve_binary(&inst, &ConstraintProfile::vacuous(2)).unwrap();
        assert_eq!(s.receiver_eu, q("1"));
    }

    #[test]
    fn precondition_errors() {
        assert!(matches!(
            solve_binary(&catalog::ternary_instance(), &ConstraintProfile::vacuous(3)),
            Err(Error::NotBinary { .. })
        ));
        assert!(matches!(
            solve_binary(
                &catalog::nonalignment_instance(q("1/100")),
                &ConstraintProfile::vacuous(2)
            ),
            Err(Error::NotPartiallyAligned)
        ));
        assert!(matches!(
            solve_binary(&matching_instance(), &cap("1/4")),
            Err(Error::InfeasibleConstraints(_))
        ));
    }

    #[test]
    fn output_is_obedient() {
        let inst = matching_instance();
        for u in ["1/2", "3/5", "3/4", "1"] {
            let s = solve_binary(&inst, &cap(u)).unwrap();
            assert!(check_ex_ante_ic(&inst, &s.scheme, &cap(u)).unwrap().ic);
            assert!(cap(u).admits(&s.action_probs));
        }
    }
}
