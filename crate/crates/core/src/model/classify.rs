use serde::{Deserialize, Serialize};

use super::{ConstraintProfile, Instance, Matrix};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The sender's preference pattern on a binary instance, one tag per case
/// of the binary monotonicity argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SenderCase {
    /// Prefers the receiver's own choice in both states.
    Aligned,
    /// Prefers `a₁` in both states.
    PrefersA1,
    /// Prefers `a₂` in both states.
    PrefersA2,
    /// Does not care which action is played.
    Indifferent,
    /// Not a 2x2 instance.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub state_matching: bool,
    pub action_matching: bool,
    pub sender_case: SenderCase,
}

/// `inner` and `outer` positions along a line where `outer` is at least as
/// far from `anchor` as `inner` and on the same side.
pub(crate) fn nested(anchor: usize, inner: usize, outer: usize) -> bool {
    (anchor <= inner && inner <= outer) || (anchor >= inner && inner >= outer)
}

/// In every state the receiver weakly prefers actions closer to it.
fn state_matching(u: &Matrix) -> bool {
    let m = u[0].len();
    u.iter()
        .enumerate()
        .all(|(i, row)| (0..m).all(|j| (0..m).all(|k| !nested(i, j, k) || row[j] >= row[k])))
}

/// For every action the sender weakly prefers states closer to it.
fn action_matching(u: &Matrix) -> bool {
    let (n, m) = (u.len(), u[0].len());
    (0..m).all(|a| (0..n).all(|j| (0..n).all(|k| !nested(a, j, k) || u[j][a] >= u[k][a])))
}

fn sender_case(u: &Matrix) -> SenderCase {
    if u.len() != 2 || u[0].len() != 2 {
        return SenderCase::None;
    }
    let (s11, s12, s21, s22) = (&u[0][0], &u[0][1], &u[1][0], &u[1][1]);
    // Full indifference satisfies every case's weak inequalities; it gets
    // its own tag ahead of the fixed order.
    if s11 == s12 && s21 == s22 {
        return SenderCase::Indifferent;
    }
    if s11 >= s12 && s22 >= s21 {
        SenderCase::Aligned
    } else if s11 >= s12 && s22 <= s21 {
        SenderCase::PrefersA1
    } else if s11 <= s12 && s22 >= s21 {
        SenderCase::PrefersA2
    } else {
        SenderCase::Indifferent
    }
}

pub fn classify_instance(inst: &Instance) -> Classification {
    Classification {
        state_matching: state_matching(inst.receiver_utility()),
        action_matching: action_matching(inst.sender_utility()),
        sender_case: sender_case(inst.sender_utility()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub implementable: bool,
    pub feasible: bool,
    /// Set when feasibility was not evaluated because the state and action
    /// counts differ, so no state-to-action identification exists.
    pub shape_mismatch: bool,
}

/// Implementability (`Σ lower ≤ 1 ≤ Σ upper`) and feasibility (the prior
/// itself, read as an action distribution, meets every quota).
pub fn check_constraints(c: &ConstraintProfile, inst: &Instance) -> Result<ConstraintCheck> {
    if c.actions() != inst.actions() {
        return Err(Error::DimensionMismatch(format!(
            "profile has {} actions, instance has {}",
            c.actions(),
            inst.actions()
        )));
    }
    let one = Rational::one();
    let implementable =
        c.lower().iter().sum::<Rational>() <= one && one <= c.upper().iter().sum::<Rational>();
    if inst.states() != inst.actions() {
        return Ok(ConstraintCheck {
            implementable,
            feasible: false,
            shape_mismatch: true,
        });
    }
    Ok(ConstraintCheck {
        implementable,
        feasible: c.admits(inst.prior()),
        shape_mismatch: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    /// The first profile is pointwise tighter and differs somewhere.
    FirstMoreBinding,
    SecondMoreBinding,
    Equal,
    Incomparable,
}

pub fn compare_binding(c: &ConstraintProfile, c2: &ConstraintProfile) -> Result<Binding> {
    if c.actions() != c2.actions() {
        return Err(Error::DimensionMismatch(format!(
            "profiles have {} and {} actions",
            c.actions(),
            c2.actions()
        )));
    }
    let tighter = |a: &ConstraintProfile, b: &ConstraintProfile| {
        a.lower().iter().zip(b.lower()).all(|(x, y)| x >= y)
            && a.upper().iter().zip(b.upper()).all(|(x, y)| x <= y)
    };
    Ok(if c == c2 {
        Binding::Equal
    } else if tighter(c, c2) {
        Binding::FirstMoreBinding
    } else if tighter(c2, c) {
        Binding::SecondMoreBinding
    } else {
        Binding::Incomparable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn nonalignment_instance() {
        let c = classify_instance(&catalog::nonalignment_instance(q("1/100")));
        assert!(c.state_matching);
        assert!(!c.action_matching);
        assert_eq!(c.sender_case, SenderCase::PrefersA1);
    }

    #[test]
    fn ternary_instance_is_partially_aligned() {
        let c = classify_instance(&catalog::ternary_instance());
        assert!(c.state_matching && c.action_matching);
        assert_eq!(c.sender_case, SenderCase::None);
    }

    #[test]
    fn constant_sender_is_indifferent() {
        let inst = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[5, 5], &[5, 5]],
            &[&[1, 0], &[0, 1]],
        )
        .unwrap();
        let c = classify_instance(&inst);
        assert!(c.action_matching);
        assert_eq!(c.sender_case, SenderCase::Indifferent);
    }

    #[test]
    fn sender_cases() {
        let case = |s: &[&[i64]]| {
            let inst =
                Instance::from_integers(vec![q("1/2"), q("1/2")], s, &[&[1, 0], &[0, 1]]).unwrap();
            classify_instance(&inst).sender_case
        };
        assert_eq!(case(&[&[3, 0], &[0, 3]]), SenderCase::Aligned);
        assert_eq!(case(&[&[3, 0], &[2, 1]]), SenderCase::PrefersA1);
        assert_eq!(case(&[&[1, 2], &[0, 3]]), SenderCase::PrefersA2);
        // weak tie in one state: first matching case wins
        assert_eq!(case(&[&[2, 2], &[0, 3]]), SenderCase::Aligned);
        assert_eq!(case(&[&[2, 2], &[3, 0]]), SenderCase::PrefersA1);
        // strict mismatch preference (not action-matching)
        assert_eq!(case(&[&[0, 3], &[3, 0]]), SenderCase::Indifferent);
    }

    #[test]
    fn ternary_state_matching_checks_both_sides() {
        let inst = Instance::from_integers(
            vec![q("1/3"), q("1/3"), q("1/3")],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            &[&[3, 2, 1], &[1, 3, 2], &[0, 1, 3]],
        )
        .unwrap();
        assert!(classify_instance(&inst).state_matching);
        let skew = Instance::from_integers(
            vec![q("1/3"), q("1/3"), q("1/3")],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            &[&[3, 1, 2], &[1, 3, 2], &[0, 1, 3]],
        )
        .unwrap();
        assert!(!classify_instance(&skew).state_matching);
    }

    #[test]
    fn feasibility_examples() {
        let inst = catalog::nonalignment_instance(q("1/100"));
        let tight = ConstraintProfile::bounding(2, 0, q("0"), q("1/4")).unwrap();
        let chk = check_constraints(&tight, &inst).unwrap();
        assert!(chk.feasible && chk.implementable);
        let off = ConstraintProfile::bounding(2, 0, q("1/2"), q("3/4")).unwrap();
        let chk = check_constraints(&off, &inst).unwrap();
        assert!(!chk.feasible && chk.implementable);

        let ternary = catalog::ternary_instance();
        let cap = ConstraintProfile::bounding(3, 0, q("0"), q("1/2")).unwrap();
        assert!(check_constraints(&cap, &ternary).unwrap().feasible);
    }

    #[test]
    fn infeasible_when_shapes_differ() {
        let inst = Instance::from_integers(
            vec![q("1/2"), q("1/2")],
            &[&[1, 0, 0], &[0, 1, 0]],
            &[&[1, 0, 0], &[0, 1, 0]],
        )
        .unwrap();
        let chk = check_constraints(&ConstraintProfile::vacuous(3), &inst).unwrap();
        assert!(chk.implementable && !chk.feasible && chk.shape_mismatch);
        assert!(check_constraints(&ConstraintProfile::vacuous(2), &inst).is_err());
    }

    #[test]
    fn binding_examples() {
        let c = ConstraintProfile::bounding(2, 0, q("0"), q("1/4")).unwrap();
        let c2 = ConstraintProfile::vacuous(2);
        assert_eq!(compare_binding(&c, &c2).unwrap(), Binding::FirstMoreBinding);
        assert_eq!(
            compare_binding(&c2, &c).unwrap(),
            Binding::SecondMoreBinding
        );
        assert_eq!(compare_binding(&c, &c).unwrap(), Binding::Equal);
        let a = ConstraintProfile::bounding(2, 0, q("0"), q("1/2")).unwrap();
        let b = ConstraintProfile::bounding(2, 0, q("1/4"), q("1")).unwrap();
        assert_eq!(compare_binding(&a, &b).unwrap(), Binding::Incomparable);
        assert!(compare_binding(&a, &ConstraintProfile::vacuous(3)).is_err());
    }

    fn arb_profile(m: usize) -> impl Strategy<Value = ConstraintProfile> {
        proptest::collection::vec((0i64..=4, 0i64..=4), m).prop_map(|v| {
            let (lo, hi): (Vec<_>, Vec<_>) = v
                .into_iter()
                .map(|(a, b)| (Rational::new(a.min(b), 4), Rational::new(a.max(b), 4)))
                .unzip();
            ConstraintProfile::new(lo, hi).unwrap()
        })
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (2usize..=3).prop_flat_map(|n| {
            (
                proptest::collection::vec(1i64..5, n),
                proptest::collection::vec(0i64..6, n * n),
                proptest::collection::vec(0i64..6, n * n),
            )
                .prop_map(move |(w, s, r)| {
                    let tot: i64 = w.iter().sum();
                    let prior = w.iter().map(|&x| Rational::new(x, tot)).collect();
                    let mat = |v: &[i64]| {
                        v.chunks(n)
                            .map(|c| c.iter().map(|&x| Rational::from(x)).collect())
                            .collect()
                    };
                    Instance::new(prior, mat(&s), mat(&r)).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn binding_is_a_partial_order(a in arb_profile(3), b in arb_profile(3), c in arb_profile(3)) {
            let ab = compare_binding(&a, &b).unwrap();
            let ba = compare_binding(&b, &a).unwrap();
            let flipped = match ab {
                Binding::FirstMoreBinding => Binding::SecondMoreBinding,
                Binding::SecondMoreBinding => Binding::FirstMoreBinding,
                other => other,
            };
            prop_assert_eq!(ba, flipped);
            let bc = compare_binding(&b, &c).unwrap();
            if ab == Binding::FirstMoreBinding && bc == Binding::FirstMoreBinding {
                prop_assert_eq!(compare_binding(&a, &c).unwrap(), Binding::FirstMoreBinding);
            }
        }

        #[test]
        fn classification_is_affine_invariant(inst in arb_instance(), shift in -5i64..5, scale in 1i64..4, which in 0usize..2) {
            let (shift, scale) = (Rational::from(shift), Rational::new(scale, 3));
            let tf = |m: &Matrix| -> Matrix { m.iter().map(|r| r.iter().map(|x| &(x * &scale) + &shift).collect()).collect() };
            let (s, r) = if which == 0 {
                (tf(inst.sender_utility()), inst.receiver_utility().clone())
            } else {
                (inst.sender_utility().clone(), tf(inst.receiver_utility()))
            };
            let moved = Instance::new(inst.prior().to_vec(), s, r).unwrap();
            prop_assert_eq!(classify_instance(&inst), classify_instance(&moved));
        }

        #[test]
        fn feasible_implies_implementable(inst in arb_instance(), c in arb_profile(3)) {
            if inst.actions() == 3 {
                let chk = check_constraints(&c, &inst).unwrap();
                prop_assert!(!chk.feasible || chk.implementable);
            }
        }
    }
}
