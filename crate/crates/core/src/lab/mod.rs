//! Generators, structural predicates, monotonicity fuzzing and exact
//! reproductions of the worked examples.

mod fuzz;
mod gen;
mod repro;

pub use fuzz::{fuzz_monotonicity, FuzzMode, FuzzOptions, FuzzReport, TrialRecord};
pub use gen::{derive_seed, gen_instance, gen_nested_constraints, passes, Filter, DRAW_BUDGET};
pub use repro::{repro_examples, same_up_to_relabeling, Example, ReproReport};

use serde::{Deserialize, Serialize};

use crate::model::Instance;

/// Sufficient conditions for the receiver to gain from tighter quotas beyond
/// the binary case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralConditions {
    /// Every state's sender row is weakly decreasing across actions.
    pub prop3_sender_monotone: bool,
    /// In state `i`, the receiver likes any action above `i` at least as
    /// much as any action below it.
    pub prop3_receiver_low_vs_high: bool,
    /// Sender payoff differences between lower actions shrink in higher
    /// states.
    pub generaln_sensitivity: bool,
    /// Receiver rows rise convexly up to the matching action and fall
    /// convexly after it.
    pub generaln_convexity: bool,
}

pub fn check_structural_conditions(inst: &Instance) -> StructuralConditions {
    let (n, m) = (inst.states(), inst.actions());
    if n == 2 && m == 2 {
        return StructuralConditions {
            prop3_sender_monotone: true,
            prop3_receiver_low_vs_high: true,
            generaln_sensitivity: true,
            generaln_convexity: true,
        };
    }
    let (us, ur) = (inst.sender_utility(), inst.receiver_utility());

    let prop3_sender_monotone = us.iter().all(|row| row.windows(2).all(|w| w[0] >= w[1]));
    let prop3_receiver_low_vs_high =
        (0..n).all(|i| (0..i.min(m)).all(|j| (i + 1..m).all(|k| ur[i][j] <= ur[i][k])));

    let mut generaln_sensitivity = true;
    for j in 0..m {
        for j2 in j + 1..m {
            for i in j2..n {
                for i2 in i + 1..n {
                    if &us[i][j] - &us[i][j2] < &us[i2][j] - &us[i2][j2] {
                        generaln_sensitivity = false;
                    }
                }
            }
        }
    }

    let generaln_convexity = ur.iter().enumerate().all(|(i, row)| {
        let diffs: Vec<_> = row.windows(2).map(|w| &w[1] - &w[0]).collect();
        // diffs[j] = row[j+1] − row[j]; rising before i, falling from i on.
        let shaped = diffs.iter().enumerate().all(|(j, d)| {
            if j < i {
                !d.is_negative()
            } else {
                !d.is_positive()
            }
        });
        // Convexity is only required within each side of the peak.
        let split = i.min(diffs.len());
        let convex_sides = diffs[..split].windows(2).all(|d| d[1] >= d[0])
            && diffs[split..].windows(2).all(|d| d[1] >= d[0]);
        shaped && convex_sides
    });

    StructuralConditions {
        prop3_sender_monotone,
        prop3_receiver_low_vs_high,
        generaln_sensitivity,
        generaln_convexity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::Rational;
    use proptest::prelude::*;

    #[test]
    fn ternary_example_fails_both_prop3_conditions() {
        let cond = check_structural_conditions(&catalog::ternary_instance());
        // sender row ω₃ is (0, 2, 1)
        assert!(!cond.prop3_sender_monotone);
        // u_R(ω₂, a₁) = 2 > u_R(ω₂, a₃) = 1
        assert!(!cond.prop3_receiver_low_vs_high);
    }

    #[test]
    fn binary_flags_are_vacuous() {
        let cond =
            check_structural_conditions(&catalog::nonalignment_instance(Rational::new(1, 100)));
        assert!(cond.prop3_sender_monotone && cond.prop3_receiver_low_vs_high);
        assert!(cond.generaln_sensitivity && cond.generaln_convexity);
    }

    #[test]
    fn convexity_by_hand() {
        let prior = vec![Rational::new(1, 3); 3];
        let sender: &[&[i64]] = &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]];
        // Row 0 falls by 1, then by 8: concave. Row 1 peaks in the middle.
        let bad =
            Instance::from_integers(prior.clone(), sender, &[&[9, 8, 0], &[1, 5, 2], &[0, 1, 5]])
                .unwrap();
        assert!(!check_structural_conditions(&bad).generaln_convexity);
        let good =
            Instance::from_integers(prior, sender, &[&[9, 3, 0], &[1, 5, 2], &[0, 1, 5]]).unwrap();
        assert!(check_structural_conditions(&good).generaln_convexity);
    }

    #[test]
    fn sensitivity_by_hand() {
        let prior = vec![Rational::new(1, 3); 3];
        let receiver: &[&[i64]] = &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]];
        // ω₂ gains 1 from a₁ over a₂, ω₃ gains 3: more sensitive later.
        let bad = Instance::from_integers(
            prior.clone(),
            &[&[0, 0, 0], &[3, 2, 0], &[4, 1, 0]],
            receiver,
        )
        .unwrap();
        assert!(!check_structural_conditions(&bad).generaln_sensitivity);
        let good = Instance::from_integers(prior, &[&[0, 0, 0], &[4, 1, 0], &[3, 2, 0]], receiver)
            .unwrap();
        assert!(check_structural_conditions(&good).generaln_sensitivity);
    }

    proptest! {
        #[test]
        fn flags_survive_positive_affine_maps(seed in 0u64..500, a in 1i64..5, b in -5i64..5, c in 1i64..5, d in -5i64..5) {
            let inst = crate::lab::gen_instance(3, seed, &[]).unwrap();
            let map = |u: &crate::model::Matrix, s: i64, t: i64| -> crate::model::Matrix {
                u.iter().map(|r| r.iter().map(|x| &(x * &Rational::from(s)) + &Rational::from(t)).collect()).collect()
            };
            let moved = Instance::new(inst.prior().to_vec(), map(inst.sender_utility(), a, b), map(inst.receiver_utility(), c, d)).unwrap();
            prop_assert_eq!(check_structural_conditions(&inst), check_structural_conditions(&moved));
        }
    }
}
