//! Worked instances used by the reproduction reports, the CLI and tests.

use crate::model::{ConstraintProfile, Instance, SignalingScheme};
use crate::rational::Rational;

fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

fn matrix(rows: &[&[Rational]]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

/// Binary instance whose sender always prefers `a₁` but, given `a₁`, prefers
/// the mismatched state. Prior `Pr[ω₁] = 1/4`; `eps` is the receiver's
/// payoff for playing `a₁` in `ω₂`.
pub fn nonalignment_instance(eps: Rational) -> Instance {
    let z = Rational::zero;
    let i = |n: i64| Rational::from(n);
    Instance::new(
        vec![q(1, 4), q(3, 4)],
        matrix(&[&[i(2), i(1)], &[i(3), z()]]),
        matrix(&[&[i(1), z()], &[eps, i(1)]]),
    )
    .expect("static instance")
}

/// Scheme pooling a third of `ω₂` with all of `ω₁` on the `a₁` recommendation.
pub fn nonalignment_unconstrained_scheme() -> SignalingScheme {
    SignalingScheme::new(matrix(&[&[q(1, 1), q(0, 1)], &[q(1, 3), q(2, 3)]]))
        .expect("static scheme")
}

/// Scheme sending the `a₁` recommendation with probability exactly 1/4.
pub fn nonalignment_capped_scheme() -> SignalingScheme {
    SignalingScheme::new(matrix(&[&[q(1, 2), q(1, 2)], &[q(1, 6), q(5, 6)]]))
        .expect("static scheme")
}

/// `Pr[a₁] ≤ 1/4`, everything else vacuous.
pub fn nonalignment_cap() -> ConstraintProfile {
    ConstraintProfile::bounding(2, 0, Rational::zero(), q(1, 4)).expect("static profile")
}

/// Three states, three actions, uniform prior; partially aligned players for
/// which a quota on `a₁` hurts the receiver.
pub fn ternary_instance() -> Instance {
    Instance::from_integers(
        vec![q(1, 3), q(1, 3), q(1, 3)],
        &[&[10, 0, 0], &[10, 2, 0], &[0, 2, 1]],
        &[&[4, 0, 0], &[2, 3, 1], &[0, 1, 3]],
    )
    .expect("static instance")
}

/// Sender-optimal scheme for [`ternary_instance`] without quotas: pool
/// `ω₁, ω₂` on `a₁`, reveal `ω₃`.
pub fn ternary_unconstrained_scheme() -> SignalingScheme {
    SignalingScheme::new(matrix(&[
        &[q(1, 1), q(0, 1), q(0, 1)],
        &[q(1, 1), q(0, 1), q(0, 1)],
        &[q(0, 1), q(0, 1), q(1, 1)],
    ]))
    .expect("static scheme")
}

/// Sender-optimal scheme for [`ternary_instance`] under [`ternary_cap`].
pub fn ternary_constrained_scheme() -> SignalingScheme {
    SignalingScheme::new(matrix(&[
        &[q(1, 1), q(0, 1), q(0, 1)],
        &[q(1, 2), q(1, 2), q(0, 1)],
        &[q(0, 1), q(1, 2), q(1, 2)],
    ]))
    .expect("static scheme")
}

/// `Pr[a₁] ≤ 1/2`, everything else vacuous.
pub fn ternary_cap() -> ConstraintProfile {
    ConstraintProfile::bounding(3, 0, Rational::zero(), q(1, 2)).expect("static profile")
}

/// Fair-coin state; the receiver earns 1 for matching `ω₁`, 2 for matching
/// `ω₂`, 0 otherwise. The sender's payoff is identically zero.
pub fn coin_instance() -> Instance {
    Instance::from_integers(
        vec![q(1, 2), q(1, 2)],
        &[&[0, 0], &[0, 0]],
        &[&[1, 0], &[0, 2]],
    )
    .expect("static instance")
}

/// `Pr[a₁] = 1/2` exactly.
pub fn coin_quota() -> ConstraintProfile {
    ConstraintProfile::bounding(2, 0, q(1, 2), q(1, 2)).expect("static profile")
}

/// Fair-coin state; both players earn 1 whenever `a₁` is played.
pub fn always_a1_instance() -> Instance {
    Instance::from_integers(
        vec![q(1, 2), q(1, 2)],
        &[&[1, 0], &[1, 0]],
        &[&[1, 0], &[1, 0]],
    )
    .expect("static instance")
}

/// A single signal sent in every state.
pub fn babbling(states: usize, signals: usize) -> SignalingScheme {
    let mut row = vec![Rational::zero(); signals];
    row[0] = Rational::one();
    SignalingScheme::uninformative(states, row).expect("static scheme")
}
