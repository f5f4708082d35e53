use serde::{Deserialize, Serialize};

use super::{Instance, Matrix, ResponsePolicy, SignalingScheme};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn check_scheme(inst: &Instance, scheme: &SignalingScheme) -> Result<()> {
    if scheme.states() != inst.states() {
        return Err(Error::DimensionMismatch(format!(
            "scheme covers {} states, instance has {}",
            scheme.states(),
            inst.states()
        )));
    }
    Ok(())
}

/// `λ_s = Σ_i prior[i]·φ[i][s]` for every signal.
pub fn signal_probs(inst: &Instance, scheme: &SignalingScheme) -> Result<Vec<Rational>> {
    check_scheme(inst, scheme)?;
    Ok((0..scheme.signals())
        .map(|s| {
            inst.prior()
                .iter()
                .zip(scheme.probs())
                .map(|(p, row)| p * &row[s])
                .sum()
        })
        .collect())
}

/// Exact Bayes posterior over states after observing `signal`.
pub fn posterior(
    inst: &Instance,
    scheme: &SignalingScheme,
    signal: usize,
) -> Result<Vec<Rational>> {
    check_scheme(inst, scheme)?;
    if signal >= scheme.signals() {
        return Err(Error::DimensionMismatch(format!(
            "signal {signal} out of range for a {}-signal scheme",
            scheme.signals()
        )));
    }
    let joint: Vec<Rational> = inst
        .prior()
        .iter()
        .zip(scheme.probs())
        .map(|(p, row)| p * &row[signal])
        .collect();
    let mass: Rational = joint.iter().sum();
    if mass.is_zero() {
        return Err(Error::UnreachableSignal(signal));
    }
    Ok(joint.iter().map(|x| x / &mass).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub sender_eu: Rational,
    pub receiver_eu: Rational,
    pub action_probs: Vec<Rational>,
}

fn check_response(scheme: &SignalingScheme, resp: &ResponsePolicy, actions: usize) -> Result<()> {
    if resp.signals() != scheme.signals() || resp.actions() != actions {
        return Err(Error::DimensionMismatch(format!(
            "response is {}x{}, expected {}x{actions}",
            resp.signals(),
            resp.actions(),
            scheme.signals()
        )));
    }
    Ok(())
}

/// Joint (state, action) distribution `J[i][j] = Σ_s prior[i]·φ[i][s]·resp[s][j]`.
pub fn joint_distribution(
    inst: &Instance,
    scheme: &SignalingScheme,
    resp: &ResponsePolicy,
) -> Result<Matrix> {
    check_scheme(inst, scheme)?;
    check_response(scheme, resp, inst.actions())?;
    let m = inst.actions();
    Ok(inst
        .prior()
        .iter()
        .zip(scheme.probs())
        .map(|(p, row)| {
            let mut out = vec![Rational::zero(); m];
            for (phi, play) in row.iter().zip(resp.probs()) {
                if phi.is_zero() {
                    continue;
                }
                let w = p * phi;
                for (o, a) in out.iter_mut().zip(play) {
                    if !a.is_zero() {
                        *o += &w * a;
                    }
                }
            }
            out
        })
        .collect())
}

/// Exact expected utilities and action marginals of `(scheme, resp)`.
pub fn evaluate(
    inst: &Instance,
    scheme: &SignalingScheme,
    resp: &ResponsePolicy,
) -> Result<Evaluation> {
    let joint = joint_distribution(inst, scheme, resp)?;
    let mut sender_eu = Rational::zero();
    let mut receiver_eu = Rational::zero();
    let mut action_probs = vec![Rational::zero(); inst.actions()];
    for (i, row) in joint.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            sender_eu += w * &inst.sender_utility()[i][j];
            receiver_eu += w * &inst.receiver_utility()[i][j];
            action_probs[j] += w;
        }
    }
    Ok(Evaluation {
        sender_eu,
        receiver_eu,
        action_probs,
    })
}
