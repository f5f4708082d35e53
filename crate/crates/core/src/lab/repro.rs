//! Exact reproductions of the worked examples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::model::{ConstraintProfile, SignalingScheme};
use crate::oracle::solve_exante_grid;
use crate::rational::Rational;
use crate::response::best_response_lex;
use crate::sender_lp::solve_expost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Example {
    /// Nonalignment example: the two displayed schemes.
    Sec31,
    /// Ternary example via the ex-post LP.
    Sec4,
    /// Fair-coin quota example.
    Coin,
    /// Nonalignment example solved by the grid oracle and the ex-post LP.
    NonalignExact,
}

impl Example {
    pub const ALL: [Example; 4] = [
        Example::Sec31,
        Example::Sec4,
        Example::Coin,
        Example::NonalignExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Sec31 => "sec31",
            Example::Sec4 => "sec4",
            Example::Coin => "coin",
            Example::NonalignExact => "nonalign-exact",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown example {s:?} (expected sec31, sec4, coin or nonalign-exact)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproReport {
    pub example: Example,
    pub eps: Rational,
    pub values: BTreeMap<String, Rational>,
    /// One entry per failed exact assertion, with the offending values.
    pub failures: Vec<String>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker {
    values: BTreeMap<String, Rational>,
    failures: Vec<String>,
}

impl Checker {
    fn record(&mut self, name: &str, v: &Rational) {
        self.values.insert(name.to_owned(), v.clone());
    }

    fn expect(&mut self, name: &str, got: &Rational, want: &Rational) {
        self.record(name, got);
        if got != want {
            self.failures
                .push(format!("{name}: got {got}, expected {want}"));
        }
    }

    fn require(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_owned());
        }
    }
}

/// Equal after permuting signal columns.
pub fn same_up_to_relabeling(a: &SignalingScheme, b: &SignalingScheme) -> bool {
    let cols = |s: &SignalingScheme| {
        let mut v: Vec<Vec<Rational>> = (0..s.signals())
            .map(|j| s.probs().iter().map(|row| row[j].clone()).collect())
            .collect();
        v.sort();
        v
    };
    a.states() == b.states() && a.signals() == b.signals() && cols(a) == cols(b)
}

/// Runs one example. `eps` is the receiver's payoff for the mismatched
/// conviction in the nonalignment examples (default 1/100).
pub fn repro_examples(which: Example, eps: Option<Rational>) -> Result<ReproReport> {
    let eps = eps.unwrap_or_else(|| Rational::new(1, 100));
    if !eps.is_positive() || eps >= Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let mut ck = Checker {
        values: BTreeMap::new(),
        failures: Vec::new(),
    };
    let q = Rational::new;
    match which {
        Example::Sec31 => {
            let inst = catalog::nonalignment_instance(eps.clone());
            let free = best_response_lex(
                &inst,
                &catalog::nonalignment_unconstrained_scheme(),
                &ConstraintProfile::vacuous(2),
            )?;
            let capped = best_response_lex(
                &inst,
                &catalog::nonalignment_capped_scheme(),
                &catalog::nonalignment_cap(),
            )?;
            ck.require(
                "unconstrained scheme is not obeyed",
                free.policy.as_deterministic() == Some(vec![0, 1]),
            );
            ck.require(
                "capped scheme is not obeyed",
                capped.policy.as_deterministic() == Some(vec![0, 1]),
            );
            let (want_free, want_capped) = if eps == q(1, 100) {
                (q(301, 400), q(601, 800))
            } else {
                (&q(3, 4) + &(&eps / &q(4, 1)), &q(3, 4) + &(&eps / &q(8, 1)))
            };
            ck.expect("receiver_eu_unconstrained", &free.receiver_eu, &want_free);
            ck.expect("receiver_eu_constrained", &capped.receiver_eu, &want_capped);
            ck.expect(
                "gap",
                &(&free.receiver_eu - &capped.receiver_eu),
                &(&eps / &q(8, 1)),
            );
            ck.record("sender_eu_unconstrained", &free.sender_eu);
            ck.record("sender_eu_constrained", &capped.sender_eu);
        }
        Example::Sec4 => {
            let inst = catalog::ternary_instance();
            let free = solve_expost(&inst, &ConstraintProfile::vacuous(3))?;
            let capped = solve_expost(&inst, &catalog::ternary_cap())?;
            ck.expect("receiver_eu_unconstrained", &free.receiver_eu, &q(3, 1));
            ck.expect("receiver_eu_constrained", &capped.receiver_eu, &q(17, 6));
            ck.expect("sender_eu_unconstrained", &free.sender_eu, &q(7, 1));
            ck.expect("sender_eu_constrained", &capped.sender_eu, &q(35, 6));
            ck.require(
                "constrained scheme differs from the published one",
                same_up_to_relabeling(&capped.scheme, &catalog::ternary_constrained_scheme()),
            );
        }
        Example::Coin => {
            let inst = catalog::coin_instance();
            let babble = catalog::babbling(2, 2);
            let tied = best_response_lex(&inst, &babble, &catalog::coin_quota())?;
            let free = best_response_lex(&inst, &babble, &ConstraintProfile::vacuous(2))?;
            ck.expect("receiver_eu_constrained", &tied.receiver_eu, &q(3, 4));
            ck.expect("a1_probability", &tied.policy.probs()[0][0], &q(1, 2));
            ck.expect("receiver_eu_unconstrained", &free.receiver_eu, &q(1, 1));
        }
        Example::NonalignExact => {
            let inst = catalog::nonalignment_instance(eps.clone());
            let grid = 300;
            for (tag, c) in [
                ("unconstrained", ConstraintProfile::vacuous(2)),
                ("constrained", catalog::nonalignment_cap()),
            ] {
                let g = solve_exante_grid(&inst, &c, grid, Some(Rational::zero()))?;
                ck.record(&format!("grid_receiver_eu_{tag}"), &g.best.receiver_eu);
                ck.record(&format!("grid_sender_eu_{tag}"), &g.best.sender_eu);
                ck.record(
                    &format!("grid_receiver_resolution_{tag}"),
                    &g.receiver_resolution,
                );
                ck.record(&format!("grid_sender_gap_{tag}"), &g.sender_upper_gap);
                let lp = solve_expost(&inst, &c)?;
                ck.record(&format!("expost_receiver_eu_{tag}"), &lp.receiver_eu);
                ck.record(&format!("expost_sender_eu_{tag}"), &lp.sender_eu);
            }
            ck.record("grid", &Rational::from(grid as i64));
        }
    }
    Ok(ReproReport {
        example: which,
        eps,
        values: ck.values,
        failures: ck.failures,
    })
}
