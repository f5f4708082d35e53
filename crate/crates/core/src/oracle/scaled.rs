//! Integer scoring for the grid oracle.
//!
//! With `M = K·lcm(prior denominators)·lcm(quota denominators)` and `E` the
//! lcm of the utility denominators, every signal's mass (in units of
//! `1/M`), every quota bound and every probability-weighted utility (in
//! units of `1/(M·E)`) is an integer. Inside the flow repair posteriors are
//! put over the common denominator of the scheme's signal masses. Setup
//! refuses instances whose worst-case products would approach the `i128`
//! range, in which case the oracle scores with rationals instead.

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::model::{ConstraintProfile, Instance};
use crate::rational::Rational;
use crate::response::flow::{self, Outcome, Source};

struct Col {
    mass: i128,
    receiver: Vec<i128>,
    sender: Vec<i128>,
    greedy: Option<usize>,
    sender_cap: i128,
}

pub(super) struct Scaled {
    cols: Vec<Col>,
    lower: Vec<i128>,
    upper: Vec<i128>,
    /// Payoffs returned by [`Scaled::score`] are in units of `1/scale`.
    pub scale: Rational,
}

pub(super) enum Score {
    Pruned,
    /// `repaired` is set when the receiver's favourites broke a quota.
    Value {
        sender: Rational,
        receiver: Rational,
        repaired: bool,
    },
    /// The flow gave up; score this scheme another way.
    Unresolved,
}

fn lcm_of<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Option<i128> {
    let mut acc = num_bigint::BigInt::from(1);
    for x in xs {
        acc = acc.lcm(&x.denom());
    }
    acc.to_i128()
}

fn to_int(x: &Rational, scale: i128) -> Option<i128> {
    let (n, d) = (x.numer().to_i128()?, x.denom().to_i128()?);
    n.checked_mul(scale / d)
}

impl Scaled {
    pub(super) fn new(
        inst: &Instance,
        c: &ConstraintProfile,
        grid: u32,
        columns: &[Vec<u32>],
    ) -> Option<Self> {
        let (n, m) = (inst.states(), inst.actions());
        let d = lcm_of(inst.prior())?;
        let e = lcm_of(
            inst.sender_utility()
                .iter()
                .chain(inst.receiver_utility())
                .flatten(),
        )?;
        let q = lcm_of(c.lower().iter().chain(c.upper()))?;
        let total = (grid as i128).checked_mul(d)?.checked_mul(q)?;
        // weight[i] = prior[i]·D·Q, so a column's mass is Σ weight[i]·v[i].
        let weight: Vec<i128> = inst
            .prior()
            .iter()
            .map(|p| to_int(p, d).and_then(|w| w.checked_mul(q)))
            .collect::<Option<_>>()?;
        let int_matrix = |u: &Vec<Vec<Rational>>| -> Option<Vec<Vec<i128>>> {
            u.iter()
                .map(|row| row.iter().map(|x| to_int(x, e)).collect())
                .collect()
        };
        let (us, ur) = (
            int_matrix(inst.sender_utility())?,
            int_matrix(inst.receiver_utility())?,
        );
        let umax = us
            .iter()
            .chain(&ur)
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
            .max(1);

        // Worst case inside the flow: mass · (score · lcm/mass) summed over
        // m² terms, with lcm ≤ total^m and score ≤ total·umax.
        let mut bound = umax.checked_mul(total)?.checked_mul((m * m + 8) as i128)?;
        for _ in 0..=m {
            bound = bound.checked_mul(total)?;
        }
        if bound > i128::MAX >> 8 {
            return None;
        }

        let cols = columns
            .iter()
            .map(|v| {
                let mass: i128 = (0..n).map(|i| weight[i] * v[i] as i128).sum();
                let score = |u: &Vec<Vec<i128>>| -> Vec<i128> {
                    (0..m)
                        .map(|j| (0..n).map(|i| weight[i] * v[i] as i128 * u[i][j]).sum())
                        .collect()
                };
                let (receiver, sender) = (score(&ur), score(&us));
                let greedy = (mass > 0).then(|| {
                    (1..m).fold(0, |best, j| {
                        if (receiver[j], sender[j]) > (receiver[best], sender[best]) {
                            j
                        } else {
                            best
                        }
                    })
                });
                let sender_cap = sender.iter().copied().max().unwrap_or(0);
                Col {
                    mass,
                    receiver,
                    sender,
                    greedy,
                    sender_cap,
                }
            })
            .collect();
        let bounds = |xs: &[Rational]| {
            xs.iter()
                .map(|x| to_int(x, q).map(|v| v * grid as i128 * d))
                .collect::<Option<Vec<_>>>()
        };
        Some(Scaled {
            cols,
            lower: bounds(c.lower())?,
            upper: bounds(c.upper())?,
            scale: Rational::from_i128(total, 1) * Rational::from_i128(e, 1),
        })
    }

    /// `threshold` is in engine units; schemes whose sender payoff cannot
    /// reach it are pruned.
    pub(super) fn score(&self, idxs: &[usize], threshold: Option<&Rational>) -> Score {
        let cols: Vec<&Col> = idxs.iter().map(|&i| &self.cols[i]).collect();
        if let Some(t) = threshold {
            if Rational::from_i128(cols.iter().map(|c| c.sender_cap).sum(), 1) < *t {
                return Score::Pruned;
            }
        }
        let mut loads = vec![0i128; self.lower.len()];
        for col in &cols {
            if let Some(j) = col.greedy {
                loads[j] += col.mass;
            }
        }
        if loads
            .iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((l, lo), hi)| lo <= l && l <= hi)
        {
            let pick = |f: fn(&Col) -> &Vec<i128>| -> i128 {
                cols.iter().filter_map(|c| c.greedy.map(|j| f(c)[j])).sum()
            };
            return Score::Value {
                sender: Rational::from_i128(pick(|c| &c.sender), 1),
                receiver: Rational::from_i128(pick(|c| &c.receiver), 1),
                repaired: false,
            };
        }

        let live: Vec<&Col> = cols.into_iter().filter(|c| c.mass > 0).collect();
        let lcm = live.iter().fold(1i128, |acc, c| acc.lcm(&c.mass));
        let per_unit = |c: &Col, f: fn(&Col) -> &Vec<i128>| -> Vec<i128> {
            f(c).iter().map(|v| v * (lcm / c.mass)).collect()
        };
        let post: Vec<(Vec<i128>, Vec<i128>)> = live
            .iter()
            .map(|c| (per_unit(c, |c| &c.receiver), per_unit(c, |c| &c.sender)))
            .collect();
        let sources: Vec<Source<'_, i128>> = live
            .iter()
            .zip(&post)
            .map(|(c, (r, u))| Source {
                mass: &c.mass,
                receiver: r,
                sender: u,
                start: c.greedy.expect("positive mass"),
            })
            .collect();
        match flow::solve(&sources, &self.lower, &self.upper, 500) {
            Outcome::Optimal(x) => {
                let total = |k: usize| -> i128 {
                    x.iter()
                        .zip(&post)
                        .map(|(row, p)| {
                            row.iter()
                                .zip(if k == 0 { &p.0 } else { &p.1 })
                                .map(|(a, b)| a * b)
                                .sum::<i128>()
                        })
                        .sum()
                };
                Score::Value {
                    receiver: Rational::from_i128(total(0), lcm),
                    sender: Rational::from_i128(total(1), lcm),
                    repaired: true,
                }
            }
            Outcome::Infeasible | Outcome::GaveUp => Score::Unresolved,
        }
    }
}
