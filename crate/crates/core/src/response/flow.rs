//! The constrained response as a min-cost flow.
//!
//! Each reachable signal ships its probability mass to actions. An action's
//! load pays one unit of penalty per unit of mass outside its quota band.
//! Per-unit costs are lexicographic triples (penalty, receiver loss, sender
//! loss), so a single flow computation handles feasibility and both stages
//! of the tie-breaking. Starting from every signal's favourite action,
//! negative cycles are cancelled until none remain, which certifies
//! optimality.
//!
//! Contracting the signal nodes leaves a graph on the actions plus one slack
//! node `T`: `j → k` moves mass of some signal from `j` to `k`, `T → j`
//! lowers `j`'s load and `k → T` raises `k`'s.
//!
//! The arithmetic is generic so the grid oracle can run the same algorithm
//! on scaled integers.

use crate::rational::Rational;

/// Exact ordered quantities the flow can work with.
pub trait Amount: Clone + Ord {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
}

impl Amount for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

/// Callers must keep magnitudes far from the `i128` range.
impl Amount for i128 {
    fn zero() -> Self {
        0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Cost<T> {
    penalty: i64,
    receiver: T,
    sender: T,
}

impl<T: Amount> Cost<T> {
    fn zero() -> Self {
        Cost {
            penalty: 0,
            receiver: T::zero(),
            sender: T::zero(),
        }
    }

    fn penalty(p: i64) -> Self {
        Cost {
            penalty: p,
            ..Cost::zero()
        }
    }

    fn plus(&self, o: &Self) -> Self {
        Cost {
            penalty: self.penalty + o.penalty,
            receiver: self.receiver.add(&o.receiver),
            sender: self.sender.add(&o.sender),
        }
    }
}

/// One signal: its mass and its per-unit-mass utilities for each action.
/// Per-unit values may share any positive scale factor.
pub struct Source<'a, T> {
    pub mass: &'a T,
    pub receiver: &'a [T],
    pub sender: &'a [T],
    /// Starting action: the receiver's favourite, ties to the sender.
    pub start: usize,
}

pub enum Outcome<T> {
    /// Mass shipped from each source to each action.
    Optimal(Vec<Vec<T>>),
    Infeasible,
    GaveUp,
}

struct Arc<T> {
    from: usize,
    to: usize,
    cost: Cost<T>,
    /// `Some(source)` for a move of that source's mass.
    source: Option<usize>,
    cap: Option<T>,
}

/// Marginal penalty and room before the next breakpoint for raising (`up`)
/// or lowering a load.
fn load_step<T: Amount>(load: &T, lo: &T, hi: &T, up: bool) -> (i64, Option<T>) {
    if up {
        if load < lo {
            (-1, Some(lo.sub(load)))
        } else if load < hi {
            (0, Some(hi.sub(load)))
        } else {
            (1, None)
        }
    } else if load > hi {
        (-1, Some(load.sub(hi)))
    } else if load > lo {
        (0, Some(load.sub(lo)))
    } else {
        (1, None)
    }
}

pub fn solve<T: Amount>(
    sources: &[Source<'_, T>],
    lower: &[T],
    upper: &[T],
    max_rounds: usize,
) -> Outcome<T> {
    let m = lower.len();
    let mut x: Vec<Vec<T>> = sources
        .iter()
        .map(|src| {
            let mut row = vec![T::zero(); m];
            row[src.start] = src.mass.clone();
            row
        })
        .collect();
    let mut loads = vec![T::zero(); m];
    for src in sources {
        loads[src.start] = loads[src.start].add(src.mass);
    }

    let slack = m;
    let nodes = m + 1;
    let zero = T::zero();
    let mut arcs: Vec<Arc<T>> = Vec::new();
    for _ in 0..max_rounds {
        arcs.clear();
        for from in 0..m {
            for to in (0..m).filter(|&to| to != from) {
                let mut best: Option<(Cost<T>, usize)> = None;
                for (k, src) in sources.iter().enumerate() {
                    if x[k][from] <= zero {
                        continue;
                    }
                    let cost = Cost {
                        penalty: 0,
                        receiver: src.receiver[from].sub(&src.receiver[to]),
                        sender: src.sender[from].sub(&src.sender[to]),
                    };
                    if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                        best = Some((cost, k));
                    }
                }
                if let Some((cost, k)) = best {
                    arcs.push(Arc {
                        from,
                        to,
                        cost,
                        source: Some(k),
                        cap: Some(x[k][from].clone()),
                    });
                }
            }
        }
        for j in 0..m {
            let (p, cap) = load_step(&loads[j], &lower[j], &upper[j], false);
            arcs.push(Arc {
                from: slack,
                to: j,
                cost: Cost::penalty(p),
                source: None,
                cap,
            });
            let (p, cap) = load_step(&loads[j], &lower[j], &upper[j], true);
            arcs.push(Arc {
                from: j,
                to: slack,
                cost: Cost::penalty(p),
                source: None,
                cap,
            });
        }

        // Bellman-Ford from a virtual source joined to every node at cost 0;
        // a relaxation in round `nodes` proves a negative cycle.
        let mut dist = vec![Cost::zero(); nodes];
        let mut pred: Vec<Option<usize>> = vec![None; nodes];
        let mut last = None;
        for _ in 0..nodes {
            last = None;
            for (a, arc) in arcs.iter().enumerate() {
                let cand = dist[arc.from].plus(&arc.cost);
                if cand < dist[arc.to] {
                    dist[arc.to] = cand;
                    pred[arc.to] = Some(a);
                    last = Some(arc.to);
                }
            }
            if last.is_none() {
                break;
            }
        }
        let Some(mut v) = last else {
            let violated = (0..m).any(|j| loads[j] < lower[j] || loads[j] > upper[j]);
            return if violated {
                Outcome::Infeasible
            } else {
                Outcome::Optimal(x)
            };
        };
        for _ in 0..nodes {
            v = arcs[pred[v].expect("relaxed nodes have predecessors")].from;
        }
        let start = v;
        let mut cycle = Vec::new();
        loop {
            let a = pred[v].expect("cycle nodes have predecessors");
            cycle.push(a);
            v = arcs[a].from;
            if v == start {
                break;
            }
        }
        // Slack-only cycles cost nothing, so a negative cycle moves some
        // signal's (finite) mass.
        let delta = cycle
            .iter()
            .filter_map(|&a| arcs[a].cap.clone())
            .min()
            .expect("negative cycles move mass");
        for &a in &cycle {
            let arc = &arcs[a];
            if let Some(k) = arc.source {
                x[k][arc.from] = x[k][arc.from].sub(&delta);
                x[k][arc.to] = x[k][arc.to].add(&delta);
                loads[arc.from] = loads[arc.from].sub(&delta);
                loads[arc.to] = loads[arc.to].add(&delta);
            }
        }
    }
    Outcome::GaveUp
}
