//! Seeded instance and quota generators.
//!
//! Order restrictions that compare two utility entries are respected while
//! sampling (each entry is drawn inside the interval its already-drawn
//! neighbours allow), which keeps rejection rates low. Every requested
//! filter is then re-checked exactly on the finished instance, so the
//! sampler only shapes the proposal distribution.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_structural_conditions, StructuralConditions};
use crate::error::{Error, Result};
use crate::model::classify::nested;
use crate::model::{
    classify_instance, compare_binding, Binding, ConstraintProfile, Instance, Matrix,
};
use crate::rational::Rational;

pub const MAX_UTILITY: i64 = 10;
pub const PRIOR_GRID: usize = 20;
pub const DRAW_BUDGET: usize = 100_000;
/// Quota bounds sit on `prior ± k/QUOTA_STEPS` of the room to 0 or 1.
const QUOTA_STEPS: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    StateMatching,
    ActionMatching,
    Prop3,
    GeneralN,
}

/// Independent stream seed for item `index` of a campaign.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pairwise "entry `hi` ≥ entry `lo`" restrictions on an `n×n` matrix,
/// entries numbered row-major.
type Order = Vec<(usize, usize)>;

fn orders(n: usize, filters: &[Filter]) -> (Order, Order) {
    let (mut sender, mut receiver) = (Order::new(), Order::new());
    let at = |i: usize, j: usize| i * n + j;
    for f in filters {
        match f {
            Filter::StateMatching | Filter::GeneralN => {
                for i in 0..n {
                    for j in 0..n {
                        for k in (0..n).filter(|&k| k != j && nested(i, j, k)) {
                            receiver.push((at(i, j), at(i, k)));
                        }
                    }
                }
            }
            Filter::ActionMatching => {
                for a in 0..n {
                    for j in 0..n {
                        for k in (0..n).filter(|&k| k != j && nested(a, j, k)) {
                            sender.push((at(j, a), at(k, a)));
                        }
                    }
                }
            }
            Filter::Prop3 => {
                for i in 0..n {
                    for j in 0..n.saturating_sub(1) {
                        sender.push((at(i, j), at(i, j + 1)));
                    }
                    for j in 0..i {
                        for k in i + 1..n {
                            receiver.push((at(i, k), at(i, j)));
                        }
                    }
                }
            }
        }
    }
    (sender, receiver)
}

/// Transitive closure as `above[v]` (entries that must be ≥ v) and
/// `below[v]` (entries that must be ≤ v).
fn closure(size: usize, order: &Order) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut ge = vec![vec![false; size]; size];
    for &(hi, lo) in order {
        ge[hi][lo] = true;
    }
    for k in 0..size {
        for a in 0..size {
            if ge[a][k] {
                for b in 0..size {
                    if ge[k][b] {
                        ge[a][b] = true;
                    }
                }
            }
        }
    }
    let above = (0..size)
        .map(|v| (0..size).filter(|&u| u != v && ge[u][v]).collect())
        .collect();
    let below = (0..size)
        .map(|v| (0..size).filter(|&u| u != v && ge[v][u]).collect())
        .collect();
    (above, below)
}

fn draw_matrix(
    rng: &mut ChaCha8Rng,
    n: usize,
    above: &[Vec<usize>],
    below: &[Vec<usize>],
) -> Matrix {
    let size = n * n;
    let mut vals: Vec<Option<i64>> = vec![None; size];
    let mut visit: Vec<usize> = (0..size).collect();
    visit.shuffle(rng);
    for v in visit {
        let lo = below[v].iter().filter_map(|&u| vals[u]).max().unwrap_or(0);
        let hi = above[v]
            .iter()
            .filter_map(|&u| vals[u])
            .min()
            .unwrap_or(MAX_UTILITY);
        // Drawn values always respect the closure, so lo ≤ hi.
        vals[v] = Some(rng.gen_range(lo..=hi));
    }
    vals.chunks(n)
        .map(|row| {
            row.iter()
                .map(|v| Rational::from(v.expect("every entry drawn")))
                .collect()
        })
        .collect()
}

/// A strictly positive prior on the `1/PRIOR_GRID` grid.
fn draw_prior(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut cuts: Vec<usize> = sample(rng, PRIOR_GRID - 1, n - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(PRIOR_GRID);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let p = Rational::new((c - prev) as i64, PRIOR_GRID as i64);
            prev = c;
            p
        })
        .collect()
}

/// Whether `inst` satisfies every filter, checked exactly.
pub fn passes(inst: &Instance, filters: &[Filter]) -> bool {
    let class = classify_instance(inst);
    let cond: StructuralConditions = check_structural_conditions(inst);
    filters.iter().all(|f| match f {
        Filter::StateMatching => class.state_matching,
        Filter::ActionMatching => class.action_matching,
        Filter::Prop3 => cond.prop3_sender_monotone && cond.prop3_receiver_low_vs_high,
        Filter::GeneralN => cond.generaln_sensitivity && cond.generaln_convexity,
    })
}

/// A random `n×n` instance meeting every filter; deterministic in
/// `(n, seed, filters)`.
pub fn gen_instance(n: usize, seed: u64, filters: &[Filter]) -> Result<Instance> {
    if !(2..=PRIOR_GRID).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "instance size must be in 2..={PRIOR_GRID}, got {n}"
        )));
    }
    let mut filters = filters.to_vec();
    filters.sort_unstable();
    filters.dedup();
    let (s_order, r_order) = orders(n, &filters);
    let (s_above, s_below) = closure(n * n, &s_order);
    let (r_above, r_below) = closure(n * n, &r_order);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DRAW_BUDGET {
        let prior = draw_prior(&mut rng, n);
        let sender = draw_matrix(&mut rng, n, &s_above, &s_below);
        let receiver = draw_matrix(&mut rng, n, &r_above, &r_below);
        let inst = Instance::new(prior, sender, receiver)?;
        if passes(&inst, &filters) {
            return Ok(inst);
        }
    }
    Err(Error::GeneratorExhausted { draws: DRAW_BUDGET })
}

/// Lower bound `prior·t/8` and upper bound `1 − (1 − prior)·t/8` at
/// tightness `t`: 0 is vacuous, 8 pins the bound to the prior.
fn bound(p: &Rational, t: i64, upper: bool) -> Rational {
    let frac = Rational::new(t, QUOTA_STEPS);
    if upper {
        &Rational::one() - &(&(&Rational::one() - p) * &frac)
    } else {
        p * &frac
    }
}

/// Two quota profiles around the prior with `c` strictly more binding than
/// `c2`; both admit the prior as an action distribution.
pub fn gen_nested_constraints(
    inst: &Instance,
    seed: u64,
) -> Result<(ConstraintProfile, ConstraintProfile)> {
    if inst.states() != inst.actions() {
        return Err(Error::InvalidArgument(
            "quotas around the prior need as many states as actions".into(),
        ));
    }
    let m = inst.actions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let loose_vacuous = rng.gen_bool(0.5);
    // [action][lower, upper] tightness levels
    let mut loose = vec![[0i64; 2]; m];
    let mut tight = vec![[0i64; 2]; m];
    for j in 0..m {
        for side in 0..2 {
            if !loose_vacuous && rng.gen_bool(0.5) {
                loose[j][side] = rng.gen_range(0..=QUOTA_STEPS);
            }
            // Leave roughly half the bounds of c alone as well.
            tight[j][side] = if rng.gen_bool(0.5) {
                rng.gen_range(loose[j][side]..=QUOTA_STEPS)
            } else {
                loose[j][side]
            };
        }
    }
    let build = |levels: &[[i64; 2]]| -> Result<ConstraintProfile> {
        let prior = inst.prior();
        ConstraintProfile::new(
            (0..m)
                .map(|j| bound(&prior[j], levels[j][0], false))
                .collect(),
            (0..m)
                .map(|j| bound(&prior[j], levels[j][1], true))
                .collect(),
        )
    };
    if tight == loose {
        // The prior is interior, so one more step on any bound is strictly
        // tighter.
        let open: Vec<(usize, usize)> = (0..m)
            .flat_map(|j| (0..2).map(move |s| (j, s)))
            .filter(|&(j, s)| tight[j][s] < QUOTA_STEPS)
            .collect();
        match open.choose(&mut rng) {
            Some(&(j, s)) => tight[j][s] += 1,
            None => loose = vec![[0; 2]; m],
        }
    }
    let (c, c2) = (build(&tight)?, build(&loose)?);
    debug_assert_eq!(compare_binding(&c, &c2)?, Binding::FirstMoreBinding);
    debug_assert!(c.admits(inst.prior()) && c2.admits(inst.prior()));
    Ok((c, c2))
}
