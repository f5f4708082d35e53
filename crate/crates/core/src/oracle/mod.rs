//! Brute-force search over discretized schemes.
//!
//! Every scheme whose entries are multiples of `1/K` is paired with the
//! receiver's exact quota-constrained lexicographic response. The sender's
//! grid maximum is found first; among schemes within `band` of it the
//! receiver's favourite wins, ties going to the lexicographically smallest
//! scheme matrix (row-major). Nothing here relies on structural assumptions,
//! which is what makes it a reference for the other solvers.
//!
//! Relabeling signals permutes columns without changing any outcome, and the
//! lexicographically smallest member of a relabeling class is the one with
//! sorted columns, so only schemes with sorted columns are visited.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_constraints, ConstraintProfile, Instance, Method, SignalingScheme, Solution,
};
use crate::rational::Rational;
use crate::response::{lex_response, lex_response_lp, SignalTable};

mod scaled;
use scaled::{Scaled, Score};

/// Largest number of distinct scheme columns the enumerator will index.
const MAX_COLUMNS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Resolution `K`: entries are multiples of `1/K`.
    pub grid: u32,
    /// Sender-optimality band; `None` uses the sender resolution bound.
    pub band: Option<Rational>,
    /// Re-grid a `±1/K` box around the winner at resolution `1/K²`.
    pub refine: bool,
    /// Solve every response by LP and skip pruning (reference mode).
    pub exhaustive: bool,
}

impl GridOptions {
    pub fn new(grid: u32) -> Self {
        GridOptions {
            grid,
            band: None,
            refine: false,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub best: Solution,
    /// A-priori bound on how far the grid maximum can sit below the true
    /// sender optimum: `L_S·m·n/K`.
    pub sender_upper_gap: Rational,
    /// The same bound with the receiver's utility spread.
    pub receiver_resolution: Rational,
    /// Highest sender payoff found on the grid.
    pub grid_max_sender_eu: Rational,
    pub band: Rational,
    pub grid: u32,
    /// Canonical schemes visited, schemes skipped by the sender bound, and
    /// responses where the receiver's favourites broke a quota.
    pub visited: u64,
    pub pruned: u64,
    pub repaired: u64,
    pub refined: Option<Solution>,
}

/// Grid used when the caller gives none: 200 for binary instances, 12 for
/// 3×3, 6 beyond.
pub fn default_grid(inst: &Instance) -> u32 {
    match (inst.states(), inst.actions()) {
        (2, 2) => 200,
        (n, m) if n <= 3 && m <= 3 => 12,
        _ => 6,
    }
}

/// `L·m·n/K` for spread `L`.
pub fn resolution_bound(spread: &Rational, inst: &Instance, grid: u32) -> Rational {
    spread * &Rational::new((inst.states() * inst.actions()) as i64, grid as i64)
}

pub fn solve_exante_grid(
    inst: &Instance,
    c: &ConstraintProfile,
    grid: u32,
    band: Option<Rational>,
) -> Result<GridReport> {
    solve_exante_grid_with(
        inst,
        c,
        &GridOptions {
            band,
            ..GridOptions::new(grid)
        },
    )
}

/// Scheme columns: every vector in `{0, …, K}ⁿ`, indexed so that index
/// order is lexicographic order.
struct Columns {
    n: usize,
    grid: u32,
    entries: Vec<Vec<u32>>,
}

impl Columns {
    fn build(n: usize, grid: u32) -> Result<Self> {
        let side = grid as usize + 1;
        let count = side
            .checked_pow(n as u32)
            .filter(|&c| c <= MAX_COLUMNS)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "grid 1/{grid} with {n} states is too large to enumerate"
                ))
            })?;
        let entries = (0..count).map(|idx| Self::decode(idx, n, side)).collect();
        Ok(Columns { n, grid, entries })
    }

    fn decode(mut idx: usize, n: usize, side: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % side) as u32;
            idx /= side;
        }
        v
    }

    fn encode(&self, v: &[u32]) -> usize {
        let side = self.grid as usize + 1;
        v.iter().fold(0, |acc, &e| acc * side + e as usize)
    }

    /// Calls `f` with every sorted column tuple summing to `K` in each row.
    fn for_each_scheme(&self, m: usize, mut f: impl FnMut(&[usize])) {
        let mut chosen = Vec::with_capacity(m);
        let rem = vec![self.grid; self.n];
        self.recurse(m, 0, &rem, &mut chosen, &mut f);
    }

    fn recurse(
        &self,
        m: usize,
        min_idx: usize,
        rem: &[u32],
        chosen: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if chosen.len() + 1 == m {
            let last = self.encode(rem);
            if last >= min_idx {
                chosen.push(last);
                f(chosen);
                chosen.pop();
            }
            return;
        }
        // Odometer over 0 ≤ v ≤ rem in lexicographic (= index) order.
        let mut v = vec![0u32; self.n];
        loop {
            let idx = self.encode(&v);
            if idx >= min_idx {
                let next: Vec<u32> = rem.iter().zip(&v).map(|(r, x)| r - x).collect();
                // Later columns sort after this one and are nonnegative, so
                // their sum does too.
                if self.encode(&next) >= idx {
                    chosen.push(idx);
                    self.recurse(m, idx, &next, chosen, f);
                    chosen.pop();
                }
            }
            let mut pos = self.n;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                if v[pos] < rem[pos] {
                    v[pos] += 1;
                    break;
                }
                v[pos] = 0;
            }
        }
    }

    fn scheme(&self, idxs: &[usize]) -> SignalingScheme {
        let k = Rational::from(self.grid as i64);
        let probs = (0..self.n)
            .map(|i| {
                idxs.iter()
                    .map(|&c| &Rational::from(self.entries[c][i] as i64) / &k)
                    .collect()
            })
            .collect();
        SignalingScheme::new(probs).expect("grid rows sum to K")
    }
}

/// Exact rational scores for every column, for reference mode and for
/// instances the integer engine cannot take.
struct ExactColumns {
    tables: Vec<SignalTable>,
}

impl ExactColumns {
    fn build(inst: &Instance, columns: &Columns) -> Self {
        let k = Rational::from(columns.grid as i64);
        let tables = columns
            .entries
            .iter()
            .map(|v| {
                SignalTable::column(
                    inst,
                    v.iter()
                        .map(|&e| vec![&Rational::from(e as i64) / &k])
                        .collect(),
                )
            })
            .collect();
        ExactColumns { tables }
    }

    fn table(&self, idxs: &[usize]) -> SignalTable {
        let pick = |f: &dyn Fn(&SignalTable) -> Vec<Rational>| {
            idxs.iter().map(|&c| f(&self.tables[c])).collect()
        };
        SignalTable {
            mass: idxs
                .iter()
                .map(|&c| self.tables[c].mass[0].clone())
                .collect(),
            receiver: pick(&|t| t.receiver[0].clone()),
            sender: pick(&|t| t.sender[0].clone()),
        }
    }
}

/// Sender-best, then receiver-best (within the band), then smallest scheme.
struct Selection<K> {
    band: Rational,
    max_sender: Option<Rational>,
    candidates: Vec<(Rational, Rational, K)>,
}

impl<K: Clone> Selection<K> {
    fn new(band: Rational) -> Self {
        Selection {
            band,
            max_sender: None,
            candidates: Vec::new(),
        }
    }

    /// Schemes whose sender payoff cannot reach this value are irrelevant.
    fn threshold(&self) -> Option<Rational> {
        self.max_sender.as_ref().map(|m| m - &self.band)
    }

    fn offer(&mut self, sender: Rational, receiver: Rational, key: K) {
        if self.threshold().is_some_and(|t| sender < t) {
            return;
        }
        if self.max_sender.as_ref().is_none_or(|m| &sender > m) {
            self.max_sender = Some(sender.clone());
            let t = self.threshold().expect("just set");
            self.candidates.retain(|(s, _, _)| *s >= t);
        }
        self.candidates.push((sender, receiver, key));
    }

    fn winner(self, order: impl Fn(&K, &K) -> Ordering) -> Option<(Rational, K)> {
        let max = self.max_sender?;
        self.candidates
            .into_iter()
            .min_by(|a, b| b.1.cmp(&a.1).then_with(|| order(&a.2, &b.2)))
            .map(|(_, _, k)| (max, k))
    }
}

fn row_major(scheme: &SignalingScheme) -> impl Iterator<Item = &Rational> {
    scheme.probs().iter().flatten()
}

fn lex_order(a: &SignalingScheme, b: &SignalingScheme) -> Ordering {
    row_major(a).cmp(row_major(b))
}

pub fn solve_exante_grid_with(
    inst: &Instance,
    c: &ConstraintProfile,
    opts: &GridOptions,
) -> Result<GridReport> {
    if opts.grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {}",
            opts.grid
        )));
    }
    if !check_constraints(c, inst)?.implementable {
        return Err(Error::NotImplementable);
    }
    let m = inst.actions();
    let sender_upper_gap = resolution_bound(&inst.sender_spread(), inst, opts.grid);
    let receiver_resolution = resolution_bound(&inst.receiver_spread(), inst, opts.grid);
    let band = opts
        .band
        .clone()
        .unwrap_or_else(|| sender_upper_gap.clone());
    if band.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "band must be nonnegative, got {band}"
        )));
    }

    let columns = Columns::build(inst.states(), opts.grid)?;
    let engine = if opts.exhaustive {
        None
    } else {
        Scaled::new(inst, c, opts.grid, &columns.entries)
    };
    let exact = engine
        .is_none()
        .then(|| ExactColumns::build(inst, &columns));
    let scale = engine
        .as_ref()
        .map_or_else(Rational::one, |e| e.scale.clone());

    // Selection runs in engine units.
    let mut sel: Selection<Vec<usize>> = Selection::new(&band * &scale);
    let (mut visited, mut pruned, mut repaired) = (0u64, 0u64, 0u64);
    let mut failure = None;
    columns.for_each_scheme(m, |idxs| {
        if failure.is_some() {
            return;
        }
        visited += 1;
        if let Some(engine) = &engine {
            match engine.score(idxs, sel.threshold().as_ref()) {
                Score::Pruned => {
                    pruned += 1;
                    return;
                }
                Score::Value {
                    sender,
                    receiver,
                    repaired: r,
                } => {
                    repaired += u64::from(r);
                    sel.offer(sender, receiver, idxs.to_vec());
                    return;
                }
                Score::Unresolved => {}
            }
        }
        repaired += 1;
        let table = match &exact {
            Some(x) => x.table(idxs),
            None => match SignalTable::new(inst, &columns.scheme(idxs)) {
                Ok(t) => t,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            },
        };
        let br = if opts.exhaustive {
            lex_response_lp(&table, c)
        } else {
            lex_response(&table, c)
        };
        match br {
            Ok(br) => sel.offer(
                &br.sender_eu * &scale,
                &br.receiver_eu * &scale,
                idxs.to_vec(),
            ),
            // Implementable quotas always admit a response; anything else
            // is a genuine error.
            Err(Error::InfeasibleConstraints(_)) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (max_scaled, idxs) = sel
        .winner(|a, b| lex_order(&columns.scheme(a), &columns.scheme(b)))
        .ok_or(Error::EmptyGrid { grid: opts.grid })?;
    let grid_max_sender_eu = &max_scaled / &scale;
    let best = finish(inst, c, columns.scheme(&idxs))?;
    debug_assert!(
        best.sender_eu >= &grid_max_sender_eu - &band && best.sender_eu <= grid_max_sender_eu
    );

    let refined = if opts.refine {
        Some(refine(inst, c, &best.scheme, opts.grid, &band)?)
    } else {
        None
    };

    Ok(GridReport {
        best,
        sender_upper_gap,
        receiver_resolution,
        grid_max_sender_eu,
        band,
        grid: opts.grid,
        visited,
        pruned,
        repaired,
        refined,
    })
}

fn finish(inst: &Instance, c: &ConstraintProfile, scheme: SignalingScheme) -> Result<Solution> {
    let br = lex_response(&SignalTable::new(inst, &scheme)?, c)?;
    Solution::assemble(inst, scheme, br.policy, Method::GridOracle)
}

/// All grid rows within `±1/K` of `row` at resolution `1/K²`.
fn local_rows(row: &[Rational], grid: u32) -> Vec<Vec<Rational>> {
    let fine = (grid as i64) * (grid as i64);
    let scale = Rational::from(fine);
    let centre: Vec<i64> = row
        .iter()
        .map(|x| i64::try_from((x * &scale).floor()).expect("grid entries fit"))
        .collect();
    let (lo, hi): (Vec<i64>, Vec<i64>) = centre
        .iter()
        .map(|&c| ((c - grid as i64).max(0), (c + grid as i64).min(fine)))
        .unzip();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(row.len());
    fn go(
        k: usize,
        lo: &[i64],
        hi: &[i64],
        left: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if k + 1 == lo.len() {
            if (lo[k]..=hi[k]).contains(&left) {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for x in lo[k]..=hi[k].min(left) {
            cur.push(x);
            go(k + 1, lo, hi, left - x, cur, out);
            cur.pop();
        }
    }
    let mut ints = Vec::new();
    go(0, &lo, &hi, fine, &mut cur, &mut ints);
    for v in ints {
        out.push(v.into_iter().map(|x| Rational::new(x, fine)).collect());
    }
    out
}

fn refine(
    inst: &Instance,
    c: &ConstraintProfile,
    incumbent: &SignalingScheme,
    grid: u32,
    band: &Rational,
) -> Result<Solution> {
    let rows: Vec<Vec<Vec<Rational>>> = incumbent
        .probs()
        .iter()
        .map(|r| local_rows(r, grid))
        .collect();
    let mut sel: Selection<SignalingScheme> = Selection::new(band.clone());
    let mut pick = vec![0usize; rows.len()];
    'outer: loop {
        let scheme =
            SignalingScheme::new(pick.iter().zip(&rows).map(|(&p, r)| r[p].clone()).collect())?;
        let br = lex_response(&SignalTable::new(inst, &scheme)?, c)?;
        sel.offer(br.sender_eu, br.receiver_eu, scheme);
        for (p, r) in pick.iter_mut().zip(&rows) {
            *p += 1;
            if *p < r.len() {
                continue 'outer;
            }
            *p = 0;
        }
        break;
    }
    let (_, scheme) = sel
        .winner(lex_order)
        .ok_or(Error::EmptyGrid { grid: grid * grid })?;
    finish(inst, c, scheme)
}
