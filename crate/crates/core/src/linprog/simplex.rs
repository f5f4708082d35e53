use super::{LinearProgram, LpResult, Optimum, Relation};
use crate::rational::Rational;

/// How an original variable is expressed through nonnegative columns.
enum VarMap {
    /// `x = lo + y`
    Shift { col: usize, lo: Rational },
    /// `x = hi − y`
    Flip { col: usize, hi: Rational },
    /// `x = y⁺ − y⁻`
    Split { pos: usize, neg: usize },
}

struct Standard {
    maps: Vec<VarMap>,
    cols: usize,
    /// Rows over the nonnegative columns, normalized to `rhs ≥ 0`.
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl Standard {
    fn new(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.vars());
        let mut cols = 0;
        let mut box_rows = Vec::new();
        for b in &lp.bounds {
            match (&b.lo, &b.hi) {
                (Some(lo), hi) => {
                    if let Some(hi) = hi {
                        box_rows.push((cols, hi - lo));
                    }
                    maps.push(VarMap::Shift {
                        col: cols,
                        lo: lo.clone(),
                    });
                    cols += 1;
                }
                (None, Some(hi)) => {
                    maps.push(VarMap::Flip {
                        col: cols,
                        hi: hi.clone(),
                    });
                    cols += 1;
                }
                (None, None) => {
                    maps.push(VarMap::Split {
                        pos: cols,
                        neg: cols + 1,
                    });
                    cols += 2;
                }
            }
        }
        let mut std = Standard {
            maps,
            cols,
            rows: Vec::with_capacity(lp.rows.len() + box_rows.len()),
        };
        for row in &lp.rows {
            let (coeffs, shift) = std.transform(&row.coeffs);
            std.push_row(coeffs, row.relation, &row.rhs - &shift);
        }
        for (col, width) in box_rows {
            let mut coeffs = vec![Rational::zero(); cols];
            coeffs[col] = Rational::one();
            std.push_row(coeffs, Relation::Le, width);
        }
        std
    }

    /// Rewrites `a · x` as `a' · y + constant`.
    fn transform(&self, a: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut out = vec![Rational::zero(); self.cols];
        let mut constant = Rational::zero();
        for (coef, map) in a.iter().zip(&self.maps) {
            if coef.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, lo } => {
                    out[*col] = coef.clone();
                    constant += coef * lo;
                }
                VarMap::Flip { col, hi } => {
                    out[*col] = -coef;
                    constant += coef * hi;
                }
                VarMap::Split { pos, neg } => {
                    out[*pos] = coef.clone();
                    out[*neg] = -coef;
                }
            }
        }
        (out, constant)
    }

    fn push_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        if rhs.is_negative() {
            let flipped = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            self.rows
                .push((coeffs.iter().map(|c| -c).collect(), flipped, -rhs));
        } else {
            self.rows.push((coeffs, relation, rhs));
        }
    }

    fn recover(&self, y: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lo } => lo + &y[*col],
                VarMap::Flip { col, hi } => hi - &y[*col],
                VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
            })
            .collect()
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    a: Vec<Vec<Rational>>,
    /// Reduced-cost row `z[j] = c_B·B⁻¹A_j − c_j`; last entry is the objective.
    z: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    active: Vec<bool>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.a[i][self.width]
    }

    fn price(&mut self, cost: &[Rational]) {
        let mut z: Vec<Rational> = cost.iter().map(|c| -c).collect();
        z.push(Rational::zero());
        for (row, &b) in self.a.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (zj, aij) in z.iter_mut().zip(row) {
                if !aij.is_zero() {
                    *zj += cb * aij;
                }
            }
        }
        self.z = z;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip().expect("pivot on a nonzero entry");
        if !inv.is_one() {
            for x in self.a[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let prow = std::mem::take(&mut self.a[r]);
        let nz: Vec<usize> = (0..=self.width).filter(|&j| !prow[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= &d;
            }
        };
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.a[r] = prow;
        self.basis[r] = c;
    }

    /// Bland's rule: the lowest-index improving column enters; among tied
    /// ratios the row whose basic column has the lowest index leaves.
    fn optimize(&mut self) -> Outcome {
        loop {
            let Some(c) = (0..self.width).find(|&j| self.active[j] && self.z[j].is_negative())
            else {
                return Outcome::Optimal;
            };
            let mut best: Option<usize> = None;
            for i in 0..self.a.len() {
                let aic = &self.a[i][c];
                if !aic.is_positive() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(k) => {
                        let lhs = self.rhs(i) * &self.a[k][c];
                        let rhs = self.rhs(k) * aic;
                        if lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[k]) {
                            Some(i)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
            match best {
                Some(r) => self.pivot(r, c),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn column_values(&self, cols: usize) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); cols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < cols {
                y[b] = self.rhs(i).clone();
            }
        }
        y
    }
}

/// A feasible basis for the standardized program, after phase one.
struct Solver {
    std: Standard,
    tab: Tableau,
}

impl Solver {
    /// Runs phase one; `None` when the program is infeasible.
    fn feasible(lp: &LinearProgram) -> Option<Self> {
        let std = Standard::new(lp);
        let n = std.cols;
        let slack_count = std.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let art_rows: Vec<usize> = (0..std.rows.len())
            .filter(|&i| std.rows[i].1 != Relation::Le)
            .collect();
        let width = n + slack_count + art_rows.len();
        let first_art = n + slack_count;

        let mut a = Vec::with_capacity(std.rows.len());
        let mut basis = Vec::with_capacity(std.rows.len());
        let mut slack = n;
        let mut art = first_art;
        for (coeffs, rel, rhs) in &std.rows {
            let mut row = Vec::with_capacity(width + 1);
            row.extend(coeffs.iter().cloned());
            row.resize(width + 1, Rational::zero());
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
            }
            row[width] = rhs.clone();
            a.push(row);
        }

        let mut tab = Tableau {
            a,
            z: Vec::new(),
            basis,
            active: vec![true; width],
            width,
        };
        if !art_rows.is_empty() {
            let mut cost = vec![Rational::zero(); width];
            for c in cost.iter_mut().skip(first_art) {
                *c = -Rational::one();
            }
            tab.price(&cost);
            // Phase one is bounded above by zero.
            let _ = tab.optimize();
            if tab.z[width].is_negative() {
                return None;
            }
            // Drive zero-level artificials out of the basis; rows where that
            // is impossible are linearly dependent and are dropped.
            let mut i = 0;
            while i < tab.a.len() {
                if tab.basis[i] >= first_art {
                    match (0..first_art).find(|&j| !tab.a[i][j].is_zero()) {
                        Some(j) => {
                            tab.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            tab.a.remove(i);
                            tab.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            for flag in tab.active.iter_mut().skip(first_art) {
                *flag = false;
            }
        }
        Some(Solver { std, tab })
    }

    fn cost(&self, objective: &[Rational]) -> Vec<Rational> {
        let (mut c, _) = self.std.transform(objective);
        c.resize(self.tab.width, Rational::zero());
        c
    }

    fn maximize(&mut self, objective: &[Rational]) -> Outcome {
        let cost = self.cost(objective);
        self.tab.price(&cost);
        self.tab.optimize()
    }

    /// Restricts the search to the current optimal face: nonbasic columns
    /// with a strictly positive reduced cost are fixed at zero.
    fn freeze_face(&mut self) {
        for j in 0..self.tab.width {
            if self.tab.z[j].is_positive() {
                self.tab.active[j] = false;
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        self.std.recover(&self.tab.column_values(self.std.cols))
    }
}

/// Maximizes `lp.objective` exactly. The returned point is a basic
/// feasible solution of the standardized program, hence a vertex.
pub fn solve_lp(lp: &LinearProgram) -> LpResult {
    debug_assert!(lp.is_well_formed());
    let Some(mut solver) = Solver::feasible(lp) else {
        return LpResult::Infeasible;
    };
    match solver.maximize(&lp.objective) {
        Outcome::Unbounded => LpResult::Unbounded,
        Outcome::Optimal => {
            let point = solver.point();
            let value = lp.value_at(&point);
            LpResult::Optimal(Optimum { point, value })
        }
    }
}

/// Maximizes `lp.objective`, then maximizes `secondary` over the set of
/// primary optima. The reported value is the secondary objective's.
///
/// The second stage is warm-started from the first stage's optimal basis
/// and restricted to its optimal face, which is the same feasible set as
/// appending `objective · x = optimum` as a row.
pub fn solve_lex(lp: &LinearProgram, secondary: &[Rational]) -> LpResult {
    assert_eq!(
        secondary.len(),
        lp.vars(),
        "secondary objective width must match"
    );
    let Some(mut solver) = Solver::feasible(lp) else {
        return LpResult::Infeasible;
    };
    if let Outcome::Unbounded = solver.maximize(&lp.objective) {
        return LpResult::Unbounded;
    }
    solver.freeze_face();
    match solver.maximize(secondary) {
        Outcome::Unbounded => LpResult::Unbounded,
        Outcome::Optimal => {
            let point = solver.point();
            let value = super::dot(secondary, &point);
            LpResult::Optimal(Optimum { point, value })
        }
    }
}
