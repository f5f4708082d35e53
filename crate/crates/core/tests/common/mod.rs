//! Shared fixtures: a seeded corpus of small LPs and a brute-force vertex
//! enumerator to check them against.

#![allow(dead_code)]

use quota_persuasion::linprog::{Bounds, LinearProgram, Relation};
use quota_persuasion::rational::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

/// Bounded LPs with 2–6 variables, each boxed in `[0, 5]`, and 1–4 rows of
/// mixed relations with small integer data. Some are infeasible.
pub fn lp_corpus(count: usize, seed: u64) -> Vec<LinearProgram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let int =
                |rng: &mut ChaCha8Rng, lo: i64, hi: i64| Rational::from(rng.gen_range(lo..=hi));
            let mut lp = LinearProgram::maximize((0..n).map(|_| int(&mut rng, -4, 6)).collect());
            for v in 0..n {
                lp.set_bounds(v, Bounds::boxed(Rational::zero(), Rational::from(5)));
            }
            for _ in 0..rng.gen_range(1..=4) {
                let coeffs = (0..n).map(|_| int(&mut rng, -3, 5)).collect();
                let relation = match rng.gen_range(0..6) {
                    0 => Relation::Eq,
                    1 | 2 => Relation::Ge,
                    _ => Relation::Le,
                };
                let rhs = int(&mut rng, -2, 12);
                lp.add_row(coeffs, relation, rhs);
            }
            lp
        })
        .collect()
}

/// Solves `a·x = b` exactly; `None` when `a` is singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= &d;
                }
                let d = &f * &b[col];
                b[r] -= &d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Best objective over all basic feasible points, or `None` if no vertex is
/// feasible. Every variable must be boxed, so the feasible set is a polytope
/// and an optimum (if any) sits at a vertex.
pub fn brute_force_max(lp: &LinearProgram) -> Option<Rational> {
    let n = lp.vars();
    // Candidate tight hyperplanes: rows, then both sides of every box.
    let mut planes: Vec<(Vec<Rational>, Rational)> = lp
        .rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs.clone()))
        .collect();
    for (v, b) in lp.bounds.iter().enumerate() {
        let unit: Vec<Rational> = (0..n)
            .map(|i| {
                if i == v {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for side in [&b.lo, &b.hi] {
            planes.push((
                unit.clone(),
                side.clone().expect("corpus variables are boxed"),
            ));
        }
    }
    let mut best: Option<Rational> = None;
    subsets(planes.len(), n, 0, &mut Vec::new(), &mut |idx| {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.is_feasible(&x) {
                let v = lp.value_at(&x);
                if best.as_ref().is_none_or(|cur| v > *cur) {
                    best = Some(v);
                }
            }
        }
    });
    best
}
