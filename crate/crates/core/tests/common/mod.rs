#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sparse_dca::data::Dataset;
use sparse_dca::subsolver::LinearProgram;
use sparse_dca::svmfs::SvmInstance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points uniform in `[-1, 1]ⁿ`, `na` of class `+1` and `nb` of class `-1`.
pub fn uniform_instance(rng: &mut ChaCha8Rng, n: usize, na: usize, nb: usize, lambda: f64) -> SvmInstance<f64> {
    let mut draw = |m: usize| -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect()
    };
    let a = draw(na);
    let b = draw(nb);
    SvmInstance::new(a, b, lambda).unwrap()
}

/// `m` points with standard normal features labelled by a hidden
/// hyperplane on `k` coordinates, with Gaussian margin noise of scale
/// `sigma`. Returns the data, the hidden support and the hidden weights.
pub fn sparse_separator(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    m: usize,
    sigma: f64,
) -> (Dataset<f64>, Vec<usize>, Vec<f64>) {
    let mut support: Vec<usize> = Vec::new();
    while support.len() < k {
        let i = rng.random_range(0..n);
        if !support.contains(&i) {
            support.push(i);
        }
    }
    support.sort();
    let w: Vec<f64> = (0..n)
        .map(|i| {
            if support.contains(&i) {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        })
        .collect();
    let ds = draw_labelled(rng, &w, m, sigma);
    (ds, support, w)
}

pub fn draw_labelled(rng: &mut ChaCha8Rng, w: &[f64], m: usize, sigma: f64) -> Dataset<f64> {
    let mut f = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    while f.len() < m {
        let u: Vec<f64> = w.iter().map(|_| StandardNormal.sample(rng)).collect();
        let noise: f64 = StandardNormal.sample(rng);
        let s: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + sigma * noise;
        if s == 0.0 {
            continue;
        }
        y.push(if s > 0.0 { 1 } else { -1 });
        f.push(u);
    }
    Dataset::new(f, y).unwrap()
}

/// Solves `A v = r` for square `A` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        r.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    #[allow(clippy::needless_range_loop)]
                    for k in c..n {
                        a[i][k] -= f * a[c][k];
                    }
                    r[i] -= f * r[c];
                }
            }
        }
    }
    Some((0..n).map(|i| r[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, k, out, cur, i + 1);
        cur.pop();
    }
}

/// Optimum of a bounded LP by enumerating all vertices: every choice of
/// `n` active constraints (rows and finite bounds) whose intersection is
/// feasible. `None` when no vertex is feasible.
pub fn vertex_enumeration(lp: &LinearProgram<f64>) -> Option<f64> {
    let n = lp.n_vars();
    let mut cons: Vec<(Vec<f64>, f64)> = lp.rows().iter().map(|r| (r.coeffs.clone(), r.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        if let Some(u) = lp.upper()[j] {
            e[j] = 1.0;
            cons.push((e.clone(), u));
        }
        if let Some(l) = lp.lower()[j] {
            e[j] = -1.0;
            cons.push((e, -l));
        }
    }
    let mut sets = Vec::new();
    combinations(cons.len(), n, &mut sets, &mut Vec::new(), 0);
    let mut best: Option<f64> = None;
    for s in sets {
        let a: Vec<Vec<f64>> = s.iter().map(|&i| cons[i].0.clone()).collect();
        let r: Vec<f64> = s.iter().map(|&i| cons[i].1).collect();
        if let Some(v) = solve_square(a, r) {
            if lp.max_violation(&v) <= 1e-9 {
                let f = lp.objective_at(&v);
                best = Some(best.map_or(f, |b: f64| b.min(f)));
            }
        }
    }
    best
}

/// Random LP with up to `max_vars` variables in a box and up to
/// `max_rows` inequality rows.
pub fn random_boxed_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram<f64> {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(0..=max_rows);
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut lp = LinearProgram::new(c);
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let r = rng.random_range(-0.5..=1.0);
        lp.add_le(a, r).unwrap();
    }
    for j in 0..n {
        let lo = rng.random_range(-2.0..=0.0);
        let hi = rng.random_range(0.0..=2.0);
        lp.set_bounds(j, Some(lo), Some(hi)).unwrap();
    }
    lp
}
