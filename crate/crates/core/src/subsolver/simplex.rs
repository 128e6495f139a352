//! Dense two-phase tableau simplex.
//!
//! The problem is brought to standard form (`A y + s = b`, `y, s >= 0`) by
//! shifting bounded variables and splitting free ones. Rows with a negative
//! right-hand side receive an artificial variable unless a singleton column
//! can serve as their initial basic variable, which covers the slack
//! variables of hinge-loss rows. Entering columns follow Dantzig's rule and
//! fall back to Bland's rule after a run of degenerate pivots, which rules
//! out cycling.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::lp::{LinearProgram, LpSolution, LpStatus};

/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 30;

#[derive(Debug, Clone, Copy)]
enum ColMap<T> {
    /// `v = offset + y`
    Shifted { col: usize, offset: T },
    /// `v = offset - y`
    Negated { col: usize, offset: T },
    /// `v = y⁺ - y⁻`
    Split { pos: usize, neg: usize },
}

struct StandardForm<T> {
    maps: Vec<ColMap<T>>,
    n_struct: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    cost: Vec<T>,
}

fn standard_form<T: Real>(lp: &LinearProgram<T>) -> StandardForm<T> {
    let mut maps = Vec::with_capacity(lp.n_vars());
    let mut n_struct = 0;
    let mut upper_rows = Vec::new();
    for j in 0..lp.n_vars() {
        let map = match (lp.lower()[j], lp.upper()[j]) {
            (Some(l), u) => {
                if let Some(u) = u {
                    upper_rows.push((n_struct, u - l));
                }
                ColMap::Shifted {
                    col: n_struct,
                    offset: l,
                }
            }
            (None, Some(u)) => ColMap::Negated {
                col: n_struct,
                offset: u,
            },
            (None, None) => {
                n_struct += 1;
                ColMap::Split {
                    pos: n_struct - 1,
                    neg: n_struct,
                }
            }
        };
        n_struct += 1;
        maps.push(map);
    }

    let expand = |coeffs: &[T]| -> (Vec<T>, T) {
        let mut out = vec![T::zero(); n_struct];
        let mut shift = T::zero();
        for (j, &a) in coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            match maps[j] {
                ColMap::Shifted { col, offset } => {
                    out[col] = a;
                    shift = shift + a * offset;
                }
                ColMap::Negated { col, offset } => {
                    out[col] = -a;
                    shift = shift + a * offset;
                }
                ColMap::Split { pos, neg } => {
                    out[pos] = a;
                    out[neg] = -a;
                }
            }
        }
        (out, shift)
    };

    let mut rows = Vec::with_capacity(lp.rows().len() + upper_rows.len());
    let mut rhs = Vec::with_capacity(rows.capacity());
    for row in lp.rows() {
        let (coeffs, shift) = expand(&row.coeffs);
        rows.push(coeffs);
        rhs.push(row.rhs - shift);
    }
    for (col, width) in upper_rows {
        let mut coeffs = vec![T::zero(); n_struct];
        coeffs[col] = T::one();
        rows.push(coeffs);
        rhs.push(width);
    }
    let (cost, _) = expand(lp.objective());
    StandardForm {
        maps,
        n_struct,
        rows,
        rhs,
        cost,
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs of the active objective; `obj_rhs` holds minus its value.
    obj: Vec<T>,
    obj_rhs: T,
    /// Columns at or beyond this index may not enter the basis.
    enter_limit: usize,
    iterations: usize,
    max_iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Real> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = T::one() / self.rows[r][c];
        let mut prow = std::mem::take(&mut self.rows[r]);
        for v in prow.iter_mut() {
            *v = *v * inv;
        }
        prow[c] = T::one();
        let prhs = self.rhs[r] * inv;
        self.rhs[r] = prhs;
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| prow[k] != T::zero()).collect();

        let eliminate = |row: &mut [T], rhs: &mut T| {
            let f = row[c];
            if f != T::zero() {
                for &k in &nz {
                    row[k] = row[k] - f * prow[k];
                }
                row[c] = T::zero();
                *rhs = *rhs - f * prhs;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row, &mut self.rhs[i]);
            }
        }
        eliminate(&mut self.obj, &mut self.obj_rhs);
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn run(&mut self) -> Result<Outcome> {
        let opt_tol = T::opt_tol();
        let piv_tol = T::pivot_tol();
        let tie = T::zero_snap();
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationLimit(self.max_iterations));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -opt_tol;
            for j in 0..self.enter_limit {
                let d = self.obj[j];
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else {
                return Ok(Outcome::Optimal);
            };

            let mut t_min = T::infinity();
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > piv_tol {
                    let t = self.rhs[i].max(T::zero()) / a;
                    if t < t_min {
                        t_min = t;
                    }
                }
            }
            if !t_min.is_finite() {
                let tiny = (0..self.rows.len())
                    .map(|i| self.rows[i][c])
                    .any(|a| a > T::epsilon() * T::lit(64.0));
                if tiny {
                    return Err(Error::DegeneratePivot(format!(
                        "column {c} has only pivots below {piv_tol:e}"
                    )));
                }
                return Ok(Outcome::Unbounded);
            }
            let limit = t_min + tie * (T::one() + t_min);
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= piv_tol || self.rhs[i].max(T::zero()) / a > limit {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let better = if bland {
                            self.basis[i] < self.basis[l]
                        } else {
                            a > self.rows[l][c]
                        };
                        Some(if better { i } else { l })
                    }
                };
            }
            let r = leave.expect("ratio test found a row");
            if t_min <= tie {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
            self.iterations += 1;
        }
    }
}

/// Solves `lp` to an exact vertex optimum.
///
/// Infeasible and unbounded problems are reported through
/// [`LpSolution::status`]; errors are reserved for numerical trouble.
pub fn solve_lp<T: Real>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    let sf = standard_form(lp);
    let m = sf.rows.len();
    let ns = sf.n_struct;

    if m == 0 {
        // Only sign constraints: optimal at zero unless some cost is negative.
        if sf.cost.iter().any(|&c| c < -T::opt_tol()) {
            return Ok(LpSolution::unbounded());
        }
        return finish(lp, &sf, &vec![T::zero(); ns]);
    }

    // Columns that appear in exactly one row can seed the basis.
    let mut col_count = vec![0usize; ns];
    for row in &sf.rows {
        for (j, &a) in row.iter().enumerate() {
            if a != T::zero() {
                col_count[j] += 1;
            }
        }
    }
    let mut used = vec![false; ns];
    let mut basis = vec![usize::MAX; m];
    let mut needs_art = Vec::new();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = sf.rows[i].clone();
        row.resize(ns + m, T::zero());
        row[ns + i] = T::one();
        let mut b = sf.rhs[i];
        if b < T::zero() {
            for v in row.iter_mut() {
                *v = -*v;
            }
            b = -b;
            let seed = (0..ns).find(|&j| !used[j] && col_count[j] == 1 && row[j] > T::pivot_tol());
            match seed {
                Some(j) => {
                    let inv = T::one() / row[j];
                    for v in row.iter_mut() {
                        *v = *v * inv;
                    }
                    row[j] = T::one();
                    b = b * inv;
                    used[j] = true;
                    basis[i] = j;
                }
                None => needs_art.push(i),
            }
        } else {
            basis[i] = ns + i;
        }
        rows.push(row);
        rhs.push(b);
    }

    let n_art = needs_art.len();
    let width = ns + m + n_art;
    for row in rows.iter_mut() {
        row.resize(width, T::zero());
    }
    let mut obj = vec![T::zero(); width];
    let mut obj_rhs = T::zero();
    for (k, &i) in needs_art.iter().enumerate() {
        rows[i][ns + m + k] = T::one();
        basis[i] = ns + m + k;
        for j in 0..ns + m {
            obj[j] = obj[j] - rows[i][j];
        }
        obj_rhs = obj_rhs - rhs[i];
    }

    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        obj,
        obj_rhs,
        enter_limit: ns + m,
        iterations: 0,
        max_iterations: 50 * (m + width) + 1000,
    };

    if n_art > 0 {
        match tab.run()? {
            Outcome::Optimal => {}
            Outcome::Unbounded => return Err(Error::DegeneratePivot("phase one reported unbounded".into())),
        }
        let scale = T::one() + sf.rhs.iter().fold(T::zero(), |acc, b| acc.max(b.abs()));
        if -tab.obj_rhs > T::feas_tol() * scale {
            return Ok(LpSolution::infeasible());
        }
        drive_out_artificials(&mut tab, ns + m);
        for row in tab.rows.iter_mut() {
            row.truncate(ns + m);
        }
    }

    // Phase two objective in terms of the current basis.
    let mut obj = vec![T::zero(); ns + m];
    obj[..ns].copy_from_slice(&sf.cost);
    let mut obj_rhs = T::zero();
    for (i, &k) in tab.basis.iter().enumerate() {
        if k < ns && sf.cost[k] != T::zero() {
            let ck = sf.cost[k];
            for (o, &a) in obj.iter_mut().zip(&tab.rows[i]) {
                *o = *o - ck * a;
            }
            obj_rhs = obj_rhs - ck * tab.rhs[i];
        }
    }
    tab.obj = obj;
    tab.obj_rhs = obj_rhs;
    tab.enter_limit = ns + m;

    match tab.run()? {
        Outcome::Unbounded => Ok(LpSolution::unbounded()),
        Outcome::Optimal => {
            let mut y = vec![T::zero(); ns];
            for (i, &k) in tab.basis.iter().enumerate() {
                if k < ns {
                    let v = tab.rhs[i];
                    y[k] = if v.abs() <= T::zero_snap() {
                        T::zero()
                    } else {
                        v.max(T::zero())
                    };
                }
            }
            finish(lp, &sf, &y)
        }
    }
}

/// Pivots basic artificial variables out on any usable column and deletes
/// rows that turn out to be redundant.
fn drive_out_artificials<T: Real>(tab: &mut Tableau<T>, first_art: usize) {
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] < first_art {
            i += 1;
            continue;
        }
        let mut best: Option<usize> = None;
        for j in 0..first_art {
            let a = tab.rows[i][j].abs();
            if a > T::pivot_tol() && best.is_none_or(|b| a > tab.rows[i][b].abs()) {
                best = Some(j);
            }
        }
        match best {
            Some(j) => {
                tab.pivot(i, j);
                i += 1;
            }
            None => {
                tab.rows.remove(i);
                tab.rhs.remove(i);
                tab.basis.remove(i);
            }
        }
    }
}

fn finish<T: Real>(lp: &LinearProgram<T>, sf: &StandardForm<T>, y: &[T]) -> Result<LpSolution<T>> {
    let point: Vec<T> = sf
        .maps
        .iter()
        .map(|m| match *m {
            ColMap::Shifted { col, offset } => offset + y[col],
            ColMap::Negated { col, offset } => offset - y[col],
            ColMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let violation = lp.max_violation(&point);
    if violation > T::feas_tol() {
        return Err(Error::DegeneratePivot(format!(
            "solution violates constraints by {violation:e}"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_at(&point),
        point: Some(point),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_upper_limit() {
        // min -v s.t. v <= 1, -v <= 0
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.add_le(vec![1.0], 1.0).unwrap();
        lp.add_le(vec![-1.0], 0.0).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.point.unwrap(), vec![1.0]);
        assert_eq!(sol.objective_value, -1.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        // v <= -1 and v >= 2
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_le(vec![1.0], -1.0).unwrap();
        lp.add_le(vec![-1.0], -2.0).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.point.is_none());
    }

    #[test]
    fn simplex_face_optimum() {
        // min -v1 - v2 s.t. v1 + v2 <= 1, v >= 0. The three vertices of the
        // feasible triangle are (0,0), (1,0), (0,1) with values 0, -1, -1.
        let vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let oracle = vertices.iter().map(|v| -v[0] - v[1]).fold(f64::INFINITY, f64::min);
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_le(vec![1.0, 1.0], 1.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective_value, oracle);
        let p: Vec<f64> = sol.point.unwrap();
        assert!(vertices.iter().any(|v| v[0] == p[0] && v[1] == p[1]));
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_le(vec![0.0, 1.0], 1.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min v0 + 2 v1 s.t. v0 + v1 >= 3, v0 <= 2 (upper only), v1 in [-1, 5]
        let mut lp = LinearProgram::<f64>::new(vec![1.0, 2.0]);
        lp.add_ge(vec![1.0, 1.0], 3.0).unwrap();
        lp.set_bounds(0, None, Some(2.0)).unwrap();
        lp.set_bounds(1, Some(-1.0), Some(5.0)).unwrap();
        let sol = solve_lp(&lp).unwrap();
        let p: Vec<f64> = sol.point.unwrap();
        assert!((p[0] - 2.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective_value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_handled() {
        // v0 + v1 = 2 written twice as pairs of inequalities.
        let mut lp = LinearProgram::<f64>::new(vec![1.0, 0.0]);
        for _ in 0..2 {
            lp.add_le(vec![1.0, 1.0], 2.0).unwrap();
            lp.add_ge(vec![1.0, 1.0], 2.0).unwrap();
        }
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), Some(1.5)).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_rows() {
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.set_bounds(0, Some(-2.0), None).unwrap();
        lp.set_bounds(1, None, Some(3.0)).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.point.unwrap(), vec![-2.0, 3.0]);
        let free = LinearProgram::new(vec![1.0]);
        assert_eq!(solve_lp(&free).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0, -1.0]);
        lp.add_le(vec![1.0, 1.0, 1.0], 1.0).unwrap();
        lp.add_le(vec![1.0, -1.0, 0.0], 0.0).unwrap();
        for j in 0..3 {
            lp.set_bounds(j, Some(0.0), None).unwrap();
        }
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn works_in_f32() {
        let mut lp = LinearProgram::<f32>::new(vec![-1.0, -2.0]);
        lp.add_le(vec![1.0, 1.0], 4.0).unwrap();
        lp.add_le(vec![0.0, 1.0], 3.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective_value + 7.0).abs() < 1e-5);
    }
}
