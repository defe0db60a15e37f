//! Dense two-phase simplex for small standard-form programs
//! `maximize cᵀx  subject to  A x = b, x ≥ 0`, using Bland's rule.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch")]
    Shape,
    #[error("program is infeasible (phase-one optimum {0:e})")]
    Infeasible(f64),
    #[error("program is unbounded")]
    Unbounded,
    #[error("simplex did not terminate within {0} pivots")]
    PivotLimit(usize),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = line[col];
            if factor != 0.0 {
                for (v, &pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                line[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Maximizes `obj · x` over columns allowed by `allowed`.
    fn optimize(&mut self, obj: &[f64], allowed: &dyn Fn(usize) -> bool, limit: usize) -> Result<(), LpError> {
        let rhs = self.cols;
        loop {
            if self.pivots > limit {
                return Err(LpError::PivotLimit(limit));
            }
            // reduced cost of column j: obj_j - obj_B · column_j
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = obj[j];
                for (r, &b) in self.basis.iter().enumerate() {
                    reduced -= obj[b] * self.t[r][j];
                }
                if reduced > PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return Ok(()) };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.t[r][rhs] / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-14 || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leaving else { return Err(LpError::Unbounded) };
            self.pivot(row, col);
        }
    }
}

/// Solves `maximize cᵀx, A x = b, x ≥ 0` for a dense row-major `A`.
pub fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape);
    }
    // columns: n structural, m artificial, then rhs
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut line = vec![0.0; cols + 1];
        for j in 0..n {
            line[j] = sign * row[j];
        }
        line[n + i] = 1.0;
        line[cols] = sign * b[i];
        t.push(line);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols, pivots: 0 };
    let limit = 50 * (cols + m).max(100);

    let mut phase1 = vec![0.0; cols];
    for v in phase1.iter_mut().skip(n) {
        *v = -1.0;
    }
    tab.optimize(&phase1, &|_| true, limit)?;
    let infeas: f64 = tab.basis.iter().enumerate().filter(|(_, &bj)| bj >= n).map(|(r, _)| tab.t[r][cols]).sum();
    if infeas > FEAS_EPS {
        return Err(LpError::Infeasible(infeas));
    }
    // drive remaining artificials out of the basis; drop redundant rows
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[r][j].abs() > 1e-9) {
                tab.pivot(r, j);
            } else {
                tab.t.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(c);
    tab.optimize(&phase2, &|j| j < n, limit)?;

    let mut x = vec![0.0; n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.t[r][cols].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, pivots: tab.pivots })
}
