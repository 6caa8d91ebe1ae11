//! Dense two-phase simplex for `min cᵀx  s.t.  A x ≤ b, x ≥ 0` with
//! Bland's rule for anti-cycling. Rows with `b < 0` start from an
//! artificial variable in phase one.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the RHS.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.cols
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Loads `cost` (indexed by column) as the canonical objective row.
    fn set_objective(&mut self, cost: &[f64]) {
        let m = self.basis.len();
        let mut row = vec![0.0; self.cols + 1];
        row[..self.cols].copy_from_slice(&cost[..self.cols]);
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (v, tv) in row.iter_mut().zip(self.t[i].iter()) {
                    *v -= cb * tv;
                }
            }
        }
        self.t[m] = row;
    }

    /// Runs Bland-rule pivots over columns `< active` until optimal.
    fn optimize(&mut self, active: usize) -> Result<()> {
        let m = self.basis.len();
        let rhs = self.rhs();
        loop {
            let Some(enter) = (0..active).find(|&j| self.t[m][j] < -PIVOT_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || ((ratio - lr).abs() <= 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            if self.pivots >= self.max_pivots {
                return Err(Error::LpIterationLimit(self.pivots));
            }
            self.pivot(row, enter);
        }
    }
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Solves the program. `Err(Error::Infeasible { column: 0 })` signals an
    /// empty feasible set; callers relabel the column.
    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.c.len();
        let m = self.b.len();
        if self.a.len() != m || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("LP constraint shape".into()));
        }
        let negative: Vec<usize> = (0..m).filter(|&i| self.b[i] < 0.0).collect();
        let n_art = negative.len();
        let cols = n + m + n_art;
        let mut t = vec![vec![0.0; cols + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut art_index = n + m;
        for i in 0..m {
            let sign = if self.b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i][j] = sign * self.a[i][j];
            }
            t[i][n + i] = sign;
            t[i][cols] = sign * self.b[i];
            if sign < 0.0 {
                t[i][art_index] = 1.0;
                basis[i] = art_index;
                art_index += 1;
            } else {
                basis[i] = n + i;
            }
        }
        let mut tab = Tableau {
            t,
            basis,
            cols,
            pivots: 0,
            max_pivots: 10_000 + 50 * (m + n),
        };

        if n_art > 0 {
            let mut cost = vec![0.0; cols];
            for c in cost.iter_mut().skip(n + m) {
                *c = 1.0;
            }
            tab.set_objective(&cost);
            tab.optimize(cols)?;
            let infeasibility = -tab.t[m][cols];
            let scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if infeasibility > FEAS_EPS * scale {
                return Err(Error::Infeasible { column: 0 });
            }
            // Drive zero-level artificials out of the basis; drop redundant rows.
            let mut i = 0;
            while i < tab.basis.len() {
                if tab.basis[i] >= n + m {
                    match (0..n + m).find(|&j| tab.t[i][j].abs() > PIVOT_EPS) {
                        Some(j) => tab.pivot(i, j),
                        None => {
                            tab.t.remove(i);
                            tab.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            // Artificial columns are never re-entered in phase two.
            for row in tab.t.iter_mut() {
                for j in (n + m)..cols {
                    row[j] = 0.0;
                }
            }
        }

        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&self.c);
        tab.set_objective(&cost);
        tab.optimize(n + m)?;

        let mut x = vec![0.0; n];
        for (i, &bv) in tab.basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab.t[i][cols].max(0.0);
            }
        }
        let objective = x.iter().zip(self.c.iter()).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: tab.pivots,
        })
    }
}
