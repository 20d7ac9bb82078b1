//! Integer matrices with just enough lattice algebra for sheaf checks:
//! kernels over ℤ and exact integer solving.

use std::fmt;

use serde::Serialize;

/// A dense `rows × cols` integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has the wrong length");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut m = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                m.set(
                    r,
                    c,
                    (0..self.cols)
                        .map(|k| self.get(r, k) * other.get(k, c))
                        .sum(),
                );
            }
        }
        m
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn beside(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn neg(&self) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `col[a] -= q · col[b]`.
    fn sub_col(&mut self, a: usize, b: usize, q: i64) {
        for r in 0..self.rows {
            let v = self.get(r, a) - q * self.get(r, b);
            self.set(r, a, v);
        }
    }

    /// Column echelon form `H = self · U` with `U` unimodular. Returns `H`, `U`
    /// and the pivot row of each leading column of `H`.
    pub fn column_echelon(&self) -> (IntMat, IntMat, Vec<usize>) {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.cols);
        let mut pivots = Vec::new();
        let mut next = 0;
        for r in 0..self.rows {
            if next == self.cols {
                break;
            }
            loop {
                let nonzero: Vec<usize> = (next..self.cols).filter(|&c| h.get(r, c) != 0).collect();
                let Some(&best) = nonzero.iter().min_by_key(|&&c| h.get(r, c).abs()) else {
                    break;
                };
                h.swap_cols(next, best);
                u.swap_cols(next, best);
                let p = h.get(r, next);
                let mut done = true;
                for c in next + 1..self.cols {
                    let q = h.get(r, c).div_euclid(p);
                    if q != 0 {
                        h.sub_col(c, next, q);
                        u.sub_col(c, next, q);
                    }
                    done &= h.get(r, c) == 0;
                }
                if done {
                    pivots.push(r);
                    next += 1;
                    break;
                }
            }
        }
        (h, u, pivots)
    }

    /// A ℤ-basis of `{x : self · x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<i64>> {
        let (_, u, pivots) = self.column_echelon();
        (pivots.len()..self.cols).map(|c| u.column(c)).collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_empty()
    }

    /// An integer solution of `self · x = b`, if one exists.
    pub fn solve(&self, b: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(b.len(), self.rows);
        let (h, u, pivots) = self.column_echelon();
        let mut residual = b.to_vec();
        let mut y = vec![0i64; self.cols];
        for (c, &r) in pivots.iter().enumerate() {
            let p = h.get(r, c);
            if residual[r] % p != 0 {
                return None;
            }
            y[c] = residual[r] / p;
            for (k, res) in residual.iter_mut().enumerate() {
                *res -= y[c] * h.get(k, c);
            }
        }
        if residual.iter().any(|&v| v != 0) {
            return None;
        }
        Some(u.apply(&y))
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_a_difference_map() {
        let m = IntMat::from_rows(2, &[vec![1, -1]]);
        assert_eq!(m.kernel().len(), 1);
        let k = &m.kernel()[0];
        assert_eq!(m.apply(k), vec![0]);
        assert_eq!(k[0].abs(), 1);
    }

    #[test]
    fn solve_respects_divisibility() {
        let m = IntMat::from_rows(1, &[vec![2]]);
        assert_eq!(m.solve(&[4]), Some(vec![2]));
        assert_eq!(m.solve(&[3]), None);
        let m = IntMat::from_rows(2, &[vec![2, 3]]);
        let x = m.solve(&[1]).unwrap();
        assert_eq!(m.apply(&x), vec![1]);
    }

    #[test]
    fn injective_stack_of_projections() {
        let p1 = IntMat::from_rows(2, &[vec![1, 0]]);
        let p2 = IntMat::from_rows(2, &[vec![0, 1]]);
        assert!(!p1.is_injective());
        assert!(p1.stack(&p2).is_injective());
    }
}
