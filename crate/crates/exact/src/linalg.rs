//! Dense matrices over Q: echelon form, kernel, image, quotients.

use crate::error::{ExactError, Result};
use crate::ring::{q, q_is_zero, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// Kernel and image of a matrix, both in reduced echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelImage {
    pub kernel: Vec<Vec<Q>>,
    pub image: Vec<Vec<Q>>,
    pub rank: usize,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![vec![q(0); cols]; rows],
            row_labels: (0..rows).map(|i| format!("r{i}")).collect(),
            col_labels: (0..cols).map(|j| format!("c{j}")).collect(),
        }
    }

    pub fn from_rows(data: Vec<Vec<Q>>) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        let mut m = QMatrix::zeros(rows, cols);
        m.data = data;
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Q>], dim: usize) -> Self {
        let mut m = QMatrix::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m.data[i][j] = c[i].clone();
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = q(1);
        }
        m
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Self {
        self.row_labels = rows;
        self.col_labels = cols;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i][j] = v;
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    pub fn mul(&self, o: &QMatrix) -> Result<QMatrix> {
        if self.cols != o.rows {
            return Err(ExactError::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut r = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if q_is_zero(&self.data[i][k]) {
                    continue;
                }
                for j in 0..o.cols {
                    if !q_is_zero(&o.data[k][j]) {
                        r.data[i][j] += &self.data[i][k] * &o.data[k][j];
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.data
            .iter()
            .map(|row| {
                let mut acc = q(0);
                for (a, b) in row.iter().zip(v) {
                    if !q_is_zero(a) && !q_is_zero(b) {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(q_is_zero))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.data.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !q_is_zero(&m[r][col])) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].recip();
            for x in m[row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..self.rows {
                if r != row && !q_is_zero(&m[r][col]) {
                    let f = m[r][col].clone();
                    for j in 0..self.cols {
                        if !q_is_zero(&m[row][j]) {
                            let t = &m[row][j] * &f;
                            m[r][j] -= t;
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let mut out = self.clone();
        out.data = m;
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn kernel_image(&self) -> KernelImage {
        let (r, pivots) = self.rref();
        let mut kernel = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![q(0); self.cols];
            v[free] = q(1);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.data[i][free].clone();
            }
            kernel.push(v);
        }
        let (rt, pt) = self.transpose().rref();
        let image = rt.data[..pt.len()].to_vec();
        KernelImage { kernel, image, rank: pivots.len() }
    }

    /// Solve `M x = b`; `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let mut aug = self.clone();
        for (i, row) in aug.data.iter_mut().enumerate() {
            row.push(b[i].clone());
        }
        aug.cols += 1;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![q(0); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.data[i][self.cols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        crate::ring::mat_inv(&self.data).map(QMatrix::from_rows)
    }
}

/// `ambient / span(subspace)` with canonical coset representatives.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub labels: Vec<String>,
    /// Reduced echelon basis of the subspace (rows).
    pub basis: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
}

impl QuotientSpace {
    /// `subspace` holds spanning vectors as columns.
    pub fn build(labels: Vec<String>, subspace: &QMatrix) -> Result<Self> {
        if subspace.cols > 0 && subspace.rows != labels.len() {
            return Err(ExactError::Shape(format!(
                "subspace vectors have length {} but ambient has dimension {}",
                subspace.rows,
                labels.len()
            )));
        }
        let (r, pivots) = subspace.transpose().rref();
        let basis = r.data[..pivots.len()].to_vec();
        Ok(QuotientSpace { labels, basis, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.basis.len()
    }

    /// Canonical representative: pivot coordinates cleared.
    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if q_is_zero(&out[p]) {
                continue;
            }
            let f = out[p].clone();
            for (o, b) in out.iter_mut().zip(row) {
                if !q_is_zero(b) {
                    *o -= &f * b;
                }
            }
        }
        out
    }

    pub fn equal(&self, a: &[Q], b: &[Q]) -> bool {
        self.project(a) == self.project(b)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.project(v).iter().all(q_is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn small_kernels() {
        let z = QMatrix::zeros(2, 2).kernel_image();
        assert_eq!((z.rank, z.kernel.len()), (0, 2));
        let i = QMatrix::identity(3).kernel_image();
        assert_eq!((i.rank, i.kernel.len()), (3, 0));
        let k = m(&[&[1, 2], &[2, 4]]).kernel_image();
        assert_eq!(k.rank, 1);
        assert_eq!(k.kernel, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn quotient_kills_first_two() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let sub = QMatrix::from_cols(&[vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]], 3);
        let qs = QuotientSpace::build(labels.clone(), &sub).unwrap();
        assert_eq!(qs.dim(), 1);
        assert_eq!(qs.project(&[q(5), q(-3), q(7)]), vec![q(0), q(0), q(7)]);
        let full = QuotientSpace::build(labels.clone(), &QMatrix::identity(3)).unwrap();
        assert_eq!(full.dim(), 0);
        let none = QuotientSpace::build(labels, &QMatrix::zeros(3, 0)).unwrap();
        assert_eq!(none.dim(), 3);
    }

    #[test]
    fn quotient_shape_error() {
        let labels = vec!["a".to_string()];
        assert!(QuotientSpace::build(labels, &QMatrix::identity(2)).is_err());
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.solve(&[q(1), q(2)]), Some(vec![q(1), q(0)]));
        assert_eq!(a.solve(&[q(1), q(3)]), None);
    }
}
