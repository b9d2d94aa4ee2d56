//! Exact linear algebra over `Q`: row reduction, kernels, ranks and
//! quotient bases for the finite-stage homological checks.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat::{format_rat, parse_rat, Rat};

/// Dense row-major matrix over `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        for row in &rows {
            if row.len() != c {
                return Err(Error::Validation("ragged matrix rows".into()));
            }
        }
        Ok(QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat, Error> {
        if self.cols != other.rows {
            return Err(Error::Validation(format!(
                "matrix shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QMat) -> Result<QMat, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Validation("matrix shape mismatch in subtraction".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>, Error> {
        if v.len() != self.cols {
            return Err(Error::Validation("vector length mismatch".into()));
        }
        let mut out = vec![Rat::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    out[i] += &self[(i, j)] * &v[j];
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].clone().recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let delta = &f * &m[(r, j)];
                        m[(i, j)] -= delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (rr, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (prow, &pc) in pivots.iter().enumerate() {
                v[pc] = -rr[(prow, f)].clone();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[Vec<Rat>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    QMat::from_rows(vectors.to_vec()).expect("rectangular").rank()
}

/// Exact equality of spans as subspaces of `Q^n`.
pub fn subspace_equal(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
    let ra = span_rank(a);
    let rb = span_rank(b);
    if ra != rb {
        return false;
    }
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    span_rank(&all) == ra
}

/// Serde form: `{"rows": m, "cols": n, "entries": ["num/den", ...]}` in
/// row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QMatJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl QMat {
    pub fn to_json(&self) -> QMatJson {
        QMatJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.data.iter().map(format_rat).collect(),
        }
    }

    pub fn from_json(j: &QMatJson) -> Result<QMat, Error> {
        if j.entries.len() != j.rows * j.cols {
            return Err(Error::Validation(format!(
                "expected {} entries, got {}",
                j.rows * j.cols,
                j.entries.len()
            )));
        }
        let data = j.entries.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(QMat { rows: j.rows, cols: j.cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn rref_and_rank() {
        let m = QMat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let (rr, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rr[(0, 0)], rat(1, 1));
    }

    #[test]
    fn kernel_of_diag() {
        let m = QMat::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 2]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn kernel_vectors_are_actual_kernel_elements() {
        let m = QMat::from_i64(&[&[2, 1, -1, 3], &[1, 0, 2, -1]]);
        for v in m.kernel_basis() {
            assert!(m.apply(&v).unwrap().iter().all(Rat::is_zero));
        }
        assert_eq!(m.rank() + m.kernel_basis().len(), m.cols);
    }

    #[test]
    fn subspace_equality() {
        let a = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        let b = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]];
        assert!(subspace_equal(&a, &b));
        let c = vec![vec![rat(1, 1), rat(1, 1)]];
        assert!(!subspace_equal(&a, &c));
    }

    #[test]
    fn json_round_trip() {
        let m = QMat::from_i64(&[&[1, -2], &[0, 5]]);
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = QMat::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
