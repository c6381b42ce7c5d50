use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use super::{axpy, zeros, Scalar, SubspaceBasis};

/// Dense row-major rational matrix. Acts on column vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: zeros(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| super::int(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Mat::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = zeros(self.rows);
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() {
                    *o += a * vj;
                }
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(super::format_scalar).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form and pivot columns.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut rows: Vec<Vec<Scalar>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let pivots = rref_rows(&mut rows, m.cols);
    let mut out = Mat::zeros(m.rows, m.cols);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, x) in row.into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    (out, pivots)
}

/// In-place Gauss-Jordan elimination on a list of rows. Zero rows end up at
/// the bottom; returns the pivot column of each nonzero row.
pub(crate) fn rref_rows(rows: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut().skip(c) {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = -row[c].clone();
            axpy(&mut row[c..], &factor, &pivot_row[c..]);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn kernel(m: &Mat) -> SubspaceBasis {
    let (r, pivots) = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..m.cols).filter(|&f| !is_pivot[f]).map(|f| {
        let mut v = zeros(m.cols);
        v[f] = Scalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[(i, f)].clone();
        }
        v
    });
    SubspaceBasis::from_spanning(m.cols, vectors)
}

/// Column space of `m`, as a subspace of the codomain.
pub fn image(m: &Mat) -> SubspaceBasis {
    SubspaceBasis::from_spanning(m.rows, (0..m.cols).map(|j| m.column(j)))
}

/// A solution of `m x = b` with every free variable set to zero, or `None`
/// when `b` is outside the image.
pub fn solve_particular(m: &Mat, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows, "right-hand side length mismatch");
    let mut rows: Vec<Vec<Scalar>> = (0..m.rows)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref_rows(&mut rows, m.cols + 1);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = zeros(m.cols);
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = rows[i][m.cols].clone();
    }
    Some(x)
}

/// `{ v : m v ∈ w }`.
pub fn preimage(m: &Mat, w: &SubspaceBasis) -> SubspaceBasis {
    assert_eq!(w.ambient_dim(), m.rows, "subspace lives in the wrong space");
    // Functionals cutting out w; v is in the preimage iff they all kill m v.
    let annihilator = kernel(&w.as_row_matrix());
    if annihilator.dim() == 0 {
        return SubspaceBasis::full(m.cols);
    }
    kernel(&annihilator.as_row_matrix().mul(m))
}

#[cfg(test)]
mod tests {
    use super::super::{int, ratio};
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = Mat::identity(3);
        let (r, p) = rref(&id);
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn rref_rank_one() {
        let m = Mat::from_i64(&[&[2, 4], &[1, 2]]);
        let (r, p) = rref(&m);
        assert_eq!(r, Mat::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_zero() {
        let z = Mat::zeros(2, 3);
        let (r, p) = rref(&z);
        assert_eq!(r, z);
        assert!(p.is_empty());
    }

    #[test]
    fn rref_with_fractions() {
        let m = Mat::from_i64(&[&[2, 1], &[4, 3]]);
        let (r, p) = rref(&m);
        assert_eq!(r, Mat::identity(2));
        assert_eq!(p, vec![0, 1]);
        let m = Mat::from_i64(&[&[3, 1, 2]]);
        let (r, _) = rref(&m);
        assert_eq!(r.row(0), &[int(1), ratio(1, 3), ratio(2, 3)]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Mat::identity(3)).dim(), 0);
        let k = kernel(&Mat::from_i64(&[&[1, 1]]));
        assert_eq!(k.basis(), &[v(&[1, -1])]);
    }

    #[test]
    fn image_of_zero_is_zero() {
        assert_eq!(image(&Mat::zeros(3, 2)).dim(), 0);
        assert_eq!(image(&Mat::zeros(3, 2)).ambient_dim(), 3);
    }

    #[test]
    fn particular_solutions() {
        let b = v(&[5, -2, 7]);
        assert_eq!(solve_particular(&Mat::identity(3), &b), Some(b.clone()));
        let m = Mat::from_i64(&[&[1, 1]]);
        assert_eq!(solve_particular(&m, &v(&[3])), Some(v(&[3, 0])));
        let m = Mat::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(solve_particular(&m, &v(&[1, 2])), None);
        let m = Mat::from_i64(&[&[0, 2]]);
        assert_eq!(solve_particular(&m, &v(&[1])), Some(vec![int(0), ratio(1, 2)]));
    }

    #[test]
    fn preimage_examples() {
        let m = Mat::from_i64(&[&[1, 2, 0], &[0, 1, 1]]);
        assert_eq!(preimage(&m, &SubspaceBasis::full(2)), SubspaceBasis::full(3));
        let w = SubspaceBasis::from_spanning(3, [v(&[1, 1, 0])]);
        assert_eq!(preimage(&Mat::identity(3), &w), w);
        let m = Mat::from_i64(&[&[1, 0], &[0, 0]]);
        let p = preimage(&m, &SubspaceBasis::zero(2));
        assert_eq!(p.basis(), &[v(&[0, 1])]);
    }

    #[test]
    fn matrix_product_and_apply() {
        let a = Mat::from_i64(&[&[1, 2], &[3, 4]]);
        let b = Mat::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), Mat::from_i64(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.apply(&v(&[1, 1])), v(&[3, 7]));
        assert_eq!(a.transpose(), Mat::from_i64(&[&[1, 3], &[2, 4]]));
    }
}
