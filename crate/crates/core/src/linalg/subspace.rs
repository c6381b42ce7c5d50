use num_traits::{One, Zero};

use super::mat::rref_rows;
use super::{axpy, is_zero_vec, zeros, Mat, Scalar};
use crate::error::{Error, Result};

/// A subspace of `Q^n`, stored as its reduced row-echelon basis.
///
/// Equal subspaces have identical representations, so `==` is subspace
/// equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = zeros(ambient);
                v[i] = Scalar::one();
                v
            })
            .collect();
        SubspaceBasis {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_spanning<I>(ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut rows: Vec<Vec<Scalar>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient, "spanning vector has wrong length"))
            .filter(|v| !is_zero_vec(v))
            .collect();
        let pivots = rref_rows(&mut rows, ambient);
        rows.truncate(pivots.len());
        SubspaceBasis {
            ambient,
            basis: rows,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the rows of a matrix (`dim × ambient`).
    pub fn as_row_matrix(&self) -> Mat {
        if self.basis.is_empty() {
            return Mat::zeros(0, self.ambient);
        }
        Mat::from_rows(self.basis.clone())
    }

    /// Basis vectors as columns (`ambient × dim`).
    pub fn as_column_matrix(&self) -> Mat {
        Mat::from_columns(self.ambient, &self.basis)
    }

    /// `v` minus its component along the pivot columns: the canonical
    /// representative of `v + self`.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient, "vector has wrong length");
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !out[p].is_zero() {
                let factor = -out[p].clone();
                axpy(&mut out, &factor, row);
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Coefficients of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        SubspaceBasis::from_spanning(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn intersection(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        if self.dim() == 0 || other.dim() == 0 {
            return SubspaceBasis::zero(self.ambient);
        }
        let embed = self.as_column_matrix();
        let coeffs = super::preimage(&embed, other);
        SubspaceBasis::from_spanning(self.ambient, coeffs.basis.iter().map(|c| embed.apply(c)))
    }

    /// Image of the subspace under a linear map.
    pub fn map(&self, m: &Mat) -> SubspaceBasis {
        assert_eq!(m.cols(), self.ambient);
        SubspaceBasis::from_spanning(m.rows(), self.basis.iter().map(|v| m.apply(v)))
    }
}

/// `ambient / sub` with canonical coset representatives.
///
/// The representatives are the echelon basis of the reduction of `ambient`
/// modulo `sub`; their pivots avoid the pivots of `sub`, so projecting is
/// a reduction followed by reading off pivot entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSpace {
    ambient: SubspaceBasis,
    sub: SubspaceBasis,
    reps: SubspaceBasis,
}

impl QuotientSpace {
    pub fn new(ambient: SubspaceBasis, sub: SubspaceBasis) -> Result<Self> {
        if !sub.is_subspace_of(&ambient) {
            return Err(Error::Dimension(
                "quotient denominator is not contained in the numerator".into(),
            ));
        }
        let reps = SubspaceBasis::from_spanning(ambient.ambient, ambient.basis.iter().map(|v| sub.reduce(v)));
        Ok(QuotientSpace { ambient, sub, reps })
    }

    /// The zero quotient of a zero-dimensional space.
    pub fn trivial() -> Self {
        QuotientSpace {
            ambient: SubspaceBasis::zero(0),
            sub: SubspaceBasis::zero(0),
            reps: SubspaceBasis::zero(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    pub fn ambient(&self) -> &SubspaceBasis {
        &self.ambient
    }

    pub fn sub(&self) -> &SubspaceBasis {
        &self.sub
    }

    /// Canonical representatives, one per basis class.
    pub fn representatives(&self) -> &[Vec<Scalar>] {
        self.reps.basis()
    }

    pub fn representative(&self, i: usize) -> &[Scalar] {
        &self.reps.basis()[i]
    }

    pub fn vector_len(&self) -> usize {
        self.ambient.ambient
    }

    /// Class coordinates of `v`. Fails if `v` is outside the numerator.
    pub fn project(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.ambient.ambient || !self.ambient.contains(v) {
            return Err(Error::NotInAmbient);
        }
        let r = self.sub.reduce(v);
        let coords = self.reps.pivots().iter().map(|&p| r[p].clone()).collect();
        Ok(coords)
    }

    /// The canonical representative with the given class coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.dim(), "class has wrong length");
        let mut out = zeros(self.ambient.ambient);
        for (c, rep) in coords.iter().zip(self.reps.basis()) {
            axpy(&mut out, c, rep);
        }
        out
    }

    /// Whether `v` represents the zero class.
    pub fn is_zero_class(&self, v: &[Scalar]) -> Result<bool> {
        Ok(is_zero_vec(&self.project(v)?))
    }
}
