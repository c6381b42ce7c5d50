use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::linalg::{is_zero_vec, Scalar};

/// A possibly inhomogeneous element of a model: one coordinate vector per
/// degree. Zero components are never stored, so two equal forms compare
/// equal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Form {
    parts: BTreeMap<usize, Vec<Scalar>>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn homogeneous(degree: usize, coords: Vec<Scalar>) -> Self {
        let mut f = Form::zero();
        f.set_part(degree, coords);
        f
    }

    pub fn from_parts<I: IntoIterator<Item = (usize, Vec<Scalar>)>>(parts: I) -> Self {
        let mut f = Form::zero();
        for (deg, v) in parts {
            f.add_part(deg, &v);
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, degree: usize) -> Option<&[Scalar]> {
        self.parts.get(&degree).map(Vec::as_slice)
    }

    /// The component of the given degree, padded with zeros to `len`.
    pub fn part_or_zero(&self, degree: usize, len: usize) -> Vec<Scalar> {
        self.parts
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| crate::linalg::zeros(len))
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, &[Scalar])> {
        self.parts.iter().map(|(&d, v)| (d, v.as_slice()))
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.keys().copied()
    }

    /// The single degree of a nonzero homogeneous form.
    pub fn degree(&self) -> Option<usize> {
        if self.parts.len() == 1 {
            self.parts.keys().next().copied()
        } else {
            None
        }
    }

    /// Homogeneous or zero.
    pub fn is_homogeneous(&self) -> bool {
        self.parts.len() <= 1
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.parts.keys().next().copied()
    }

    pub fn set_part(&mut self, degree: usize, coords: Vec<Scalar>) {
        if is_zero_vec(&coords) {
            self.parts.remove(&degree);
        } else {
            self.parts.insert(degree, coords);
        }
    }

    pub fn add_part(&mut self, degree: usize, coords: &[Scalar]) {
        if is_zero_vec(coords) {
            return;
        }
        match self.parts.get_mut(&degree) {
            Some(v) => {
                assert_eq!(v.len(), coords.len(), "component length mismatch");
                for (a, b) in v.iter_mut().zip(coords) {
                    *a += b;
                }
                if is_zero_vec(v) {
                    self.parts.remove(&degree);
                }
            }
            None => {
                self.parts.insert(degree, coords.to_vec());
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        if c.is_zero() {
            return Form::zero();
        }
        Form {
            parts: self
                .parts
                .iter()
                .map(|(&d, v)| (d, v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }

    /// Keeps only the components whose degree satisfies `keep`.
    pub fn filter_degrees(&self, keep: impl Fn(usize) -> bool) -> Form {
        Form {
            parts: self
                .parts
                .iter()
                .filter(|(&d, _)| keep(d))
                .map(|(&d, v)| (d, v.clone()))
                .collect(),
        }
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        let mut out = self.clone();
        for (d, v) in rhs.parts() {
            out.add_part(d, v);
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self + &(-rhs)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            parts: self
                .parts
                .iter()
                .map(|(&d, v)| (d, v.iter().map(|x| -x).collect()))
                .collect(),
        }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}
