//! Exact linear algebra over the rationals.
//!
//! Everything downstream (cohomology, pages, connecting maps) reduces to
//! echelon computations on small dense matrices. Results are canonical:
//! subspaces are stored by their reduced row-echelon basis, so two
//! generating sets of the same subspace compare equal, and particular
//! solutions always set free variables to zero.

mod mat;
mod subspace;

pub use mat::{image, kernel, preimage, rref, solve_particular, Mat};
pub use subspace::{QuotientSpace, SubspaceBasis};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Field of coefficients. Always kept in lowest terms with a positive
/// denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zeros(n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); n]
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`. Returns `None` for anything else.
pub fn parse_scalar(s: &str) -> Option<Scalar> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// `"3"`, `"-1/2"`, ...
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub(crate) fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

pub(crate) fn sign(negative: bool) -> Scalar {
    if negative {
        -one()
    } else {
        one()
    }
}
