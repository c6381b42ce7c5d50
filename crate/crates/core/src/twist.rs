//! The twisted differential `D = d + H∧` and twisted cohomology.

use std::collections::{BTreeMap, HashMap};

use crate::cdga::{CdgaModel, Form};
use crate::error::{Error, Result};
use crate::linalg::{self, axpy, is_zero_vec, zeros, Mat, QuotientSpace, Scalar};

/// `H = Σ H_{2i+1}`, one closed component per odd degree ≥ 3.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistForm {
    components: BTreeMap<usize, Vec<Scalar>>,
}

impl TwistForm {
    pub fn zero() -> Self {
        TwistForm::default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, degree: usize) -> Option<&[Scalar]> {
        self.components.get(&degree).map(Vec::as_slice)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &[Scalar])> {
        self.components.iter().map(|(&d, v)| (d, v.as_slice()))
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.components.keys().copied().collect()
    }

    /// `Some(s)` when `H` is exactly one nonzero component `H_{2s+1}`.
    pub fn single_component(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [d] => Some((d - 1) / 2),
            _ => None,
        }
    }

    pub fn as_form(&self) -> Form {
        Form::from_parts(self.components.iter().map(|(&d, v)| (d, v.clone())))
    }

    /// `H_{2i+1}` as a form, zero when the component is absent.
    pub fn part_form(&self, degree: usize) -> Form {
        self.component(degree)
            .map(|v| Form::homogeneous(degree, v.to_vec()))
            .unwrap_or_default()
    }

    pub fn describe(&self, model: &CdgaModel) -> String {
        model.format_form(&self.as_form())
    }
}

/// Validates twist components: each homogeneous, odd degree ≥ 3, closed.
/// Several parts of the same degree are summed.
pub fn make_twist(model: &CdgaModel, parts: &[Form]) -> Result<TwistForm> {
    let mut sum = Form::zero();
    for part in parts {
        model.check_form(part)?;
        if !part.is_homogeneous() {
            return Err(Error::Twist("each twist part must be homogeneous".into()));
        }
        sum = &sum + part;
    }
    from_form(model, &sum)
}

/// Splits a form into its homogeneous components and validates them as a twist.
pub fn from_form(model: &CdgaModel, h: &Form) -> Result<TwistForm> {
    model.check_form(h)?;
    let mut components = BTreeMap::new();
    for (deg, v) in h.parts() {
        if deg % 2 == 0 {
            return Err(Error::Twist(format!("component of even degree {deg}")));
        }
        if deg == 1 {
            return Err(Error::Twist("degree-1 components are not allowed".into()));
        }
        let f = Form::homogeneous(deg, v.to_vec());
        if !model.is_closed(&f)? {
            return Err(Error::Twist(format!("component of degree {deg} is not closed")));
        }
        components.insert(deg, v.to_vec());
    }
    Ok(TwistForm { components })
}

/// Parses a twist expression such as `"e1^e2^e3 + 1/2*x5"`.
pub fn parse_twist(model: &CdgaModel, expr: &str) -> Result<TwistForm> {
    from_form(model, &model.parse_form(expr)?)
}

/// Block matrices of `D` between homogeneous pieces: `d` from `p` to `p+1`
/// and `H_{2i+1}∧` from `p` to `p+2i+1`.
#[derive(Clone, Debug)]
pub struct TwistedDifferential {
    model: CdgaModel,
    twist: TwistForm,
    blocks: HashMap<(usize, usize), Mat>,
}

impl TwistedDifferential {
    pub fn new(model: &CdgaModel, twist: &TwistForm) -> Self {
        let n = model.top_degree();
        let mut blocks = HashMap::new();
        for p in 0..n {
            let m = model.diff_matrix(p);
            if !m.is_zero() {
                blocks.insert((p, p + 1), m.clone());
            }
        }
        for (deg, h) in twist.components() {
            for p in (0..=n).take_while(|p| p + deg <= n) {
                let m = model.left_mult_matrix(deg, h, p);
                if !m.is_zero() {
                    blocks.insert((p, p + deg), m);
                }
            }
        }
        TwistedDifferential {
            model: model.clone(),
            twist: twist.clone(),
            blocks,
        }
    }

    pub fn model(&self) -> &CdgaModel {
        &self.model
    }

    pub fn twist(&self) -> &TwistForm {
        &self.twist
    }

    /// The `src → dst` block of `D`, `None` when it vanishes.
    pub fn block(&self, src: usize, dst: usize) -> Option<&Mat> {
        self.blocks.get(&(src, dst))
    }

    /// `D` restricted to the listed source degrees and projected onto the
    /// listed target degrees, in concatenated coordinates.
    pub fn matrix(&self, src: &[usize], dst: &[usize]) -> Mat {
        let rows: usize = dst.iter().map(|&d| self.model.dim(d)).sum();
        let cols: usize = src.iter().map(|&d| self.model.dim(d)).sum();
        let mut m = Mat::zeros(rows, cols);
        let mut r0 = 0;
        for &t in dst {
            let mut c0 = 0;
            for &s in src {
                if let Some(b) = self.block(s, t) {
                    m.set_block(r0, c0, b);
                }
                c0 += self.model.dim(s);
            }
            r0 += self.model.dim(t);
        }
        m
    }

    /// Degree-`target` component of `D` applied to `(degree, coords)` pieces.
    pub fn component(&self, pieces: &[(usize, &[Scalar])], target: usize) -> Vec<Scalar> {
        let mut out = zeros(self.model.dim(target));
        for &(deg, v) in pieces {
            if deg >= target {
                continue;
            }
            if let Some(b) = self.block(deg, target) {
                axpy(&mut out, &linalg::one(), &b.apply(v));
            }
        }
        out
    }

    pub fn apply(&self, x: &Form) -> Result<Form> {
        self.model.check_form(x)?;
        let mut out = Form::zero();
        for (deg, v) in x.parts() {
            for t in deg + 1..=self.model.top_degree() {
                if let Some(b) = self.block(deg, t) {
                    out.add_part(t, &b.apply(v));
                }
            }
        }
        Ok(out)
    }
}

/// `Dx = dx + H∧x`.
pub fn apply_d(model: &CdgaModel, twist: &TwistForm, x: &Form) -> Result<Form> {
    let dx = model.d(x)?;
    let hx = model.wedge(&twist.as_form(), x)?;
    Ok(&dx + &hx)
}

/// `Ω = Ω^e ⊕ Ω^o` with the two halves of `D`.
#[derive(Clone, Debug)]
pub struct ParityComplex {
    pub even_degrees: Vec<usize>,
    pub odd_degrees: Vec<usize>,
    pub even_to_odd: Mat,
    pub odd_to_even: Mat,
}

impl ParityComplex {
    pub fn new(op: &TwistedDifferential) -> Result<Self> {
        let n = op.model().top_degree();
        let even_degrees: Vec<usize> = (0..=n).filter(|p| p % 2 == 0).collect();
        let odd_degrees: Vec<usize> = (0..=n).filter(|p| p % 2 == 1).collect();
        let even_to_odd = op.matrix(&even_degrees, &odd_degrees);
        let odd_to_even = op.matrix(&odd_degrees, &even_degrees);
        let complex = ParityComplex {
            even_degrees,
            odd_degrees,
            even_to_odd,
            odd_to_even,
        };
        complex.check_square()?;
        Ok(complex)
    }

    fn check_square(&self) -> Result<()> {
        let a = self.odd_to_even.mul(&self.even_to_odd);
        let b = self.even_to_odd.mul(&self.odd_to_even);
        if !a.is_zero() || !b.is_zero() {
            return Err(Error::Algebra {
                axiom: "D∘D ≠ 0".into(),
                witness: "twisted differential".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TwistedCohomology {
    pub even: QuotientSpace,
    pub odd: QuotientSpace,
}

impl TwistedCohomology {
    pub fn dims(&self) -> (usize, usize) {
        (self.even.dim(), self.odd.dim())
    }
}

pub fn twisted_cohomology(model: &CdgaModel, twist: &TwistForm) -> Result<TwistedCohomology> {
    let complex = ParityComplex::new(&TwistedDifferential::new(model, twist))?;
    let even = QuotientSpace::new(
        linalg::kernel(&complex.even_to_odd),
        linalg::image(&complex.odd_to_even),
    )?;
    let odd = QuotientSpace::new(
        linalg::kernel(&complex.odd_to_even),
        linalg::image(&complex.even_to_odd),
    )?;
    Ok(TwistedCohomology { even, odd })
}

/// Whether `Dx = 0`.
pub fn is_twisted_closed(model: &CdgaModel, twist: &TwistForm, x: &Form) -> Result<bool> {
    Ok(apply_d(model, twist, x)?.parts().all(|(_, v)| is_zero_vec(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::bundled_model;

    #[test]
    fn torus_top_form_twist() {
        let m = bundled_model("torus3").unwrap();
        let h = parse_twist(&m, "e1^e2^e3").unwrap();
        let one = m.unit();
        assert_eq!(apply_d(&m, &h, &one).unwrap(), m.parse_form("e1^e2^e3").unwrap());
        let tc = twisted_cohomology(&m, &h).unwrap();
        assert_eq!(tc.dims(), (3, 3));
    }

    #[test]
    fn su3_twist_kills_everything() {
        let m = bundled_model("su3").unwrap();
        assert_eq!(m.dims(), vec![1, 0, 0, 1, 0, 1, 0, 0, 1]);
        let h = parse_twist(&m, "x3").unwrap();
        let x5 = m.parse_form("x5").unwrap();
        assert_eq!(apply_d(&m, &h, &x5).unwrap(), m.parse_form("x3^x5").unwrap());
        assert_eq!(twisted_cohomology(&m, &h).unwrap().dims(), (0, 0));
    }

    #[test]
    fn zero_twist_is_de_rham_by_parity() {
        for name in crate::library::BUNDLED_MODELS {
            let m = bundled_model(name).unwrap();
            let dr = m.de_rham_dims();
            let even: usize = dr.iter().step_by(2).sum();
            let odd: usize = dr.iter().skip(1).step_by(2).sum();
            let tc = twisted_cohomology(&m, &TwistForm::zero()).unwrap();
            assert_eq!(tc.dims(), (even, odd), "{name}");
            let x = m.basis_form(m.top_degree(), 0);
            assert_eq!(apply_d(&m, &TwistForm::zero(), &x).unwrap(), m.d(&x).unwrap());
        }
    }

    #[test]
    fn rejected_twists() {
        let m = bundled_model("heisenberg").unwrap();
        assert!(matches!(parse_twist(&m, "a"), Err(Error::Twist(_))));
        assert!(matches!(parse_twist(&m, "a^b"), Err(Error::Twist(_))));
        let m = bundled_model("massey_s1").unwrap();
        assert!(matches!(parse_twist(&m, "v"), Err(Error::Twist(_))));
        assert!(parse_twist(&m, "").unwrap().is_zero());
        assert!(make_twist(&m, &[]).unwrap().is_zero());
    }

    #[test]
    fn operator_matches_direct_formula() {
        let m = bundled_model("mixed").unwrap();
        let h = parse_twist(&m, "a + b").unwrap();
        let op = TwistedDifferential::new(&m, &h);
        for p in 0..=m.top_degree() {
            for i in 0..m.dim(p) {
                let x = m.basis_form(p, i);
                assert_eq!(op.apply(&x).unwrap(), apply_d(&m, &h, &x).unwrap());
            }
        }
        assert_eq!(h.single_component(), None);
        assert_eq!(parse_twist(&m, "b").unwrap().single_component(), Some(2));
    }
}
