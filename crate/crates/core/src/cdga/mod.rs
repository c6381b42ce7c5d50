//! Finite CDGA models: graded basis, multiplication table, differential.
//!
//! A model is immutable once built; every constructor validates the CDGA
//! axioms eagerly.

mod file;
mod form;

pub use file::{GeneratorSpec, ModelDocument};
pub use form::Form;

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::parse_terms;
use crate::linalg::{self, axpy, format_scalar, is_zero_vec, kernel, sign, zeros, Mat, QuotientSpace, Scalar};

#[derive(Clone, Debug)]
pub struct CdgaModel {
    name: String,
    top_degree: usize,
    labels: Vec<Vec<String>>,
    offsets: Vec<usize>,
    index: HashMap<String, (usize, usize)>,
    /// `mult[i][j][a * dim(j) + b]` is `e_a ∧ e_b` for `e_a ∈ Ω^i`,
    /// `e_b ∈ Ω^j`; empty when `i + j` exceeds the top degree.
    mult: Vec<Vec<Vec<Vec<Scalar>>>>,
    /// `diff[p]`: `Ω^p → Ω^{p+1}`, shape `dim(p+1) × dim(p)`.
    diff: Vec<Mat>,
}

/// Products of basis elements, keyed by `((deg, idx), (deg, idx))`.
pub(crate) type ProductTable = HashMap<((usize, usize), (usize, usize)), Vec<Scalar>>;

impl CdgaModel {
    /// Builds and validates a model. `products` must list every nonzero
    /// product of basis elements (both orders); the first element of degree
    /// 0 is the unit.
    pub(crate) fn from_tables(
        name: String,
        top_degree: usize,
        labels: Vec<Vec<String>>,
        products: &ProductTable,
        diff: Vec<Mat>,
    ) -> Result<Self> {
        let model = Self::assemble(name, top_degree, labels, products, diff)?;
        model.validate()?;
        Ok(model)
    }

    fn assemble(
        name: String,
        top_degree: usize,
        mut labels: Vec<Vec<String>>,
        products: &ProductTable,
        diff: Vec<Mat>,
    ) -> Result<Self> {
        if labels.len() > top_degree + 1 {
            return Err(Error::Schema(format!(
                "basis lists degrees up to {} but top_degree is {top_degree}",
                labels.len() - 1
            )));
        }
        labels.resize(top_degree + 1, Vec::new());
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        for d in &dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);

        let mut index = HashMap::new();
        for (deg, ls) in labels.iter().enumerate() {
            for (i, l) in ls.iter().enumerate() {
                if index.insert(l.clone(), (deg, i)).is_some() {
                    return Err(Error::Schema(format!("duplicate basis label `{l}`")));
                }
            }
        }

        let n = top_degree;
        let mut mult = vec![vec![Vec::new(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                mult[i][j] = vec![zeros(dims[i + j]); dims[i] * dims[j]];
            }
        }
        for (&((i, a), (j, b)), v) in products {
            if i + j > n {
                if !is_zero_vec(v) {
                    return Err(Error::Schema(format!(
                        "product {} ∧ {} lands above the top degree",
                        labels[i][a], labels[j][b]
                    )));
                }
                continue;
            }
            if v.len() != dims[i + j] {
                return Err(Error::Dimension(format!(
                    "product {} ∧ {} has {} coordinates, expected {}",
                    labels[i][a],
                    labels[j][b],
                    v.len(),
                    dims[i + j]
                )));
            }
            mult[i][j][a * dims[j] + b] = v.clone();
        }

        if diff.len() != n + 1 {
            return Err(Error::Dimension("one differential matrix per degree expected".into()));
        }
        for (p, m) in diff.iter().enumerate() {
            let target = if p < n { dims[p + 1] } else { 0 };
            if m.rows() != target || m.cols() != dims[p] {
                return Err(Error::Dimension(format!("differential in degree {p} has wrong shape")));
            }
        }

        Ok(CdgaModel {
            name,
            top_degree,
            labels,
            offsets,
            index,
            mult,
            diff,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.labels.get(degree).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.offsets[self.top_degree + 1]
    }

    pub fn labels(&self, degree: usize) -> &[String] {
        self.labels.get(degree).map_or(&[], Vec::as_slice)
    }

    /// Offset of degree `p` in the concatenated coordinates of all degrees.
    pub fn offset(&self, degree: usize) -> usize {
        self.offsets[degree.min(self.top_degree + 1)]
    }

    pub fn lookup(&self, label: &str) -> Option<(usize, usize)> {
        self.index.get(label).copied()
    }

    pub fn basis_vector(&self, degree: usize, i: usize) -> Vec<Scalar> {
        let mut v = zeros(self.dim(degree));
        v[i] = Scalar::one();
        v
    }

    pub fn basis_form(&self, degree: usize, i: usize) -> Form {
        Form::homogeneous(degree, self.basis_vector(degree, i))
    }

    pub fn unit(&self) -> Form {
        self.basis_form(0, 0)
    }

    /// `d: Ω^p → Ω^{p+1}`.
    pub fn diff_matrix(&self, degree: usize) -> &Mat {
        &self.diff[degree]
    }

    /// Product of homogeneous coordinate vectors; `None` above the top degree.
    pub fn wedge_vectors(&self, i: usize, u: &[Scalar], j: usize, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if i + j > self.top_degree {
            return None;
        }
        let table = &self.mult[i][j];
        let dj = self.dim(j);
        let mut out = zeros(self.dim(i + j));
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                axpy(&mut out, &(ua * vb), &table[a * dj + b]);
            }
        }
        Some(out)
    }

    /// Matrix of `x ↦ u ∧ x` from `Ω^p` to `Ω^{p+deg u}`.
    pub fn left_mult_matrix(&self, u_degree: usize, u: &[Scalar], p: usize) -> Mat {
        let target = u_degree + p;
        if target > self.top_degree {
            return Mat::zeros(0, self.dim(p));
        }
        let columns: Vec<Vec<Scalar>> = (0..self.dim(p))
            .map(|b| {
                self.wedge_vectors(u_degree, u, p, &self.basis_vector(p, b))
                    .expect("degree checked above")
            })
            .collect();
        Mat::from_columns(self.dim(target), &columns)
    }

    pub fn check_form(&self, f: &Form) -> Result<()> {
        for (deg, v) in f.parts() {
            if deg > self.top_degree || v.len() != self.dim(deg) {
                return Err(Error::Dimension(format!(
                    "form component in degree {deg} has {} coordinates, model has {}",
                    v.len(),
                    self.dim(deg)
                )));
            }
        }
        Ok(())
    }

    pub fn wedge(&self, u: &Form, v: &Form) -> Result<Form> {
        self.check_form(u)?;
        self.check_form(v)?;
        let mut out = Form::zero();
        for (i, a) in u.parts() {
            for (j, b) in v.parts() {
                if let Some(w) = self.wedge_vectors(i, a, j, b) {
                    out.add_part(i + j, &w);
                }
            }
        }
        Ok(out)
    }

    pub fn d(&self, u: &Form) -> Result<Form> {
        self.check_form(u)?;
        let mut out = Form::zero();
        for (p, a) in u.parts() {
            if p < self.top_degree {
                out.add_part(p + 1, &self.diff[p].apply(a));
            }
        }
        Ok(out)
    }

    pub fn is_closed(&self, u: &Form) -> Result<bool> {
        Ok(self.d(u)?.is_zero())
    }

    /// Closed forms of degree `p`.
    pub fn cocycles(&self, p: usize) -> linalg::SubspaceBasis {
        kernel(&self.diff[p])
    }

    /// Exact forms of degree `p`.
    pub fn coboundaries(&self, p: usize) -> linalg::SubspaceBasis {
        if p == 0 || p > self.top_degree {
            return linalg::SubspaceBasis::zero(self.dim(p));
        }
        linalg::image(&self.diff[p - 1])
    }

    /// `H^p = ker d_p / im d_{p-1}` with canonical representatives.
    pub fn de_rham(&self, p: usize) -> Result<QuotientSpace> {
        if p > self.top_degree {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: format!("{p} > top degree {}", self.top_degree),
            });
        }
        QuotientSpace::new(self.cocycles(p), self.coboundaries(p))
    }

    pub fn de_rham_dims(&self) -> Vec<usize> {
        (0..=self.top_degree)
            .map(|p| self.de_rham(p).expect("degree in range").dim())
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims()
            .iter()
            .enumerate()
            .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Parses a linear combination of wedge words in basis labels, e.g.
    /// `"1/2*e1^e2^e3 + e1^e4^e5"`. A bare number is a multiple of the unit.
    pub fn parse_form(&self, expr: &str) -> Result<Form> {
        let mut out = Form::zero();
        for term in parse_terms(expr)? {
            let value = if term.body.is_empty() {
                self.unit()
            } else if let Some((deg, i)) = self.lookup(&term.body) {
                self.basis_form(deg, i)
            } else {
                self.wedge_word(expr, &term.factors)?
            };
            out = &out + &value.scale(&term.coeff);
        }
        Ok(out)
    }

    /// Product of factors, each matched greedily against the longest basis
    /// label formed by rejoining consecutive factors with `^`.
    fn wedge_word(&self, expr: &str, factors: &[String]) -> Result<Form> {
        let mut acc = self.unit();
        let mut i = 0;
        while i < factors.len() {
            let mut matched = None;
            for j in (i + 1..=factors.len()).rev() {
                let candidate = factors[i..j].join("^");
                if let Some(hit) = self.lookup(&candidate) {
                    matched = Some((j, hit));
                    break;
                }
            }
            let Some((next, (deg, idx))) = matched else {
                return Err(Error::Expr {
                    expr: expr.to_string(),
                    reason: format!("unknown basis label `{}`", factors[i]),
                });
            };
            acc = self.wedge(&acc, &self.basis_form(deg, idx))?;
            i = next;
        }
        Ok(acc)
    }

    /// Human-readable linear combination of basis labels.
    pub fn format_form(&self, f: &Form) -> String {
        let mut terms = Vec::new();
        for (deg, v) in f.parts() {
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let label = &self.labels[deg][i];
                let term = if c.is_one() {
                    label.clone()
                } else if *c == -Scalar::one() {
                    format!("-{label}")
                } else {
                    format!("{}*{label}", format_scalar(c))
                };
                terms.push(term);
            }
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => {
                    s.push_str(" - ");
                    s.push_str(rest);
                }
                None => {
                    s.push_str(" + ");
                    s.push_str(t);
                }
            }
        }
        s
    }

    fn witness(&self, items: &[(usize, usize)]) -> String {
        items
            .iter()
            .map(|&(d, i)| self.labels[d][i].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Checks d∘d = 0, graded commutativity, Leibniz, associativity and the
    /// unit, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let n = self.top_degree;
        let fail = |axiom: &str, witness: String| Error::Algebra {
            axiom: axiom.to_string(),
            witness,
        };

        if self.dim(0) == 0 {
            return Err(fail("degree 0 must contain a unit", "none".into()));
        }
        for p in 0..n {
            let dd = self.diff[p + 1].mul(&self.diff[p]);
            if let Some(j) = (0..dd.cols()).find(|&j| !is_zero_vec(&dd.column(j))) {
                return Err(fail("d∘d ≠ 0", self.witness(&[(p, j)])));
            }
        }

        let unit = self.basis_vector(0, 0);
        for p in 0..=n {
            for a in 0..self.dim(p) {
                let e = self.basis_vector(p, a);
                let left = self.wedge_vectors(0, &unit, p, &e).expect("unit has degree 0");
                let right = self.wedge_vectors(p, &e, 0, &unit).expect("unit has degree 0");
                if left != e || right != e {
                    return Err(fail("unit: 1∧x ≠ x", self.witness(&[(0, 0), (p, a)])));
                }
            }
        }

        for i in 0..=n {
            for j in 0..=n - i {
                let s = sign((i * j) % 2 == 1);
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let ab = &self.mult[i][j][a * self.dim(j) + b];
                        let ba = &self.mult[j][i][b * self.dim(i) + a];
                        if ab.iter().zip(ba).any(|(x, y)| *x != &s * y) {
                            return Err(fail(
                                "graded commutativity: a∧b ≠ (−1)^{|a||b|} b∧a",
                                self.witness(&[(i, a), (j, b)]),
                            ));
                        }
                    }
                }
            }
        }

        for i in 0..=n {
            for j in 0..=n - i {
                if i + j == n {
                    continue;
                }
                let s = sign(i % 2 == 1);
                for a in 0..self.dim(i) {
                    let ea = self.basis_vector(i, a);
                    let dea = self.diff[i].apply(&ea);
                    for b in 0..self.dim(j) {
                        let eb = self.basis_vector(j, b);
                        let lhs = self.diff[i + j].apply(&self.mult[i][j][a * self.dim(j) + b]);
                        let mut rhs = self.wedge_vectors(i + 1, &dea, j, &eb).expect("i+j < n");
                        let adb = self
                            .wedge_vectors(i, &ea, j + 1, &self.diff[j].apply(&eb))
                            .expect("i+j < n");
                        axpy(&mut rhs, &s, &adb);
                        if lhs != rhs {
                            return Err(fail(
                                "Leibniz: d(a∧b) ≠ da∧b + (−1)^{|a|} a∧db",
                                self.witness(&[(i, a), (j, b)]),
                            ));
                        }
                    }
                }
            }
        }

        for i in 1..=n {
            for j in 1..=n - i {
                for k in 1..=n - i - j {
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            let ab = &self.mult[i][j][a * self.dim(j) + b];
                            for c in 0..self.dim(k) {
                                let ec = self.basis_vector(k, c);
                                let left = self.wedge_vectors(i + j, ab, k, &ec).expect("in range");
                                let bc = &self.mult[j][k][b * self.dim(k) + c];
                                let right = self
                                    .wedge_vectors(i, &self.basis_vector(i, a), j + k, bc)
                                    .expect("in range");
                                if left != right {
                                    return Err(fail(
                                        "associativity: (a∧b)∧c ≠ a∧(b∧c)",
                                        self.witness(&[(i, a), (j, b), (k, c)]),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;
    use crate::linalg::int;

    fn heisenberg() -> CdgaModel {
        library::bundled_model("heisenberg").unwrap()
    }

    #[test]
    fn torus_dimensions() {
        let t3 = library::bundled_model("torus3").unwrap();
        assert_eq!(t3.dims(), vec![1, 3, 3, 1]);
        assert_eq!(t3.total_dim(), 8);
        assert_eq!(t3.de_rham_dims(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn heisenberg_differential() {
        let m = heisenberg();
        let c = m.parse_form("c").unwrap();
        let ab = m.parse_form("a^b").unwrap();
        assert_eq!(m.d(&c).unwrap(), ab);
        assert!(m.d(&ab).unwrap().is_zero());
        assert_eq!(m.de_rham_dims(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn wedge_unit_and_odd_squares() {
        let m = heisenberg();
        let a = m.parse_form("a").unwrap();
        assert_eq!(m.wedge(&m.unit(), &a).unwrap(), a);
        assert!(m.wedge(&a, &a).unwrap().is_zero());
        let ba = m.parse_form("b^a").unwrap();
        assert_eq!(ba, -m.parse_form("a^b").unwrap());
    }

    #[test]
    fn euler_characteristic_matches_cohomology() {
        for name in library::BUNDLED_MODELS {
            let m = library::bundled_model(name).unwrap();
            let chi: i64 = m
                .de_rham_dims()
                .iter()
                .enumerate()
                .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
                .sum();
            assert_eq!(chi, m.euler_characteristic(), "{name}");
            assert!(m.de_rham(0).unwrap().dim() >= 1, "{name}");
        }
    }

    #[test]
    fn de_rham_representatives_are_closed_and_independent() {
        for name in library::BUNDLED_MODELS {
            let m = library::bundled_model(name).unwrap();
            for p in 0..=m.top_degree() {
                let h = m.de_rham(p).unwrap();
                for rep in h.representatives() {
                    let f = Form::homogeneous(p, rep.clone());
                    assert!(m.is_closed(&f).unwrap());
                    assert!(!h.is_zero_class(rep).unwrap());
                }
            }
        }
    }

    #[test]
    fn products_descend_to_cohomology() {
        for name in ["heisenberg", "torus3", "massey_s1"] {
            let m = library::bundled_model(name).unwrap();
            let n = m.top_degree();
            for p in 0..=n {
                for q in 0..=n - p {
                    let hp = m.de_rham(p).unwrap();
                    let hq = m.de_rham(q).unwrap();
                    for x in hp.representatives() {
                        let xf = Form::homogeneous(p, x.clone());
                        for y in hq.representatives() {
                            let yf = Form::homogeneous(q, y.clone());
                            assert!(m.is_closed(&m.wedge(&xf, &yf).unwrap()).unwrap());
                        }
                        // closed ∧ exact is exact
                        for e in m.coboundaries(q).basis() {
                            let prod = m.wedge(&xf, &Form::homogeneous(q, e.clone())).unwrap();
                            let v = prod.part_or_zero(p + q, m.dim(p + q));
                            assert!(m.coboundaries(p + q).contains(&v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = heisenberg();
        let bad = Form::homogeneous(1, vec![int(1)]);
        assert!(matches!(m.d(&bad), Err(Error::Dimension(_))));
        assert!(m.wedge(&bad, &m.unit()).is_err());
    }

    #[test]
    fn formatting_round_trips() {
        let m = heisenberg();
        let f = m.parse_form("2*a^c - 1/3*b^c + a").unwrap();
        let s = m.format_form(&f);
        assert_eq!(m.parse_form(&s).unwrap(), f);
        assert_eq!(m.format_form(&Form::zero()), "0");
    }
}
