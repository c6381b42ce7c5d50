//! JSON model documents.
//!
//! Two forms are accepted: a generator presentation (free graded-commutative
//! algebra on the listed generators, truncated above `top_degree`) and an
//! explicit basis-level table.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{CdgaModel, ProductTable};
use crate::error::{Error, Result};
use crate::expr::parse_terms;
use crate::linalg::{axpy, format_scalar, sign, zeros, Mat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultEntry {
    pub left: String,
    pub right: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffEntry {
    pub from: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub top_degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorSpec>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differentials: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<Vec<MultEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<Vec<DiffEntry>>,
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    pub fn build(&self) -> Result<CdgaModel> {
        match (&self.generators, &self.basis) {
            (Some(gens), None) => {
                if self.mult.is_some() || self.diff.is_some() {
                    return Err(Error::Schema("`mult`/`diff` belong to basis-level documents".into()));
                }
                build_from_generators(&self.name, self.top_degree, gens, &self.differentials)
            }
            (None, Some(basis)) => {
                if !self.differentials.is_empty() {
                    return Err(Error::Schema("`differentials` belongs to generator documents".into()));
                }
                build_from_basis(
                    &self.name,
                    self.top_degree,
                    basis,
                    self.mult.as_deref().unwrap_or_default(),
                    self.diff.as_deref().unwrap_or_default(),
                )
            }
            _ => Err(Error::Schema(
                "exactly one of `generators` or `basis` is required".into(),
            )),
        }
    }
}

impl CdgaModel {
    pub fn load(text: &str) -> Result<CdgaModel> {
        ModelDocument::from_json(text)?.build()
    }

    /// Basis-level document describing this model exactly.
    pub fn to_document(&self) -> ModelDocument {
        let n = self.top_degree();
        let mut mult = Vec::new();
        for i in 1..=n {
            for j in 1..=n - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let v = &self.mult[i][j][a * self.dim(j) + b];
                        if v.iter().all(Zero::is_zero) {
                            continue;
                        }
                        mult.push(MultEntry {
                            left: self.labels(i)[a].clone(),
                            right: self.labels(j)[b].clone(),
                            result: combination(self.labels(i + j), v),
                        });
                    }
                }
            }
        }
        let mut diff = Vec::new();
        for p in 0..n {
            for a in 0..self.dim(p) {
                let v = self.diff_matrix(p).column(a);
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                diff.push(DiffEntry {
                    from: self.labels(p)[a].clone(),
                    result: combination(self.labels(p + 1), &v),
                });
            }
        }
        ModelDocument {
            name: self.name().to_string(),
            top_degree: n,
            generators: None,
            differentials: BTreeMap::new(),
            basis: Some((0..=n).map(|p| self.labels(p).to_vec()).collect()),
            mult: Some(mult),
            diff: Some(diff),
        }
    }
}

fn combination(labels: &[String], v: &[Scalar]) -> String {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{}*{}", format_scalar(c), labels[i]))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn build_from_basis(
    name: &str,
    top_degree: usize,
    basis: &[Vec<String>],
    mult: &[MultEntry],
    diff: &[DiffEntry],
) -> Result<CdgaModel> {
    if basis.first().is_none_or(Vec::is_empty) {
        return Err(Error::Schema("degree 0 must list the unit first".into()));
    }
    let mut index: HashMap<&str, (usize, usize)> = HashMap::new();
    for (deg, ls) in basis.iter().enumerate() {
        for (i, l) in ls.iter().enumerate() {
            if l.trim().is_empty() || l.contains(['+', '-', '*', ' ']) {
                return Err(Error::Schema(format!("invalid basis label `{l}`")));
            }
            if index.insert(l.as_str(), (deg, i)).is_some() {
                return Err(Error::Schema(format!("duplicate basis label `{l}`")));
            }
        }
    }
    let dim = |d: usize| basis.get(d).map_or(0, Vec::len);
    let resolve = |label: &str| {
        index
            .get(label.trim())
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown basis label `{label}`")))
    };
    let combo = |expr: &str, degree: usize| -> Result<Vec<Scalar>> {
        let mut v = zeros(dim(degree));
        for term in parse_terms(expr)? {
            let (d, i) = resolve(&term.body)?;
            if d != degree {
                return Err(Error::Schema(format!(
                    "`{}` has degree {d} but `{expr}` should have degree {degree}",
                    term.body
                )));
            }
            v[i] += term.coeff;
        }
        Ok(v)
    };

    let mut products: ProductTable = HashMap::new();
    for e in mult {
        let l = resolve(&e.left)?;
        let r = resolve(&e.right)?;
        if l.0 + r.0 > top_degree {
            if parse_terms(&e.result)?.is_empty() {
                continue;
            }
            return Err(Error::Schema(format!(
                "{} ∧ {} lands above the top degree",
                e.left, e.right
            )));
        }
        let v = combo(&e.result, l.0 + r.0)?;
        if products.insert((l, r), v).is_some() {
            return Err(Error::Schema(format!("product {} ∧ {} listed twice", e.left, e.right)));
        }
    }
    // Fill the unit row and the mirrored orders that were left implicit.
    for (deg, ls) in basis.iter().enumerate() {
        for i in 0..ls.len() {
            if deg > top_degree {
                break;
            }
            let mut e = zeros(dim(deg));
            e[i] = Scalar::from_integer(1.into());
            products.entry(((0, 0), (deg, i))).or_insert_with(|| e.clone());
            products.entry(((deg, i), (0, 0))).or_insert(e);
        }
    }
    let explicit: Vec<_> = products.iter().map(|(k, v)| (*k, v.clone())).collect();
    for ((l, r), v) in explicit {
        let s = sign((l.0 * r.0) % 2 == 1);
        products
            .entry((r, l))
            .or_insert_with(|| v.iter().map(|x| x * &s).collect());
    }

    let mut diff_cols: Vec<Vec<Vec<Scalar>>> = (0..=top_degree)
        .map(|p| vec![zeros(if p < top_degree { dim(p + 1) } else { 0 }); dim(p)])
        .collect();
    for e in diff {
        let (p, i) = resolve(&e.from)?;
        if p == top_degree {
            if parse_terms(&e.result)?.is_empty() {
                continue;
            }
            return Err(Error::Schema(format!("d({}) lands above the top degree", e.from)));
        }
        diff_cols[p][i] = combo(&e.result, p + 1)?;
    }
    let diff = diff_cols
        .into_iter()
        .enumerate()
        .map(|(p, cols)| {
            let rows = if p < top_degree { dim(p + 1) } else { 0 };
            Mat::from_columns(rows, &cols)
        })
        .collect();

    CdgaModel::from_tables(name.to_string(), top_degree, basis.to_vec(), &products, diff)
}

/// A monomial in the generators: generator indices in ascending order, with
/// repetition for even generators.
type Monomial = Vec<usize>;

fn build_from_generators(
    name: &str,
    top_degree: usize,
    gens: &[GeneratorSpec],
    differentials: &BTreeMap<String, String>,
) -> Result<CdgaModel> {
    let mut gen_index = HashMap::new();
    for (i, g) in gens.iter().enumerate() {
        if g.degree == 0 {
            return Err(Error::Schema(format!("generator `{}` has degree 0", g.name)));
        }
        if g.name == "1" || g.name.is_empty() || !g.name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::Schema(format!("invalid generator name `{}`", g.name)));
        }
        if gen_index.insert(g.name.as_str(), i).is_some() {
            return Err(Error::Schema(format!("duplicate generator `{}`", g.name)));
        }
    }
    for key in differentials.keys() {
        if !gen_index.contains_key(key.as_str()) {
            return Err(Error::Schema(format!(
                "differential given for unknown generator `{key}`"
            )));
        }
    }

    // Enumerate monomials by degree; within a degree, sort lexicographically
    // on the ascending list of generator indices.
    let mut by_degree: Vec<Vec<Monomial>> = vec![Vec::new(); top_degree + 1];
    let mut stack: Vec<(Monomial, usize)> = vec![(Vec::new(), 0)];
    while let Some((mono, deg)) = stack.pop() {
        let start = mono.last().copied();
        for (g, spec) in gens.iter().enumerate() {
            let allowed = match start {
                None => true,
                Some(last) => g > last || (g == last && spec.degree % 2 == 0),
            };
            if allowed && deg + spec.degree <= top_degree {
                let mut next = mono.clone();
                next.push(g);
                stack.push((next, deg + spec.degree));
            }
        }
        by_degree[deg].push(mono);
    }
    for ms in &mut by_degree {
        ms.sort();
    }
    let labels: Vec<Vec<String>> = by_degree
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|m| {
                    if m.is_empty() {
                        "1".to_string()
                    } else {
                        m.iter().map(|&g| gens[g].name.as_str()).collect::<Vec<_>>().join("^")
                    }
                })
                .collect()
        })
        .collect();
    let mut position: HashMap<&Monomial, (usize, usize)> = HashMap::new();
    for (deg, ms) in by_degree.iter().enumerate() {
        for (i, m) in ms.iter().enumerate() {
            position.insert(m, (deg, i));
        }
    }
    let dim = |d: usize| by_degree.get(d).map_or(0, Vec::len);

    // Monomial products with the Koszul sign from reordering odd generators.
    let multiply = |x: &Monomial, y: &Monomial| -> Option<(Scalar, Monomial)> {
        let mut odd_swaps = 0usize;
        for &g in x {
            if gens[g].degree.is_multiple_of(2) {
                continue;
            }
            for &h in y {
                if gens[h].degree % 2 == 1 {
                    if h == g {
                        return None;
                    }
                    if h < g {
                        odd_swaps += 1;
                    }
                }
            }
        }
        let mut merged: Monomial = x.iter().chain(y).copied().collect();
        merged.sort_unstable();
        Some((sign(odd_swaps % 2 == 1), merged))
    };

    let mut products: ProductTable = HashMap::new();
    for (i, xs) in by_degree.iter().enumerate() {
        for (a, x) in xs.iter().enumerate() {
            for (j, ys) in by_degree.iter().enumerate() {
                if i + j > top_degree {
                    break;
                }
                for (b, y) in ys.iter().enumerate() {
                    if let Some((s, m)) = multiply(x, y) {
                        let (deg, idx) = position[&m];
                        let mut v = zeros(dim(deg));
                        v[idx] = s;
                        products.insert(((i, a), (j, b)), v);
                    }
                }
            }
        }
    }
    let wedge = |i: usize, u: &[Scalar], j: usize, v: &[Scalar]| -> Vec<Scalar> {
        let mut out = zeros(dim(i + j));
        if i + j > top_degree {
            return out;
        }
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                if let Some(p) = products.get(&((i, a), (j, b))) {
                    axpy(&mut out, &(ua * vb), p);
                }
            }
        }
        out
    };
    let basis_vec = |deg: usize, idx: usize| {
        let mut v = zeros(dim(deg));
        v[idx] = Scalar::from_integer(1.into());
        v
    };

    // Differentials of generators, parsed as polynomials.
    let mut gen_diff: Vec<Vec<Scalar>> = Vec::with_capacity(gens.len());
    for g in gens {
        let target = g.degree + 1;
        let mut v = zeros(dim(target));
        if let Some(expr) = differentials.get(&g.name) {
            for term in parse_terms(expr)? {
                let mut mono: Monomial = Vec::new();
                let mut deg = 0;
                for f in &term.factors {
                    if f == "1" {
                        continue;
                    }
                    let &gi = gen_index
                        .get(f.as_str())
                        .ok_or_else(|| Error::Schema(format!("unknown generator `{f}` in d({})", g.name)))?;
                    mono.push(gi);
                    deg += gens[gi].degree;
                }
                if deg != target {
                    return Err(Error::Schema(format!(
                        "d({}) must have degree {target}, term `{}` has degree {deg}",
                        g.name, term.body
                    )));
                }
                if target > top_degree {
                    continue;
                }
                // Multiply the factors in the order written.
                let mut acc = basis_vec(0, 0);
                let mut acc_deg = 0;
                for &gi in &mono {
                    let (gd, idx) = position[&vec![gi]];
                    acc = wedge(acc_deg, &acc, gd, &basis_vec(gd, idx));
                    acc_deg += gd;
                }
                axpy(&mut v, &term.coeff, &acc);
            }
        }
        gen_diff.push(v);
    }

    // Leibniz expansion over the ordered factors of each monomial.
    let mut diff_cols: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(top_degree + 1);
    for (p, ms) in by_degree.iter().enumerate() {
        let rows = if p < top_degree { dim(p + 1) } else { 0 };
        let mut cols = Vec::with_capacity(ms.len());
        for m in ms {
            let mut col = zeros(rows);
            if p < top_degree {
                let mut prefix_deg = 0;
                for (k, &g) in m.iter().enumerate() {
                    let mut acc = basis_vec(0, 0);
                    let mut acc_deg = 0;
                    for (l, &h) in m.iter().enumerate() {
                        let (factor, fdeg) = if l == k {
                            (gen_diff[h].clone(), gens[h].degree + 1)
                        } else {
                            let (gd, idx) = position[&vec![h]];
                            (basis_vec(gd, idx), gd)
                        };
                        if acc_deg + fdeg > top_degree {
                            acc = Vec::new();
                            break;
                        }
                        acc = wedge(acc_deg, &acc, fdeg, &factor);
                        acc_deg += fdeg;
                    }
                    if !acc.is_empty() {
                        axpy(&mut col, &sign(prefix_deg % 2 == 1), &acc);
                    }
                    prefix_deg += gens[g].degree;
                }
            }
            cols.push(col);
        }
        diff_cols.push(cols);
    }
    let diff = diff_cols
        .iter()
        .enumerate()
        .map(|(p, cols)| Mat::from_columns(if p < top_degree { dim(p + 1) } else { 0 }, cols))
        .collect();

    CdgaModel::from_tables(name.to_string(), top_degree, labels, &products, diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_document_expands_to_exterior_algebra() {
        let doc = r#"{"name":"t3","top_degree":3,
            "generators":[{"name":"e1","degree":1},{"name":"e2","degree":1},{"name":"e3","degree":1}]}"#;
        let m = CdgaModel::load(doc).unwrap();
        assert_eq!(m.dims(), vec![1, 3, 3, 1]);
        assert_eq!(m.labels(2), &["e1^e2", "e1^e3", "e2^e3"]);
    }

    #[test]
    fn even_generators_are_polynomial_and_truncated() {
        let doc = r#"{"name":"p","top_degree":6,
            "generators":[{"name":"u","degree":2}]}"#;
        let m = CdgaModel::load(doc).unwrap();
        assert_eq!(m.dims(), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(m.labels(6), &["u^u^u"]);
    }

    #[test]
    fn d_squared_violation_is_reported() {
        let doc = r#"{"name":"bad","top_degree":3,
            "basis":[["1"],["a","b"],["ab"],["z"]],
            "mult":[{"left":"a","right":"b","result":"ab"}],
            "diff":[{"from":"a","result":"ab"},{"from":"ab","result":"z"}]}"#;
        let err = CdgaModel::load(doc).unwrap_err();
        match err {
            Error::Algebra { axiom, .. } => assert!(axiom.contains("d∘d"), "{axiom}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leibniz_violation_is_reported() {
        // d(a∧c) should be da∧c − a∧dc = −a∧a∧b = 0.
        let doc = r#"{"name":"bad","top_degree":3,
            "basis":[["1"],["a","b","c"],["ab","ac","bc"],["abc"]],
            "mult":[{"left":"a","right":"b","result":"ab"},
                    {"left":"a","right":"c","result":"ac"},
                    {"left":"b","right":"c","result":"bc"},
                    {"left":"a","right":"bc","result":"abc"},
                    {"left":"b","right":"ac","result":"-1*abc"},
                    {"left":"c","right":"ab","result":"abc"}],
            "diff":[{"from":"c","result":"ab"},{"from":"ac","result":"abc"}]}"#;
        let err = CdgaModel::load(doc).unwrap_err();
        assert!(
            matches!(err, Error::Algebra { ref axiom, .. } if axiom.contains("Leibniz")),
            "{err}"
        );
        let good = doc.replace(r#",{"from":"ac","result":"abc"}"#, "");
        assert_eq!(CdgaModel::load(&good).unwrap().de_rham_dims(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn commutativity_violation_is_reported() {
        let doc = r#"{"name":"bad","top_degree":2,
            "basis":[["1"],["a","b"],["ab"]],
            "mult":[{"left":"a","right":"b","result":"ab"},{"left":"b","right":"a","result":"ab"}]}"#;
        let err = CdgaModel::load(doc).unwrap_err();
        assert!(
            matches!(err, Error::Algebra { ref axiom, .. } if axiom.contains("commutativity")),
            "{err}"
        );
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(CdgaModel::load("{"), Err(Error::Schema(_))));
        assert!(matches!(
            CdgaModel::load(r#"{"name":"x","top_degree":1}"#),
            Err(Error::Schema(_))
        ));
        let unknown = r#"{"name":"x","top_degree":2,"generators":[{"name":"a","degree":1}],
            "differentials":{"a":"b"}}"#;
        assert!(matches!(CdgaModel::load(unknown), Err(Error::Schema(_))));
        let wrong_degree = r#"{"name":"x","top_degree":3,"generators":[{"name":"a","degree":1}],
            "differentials":{"a":"a"}}"#;
        assert!(matches!(CdgaModel::load(wrong_degree), Err(Error::Schema(_))));
    }

    #[test]
    fn basis_document_round_trip() {
        let doc = r#"{"name":"heis","top_degree":3,
            "generators":[{"name":"a","degree":1},{"name":"b","degree":1},{"name":"c","degree":1}],
            "differentials":{"c":"a*b"}}"#;
        let m = CdgaModel::load(doc).unwrap();
        let again = m.to_document().build().unwrap();
        assert_eq!(again.dims(), m.dims());
        for p in 0..=m.top_degree() {
            assert_eq!(again.diff_matrix(p), m.diff_matrix(p));
        }
        let text = m.to_document().to_json();
        assert_eq!(ModelDocument::from_json(&text).unwrap(), m.to_document());
    }
}
