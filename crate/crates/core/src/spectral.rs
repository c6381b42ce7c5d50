//! The spectral sequence of the filtration `K_p = ⊕_{i≥p} Ω^i`.
//!
//! Pages are computed from zig-zags: `E_r^{p,q} = Z_r^p / B_r^p` where
//! `Z_r^p` collects the leading components `x_p` of forms
//! `x = x_p + x_{p+2} + …` with `Dx ∈ K_{p+r}`, and `B_r^p` collects the
//! degree-`p` components of `Dy` for `y ∈ K_{p-r+1}` with `Dy ∈ K_p`.
//! Cells with odd `q` vanish identically, so only `q ≡ 0 (mod 2)` is stored.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use crate::cdga::{CdgaModel, Form};
use crate::error::{Error, Result};
use crate::linalg::{self, is_zero_vec, solve_particular, zeros, Mat, QuotientSpace, Scalar, SubspaceBasis};
use crate::twist::{TwistForm, TwistedDifferential};

/// `x = x_p + x_{p+2} + …` with `Dx ∈ K_{p+reach}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigZag {
    pub p: usize,
    pub reach: usize,
    /// `components[j]` is `x_{p+2j}`.
    pub components: Vec<Vec<Scalar>>,
}

impl ZigZag {
    pub fn component(&self, j: usize) -> Option<&[Scalar]> {
        self.components.get(j).map(Vec::as_slice)
    }

    /// The component of degree `degree`, if it was solved for.
    pub fn degree_component(&self, degree: usize) -> Option<&[Scalar]> {
        if degree < self.p || (degree - self.p) % 2 == 1 {
            return None;
        }
        self.component((degree - self.p) / 2)
    }

    pub fn pieces(&self) -> Vec<(usize, &[Scalar])> {
        self.components
            .iter()
            .enumerate()
            .map(|(j, v)| (self.p + 2 * j, v.as_slice()))
            .collect()
    }

    pub fn to_form(&self) -> Form {
        Form::from_parts(self.pieces().into_iter().map(|(d, v)| (d, v.to_vec())))
    }
}

/// One cell `E_r^{p,0}` with the subspaces it is built from.
#[derive(Clone, Debug)]
pub struct Cell {
    pub cycles: SubspaceBasis,
    pub boundaries: SubspaceBasis,
    pub quotient: QuotientSpace,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: usize,
    cells: Vec<Cell>,
    /// `d_r: E_r^{p,0} → E_r^{p+r, 1-r}`, shape `dim(target) × dim(source)`.
    diffs: Vec<Mat>,
}

impl SpectralPage {
    pub fn top_degree(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cell(&self, p: usize) -> &Cell {
        &self.cells[p]
    }

    /// `dim E_r^{p,q}`; `q` only matters mod 2.
    pub fn dim(&self, p: usize, q: i64) -> usize {
        if q.rem_euclid(2) == 1 || p >= self.cells.len() {
            0
        } else {
            self.cells[p].dim()
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cells.iter().map(Cell::dim).collect()
    }

    /// Matrix of `d_r` out of `E_r^{p,0}`. Zero rows when the target cell
    /// vanishes (odd `q` or beyond the top degree).
    pub fn differential_matrix(&self, p: usize) -> &Mat {
        &self.diffs[p]
    }

    pub fn differential_rank(&self, p: usize) -> usize {
        self.diffs[p].rank()
    }

    /// `(Σ_{p+q even} dim, Σ_{p+q odd} dim)` over one period in `q`.
    pub fn parity_totals(&self) -> (usize, usize) {
        let mut even = 0;
        let mut odd = 0;
        for (p, c) in self.cells.iter().enumerate() {
            if p % 2 == 0 {
                even += c.dim();
            } else {
                odd += c.dim();
            }
        }
        (even, odd)
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.dim() == 0)
    }
}

/// Solves the block-triangular system `(Dx)_k = 0` for `k ∈ constraints`,
/// with some components fixed and the others unknown. All unknowns are
/// solved at once; free variables are zero.
pub(crate) fn solve_components(
    op: &TwistedDifferential,
    fixed: &[(usize, Vec<Scalar>)],
    unknown: &[usize],
    constraints: &[usize],
) -> Option<Vec<(usize, Vec<Scalar>)>> {
    let model = op.model();
    let fixed_pieces: Vec<(usize, &[Scalar])> = fixed.iter().map(|(d, v)| (*d, v.as_slice())).collect();
    let mut rhs = Vec::new();
    for &k in constraints {
        rhs.extend(op.component(&fixed_pieces, k).into_iter().map(|x| -x));
    }
    let solution = if unknown.is_empty() {
        if !is_zero_vec(&rhs) {
            return None;
        }
        Vec::new()
    } else {
        let m = op.matrix(unknown, constraints);
        solve_particular(&m, &rhs)?
    };
    let mut out = Vec::with_capacity(unknown.len());
    let mut offset = 0;
    for &deg in unknown {
        let len = model.dim(deg);
        out.push((deg, solution[offset..offset + len].to_vec()));
        offset += len;
    }
    Some(out)
}

/// Degrees `p, p+2, …` of the components a reach-`r` zig-zag needs, and
/// the degrees `p+1, p+3, …` below `p+r` where `Dx` must vanish.
fn zigzag_degrees(n: usize, p: usize, r: usize) -> (Vec<usize>, Vec<usize>) {
    let mut xs = vec![p];
    let mut ys = Vec::new();
    let mut j = 0;
    while 2 * j + 1 < r && p + 2 * j < n {
        ys.push(p + 2 * j + 1);
        if 2 * j + 3 < r && p + 2 * j + 2 <= n {
            xs.push(p + 2 * j + 2);
        }
        j += 1;
    }
    (xs, ys)
}

pub struct SpectralSequence {
    op: TwistedDifferential,
    pages: Vec<OnceLock<SpectralPage>>,
    /// Cells keyed by `(p, effective reach of Z, effective reach of B)`;
    /// both stop changing once the filtration is exhausted.
    cells: Mutex<HashMap<(usize, usize, usize), Cell>>,
}

impl SpectralSequence {
    pub fn new(model: &CdgaModel, twist: &TwistForm) -> Self {
        let n = model.top_degree();
        SpectralSequence {
            op: TwistedDifferential::new(model, twist),
            pages: (0..n + 3).map(|_| OnceLock::new()).collect(),
            cells: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &CdgaModel {
        self.op.model()
    }

    pub fn twist(&self) -> &TwistForm {
        self.op.twist()
    }

    pub fn operator(&self) -> &TwistedDifferential {
        &self.op
    }

    pub fn top_degree(&self) -> usize {
        self.model().top_degree()
    }

    /// Index of the stable page: `K_{n+1} = 0` bounds every reach.
    pub fn stable_index(&self) -> usize {
        self.top_degree() + 2
    }

    pub fn page(&self, r: usize) -> Result<&SpectralPage> {
        if r == 0 || r > self.stable_index() {
            return Err(Error::OutOfRange {
                what: "page index",
                detail: format!("r = {r}, expected 1..={}", self.stable_index()),
            });
        }
        Ok(self.pages[r].get_or_init(|| self.compute_page(r)))
    }

    pub fn e_infinity(&self) -> &SpectralPage {
        self.page(self.stable_index()).expect("stable index is in range")
    }

    /// `Z_r^p`: leading components of reach-`r` zig-zags.
    pub fn cycles(&self, p: usize, r: usize) -> SubspaceBasis {
        let n = self.top_degree();
        let (xs, ys) = zigzag_degrees(n, p, r);
        let dim_p = self.model().dim(p);
        if ys.is_empty() {
            return SubspaceBasis::full(dim_p);
        }
        let k = linalg::kernel(&self.op.matrix(&xs, &ys));
        SubspaceBasis::from_spanning(dim_p, k.basis().iter().map(|v| v[..dim_p].to_vec()))
    }

    /// `B_r^p`: degree-`p` parts of `Dy` for `y ∈ K_{p-r+1}` with `Dy ∈ K_p`.
    pub fn boundaries(&self, p: usize, r: usize) -> SubspaceBasis {
        let dim_p = self.model().dim(p);
        let lowest = (p + 1).saturating_sub(r);
        let src: Vec<usize> = (lowest..p).rev().step_by(2).filter(|d| (p - d) % 2 == 1).collect();
        if src.is_empty() {
            return SubspaceBasis::zero(dim_p);
        }
        let bottom = *src.last().expect("nonempty");
        let constraints: Vec<usize> = (bottom + 1..p).step_by(2).collect();
        let out = self.op.matrix(&src, &[p]);
        if constraints.is_empty() {
            return linalg::image(&out);
        }
        let k = linalg::kernel(&self.op.matrix(&src, &constraints));
        SubspaceBasis::from_spanning(dim_p, k.basis().iter().map(|v| out.apply(v)))
    }

    fn compute_cell(&self, p: usize, r: usize) -> Cell {
        let key = (p, r.min(self.top_degree() + 2 - p), r.min(p + 1));
        if let Some(c) = self.cells.lock().expect("cell cache poisoned").get(&key) {
            return c.clone();
        }
        let cell = self.compute_cell_uncached(p, r);
        self.cells
            .lock()
            .expect("cell cache poisoned")
            .insert(key, cell.clone());
        cell
    }

    fn compute_cell_uncached(&self, p: usize, r: usize) -> Cell {
        let cycles = self.cycles(p, r);
        let boundaries = self.boundaries(p, r);
        let quotient = QuotientSpace::new(cycles.clone(), boundaries.clone())
            .expect("boundaries are contained in cycles since D∘D = 0");
        Cell {
            cycles,
            boundaries,
            quotient,
        }
    }

    fn compute_page(&self, r: usize) -> SpectralPage {
        let n = self.top_degree();
        let cells: Vec<Cell> = (0..=n).into_par_iter().map(|p| self.compute_cell(p, r)).collect();
        let diffs: Vec<Mat> = (0..=n)
            .into_par_iter()
            .map(|p| self.differential_on_cells(&cells, p, r))
            .collect();
        SpectralPage { r, cells, diffs }
    }

    fn differential_on_cells(&self, cells: &[Cell], p: usize, r: usize) -> Mat {
        let source = &cells[p].quotient;
        let target_degree = p + r;
        if r.is_multiple_of(2) || target_degree > self.top_degree() {
            return Mat::zeros(0, source.dim());
        }
        let target = &cells[target_degree].quotient;
        let columns: Vec<Vec<Scalar>> = source
            .representatives()
            .iter()
            .map(|rep| {
                let z = self.lift_vector(p, rep, r).expect("page representatives lift");
                target
                    .project(&self.leading_image(&z, r))
                    .expect("the image of a zig-zag is a cycle of the target page")
            })
            .collect();
        Mat::from_columns(target.dim(), &columns)
    }

    fn lift_vector(&self, p: usize, x_p: &[Scalar], r: usize) -> Option<ZigZag> {
        self.extend_zigzag(p, &[x_p.to_vec()], r)
    }

    /// Extends fixed leading components `x_p, …` to a reach-`r` zig-zag.
    pub fn extend_zigzag(&self, p: usize, fixed: &[Vec<Scalar>], r: usize) -> Option<ZigZag> {
        let (xs, ys) = zigzag_degrees(self.top_degree(), p, r);
        let k = fixed.len().min(xs.len());
        let fixed_pieces: Vec<(usize, Vec<Scalar>)> = xs[..k].iter().copied().zip(fixed[..k].iter().cloned()).collect();
        let solved = solve_components(&self.op, &fixed_pieces, &xs[k..], &ys)?;
        let components = fixed_pieces.into_iter().chain(solved).map(|(_, v)| v).collect();
        Some(ZigZag {
            p,
            reach: r,
            components,
        })
    }

    /// Lifts a homogeneous `x_p` to a zig-zag of reach `r`; `None` when no
    /// such zig-zag exists.
    pub fn lift_zigzag(&self, x_p: &Form, r: usize) -> Result<Option<ZigZag>> {
        self.model().check_form(x_p)?;
        let p = homogeneous_degree(x_p)?;
        let Some(p) = p else {
            return Ok(Some(ZigZag {
                p: 0,
                reach: r,
                components: vec![zeros(self.model().dim(0))],
            }));
        };
        Ok(self.lift_vector(p, x_p.part(p).expect("degree is present"), r))
    }

    /// `(Dx)_{p+r}` for a zig-zag of reach `r`. The component `x_{p+r-1}`
    /// is never solved for; it only adds an exact form.
    pub fn leading_image(&self, z: &ZigZag, r: usize) -> Vec<Scalar> {
        let target = z.p + r;
        if target > self.top_degree() {
            return Vec::new();
        }
        self.op.component(&z.pieces(), target)
    }

    /// Class coordinates of a degree-`p` form on `E_r^{p,0}`.
    pub fn class_of(&self, p: usize, x_p: &[Scalar], r: usize) -> Result<Vec<Scalar>> {
        let page = self.page(r)?;
        if p > self.top_degree() {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: format!("{p} exceeds the top degree {}", self.top_degree()),
            });
        }
        page.cell(p).quotient.project(x_p).map_err(|_| Error::NotOnPage {
            page: r,
            detail: format!("form of degree {p} does not survive to E_{r}"),
        })
    }

    /// `d_r` applied to page class coordinates at `(p, 0)`.
    pub fn differential(&self, r: usize, p: usize, class: &[Scalar]) -> Result<Vec<Scalar>> {
        let page = self.page(r)?;
        if p > self.top_degree() || class.len() != page.cell(p).dim() {
            return Err(Error::NotOnPage {
                page: r,
                detail: format!(
                    "class has {} coordinates, E_{r}^{{{p},0}} has dimension {}",
                    class.len(),
                    page.dim(p, 0)
                ),
            });
        }
        Ok(page.differential_matrix(p).apply(class))
    }

    /// `d_r[x_p]` computed from an arbitrary representative `x_p ∈ Z_r^p`,
    /// returned as the raw form `(Dx)_{p+r}` together with its page class.
    pub fn differential_of_form(&self, r: usize, x_p: &Form) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
        let Some(p) = homogeneous_degree(x_p)? else {
            return Ok((Vec::new(), Vec::new()));
        };
        let page = self.page(r)?;
        self.class_of(p, x_p.part(p).expect("present"), r)?;
        let z = self.lift_zigzag(x_p, r)?.ok_or_else(|| Error::NotOnPage {
            page: r,
            detail: "no zig-zag of the required reach".into(),
        })?;
        let value = self.leading_image(&z, r);
        let class = if p + r > self.top_degree() || r.is_multiple_of(2) {
            Vec::new()
        } else {
            page.cell(p + r).quotient.project(&value)?
        };
        Ok((value, class))
    }

    /// Checks `d_{2k} = 0` and `E_{2k+1} = E_{2k}` for every `2k ≤ n+2`.
    pub fn check_even_vanishing(&self) -> Result<EvenVanishingReport> {
        let n = self.top_degree();
        let mut failures = Vec::new();
        for r in (2..=self.stable_index()).step_by(2) {
            let page = self.page(r)?;
            for p in 0..=n {
                let cell = page.cell(p);
                for rep in cell.quotient.representatives() {
                    let z = self.lift_vector(p, rep, r).expect("page representatives lift");
                    let mut pieces = z.pieces();
                    pieces.retain(|(d, _)| d + 1 < p + r);
                    if p + r <= n && !is_zero_vec(&self.op.component(&pieces, p + r)) {
                        failures.push(format!("d_{r} nonzero at p = {p}"));
                    }
                }
            }
            if r < self.stable_index() {
                let next = self.page(r + 1)?;
                for p in 0..=n {
                    let (a, b) = (page.cell(p), next.cell(p));
                    if a.cycles != b.cycles || a.boundaries != b.boundaries {
                        failures.push(format!("E_{} ≠ E_{r} at p = {p}", r + 1));
                    }
                }
            }
        }
        Ok(EvenVanishingReport { failures })
    }

    /// Structural page checks: `d_r∘d_r = 0` and
    /// `dim E_{r+1} = dim ker d_r − rank d_r(into)` for every page.
    pub fn check_page_structure(&self) -> Result<Vec<String>> {
        let n = self.top_degree();
        let mut failures = Vec::new();
        for r in 1..=self.stable_index() {
            let page = self.page(r)?;
            for p in 0..=n {
                if r % 2 == 1 && p + 2 * r <= n {
                    let dd = page.differential_matrix(p + r).mul(page.differential_matrix(p));
                    if !dd.is_zero() {
                        failures.push(format!("d_{r}∘d_{r} ≠ 0 at p = {p}"));
                    }
                }
            }
            if r < self.stable_index() {
                let next = self.page(r + 1)?;
                for p in 0..=n {
                    let out_rank = page.differential_rank(p);
                    let in_rank = if p >= r { page.differential_rank(p - r) } else { 0 };
                    let expected = page.dim(p, 0) - out_rank - in_rank;
                    if next.dim(p, 0) != expected {
                        failures.push(format!(
                            "dim E_{}^{{{p},0}} = {} but page homology gives {expected}",
                            r + 1,
                            next.dim(p, 0)
                        ));
                    }
                }
            }
        }
        Ok(failures)
    }
}

#[derive(Clone, Debug, Default)]
pub struct EvenVanishingReport {
    pub failures: Vec<String>,
}

impl EvenVanishingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `None` for the zero form, the degree for a homogeneous one.
pub fn homogeneous_degree(x: &Form) -> Result<Option<usize>> {
    if x.is_zero() {
        return Ok(None);
    }
    x.degree()
        .map(Some)
        .ok_or_else(|| Error::Inhomogeneous("expected a homogeneous form".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::bundled_model;
    use crate::twist::parse_twist;

    fn ss(name: &str, twist: &str) -> SpectralSequence {
        let m = bundled_model(name).unwrap();
        let h = parse_twist(&m, twist).unwrap();
        SpectralSequence::new(&m, &h)
    }

    #[test]
    fn first_two_pages() {
        let s = ss("heisenberg", "a^b^c");
        let m = s.model().clone();
        assert_eq!(s.page(1).unwrap().dims(), m.dims());
        assert_eq!(s.page(2).unwrap().dims(), m.de_rham_dims());
        assert_eq!(s.page(2).unwrap().dim(1, 1), 0);
        assert_eq!(s.page(2).unwrap().dim(1, -2), 2);
        for p in 0..=m.top_degree() {
            let d1 = s.page(1).unwrap().differential_matrix(p);
            if p < m.top_degree() {
                assert_eq!(d1, m.diff_matrix(p));
            }
        }
    }

    #[test]
    fn page_range() {
        let s = ss("torus3", "");
        assert!(matches!(s.page(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.page(6), Err(Error::OutOfRange { .. })));
        assert!(s.page(5).is_ok());
    }

    #[test]
    fn torus_lifts() {
        let s = ss("torus3", "e1^e2^e3");
        let m = s.model().clone();
        let e1 = m.parse_form("e1").unwrap();
        let z = s.lift_zigzag(&e1, 4).unwrap().unwrap();
        assert!(z.components.iter().skip(1).all(|c| is_zero_vec(c)));
        assert!(s.lift_zigzag(&m.unit(), 4).unwrap().is_none());
        assert!(s.lift_zigzag(&m.unit(), 2).unwrap().is_some());
        let d3 = s.differential(3, 0, &[linalg::one()]).unwrap();
        assert_eq!(d3, vec![linalg::one()]);
        assert_eq!(s.page(3).unwrap().differential_rank(0), 1);
        assert_eq!(s.e_infinity().parity_totals(), (3, 3));
    }

    #[test]
    fn su3_collapses_at_four() {
        let s = ss("su3", "x3");
        assert!(s.page(4).unwrap().is_zero());
        assert!(s.e_infinity().is_zero());
    }

    #[test]
    fn structural_checks_on_mixed() {
        let s = ss("mixed", "a + b");
        assert!(s.check_page_structure().unwrap().is_empty());
        assert!(s.check_even_vanishing().unwrap().passed());
    }

    #[test]
    fn massey_s2_has_d9() {
        let s = ss("massey_s2", "a");
        let page = s.page(9).unwrap();
        assert_eq!(page.dim(3, 0), 1);
        assert_eq!(page.differential_rank(3), 1);
    }
}
