//! Relative complexes `K_a/K_b`, the connecting map `δ̄`, and the
//! indeterminacy subgroups of page classes and of differentials.
//!
//! Also provides a second construction of the pages from the exact couple
//! (`Z_r` as a preimage, `B_r` as an image of exact forms), independent of
//! the zig-zag solver in [`crate::spectral`].

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, QuotientSpace, Scalar, SubspaceBasis};
use crate::spectral::SpectralSequence;
use crate::twist::TwistedDifferential;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(degree: usize) -> Self {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    fn matches(self, degree: usize) -> bool {
        Parity::of(degree) == self
    }
}

fn degrees_in(lo: usize, hi: usize, parity: Parity) -> Vec<usize> {
    (lo..hi).filter(|&d| parity.matches(d)).collect()
}

fn check_indices(op: &TwistedDifferential, a: usize, b: usize) -> Result<()> {
    let n = op.model().top_degree();
    if a >= b || b > n + 1 {
        return Err(Error::OutOfRange {
            what: "filtration indices",
            detail: format!("need 0 ≤ a < b ≤ {}, got a = {a}, b = {b}", n + 1),
        });
    }
    Ok(())
}

/// Cohomology of `(K_a/K_b, D)` in the given parity, in coordinates of the
/// degrees `a ≤ k < b` of that parity.
pub fn relative_cohomology(op: &TwistedDifferential, a: usize, b: usize, parity: Parity) -> Result<QuotientSpace> {
    check_indices(op, a, b)?;
    let this = degrees_in(a, b, parity);
    let other = degrees_in(a, b, parity.flip());
    let out = op.matrix(&this, &other);
    let into = op.matrix(&other, &this);
    QuotientSpace::new(linalg::kernel(&out), linalg::image(&into))
}

/// `δ̄: H_D(K_{p-r+1}/K_p) → H_D(K_p/K_{p+1})` in a given source parity.
#[derive(Clone, Debug)]
pub struct ConnectingMap {
    pub source: QuotientSpace,
    /// Columns are images of the source representatives, in `Ω^p`
    /// coordinates (zero rows when the target parity does not match `p`).
    pub matrix: Mat,
}

impl ConnectingMap {
    pub fn image(&self) -> SubspaceBasis {
        linalg::image(&self.matrix)
    }
}

pub fn connecting_delta_bar(op: &TwistedDifferential, p: usize, r: usize, parity: Parity) -> Result<ConnectingMap> {
    let n = op.model().top_degree();
    if r < 2 || p > n {
        return Err(Error::OutOfRange {
            what: "connecting map indices",
            detail: format!("need r ≥ 2 and p ≤ {n}, got r = {r}, p = {p}"),
        });
    }
    if p == 0 {
        return Ok(ConnectingMap {
            source: QuotientSpace::trivial(),
            matrix: Mat::zeros(op.model().dim(0), 0),
        });
    }
    let lo = (p + 1).saturating_sub(r);
    let source = relative_cohomology(op, lo, p, parity)?;
    let rows = if parity.flip().matches(p) { op.model().dim(p) } else { 0 };
    let this = degrees_in(lo, p, parity);
    let columns: Vec<Vec<Scalar>> = if rows == 0 {
        vec![Vec::new(); source.dim()]
    } else {
        let to_p = op.matrix(&this, &[p]);
        source.representatives().iter().map(|z| to_p.apply(z)).collect()
    };
    Ok(ConnectingMap {
        source,
        matrix: Mat::from_columns(rows, &columns),
    })
}

/// A subgroup of `H^p(M)`: `im δ̄ / im d`.
#[derive(Clone, Debug)]
pub struct IndeterminacySubgroup {
    pub degree: usize,
    /// `im δ̄` over `im d`, both in `Ω^p` coordinates.
    pub subgroup: QuotientSpace,
    /// The same subgroup in the coordinates of the canonical basis of `H^p`.
    pub in_cohomology: SubspaceBasis,
}

impl IndeterminacySubgroup {
    pub fn dim(&self) -> usize {
        self.subgroup.dim()
    }

    /// Whether a closed form of degree `p` represents a class in the subgroup.
    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.subgroup.vector_len() && self.subgroup.ambient().contains(v)
    }

    fn trivial(degree: usize, dim_p: usize, dim_h: usize) -> Self {
        let z = SubspaceBasis::zero(dim_p);
        IndeterminacySubgroup {
            degree,
            subgroup: QuotientSpace::new(z.clone(), z).expect("zero is contained in zero"),
            in_cohomology: SubspaceBasis::zero(dim_h),
        }
    }
}

/// The indeterminacy of `[x_p] ∈ E_2^{p,q} ≅ H^p(M)` on page `r`.
pub fn indeterminacy_subgroup(op: &TwistedDifferential, p: usize, q: i64, r: usize) -> Result<IndeterminacySubgroup> {
    let model = op.model();
    if r < 2 {
        return Err(Error::OutOfRange {
            what: "page index",
            detail: format!("indeterminacy needs r ≥ 2, got {r}"),
        });
    }
    if p > model.top_degree() {
        return Ok(IndeterminacySubgroup::trivial(p, 0, 0));
    }
    let h = model.de_rham(p)?;
    if q.rem_euclid(2) == 1 {
        return Ok(IndeterminacySubgroup::trivial(p, model.dim(p), h.dim()));
    }
    let delta = connecting_delta_bar(op, p, r, Parity::of(p).flip())?;
    let subgroup = QuotientSpace::new(delta.image(), model.coboundaries(p))?;
    let in_cohomology = SubspaceBasis::from_spanning(
        h.dim(),
        subgroup
            .ambient()
            .basis()
            .iter()
            .map(|v| h.project(v).expect("δ̄ lands in closed forms")),
    );
    Ok(IndeterminacySubgroup {
        degree: p,
        subgroup,
        in_cohomology,
    })
}

/// The indeterminacy of `d_{2t+3}[x_p]`, a subgroup of `H^{p+2t+3}(M)`.
pub fn differential_indeterminacy(
    op: &TwistedDifferential,
    p: usize,
    q: i64,
    t: usize,
) -> Result<IndeterminacySubgroup> {
    if t == 0 {
        return Err(Error::OutOfRange {
            what: "t",
            detail: "differential indeterminacy needs t ≥ 1".into(),
        });
    }
    indeterminacy_subgroup(op, p + 2 * t + 3, q - 2 * t as i64 - 2, 2 * t + 3)
}

/// `Z_r^p` and `B_r^p` from the exact couple.
#[derive(Clone, Debug)]
pub struct CoupleCell {
    pub cycles: SubspaceBasis,
    pub boundaries: SubspaceBasis,
}

impl CoupleCell {
    pub fn dim(&self) -> usize {
        self.cycles.dim() - self.boundaries.dim()
    }
}

/// `Z_r^p = {x_p : D x_p ∈ Z(K_{p+r}) + D(K_{p+1})}`: the classes whose
/// connecting image comes from `H_D(K_{p+r})`.
pub fn couple_cycles(op: &TwistedDifferential, p: usize, r: usize) -> SubspaceBasis {
    let model = op.model();
    let n = model.top_degree();
    let dim_p = model.dim(p);
    let odd = Parity::of(p).flip();
    let targets = degrees_in(p + 1, n + 1, odd);
    if targets.is_empty() {
        return SubspaceBasis::full(dim_p);
    }
    let ambient: usize = targets.iter().map(|&d| model.dim(d)).sum();
    let offset_of = |deg: usize| -> usize { targets.iter().take_while(|&&d| d < deg).map(|&d| model.dim(d)).sum() };

    let high = degrees_in(p + r, n + 1, odd);
    let mut spanning: Vec<Vec<Scalar>> = Vec::new();
    if !high.is_empty() {
        let closed = linalg::kernel(&op.matrix(&high, &degrees_in(p + r, n + 1, odd.flip())));
        let shift = offset_of(high[0]);
        for v in closed.basis() {
            let mut w = linalg::zeros(ambient);
            w[shift..shift + v.len()].clone_from_slice(v);
            spanning.push(w);
        }
    }
    let exact_src = degrees_in(p + 1, n + 1, odd.flip());
    if !exact_src.is_empty() {
        let m = op.matrix(&exact_src, &targets);
        spanning.extend((0..m.cols()).map(|j| m.column(j)));
    }
    let w = SubspaceBasis::from_spanning(ambient, spanning);
    linalg::preimage(&op.matrix(&[p], &targets), &w)
}

/// `B_r^p`: degree-`p` parts of cocycles in `K_p` that are `D`-exact in
/// `K_{p-r+1}`.
pub fn couple_boundaries(op: &TwistedDifferential, p: usize, r: usize) -> SubspaceBasis {
    let model = op.model();
    let n = model.top_degree();
    let dim_p = model.dim(p);
    let lo = (p + 1).saturating_sub(r);
    let par = Parity::of(p);
    let src = degrees_in(lo, n + 1, par.flip());
    let dst = degrees_in(lo, n + 1, par);
    if src.is_empty() {
        return SubspaceBasis::zero(dim_p);
    }
    let ambient: usize = dst.iter().map(|&d| model.dim(d)).sum();
    let below: usize = dst.iter().take_while(|&&d| d < p).map(|&d| model.dim(d)).sum();
    let exact = linalg::image(&op.matrix(&src, &dst));
    let in_filtration = SubspaceBasis::from_spanning(
        ambient,
        (below..ambient).map(|i| {
            let mut e = linalg::zeros(ambient);
            e[i] = linalg::one();
            e
        }),
    );
    let meet = exact.intersection(&in_filtration);
    SubspaceBasis::from_spanning(dim_p, meet.basis().iter().map(|v| v[below..below + dim_p].to_vec()))
}

pub fn couple_cell(op: &TwistedDifferential, p: usize, r: usize) -> CoupleCell {
    CoupleCell {
        cycles: couple_cycles(op, p, r),
        boundaries: couple_boundaries(op, p, r),
    }
}

/// Compares the exact-couple pages against the zig-zag pages and checks
/// the tower `B_2 ⊆ … ⊆ B_r ⊆ Z_r ⊆ … ⊆ Z_2`. Returns the mismatches.
pub fn compare_page_constructions(ss: &SpectralSequence) -> Result<Vec<String>> {
    let op = ss.operator();
    let n = ss.top_degree();
    let mut failures = Vec::new();
    for p in 0..=n {
        let mut prev: Option<CoupleCell> = None;
        for r in 1..=ss.stable_index() {
            let cell = couple_cell(op, p, r);
            if !cell.boundaries.is_subspace_of(&cell.cycles) {
                failures.push(format!("B_{r} ⊄ Z_{r} at p = {p}"));
            }
            let page_dim = ss.page(r)?.dim(p, 0);
            if cell.dim() != page_dim {
                failures.push(format!(
                    "p = {p}, r = {r}: exact couple gives {}, zig-zags give {page_dim}",
                    cell.dim()
                ));
            }
            if let Some(prev) = &prev {
                if !cell.cycles.is_subspace_of(&prev.cycles) || !prev.boundaries.is_subspace_of(&cell.boundaries) {
                    failures.push(format!(
                        "tower inclusion fails between r = {} and r = {r} at p = {p}",
                        r - 1
                    ));
                }
            }
            prev = Some(cell);
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::bundled_model;
    use crate::twist::{parse_twist, TwistForm};

    fn op(name: &str, twist: &str) -> TwistedDifferential {
        let m = bundled_model(name).unwrap();
        let h = parse_twist(&m, twist).unwrap();
        TwistedDifferential::new(&m, &h)
    }

    #[test]
    fn one_step_quotients() {
        let o = op("heisenberg", "a^b^c");
        let m = o.model().clone();
        for a in 0..=m.top_degree() {
            let same = relative_cohomology(&o, a, a + 1, Parity::of(a)).unwrap();
            assert_eq!(same.dim(), m.dim(a));
            let other = relative_cohomology(&o, a, a + 1, Parity::of(a).flip()).unwrap();
            assert_eq!(other.dim(), 0);
        }
        assert!(relative_cohomology(&o, 2, 2, Parity::Even).is_err());
        assert!(relative_cohomology(&o, 0, 5, Parity::Even).is_err());
    }

    #[test]
    fn whole_complex_is_twisted_cohomology() {
        let m = bundled_model("torus3").unwrap();
        let h = parse_twist(&m, "e1^e2^e3").unwrap();
        let o = TwistedDifferential::new(&m, &h);
        let n = m.top_degree();
        assert_eq!(relative_cohomology(&o, 0, n + 1, Parity::Even).unwrap().dim(), 3);
        assert_eq!(relative_cohomology(&o, 0, n + 1, Parity::Odd).unwrap().dim(), 3);
    }

    #[test]
    fn delta_bar_at_r2_is_d() {
        let o = op("heisenberg", "");
        let m = o.model().clone();
        for p in 1..=m.top_degree() {
            let delta = connecting_delta_bar(&o, p, 2, Parity::of(p).flip()).unwrap();
            assert_eq!(delta.image(), m.coboundaries(p));
        }
    }

    #[test]
    fn torus_subgroups_vanish() {
        let o = op("torus3", "e1^e2^e3");
        for p in 0..=3 {
            assert_eq!(indeterminacy_subgroup(&o, p, 0, 3).unwrap().dim(), 0);
            assert_eq!(differential_indeterminacy(&o, p, 0, 1).unwrap().dim(), 0);
        }
        let o = TwistedDifferential::new(&bundled_model("massey_s1").unwrap(), &TwistForm::zero());
        for p in 0..=11 {
            for r in 2..=13 {
                assert_eq!(indeterminacy_subgroup(&o, p, 0, r).unwrap().dim(), 0);
            }
        }
    }

    #[test]
    fn delta_bar_image_matches_brute_force_on_torus() {
        // Every relative cocycle of K_0/K_3, not just the canonical
        // representatives, lands in the span of the representative images.
        let o = op("torus3", "e1^e2^e3");
        let p = 3;
        let delta = connecting_delta_bar(&o, p, 4, Parity::Even).unwrap();
        let this = degrees_in(0, p, Parity::Even);
        let other = degrees_in(0, p, Parity::Odd);
        let cocycles = linalg::kernel(&o.matrix(&this, &other));
        let to_p = o.matrix(&this, &[p]);
        let brute = SubspaceBasis::from_spanning(1, cocycles.basis().iter().map(|z| to_p.apply(z)));
        assert_eq!(delta.image(), brute);
        assert_eq!(brute.dim(), 1);
    }

    #[test]
    fn constructions_agree_on_small_models() {
        for (name, twist) in [("torus3", "e1^e2^e3"), ("su3", "x3"), ("massey_s1", "a")] {
            let m = bundled_model(name).unwrap();
            let h = parse_twist(&m, twist).unwrap();
            let ss = SpectralSequence::new(&m, &h);
            assert!(compare_page_constructions(&ss).unwrap().is_empty(), "{name}");
        }
    }
}
