//! The acceptance suite: twelve checks over the bundled models, their
//! twists, and a sweep of seeded random models.
//!
//! All comparisons are exact; the only tolerance is [`TOLERANCE`] = 0.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdga::{CdgaModel, Form};
use crate::error::Result;
use crate::indet::{self, compare_page_constructions};
use crate::library::{self, bundled_model, bundled_twists, single_component_cases, BUNDLED_MODELS};
use crate::linalg::{self, int, is_zero_vec, Scalar};
use crate::massey::{self, perturb_zigzag};
use crate::spectral::SpectralSequence;
use crate::twist::{parse_twist, twisted_cohomology, ParityComplex, TwistForm};

/// Exact rational arithmetic: every comparison is equality.
pub const TOLERANCE: u32 = 0;

pub const RANDOM_MODELS: usize = 50;
pub const MAX_RANDOM_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// A model with one twist and its spectral sequence.
pub struct Case {
    pub label: String,
    pub model: CdgaModel,
    pub twist: TwistForm,
    pub ss: SpectralSequence,
}

impl Case {
    pub fn new(label: String, model: CdgaModel, twist: TwistForm) -> Self {
        let ss = SpectralSequence::new(&model, &twist);
        Case {
            label,
            model,
            twist,
            ss,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub random_models: usize,
    /// Extra models to include next to the bundled ones.
    pub extra_models: Vec<CdgaModel>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            random_models: RANDOM_MODELS,
            extra_models: Vec::new(),
        }
    }
}

type Outcome = std::result::Result<String, String>;
type Check = fn(&Suite) -> Outcome;

pub struct Suite {
    pub bundled: Vec<Case>,
    pub random: Vec<Case>,
    seed: u64,
}

impl Suite {
    pub fn new(config: &SuiteConfig) -> Result<Suite> {
        let mut bundled = Vec::new();
        for name in BUNDLED_MODELS {
            let m = bundled_model(name)?;
            for t in bundled_twists(name) {
                let h = parse_twist(&m, t)?;
                let label = if t.is_empty() {
                    format!("{name}, H = 0")
                } else {
                    format!("{name}, H = {t}")
                };
                bundled.push(Case::new(label, m.clone(), h));
            }
        }
        for m in &config.extra_models {
            bundled.push(Case::new(format!("{}, H = 0", m.name()), m.clone(), TwistForm::zero()));
        }
        let random = (0..config.random_models as u64)
            .into_par_iter()
            .map(|i| {
                let seed = config.seed.wrapping_mul(1_000_003).wrapping_add(i);
                let rc = library::random_case(seed)?;
                Ok(Case::new(format!("random seed {seed}"), rc.model, rc.twist))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Suite {
            bundled,
            random,
            seed: config.seed,
        })
    }

    fn all(&self) -> impl ParallelIterator<Item = &Case> {
        self.bundled.par_iter().chain(self.random.par_iter())
    }

    fn find(&self, name: &str, twist: &str) -> Option<&Case> {
        let label = format!("{name}, H = {twist}");
        self.bundled.iter().find(|c| c.label == label)
    }

    pub fn run(&self) -> Vec<CriterionResult> {
        let checks: [(&str, Check); 12] = [
            ("structural axioms (D² = 0, d_r∘d_r = 0)", Suite::structural),
            ("page identifications E_1, E_2, odd q", Suite::page_identifications),
            ("even differentials vanish", Suite::even_vanishing),
            ("convergence to twisted cohomology", Suite::convergence),
            ("d_3 is the cup product with H_3", Suite::d3_law),
            ("d_{2t+3} = (−1)^t [c(A)] with choice independence", Suite::main_theorem),
            ("single-component case table", Suite::case_table),
            ("band route and 3×3 route agree on d_9", Suite::remark_routes),
            ("formal model collapses at E_4", Suite::formality),
            ("Heisenberg triple product", Suite::triple),
            ("indeterminacy coherence", Suite::indeterminacy),
            ("zig-zag and exact-couple pages agree", Suite::construction_agreement),
        ];
        checks
            .iter()
            .enumerate()
            .map(|(i, (name, f))| {
                let (passed, detail) = match f(self) {
                    Ok(d) => (true, d),
                    Err(d) => (false, d),
                };
                CriterionResult {
                    id: i + 1,
                    name: name.to_string(),
                    passed,
                    detail,
                }
            })
            .collect()
    }

    fn structural(&self) -> Outcome {
        let failures: Vec<String> = self
            .all()
            .flat_map_iter(|c| {
                let mut f = Vec::new();
                if let Err(e) = ParityComplex::new(c.ss.operator()) {
                    f.push(format!("{}: {e}", c.label));
                }
                match c.ss.check_page_structure() {
                    Ok(list) => f.extend(list.into_iter().map(|m| format!("{}: {m}", c.label))),
                    Err(e) => f.push(format!("{}: {e}", c.label)),
                }
                f
            })
            .collect();
        let too_big: Vec<_> = self
            .random
            .iter()
            .filter(|c| c.model.total_dim() > MAX_RANDOM_DIM)
            .collect();
        if !too_big.is_empty() {
            return Err(format!(
                "{} random models exceed dimension {MAX_RANDOM_DIM}",
                too_big.len()
            ));
        }
        summarize(
            failures,
            format!(
                "{} bundled cases and {} random models",
                self.bundled.len(),
                self.random.len()
            ),
        )
    }

    fn page_identifications(&self) -> Outcome {
        let failures: Vec<String> = self
            .all()
            .flat_map_iter(|c| match page_identification_failures(&c.ss) {
                Ok(list) => list.into_iter().map(|m| format!("{}: {m}", c.label)).collect(),
                Err(e) => vec![format!("{}: {e}", c.label)],
            })
            .collect();
        summarize(
            failures,
            "E_1 = Ω, E_2 = H_dR with matching representatives, odd q vanishes".into(),
        )
    }

    fn even_vanishing(&self) -> Outcome {
        let failures: Vec<String> = self
            .all()
            .flat_map_iter(|c| match c.ss.check_even_vanishing() {
                Ok(r) => r.failures.into_iter().map(|m| format!("{}: {m}", c.label)).collect(),
                Err(e) => vec![format!("{}: {e}", c.label)],
            })
            .collect();
        summarize(failures, "all pages 2k ≤ n+2".into())
    }

    fn convergence(&self) -> Outcome {
        let failures: Vec<String> = self
            .all()
            .filter_map(|c| {
                let tc = twisted_cohomology(&c.model, &c.twist).ok()?;
                let e = c.ss.e_infinity().parity_totals();
                (e != tc.dims()).then(|| format!("{}: E_∞ {e:?} vs twisted {:?}", c.label, tc.dims()))
            })
            .collect();
        let torus = self.find("torus3", "e1^e2^e3").ok_or("torus3 case missing")?;
        let totals = torus.ss.e_infinity().parity_totals();
        if totals != (3, 3) {
            return Err(format!("torus3 with e1^e2^e3: E_∞ totals {totals:?}, expected (3, 3)"));
        }
        summarize(failures, "torus3 with H = e1^e2^e3 gives (3, 3)".into())
    }

    fn d3_law(&self) -> Outcome {
        let counts: Vec<_> = self.all().map(|c| (&c.label, d3_law_failures(&c.ss))).collect();
        let mut checked = 0;
        let mut failures = Vec::new();
        for (label, c) in counts {
            match c {
                Ok((n, list)) => {
                    checked += n;
                    failures.extend(list.into_iter().map(|m| format!("{label}: {m}")));
                }
                Err(e) => failures.push(format!("{label}: {e}")),
            }
        }
        summarize(failures, format!("{checked} E_3 basis classes"))
    }

    fn main_theorem(&self) -> Outcome {
        let results: Vec<std::result::Result<(usize, usize, usize), String>> = self
            .all()
            .map(|c| {
                let mut classes = 0;
                let mut perturbed = 0;
                let mut differs = 0;
                for t in 1..=(c.model.top_degree().saturating_sub(1)) / 2 {
                    let rep = massey::verify_main_theorems(&c.ss, t).map_err(|e| format!("{}: {e}", c.label))?;
                    if !rep.thm41.iter().all(|x| x.agrees) {
                        return Err(format!(
                            "{}: t = {t}: {:?}",
                            c.label,
                            rep.thm41.iter().find(|x| !x.agrees)
                        ));
                    }
                    if !rep.perturbation.iter().all(|x| x.agrees) {
                        return Err(format!(
                            "{}: t = {t}: perturbed defining system changes the page class",
                            c.label
                        ));
                    }
                    classes += rep.classes_checked();
                    perturbed += rep.perturbation.iter().filter(|x| x.perturbed_degree.is_some()).count();
                    differs += rep.perturbation.iter().filter(|x| x.cohomology_differs).count();
                }
                Ok((classes, perturbed, differs))
            })
            .collect();
        let mut totals = (0, 0, 0);
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok((a, b, c)) => {
                    totals.0 += a;
                    totals.1 += b;
                    totals.2 += c;
                }
                Err(e) => failures.push(e),
            }
        }
        if failures.is_empty() && (totals.0 == 0 || totals.1 == 0 || totals.2 == 0) {
            failures.push(format!("vacuous check: {totals:?}"));
        }
        summarize(
            failures,
            format!(
                "{} classes; {} perturbed systems, {} with a different de Rham class",
                totals.0, totals.1, totals.2
            ),
        )
    }

    fn case_table(&self) -> Outcome {
        let mut failures = Vec::new();
        let mut exercised = std::collections::BTreeSet::new();
        let mut classes = 0;
        let mut massey_nonzero = 0;
        for (name, twist, s) in single_component_cases() {
            let c = self
                .find(name, twist)
                .ok_or_else(|| format!("{name} with {twist} missing"))?;
            for t in 1..=(c.model.top_degree().saturating_sub(1)) / 2 {
                let rep = massey::verify_main_theorems(&c.ss, t).map_err(|e| e.to_string())?;
                let Some(list) = &rep.case_table else {
                    failures.push(format!("{}: not recognised as single-component", c.label));
                    continue;
                };
                for chk in list {
                    classes += 1;
                    if !chk.agrees {
                        failures.push(format!("{}: t = {t}, p = {}: {:?}", c.label, chk.p, chk.detail));
                    }
                    let page = c.ss.page(2 * t + 3).map_err(|e| e.to_string())?;
                    if massey::massey_length(t, s).is_some()
                        && !page
                            .differential_matrix(chk.p)
                            .column(chk.index)
                            .iter()
                            .all(|x| *x == int(0))
                    {
                        massey_nonzero += 1;
                    }
                }
                exercised.insert(s);
            }
        }
        if exercised != [1, 2, 3].into_iter().collect() {
            failures.push(format!("s values exercised: {exercised:?}"));
        }
        if massey_nonzero == 0 {
            failures.push("no nonzero Massey-type differential was exercised".into());
        }
        summarize(
            failures,
            format!("s ∈ {{1,2,3}}, {classes} classes, {massey_nonzero} nonzero Massey differentials"),
        )
    }

    fn remark_routes(&self) -> Outcome {
        let c = self.find("massey_s2", "a").ok_or("massey_s2 case missing")?;
        let page = c.ss.page(9).map_err(|e| e.to_string())?;
        let mut compared = 0;
        let mut nonzero = 0;
        let mut failures = Vec::new();
        for p in (0..=c.model.top_degree()).take_while(|p| p + 9 <= c.model.top_degree()) {
            for idx in 0..page.dim(p, 0) {
                let x = Form::homogeneous(p, page.cell(p).quotient.representative(idx).to_vec());
                let (a, b) = massey::remark_compatibility(&c.ss, &x).map_err(|e| e.to_string())?;
                let zig = page.differential_matrix(p).column(idx);
                compared += 1;
                if a != b || a != zig {
                    failures.push(format!("p = {p}: band {a:?}, 3×3 {b:?}, zig-zag {zig:?}"));
                }
                if !is_zero_vec(&a) {
                    nonzero += 1;
                }
            }
        }
        if nonzero == 0 {
            failures.push("E_9 has no class with nonzero d_9".into());
        }
        summarize(
            failures,
            format!("{compared} E_9 classes on massey_s2, {nonzero} with d_9 ≠ 0"),
        )
    }

    fn formality(&self) -> Outcome {
        let c = self.find("su3", "x3").ok_or("su3 case missing")?;
        let tc = twisted_cohomology(&c.model, &c.twist).map_err(|e| e.to_string())?;
        if tc.dims() != (0, 0) {
            return Err(format!("twisted dims {:?}", tc.dims()));
        }
        let e4 = c.ss.page(4).map_err(|e| e.to_string())?.dims();
        let einf = c.ss.e_infinity().dims();
        if e4 != einf || einf.iter().any(|&d| d != 0) {
            return Err(format!("E_4 {e4:?}, E_∞ {einf:?}"));
        }
        Ok("twisted dims (0, 0); E_4 = E_∞ = 0".into())
    }

    fn triple(&self) -> Outcome {
        triple_check(self.seed).map_err(|e| e.to_string()).and_then(|r| r)
    }

    fn indeterminacy(&self) -> Outcome {
        let results: Vec<std::result::Result<(usize, usize), String>> = self
            .bundled
            .par_iter()
            .map(|c| {
                indeterminacy_samples(c, self.seed)
                    .map_err(|e| format!("{}: {e}", c.label))
                    .and_then(|r| r)
            })
            .collect();
        let mut samples = 0;
        let mut nontrivial = 0;
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok((a, b)) => {
                    samples += a;
                    nontrivial += b;
                }
                Err(e) => failures.push(e),
            }
        }
        if failures.is_empty() && nontrivial == 0 {
            failures.push("no sample had a nonzero indeterminacy difference".into());
        }
        summarize(
            failures,
            format!("{samples} representative pairs, {nontrivial} with nonzero difference"),
        )
    }

    fn construction_agreement(&self) -> Outcome {
        let failures: Vec<String> = self
            .bundled
            .par_iter()
            .flat_map_iter(|c| match compare_page_constructions(&c.ss) {
                Ok(list) => list.into_iter().map(|m| format!("{}: {m}", c.label)).collect(),
                Err(e) => vec![format!("{}: {e}", c.label)],
            })
            .collect();
        summarize(
            failures,
            format!("{} bundled cases, all pages and cells", self.bundled.len()),
        )
    }
}

fn summarize(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok)
    } else {
        let n = failures.len();
        let mut shown: Vec<String> = failures.into_iter().take(3).collect();
        if n > 3 {
            shown.push(format!("… {} more", n - 3));
        }
        Err(shown.join("; "))
    }
}

/// `E_1 = Ω`, `E_2 = H_dR` with equal canonical representatives, the
/// odd-q relative groups vanish, and `E_r^{p,q} = E_r^{p,q+2}`.
pub fn page_identification_failures(ss: &SpectralSequence) -> Result<Vec<String>> {
    let m = ss.model();
    let mut f = Vec::new();
    let e1 = ss.page(1)?;
    let e2 = ss.page(2)?;
    for p in 0..=m.top_degree() {
        if e1.dim(p, 0) != m.dim(p) {
            f.push(format!(
                "dim E_1^{{{p},0}} = {} ≠ dim Ω^{p} = {}",
                e1.dim(p, 0),
                m.dim(p)
            ));
        }
        let h = m.de_rham(p)?;
        let cell = &e2.cell(p).quotient;
        if cell.ambient() != h.ambient() || cell.sub() != h.sub() || cell.representatives() != h.representatives() {
            f.push(format!("E_2^{{{p},0}} differs from H^{p}"));
        }
        let odd = indet::relative_cohomology(ss.operator(), p, p + 1, indet::Parity::of(p).flip())?;
        if odd.dim() != 0 {
            f.push(format!("H_D(K_{p}/K_{}) is nonzero in the odd-q parity", p + 1));
        }
        for r in 2..=ss.stable_index() {
            let page = ss.page(r)?;
            if page.dim(p, 1) != 0
                || page.dim(p, -1) != 0
                || page.dim(p, 0) != page.dim(p, 2)
                || page.dim(p, 0) != page.dim(p, -2)
            {
                f.push(format!("q-periodicity fails at r = {r}, p = {p}"));
            }
        }
    }
    Ok(f)
}

/// Compares the zig-zag `d_3` with `[x] ↦ [H_3∧x]` on every basis class of
/// `E_3`. Returns the number of classes checked and the mismatches.
pub fn d3_law_failures(ss: &SpectralSequence) -> Result<(usize, Vec<String>)> {
    let m = ss.model();
    if ss.stable_index() < 3 {
        return Ok((0, Vec::new()));
    }
    let page = ss.page(3)?;
    let h3 = ss.twist().part_form(3);
    let mut checked = 0;
    let mut failures = Vec::new();
    for p in (0..=m.top_degree()).take_while(|p| p + 3 <= m.top_degree()) {
        for idx in 0..page.dim(p, 0) {
            let x = Form::homogeneous(p, page.cell(p).quotient.representative(idx).to_vec());
            let cup = m.wedge(&h3, &x)?;
            let v = cup.part_or_zero(p + 3, m.dim(p + 3));
            let expected = ss.class_of(p + 3, &v, 3)?;
            let zig = page.differential_matrix(p).column(idx);
            if zig != expected {
                failures.push(format!("p = {p}, class {idx}: zig-zag {zig:?}, cup {expected:?}"));
            }
            checked += 1;
        }
    }
    Ok((checked, failures))
}

fn triple_check(seed: u64) -> Result<std::result::Result<String, String>> {
    let m = bundled_model("heisenberg")?;
    let a = m.parse_form("a")?;
    let b = m.parse_form("b")?;
    let tp = massey::triple_product(&m, &a, &b, &b)?;
    let expected = m.de_rham(2)?.project(&m.parse_form("c^b")?.part_or_zero(2, m.dim(2)))?;
    if tp.class != expected || is_zero_vec(&tp.class) {
        return Ok(Err(format!(
            "⟨a,b,b⟩ = {:?}, expected [c∧b] = {expected:?} ≠ 0",
            tp.class
        )));
    }
    let indeterminacy = massey::triple_indeterminacy(&m, &a, &b, &b)?;
    let closed1 = m.cocycles(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0;
    for _ in 0..24 {
        let mut pick = || -> Form {
            let mut v = linalg::zeros(m.dim(1));
            for basis in closed1.basis() {
                let k: i64 = rng.gen_range(-3..=3);
                linalg::axpy(&mut v, &int(k), basis);
            }
            Form::homogeneous(1, v)
        };
        let (c1, c2) = (pick(), pick());
        let shifted = massey::shifted_triple(&m, &a, &b, &b, &tp, &c1, &c2)?;
        let diff: Vec<Scalar> = shifted.class.iter().zip(&tp.class).map(|(x, y)| x - y).collect();
        if !indeterminacy.contains(&diff) {
            return Ok(Err(format!(
                "shifted class {:?} leaves the indeterminacy",
                shifted.class
            )));
        }
        samples += 1;
    }
    Ok(Ok(format!(
        "⟨a,b,b⟩ = [c∧b] ≠ 0; {samples} shifts stay in a {}-dimensional indeterminacy",
        indeterminacy.dim()
    )))
}

/// Returns `(samples, samples with a nonzero difference)`.
fn indeterminacy_samples(c: &Case, seed: u64) -> Result<std::result::Result<(usize, usize), String>> {
    let m = &c.model;
    let op = c.ss.operator();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m.total_dim() as u64);
    let mut samples = 0;
    let mut nontrivial = 0;
    for r in 3..=c.ss.stable_index() {
        let page = c.ss.page(r)?;
        for p in 0..=m.top_degree() {
            let cell = page.cell(p);
            if cell.dim() == 0 {
                continue;
            }
            let sub = indet::indeterminacy_subgroup(op, p, 0, r)?;
            for idx in 0..cell.dim() {
                let x = cell.quotient.representative(idx).to_vec();
                // A second representative: add a random element of B_r.
                let mut b = linalg::zeros(m.dim(p));
                let mut basis: Vec<&Vec<Scalar>> = cell.boundaries.basis().iter().collect();
                basis.shuffle(&mut rng);
                for v in basis {
                    linalg::axpy(&mut b, &int(rng.gen_range(-2..=2)), v);
                }
                let mut y = x.clone();
                linalg::axpy(&mut y, &linalg::one(), &b);
                samples += 1;
                if !sub.contains(&b) {
                    return Ok(Err(format!(
                        "r = {r}, p = {p}: representative difference outside the subgroup"
                    )));
                }
                let h = m.de_rham(p)?;
                if !is_zero_vec(&h.project(&b)?) {
                    nontrivial += 1;
                }
                if p + r > m.top_degree() || r % 2 == 0 {
                    continue;
                }
                let (vx, _) = c.ss.differential_of_form(r, &Form::homogeneous(p, x.clone()))?;
                let (vy, _) = c.ss.differential_of_form(r, &Form::homogeneous(p, y))?;
                let mut values = vec![vy];
                let z =
                    c.ss.lift_zigzag(&Form::homogeneous(p, x), r)?
                        .expect("page class lifts");
                if let Some((_, w)) = perturb_zigzag(&c.ss, &z) {
                    values.push(c.ss.leading_image(&w, r));
                }
                let target = if r >= 5 {
                    indet::differential_indeterminacy(op, p, 0, (r - 3) / 2)?
                } else {
                    indet::indeterminacy_subgroup(op, p + r, 0, r)?
                };
                for v in values {
                    let d: Vec<Scalar> = v.iter().zip(&vx).map(|(a, b)| a - b).collect();
                    samples += 1;
                    if !target.contains(&d) {
                        return Ok(Err(format!(
                            "r = {r}, p = {p}: d_r values differ outside the indeterminacy"
                        )));
                    }
                    let hd = m.de_rham(p + r)?;
                    if !is_zero_vec(&hd.project(&d)?) {
                        nontrivial += 1;
                    }
                }
            }
        }
    }
    Ok(Ok((samples, nontrivial)))
}

/// Runs the whole suite with the default configuration.
pub fn run_default() -> Result<Vec<CriterionResult>> {
    Ok(Suite::new(&SuiteConfig::default())?.run())
}
