//! The `analyze` command: the full pipeline on one model and twist.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use twistss_core::acceptance::{d3_law_failures, page_identification_failures};
use twistss_core::indet::{compare_page_constructions, indeterminacy_subgroup};
use twistss_core::linalg::is_zero_vec;
use twistss_core::massey::{remark_compatibility, verify_main_theorems, MainTheoremReport};
use twistss_core::twist::ParityComplex;
use twistss_core::{twisted_cohomology, CdgaModel, Form, Result, SpectralPage, SpectralSequence, TwistForm};

use crate::{Status, Verdict, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelInfo {
    pub name: String,
    pub top_degree: usize,
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityDims {
    pub even: usize,
    pub odd: usize,
}

impl From<(usize, usize)> for ParityDims {
    fn from((even, odd): (usize, usize)) -> Self {
        ParityDims { even, odd }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageReport {
    pub r: usize,
    /// `dim E_r^{p,0}` for `p = 0..=n`; odd-q cells vanish and `q` is 2-periodic.
    pub dims: Vec<usize>,
    /// Rank of `d_r` out of each `E_r^{p,0}`.
    pub differential_ranks: Vec<usize>,
    pub totals: ParityDims,
}

impl PageReport {
    fn from_page(page: &SpectralPage) -> Self {
        let n = page.top_degree();
        PageReport {
            r: page.r,
            dims: page.dims(),
            differential_ranks: (0..=n).map(|p| page.differential_rank(p)).collect(),
            totals: page.parity_totals().into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndeterminacyRow {
    pub r: usize,
    /// Dimension of the indeterminacy subgroup of `H^p` for `p = 0..=n`.
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub model: ModelInfo,
    pub twist: String,
    pub de_rham_dims: Vec<usize>,
    pub twisted_dims: ParityDims,
    pub stable_page: usize,
    pub pages: Vec<PageReport>,
    pub e_infinity: PageReport,
    pub verdicts: Vec<Verdict>,
    pub indeterminacy: Vec<IndeterminacyRow>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn exit_code(&self) -> i32 {
        crate::exit_code(&self.verdicts)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "model {} (n = {}), twist H = {}",
            self.model.name, self.model.top_degree, self.twist
        );
        let _ = writeln!(s, "dim Ω^p      {}", row(&self.model.dims));
        let _ = writeln!(s, "dim H^p      {}", row(&self.de_rham_dims));
        let _ = writeln!(
            s,
            "twisted      H^even = {}, H^odd = {}",
            self.twisted_dims.even, self.twisted_dims.odd
        );
        let _ = writeln!(
            s,
            "\npages (dim E_r^{{p,0}} / rank d_r), stable from E_{}",
            self.stable_page
        );
        let named = self.pages.iter().map(|p| (format!("E_{}", p.r), p));
        for (name, page) in named.chain(std::iter::once(("E_∞".to_string(), &self.e_infinity))) {
            let cells: Vec<String> = page
                .dims
                .iter()
                .zip(&page.differential_ranks)
                .map(|(d, k)| if *k == 0 { format!("{d}") } else { format!("{d}/{k}") })
                .collect();
            let _ = writeln!(
                s,
                "  {name:<5} [{}]  even {} odd {}",
                cells.join(" "),
                page.totals.even,
                page.totals.odd
            );
        }
        if !self.indeterminacy.is_empty() {
            let _ = writeln!(s, "\nindeterminacy subgroup dims in H^p");
            for r in &self.indeterminacy {
                let _ = writeln!(s, "  r = {:<3} {}", r.r, row(&r.dims));
            }
        }
        let _ = writeln!(s, "\nverdicts");
        for v in &self.verdicts {
            let _ = writeln!(s, "  [{:<4}] {}: {}", v.status.label(), v.check, v.detail);
        }
        s
    }
}

fn row(v: &[usize]) -> String {
    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn from_failures(check: &str, ok: String, failures: Result<Vec<String>>) -> Verdict {
    match failures {
        Ok(f) if f.is_empty() => Verdict::new(check, Status::Pass, ok),
        Ok(f) => Verdict::new(check, Status::Fail, f.join("; ")),
        Err(e) => Verdict::new(check, Status::Fail, e.to_string()),
    }
}

/// Runs the pipeline. Pages are listed up to `max_page` (capped at the
/// stable index), and the main-theorem checks cover `2t+3 ≤ max_page`.
pub fn analyze(model: &CdgaModel, twist: &TwistForm, max_page: Option<usize>) -> Result<AnalysisReport> {
    let ss = SpectralSequence::new(model, twist);
    let n = model.top_degree();
    let stable = ss.stable_index();
    let last = max_page.unwrap_or(stable).clamp(1, stable);
    let tc = twisted_cohomology(model, twist)?;

    let pages = (1..=last)
        .map(|r| ss.page(r).map(PageReport::from_page))
        .collect::<Result<Vec<_>>>()?;
    let e_inf = ss.e_infinity();

    let mut verdicts = Vec::new();
    verdicts.push(from_failures(
        "structure",
        "D² = 0 and d_r∘d_r = 0 on every page".into(),
        ParityComplex::new(ss.operator()).and_then(|_| ss.check_page_structure()),
    ));
    verdicts.push(from_failures(
        "page identifications",
        "E_1 = Ω, E_2 = H_dR, odd q vanishes".into(),
        page_identification_failures(&ss),
    ));
    verdicts.push(from_failures(
        "d_2k = 0",
        format!("E_2k = E_2k+1 for all 2k ≤ {stable}"),
        ss.check_even_vanishing().map(|r| r.failures),
    ));
    verdicts.push(match d3_law_failures(&ss) {
        Ok((0, _)) => Verdict::new("d_3 = H_3∧", Status::NotApplicable, "no E_3 class with target in range"),
        Ok((k, f)) if f.is_empty() => Verdict::new("d_3 = H_3∧", Status::Pass, format!("{k} classes")),
        Ok((_, f)) => Verdict::new("d_3 = H_3∧", Status::Fail, f.join("; ")),
        Err(e) => Verdict::new("d_3 = H_3∧", Status::Fail, e.to_string()),
    });
    let (main, case) = main_theorem_verdicts(&ss, last);
    verdicts.push(main);
    verdicts.push(case);
    verdicts.push(remark_verdict(&ss, last));
    let totals = e_inf.parity_totals();
    verdicts.push(Verdict::new(
        "convergence",
        Status::from_bool(totals == tc.dims()),
        format!("E_∞ {totals:?}, twisted {:?}", tc.dims()),
    ));
    verdicts.push(from_failures(
        "page constructions",
        "zig-zag and exact-couple pages agree".into(),
        compare_page_constructions(&ss),
    ));

    let mut indeterminacy = Vec::new();
    for r in 2..=last {
        let dims = (0..=n)
            .map(|p| indeterminacy_subgroup(ss.operator(), p, 0, r).map(|s| s.dim()))
            .collect::<Result<Vec<_>>>()?;
        indeterminacy.push(IndeterminacyRow { r, dims });
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        model: ModelInfo {
            name: model.name().to_string(),
            top_degree: n,
            dims: model.dims(),
        },
        twist: twist.describe(model),
        de_rham_dims: model.de_rham_dims(),
        twisted_dims: tc.dims().into(),
        stable_page: stable,
        pages,
        e_infinity: PageReport::from_page(e_inf),
        verdicts,
        indeterminacy,
    })
}

fn main_theorem_verdicts(ss: &SpectralSequence, last: usize) -> (Verdict, Verdict) {
    let mut reports: Vec<MainTheoremReport> = Vec::new();
    for t in (1..).take_while(|t| 2 * t + 3 <= last) {
        match verify_main_theorems(ss, t) {
            Ok(r) => reports.push(r),
            Err(e) => {
                let v = Verdict::new("d_2t+3 = (−1)^t [c(A)]", Status::Fail, format!("t = {t}: {e}"));
                return (v.clone(), Verdict::new("case table", Status::Fail, v.detail));
            }
        }
    }
    let classes: usize = reports.iter().map(|r| r.classes_checked()).sum();
    let main = if classes == 0 {
        Verdict::new(
            "d_2t+3 = (−1)^t [c(A)]",
            Status::NotApplicable,
            "no page class with target in range",
        )
    } else {
        let bad: Vec<String> = reports
            .iter()
            .filter(|r| !r.thm41.iter().all(|c| c.agrees) || !r.perturbation.iter().all(|c| c.agrees))
            .map(|r| format!("t = {}", r.t))
            .collect();
        let perturbed = reports
            .iter()
            .flat_map(|r| &r.perturbation)
            .filter(|c| c.perturbed_degree.is_some())
            .count();
        if bad.is_empty() {
            Verdict::new(
                "d_2t+3 = (−1)^t [c(A)]",
                Status::Pass,
                format!("{classes} classes, {perturbed} perturbed defining systems"),
            )
        } else {
            Verdict::new(
                "d_2t+3 = (−1)^t [c(A)]",
                Status::Fail,
                format!("mismatch at {}", bad.join(", ")),
            )
        }
    };
    let case = match ss.twist().single_component() {
        None => Verdict::new(
            "case table",
            Status::NotApplicable,
            "the twist is not a single component H_{2s+1}",
        ),
        Some(s) => {
            let checks: Vec<_> = reports
                .iter()
                .flat_map(|r| r.case_table.iter().flatten().map(move |c| (r.t, c)))
                .collect();
            if checks.is_empty() {
                Verdict::new(
                    "case table",
                    Status::NotApplicable,
                    format!("H = H_{} but no class in range", 2 * s + 1),
                )
            } else if let Some((t, c)) = checks.iter().find(|(_, c)| !c.agrees) {
                Verdict::new(
                    "case table",
                    Status::Fail,
                    format!("t = {t}, p = {}: {}", c.p, c.detail.clone().unwrap_or_default()),
                )
            } else {
                Verdict::new(
                    "case table",
                    Status::Pass,
                    format!("H = H_{}, {} classes", 2 * s + 1, checks.len()),
                )
            }
        }
    };
    (main, case)
}

fn remark_verdict(ss: &SpectralSequence, last: usize) -> Verdict {
    const CHECK: &str = "H_5 routes agree on d_9";
    if ss.twist().single_component() != Some(2) || last < 9 {
        return Verdict::new(CHECK, Status::NotApplicable, "needs H = H_5 alone and page 9");
    }
    let run = || -> Result<(usize, usize)> {
        let page = ss.page(9)?;
        let mut compared = 0;
        let mut nonzero = 0;
        for p in (0..=ss.top_degree()).take_while(|p| p + 9 <= ss.top_degree()) {
            for idx in 0..page.dim(p, 0) {
                let x = Form::homogeneous(p, page.cell(p).quotient.representative(idx).to_vec());
                let (a, b) = remark_compatibility(ss, &x)?;
                if a != b || a != page.differential_matrix(p).column(idx) {
                    return Ok((compared, usize::MAX));
                }
                compared += 1;
                if !is_zero_vec(&a) {
                    nonzero += 1;
                }
            }
        }
        Ok((compared, nonzero))
    };
    match run() {
        Ok((0, _)) => Verdict::new(CHECK, Status::NotApplicable, "E_9 has no class with target in range"),
        Ok((k, usize::MAX)) => Verdict::new(CHECK, Status::Fail, format!("routes disagree after {k} classes")),
        Ok((k, nz)) => Verdict::new(CHECK, Status::Pass, format!("{k} classes, {nz} with d_9 ≠ 0")),
        Err(e) => Verdict::new(CHECK, Status::Fail, e.to_string()),
    }
}
