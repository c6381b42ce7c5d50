//! The `massey` command: triple products and the defining systems behind
//! `d_{2t+3}`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use twistss_core::linalg::{format_scalar, is_zero_vec, Scalar};
use twistss_core::massey::{
    build_system_thm41, build_system_thm42, massey_length, triple_indeterminacy, triple_product, triple_system,
    validate_defining_system, DefiningSystem,
};
use twistss_core::spectral::homogeneous_degree;
use twistss_core::{CdgaModel, Error, Form, Result, SpectralSequence, TwistForm};

use crate::{Status, Verdict, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MasseyRequest {
    Triple([String; 3]),
    Thm41 { class: String, t: usize },
    Thm42 { class: String, t: usize, s: usize },
}

impl MasseyRequest {
    fn describe(&self) -> String {
        match self {
            MasseyRequest::Triple([a, b, c]) => format!("⟨{a}, {b}, {c}⟩"),
            MasseyRequest::Thm41 { class, t } => format!("⟨H_3, …, H_3, {class}⟩ band system, t = {t}"),
            MasseyRequest::Thm42 { class, t, s } => {
                format!(
                    "⟨H_{}, …, H_{}, {class}⟩ system, t = {t}, s = {s}",
                    2 * s + 1,
                    2 * s + 1
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasseyReport {
    pub schema_version: u32,
    pub model: String,
    pub twist: String,
    pub request: String,
    /// Defining-system entries in matrix layout; `*` marks the omitted corner.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cocycle_degree: Option<usize>,
    /// The related cocycle `c(A)`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cocycle: Option<String>,
    /// Canonical representative of the specific element's class.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub specific_element: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class_coordinates: Option<Vec<String>>,
    /// Canonical representative of the zig-zag `d_r` class, for comparison.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zigzag_differential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub indeterminacy_dim: Option<usize>,
    pub verdict: Verdict,
}

impl MasseyReport {
    fn new(model: &CdgaModel, twist: &TwistForm, request: &MasseyRequest, verdict: Verdict) -> Self {
        MasseyReport {
            schema_version: SCHEMA_VERSION,
            model: model.name().to_string(),
            twist: twist.describe(model),
            request: request.describe(),
            system: None,
            cocycle_degree: None,
            cocycle: None,
            specific_element: None,
            class_coordinates: None,
            zigzag_differential: None,
            indeterminacy_dim: None,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model {}, twist H = {}", self.model, self.twist);
        let _ = writeln!(s, "{}", self.request);
        if let Some(rows) = &self.system {
            let width = rows
                .iter()
                .flatten()
                .map(|e| e.chars().count())
                .max()
                .unwrap_or(1)
                .max(1);
            let _ = writeln!(s, "defining system:");
            for row in rows {
                let cells: Vec<String> = row.iter().map(|e| format!("{e:>width$}")).collect();
                let _ = writeln!(s, "  ( {} )", cells.join("  "));
            }
        }
        if let (Some(deg), Some(c)) = (self.cocycle_degree, &self.cocycle) {
            let _ = writeln!(s, "c(A) = {c}   (degree {deg})");
        }
        if let Some(e) = &self.specific_element {
            let _ = writeln!(s, "specific element: [{e}]");
        }
        if let Some(z) = &self.zigzag_differential {
            let _ = writeln!(s, "zig-zag d_r:      [{z}]");
        }
        if let Some(d) = self.indeterminacy_dim {
            let _ = writeln!(s, "indeterminacy dimension: {d}");
        }
        let _ = writeln!(
            s,
            "[{}] {}: {}",
            self.verdict.status.label(),
            self.verdict.check,
            self.verdict.detail
        );
        s
    }

    pub fn exit_code(&self) -> i32 {
        crate::exit_code(std::slice::from_ref(&self.verdict))
    }
}

fn parse_homogeneous(model: &CdgaModel, expr: &str) -> Result<(usize, Form)> {
    let f = model.parse_form(expr)?;
    let deg = homogeneous_degree(&f)?.ok_or_else(|| Error::Expr {
        expr: expr.to_string(),
        reason: "the class is zero".into(),
    })?;
    Ok((deg, f))
}

fn coords(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

pub fn run(model: &CdgaModel, twist: &TwistForm, request: &MasseyRequest) -> Result<MasseyReport> {
    match request {
        MasseyRequest::Triple(labels) => triple(model, twist, request, labels),
        MasseyRequest::Thm41 { class, t } => {
            let ss = SpectralSequence::new(model, twist);
            let (p, x) = parse_homogeneous(model, class)?;
            let (a, _) = build_system_thm41(&ss, &x, *t)?;
            let sign = if t % 2 == 1 { "−" } else { "+" };
            compare(
                &ss,
                request,
                p,
                &x,
                *t,
                a,
                &format!("d_{} = {sign}[c(A)]", 2 * t + 3),
                t % 2 == 1,
            )
        }
        MasseyRequest::Thm42 { class, t, s } => {
            let ss = SpectralSequence::new(model, twist);
            let (p, x) = parse_homogeneous(model, class)?;
            let Some(l) = massey_length(*t, *s) else {
                return Ok(MasseyReport::new(
                    model,
                    twist,
                    request,
                    Verdict::new(
                        "case t = ls − 1",
                        Status::NotApplicable,
                        format!("t = {t} is not of the form l·{s} − 1 with l ≥ 2"),
                    ),
                ));
            };
            let b = build_system_thm42(&ss, &x, *t, *s)?;
            let sign = if l % 2 == 0 { "−" } else { "+" };
            compare(
                &ss,
                request,
                p,
                &x,
                *t,
                b,
                &format!("d_{} = {sign}[c(B)], l = {l}", 2 * t + 3),
                l % 2 == 0,
            )
        }
    }
}

fn triple(model: &CdgaModel, twist: &TwistForm, request: &MasseyRequest, labels: &[String; 3]) -> Result<MasseyReport> {
    let parsed = labels
        .iter()
        .map(|l| parse_homogeneous(model, l))
        .collect::<Result<Vec<_>>>()?;
    let [x1, x2, x3] = [&parsed[0].1, &parsed[1].1, &parsed[2].1];
    let tp = triple_product(model, x1, x2, x3)?;
    let sys = triple_system([x1, x2, x3], [parsed[0].0, parsed[1].0, parsed[2].0], &tp);
    let h = model.de_rham(tp.degree)?;
    let rep = Form::homogeneous(tp.degree, h.lift(&tp.class));
    let indeterminacy = triple_indeterminacy(model, x1, x2, x3)?;
    let nonzero = !is_zero_vec(&tp.class);
    let detail = match (nonzero, indeterminacy.contains(&tp.class)) {
        (true, false) => "nonzero, outside the indeterminacy",
        (true, true) => "nonzero class, but inside the indeterminacy",
        (false, _) => "the specific element is zero",
    };
    let mut report = MasseyReport::new(
        model,
        twist,
        request,
        Verdict::new("triple product", Status::Pass, detail),
    );
    report.system = Some(sys.layout(model));
    report.cocycle_degree = Some(tp.degree);
    report.cocycle = Some(model.format_form(&tp.omega));
    report.specific_element = Some(model.format_form(&rep));
    report.class_coordinates = Some(coords(&tp.class));
    report.indeterminacy_dim = Some(indeterminacy.dim());
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn compare(
    ss: &SpectralSequence,
    request: &MasseyRequest,
    p: usize,
    x: &Form,
    t: usize,
    a: DefiningSystem,
    check: &str,
    negate: bool,
) -> Result<MasseyReport> {
    let model = ss.model();
    let r = 2 * t + 3;
    let target = p + r;
    let c = validate_defining_system(model, &a)?;
    let (_, zig) = ss.differential_of_form(r, x)?;
    let mut report = MasseyReport::new(model, ss.twist(), request, Verdict::new(check, Status::Pass, ""));
    report.system = Some(a.layout(model));
    report.cocycle_degree = Some(c.degree);
    report.cocycle = Some(model.format_form(&c.form));
    if target > model.top_degree() {
        report.specific_element = Some("0".into());
        report.zigzag_differential = Some("0".into());
        report.verdict.detail = format!("target degree {target} exceeds the top degree; both sides vanish");
        return Ok(report);
    }
    let page = ss.page(r)?;
    let predicted_form = if negate { -&c.form } else { c.form.clone() };
    let predicted = ss.class_of(target, &predicted_form.part_or_zero(target, model.dim(target)), r)?;
    let cell = &page.cell(target).quotient;
    report.specific_element = Some(model.format_form(&Form::homogeneous(target, cell.lift(&predicted))));
    report.class_coordinates = Some(coords(&predicted));
    report.zigzag_differential = Some(model.format_form(&Form::homogeneous(target, cell.lift(&zig))));
    report.verdict.status = Status::from_bool(predicted == zig);
    report.verdict.detail = if predicted == zig {
        format!("agrees with the zig-zag on E_{r}^{{{target},·}}")
    } else {
        format!("zig-zag {:?} vs predicted {:?}", coords(&zig), coords(&predicted))
    };
    Ok(report)
}
