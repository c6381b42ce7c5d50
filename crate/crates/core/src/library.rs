//! Bundled example models and a seeded generator of random Sullivan-style
//! models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cdga::{CdgaModel, Form, GeneratorSpec, ModelDocument};
use crate::error::{Error, Result};
use crate::linalg::{format_scalar, int, Scalar};
use crate::twist::{from_form, TwistForm};

pub const BUNDLED_MODELS: [&str; 8] = [
    "torus3",
    "torus5",
    "heisenberg",
    "su3",
    "massey_s1",
    "massey_s2",
    "massey_s3",
    "mixed",
];

pub fn bundled_document(name: &str) -> Option<&'static str> {
    Some(match name {
        "torus3" => include_str!("../models/torus3.json"),
        "torus5" => include_str!("../models/torus5.json"),
        "heisenberg" => include_str!("../models/heisenberg.json"),
        "su3" => include_str!("../models/su3.json"),
        "massey_s1" => include_str!("../models/massey_s1.json"),
        "massey_s2" => include_str!("../models/massey_s2.json"),
        "massey_s3" => include_str!("../models/massey_s3.json"),
        "mixed" => include_str!("../models/mixed.json"),
        _ => return None,
    })
}

pub fn bundled_model(name: &str) -> Result<CdgaModel> {
    let doc = bundled_document(name).ok_or_else(|| Error::Schema(format!("no bundled model `{name}`")))?;
    CdgaModel::load(doc)
}

/// Twist expressions exercised for each bundled model. The empty string is
/// the untwisted case.
pub fn bundled_twists(name: &str) -> &'static [&'static str] {
    match name {
        "torus3" => &["", "e1^e2^e3"],
        "torus5" => &["", "e1^e2^e3", "e1^e2^e3 + e1^e2^e3^e4^e5", "e3^e4^e5 - 2*e1^e2^e4"],
        "heisenberg" => &["", "a^b^c"],
        "su3" => &["", "x3", "x5", "x3 + x5"],
        "massey_s1" => &["", "a", "x", "a + x"],
        "massey_s2" => &["", "a", "x + a"],
        "massey_s3" => &["", "a"],
        "mixed" => &["a + b", "a", "b", "x + b"],
        _ => &[],
    }
}

/// Bundled `(model, twist expression)` pairs with `H = H_{2s+1}` alone,
/// for each `s`.
pub fn single_component_cases() -> Vec<(&'static str, &'static str, usize)> {
    vec![
        ("su3", "x3", 1),
        ("massey_s1", "a", 1),
        ("torus5", "e1^e2^e3", 1),
        ("su3", "x5", 2),
        ("massey_s2", "a", 2),
        ("mixed", "b", 2),
        ("massey_s3", "a", 3),
    ]
}

/// A random model together with a random closed twist.
#[derive(Clone, Debug)]
pub struct RandomCase {
    pub document: ModelDocument,
    pub model: CdgaModel,
    pub twist: TwistForm,
}

fn combination<R: Rng>(rng: &mut R, labels: &[String], basis: &[Vec<Scalar>]) -> Option<String> {
    let mut terms = Vec::new();
    for v in basis {
        let c: i64 = rng.gen_range(-2..=2);
        if c == 0 {
            continue;
        }
        for (i, x) in v.iter().enumerate() {
            let coeff = x * int(c);
            if coeff != int(0) {
                terms.push((labels[i].clone(), coeff));
            }
        }
    }
    if terms.is_empty() {
        return None;
    }
    Some(
        terms
            .iter()
            .map(|(l, c)| format!("{}*{l}", format_scalar(c)))
            .collect::<Vec<_>>()
            .join(" + ")
            .replace("+ -", "- "),
    )
}

/// Odd generators `g1, g2, …` of degrees 1, 3 or 5 (at most six, so the
/// model has at most 64 basis elements), each with `d g_k` a random closed
/// form in the subalgebra of the earlier generators, and a random closed
/// twist in odd degrees ≥ 3.
pub fn random_case(seed: u64) -> Result<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(3..=6);
    let mut gens: Vec<GeneratorSpec> = Vec::new();
    let mut diffs = std::collections::BTreeMap::new();
    let mut degrees: Vec<usize> = (0..count)
        .map(|_| *[1, 1, 1, 3, 3, 5].choose(&mut rng).unwrap())
        .collect();
    degrees.sort_unstable();
    for (k, &deg) in degrees.iter().enumerate() {
        let name = format!("g{}", k + 1);
        if k > 0 && rng.gen_bool(0.7) {
            let partial = ModelDocument {
                name: "partial".into(),
                top_degree: gens.iter().map(|g| g.degree).sum(),
                generators: Some(gens.clone()),
                differentials: diffs.clone(),
                basis: None,
                mult: None,
                diff: None,
            }
            .build()?;
            let target = deg + 1;
            if target <= partial.top_degree() {
                let closed = partial.cocycles(target);
                if let Some(expr) = combination(&mut rng, partial.labels(target), closed.basis()) {
                    diffs.insert(name.clone(), expr);
                }
            }
        }
        gens.push(GeneratorSpec { name, degree: deg });
    }
    let document = ModelDocument {
        name: format!("random_{seed}"),
        top_degree: degrees.iter().sum(),
        generators: Some(gens),
        differentials: diffs,
        basis: None,
        mult: None,
        diff: None,
    };
    let model = document.build()?;
    let mut h = Form::zero();
    for deg in (3..=model.top_degree()).step_by(2) {
        if rng.gen_bool(0.5) {
            continue;
        }
        for v in model.cocycles(deg).basis() {
            let c: i64 = rng.gen_range(-1..=1);
            if c != 0 {
                h = &h + &Form::homogeneous(deg, v.iter().map(|x| x * int(c)).collect());
            }
        }
    }
    let twist = from_form(&model, &h)?;
    Ok(RandomCase { document, model, twist })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_models_load() {
        for name in BUNDLED_MODELS {
            let m = bundled_model(name).unwrap();
            assert_eq!(m.name(), name);
            for t in bundled_twists(name) {
                crate::twist::parse_twist(&m, t).unwrap();
            }
        }
        assert!(bundled_model("nope").is_err());
    }

    #[test]
    fn single_component_cases_are_single() {
        for (name, twist, s) in single_component_cases() {
            let m = bundled_model(name).unwrap();
            let h = crate::twist::parse_twist(&m, twist).unwrap();
            assert_eq!(h.single_component(), Some(s), "{name} {twist}");
        }
    }

    #[test]
    fn random_cases_are_deterministic_and_small() {
        for seed in 0..10 {
            let a = random_case(seed).unwrap();
            let b = random_case(seed).unwrap();
            assert_eq!(a.document, b.document);
            assert_eq!(a.twist, b.twist);
            assert!(a.model.total_dim() <= 64);
        }
    }
}
