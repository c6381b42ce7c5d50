use twistss_core::acceptance::{d3_law_failures, page_identification_failures};
use twistss_core::indet::compare_page_constructions;
use twistss_core::massey::triple_product;
use twistss_core::{twisted_cohomology, CdgaModel, Error, SpectralSequence, TwistForm};

const POINT: &str = r#"{ "name": "point", "top_degree": 0, "generators": [] }"#;
const CIRCLE: &str = r#"{ "name": "circle", "top_degree": 1, "generators": [{ "name": "e", "degree": 1 }] }"#;
const SURFACE: &str = r#"{
  "name": "surface",
  "top_degree": 2,
  "basis": [["1"], ["a", "b"], ["ab"]],
  "mult": [{ "left": "a", "right": "b", "result": "ab" }],
  "diff": []
}"#;

fn untwisted_checks(doc: &str, expected: (usize, usize)) {
    let m = CdgaModel::load(doc).unwrap();
    let h = TwistForm::zero();
    assert_eq!(twisted_cohomology(&m, &h).unwrap().dims(), expected);
    let ss = SpectralSequence::new(&m, &h);
    assert_eq!(ss.e_infinity().parity_totals(), expected);
    assert!(ss.check_page_structure().unwrap().is_empty());
    assert!(ss.check_even_vanishing().unwrap().passed());
    assert!(page_identification_failures(&ss).unwrap().is_empty());
    assert!(d3_law_failures(&ss).unwrap().1.is_empty());
    assert!(compare_page_constructions(&ss).unwrap().is_empty());
}

#[test]
fn point_circle_and_surface() {
    untwisted_checks(POINT, (1, 0));
    untwisted_checks(CIRCLE, (1, 1));
    untwisted_checks(SURFACE, (2, 2));
}

#[test]
fn surface_mirrored_product_is_inferred() {
    let m = CdgaModel::load(SURFACE).unwrap();
    let ba = m
        .wedge(&m.parse_form("b").unwrap(), &m.parse_form("a").unwrap())
        .unwrap();
    assert_eq!(ba, -&m.parse_form("ab").unwrap());
}

#[test]
fn degree_zero_triple_is_undefined() {
    let m = CdgaModel::load(POINT).unwrap();
    let one = m.unit();
    assert!(matches!(
        triple_product(&m, &one, &one, &one),
        Err(Error::MasseyUndefined(_))
    ));
}

#[test]
fn pages_beyond_the_stable_index_are_rejected() {
    let m = CdgaModel::load(CIRCLE).unwrap();
    let ss = SpectralSequence::new(&m, &TwistForm::zero());
    assert_eq!(ss.stable_index(), 3);
    assert!(matches!(ss.page(4), Err(Error::OutOfRange { .. })));
    assert!(matches!(ss.page(0), Err(Error::OutOfRange { .. })));
}
