use proptest::prelude::*;

use twistss_core::library::random_case;
use twistss_core::linalg::int;
use twistss_core::twist::{from_form, ParityComplex, TwistedDifferential};
use twistss_core::{twisted_cohomology, Form, SpectralSequence};

fn random_even_form(model: &twistss_core::CdgaModel, coeffs: &[i64]) -> Form {
    let mut beta = Form::zero();
    let mut k = 0;
    for deg in (2..=model.top_degree()).step_by(2) {
        let v: Vec<_> = (0..model.dim(deg))
            .map(|_| {
                k += 1;
                int(coeffs[k % coeffs.len()])
            })
            .collect();
        beta.add_part(deg, &v);
    }
    beta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_models_square_to_zero(seed in 0u64..10_000) {
        let case = random_case(seed).unwrap();
        let op = TwistedDifferential::new(&case.model, &case.twist);
        prop_assert!(ParityComplex::new(&op).is_ok());
    }

    #[test]
    fn euler_characteristic_survives_the_twist(seed in 0u64..10_000) {
        let case = random_case(seed).unwrap();
        let (even, odd) = twisted_cohomology(&case.model, &case.twist).unwrap().dims();
        prop_assert_eq!(even as i64 - odd as i64, case.model.euler_characteristic());
    }

    #[test]
    fn spectral_sequence_converges(seed in 0u64..10_000) {
        let case = random_case(seed).unwrap();
        let ss = SpectralSequence::new(&case.model, &case.twist);
        let tc = twisted_cohomology(&case.model, &case.twist).unwrap();
        prop_assert_eq!(ss.e_infinity().parity_totals(), tc.dims());
    }

    #[test]
    fn cohomologous_twists_have_equal_cohomology(seed in 0u64..10_000, coeffs in proptest::collection::vec(-2i64..=2, 1..6)) {
        let case = random_case(seed).unwrap();
        let beta = random_even_form(&case.model, &coeffs);
        let d_beta = case.model.d(&beta).unwrap();
        let shifted = from_form(&case.model, &(&case.twist.as_form() + &d_beta.filter_degrees(|k| k >= 3))).unwrap();
        let a = twisted_cohomology(&case.model, &case.twist).unwrap().dims();
        let b = twisted_cohomology(&case.model, &shifted).unwrap().dims();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pages_shrink(seed in 0u64..10_000) {
        let case = random_case(seed).unwrap();
        let ss = SpectralSequence::new(&case.model, &case.twist);
        let mut prev: Option<Vec<usize>> = None;
        for r in 2..=ss.stable_index() {
            let dims = ss.page(r).unwrap().dims();
            if let Some(prev) = &prev {
                prop_assert!(dims.iter().zip(prev).all(|(a, b)| a <= b));
            }
            prev = Some(dims);
        }
    }
}
