use g2flow::exterior::blades_of_degree;
use g2flow::g2::{metric_from_phi, standard_phi, standard_psi};
use g2flow::leviciv::{koszul, koszul_ricci};
use g2flow::linalg::determinant;
use g2flow::{q, FrameAlgebra, G2Data, KForm, Metric, Rational, Scalar};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn form(k: usize) -> impl Strategy<Value = KForm<Rational>> {
    let blades = blades_of_degree(k);
    proptest::collection::vec((0..blades.len(), coeff()), 1..5).prop_map(move |terms| {
        terms.into_iter().fold(KForm::zero(k), |f, (i, c)| {
            f + KForm::from_blades(k, [(blades[i], c)])
        })
    })
}

/// Lower-triangular change of coframe with positive diagonal.
fn coframe_change() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(coeff(), 49).prop_map(|c| {
        (0..7)
            .map(|i| {
                (0..7)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Equal => {
                            q(1, 1) + c[7 * i + j].clone() * c[7 * i + j].clone()
                        }
                        std::cmp::Ordering::Greater if (i + j) % 3 == 0 => c[7 * i + j].clone(),
                        _ => q(0, 1),
                    })
                    .collect()
            })
            .collect()
    })
}

fn frame() -> impl Strategy<Value = FrameAlgebra> {
    let frames = FrameAlgebra::registered();
    (0..frames.len()).prop_map(move |i| frames[i].clone())
}

#[test]
fn standard_structure_induces_the_euclidean_metric() {
    let m = metric_from_phi(&standard_phi::<Rational>()).unwrap();
    assert_eq!(m.g(), Metric::<Rational>::identity().g());
    assert_eq!(m.hodge(&standard_phi()), standard_psi());
}

#[test]
fn non_g2_forms_are_rejected() {
    let degenerate = KForm::<Rational>::term(q(1, 1), &[1, 2, 3]);
    assert!(metric_from_phi(&degenerate).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_obeys_the_graded_leibniz_rule(fr in frame(), a in form(2), b in form(3)) {
        let lhs = fr.ext_d(&a.wedge(&b));
        let rhs = fr.ext_d(&a).wedge(&b) + a.wedge(&fr.ext_d(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hodge_pairs_with_the_inner_product(p in coframe_change(), a in form(3), b in form(3)) {
        prop_assume!(determinant(p.clone()).is_positive());
        let m = metric_from_phi(&standard_phi::<Rational>().pullback(&p)).unwrap();
        let lhs = a.wedge(&m.hodge(&b));
        let rhs = m.vol().scale(&m.inner(&a, &b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pulled_back_structures_keep_the_psi_identity(p in coframe_change()) {
        prop_assume!(determinant(p.clone()).is_positive());
        let phi = standard_phi::<Rational>().pullback(&p);
        let m = metric_from_phi(&phi).unwrap();
        let vol = m.vol();
        prop_assert_eq!(phi.wedge(&m.hodge(&phi)), vol.scale(&q(7, 1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The torsion read off the Levi-Civita connection agrees with the one
    /// assembled from the torsion forms, and both Ricci routes coincide.
    #[test]
    fn torsion_and_ricci_agree_across_routes(fr in frame(), p in coframe_change()) {
        prop_assume!(determinant(p.clone()).is_positive());
        let g = G2Data::new(fr, standard_phi::<Rational>().pullback(&p)).unwrap();
        let conn = koszul(g.frame(), g.metric());
        prop_assert_eq!(&g.torsion_from_nabla(&conn), g.full_torsion());
        prop_assert_eq!(g.ricci_bryant(), koszul_ricci(g.frame(), g.metric()));
    }

    #[test]
    fn float_backend_tracks_the_exact_one(fr in frame(), p in coframe_change()) {
        prop_assume!(determinant(p.clone()).is_positive());
        let phi = standard_phi::<Rational>().pullback(&p);
        let exact = G2Data::new(fr.clone(), phi.clone()).unwrap();
        let float = G2Data::new(fr, phi.map(|c| c.to_f64())).unwrap();
        let e = exact.ricci_bryant().map(|c| c.to_f64());
        prop_assert!(float.ricci_bryant().approx_eq(&e, 1e-8));
    }
}
