//! Property tests for the algebraic and structural invariants.

mod common;

use std::sync::Arc;

use num_rational::BigRational;
use orbicat::atlas::{
    common_span, find_conjugator, induced_homomorphism, overlap_transport, restrict_chart, span_commutes, validate_chart,
    Atlas,
};
use orbicat::functor::{build_translation_groupoid, triple_of_arrow};
use orbicat::groupoid::{check_groupoid_axioms, isotropy_arrows, local_bisection, GroupoidPresentation, Unit};
use orbicat::io::{cone_pair, gallery, standard_gallery, GalleryParams};
use orbicat::morita::{
    check_morita, pushforward_atlas, reconstruct_atlas, reconstruction_morita_morphism, subatlas_inclusion_morphism,
    Relabeling,
};
use orbicat::numerics::{sign_real, AffineMap, CycNum, PointC};
use orbicat::preorb::{check_2cat_laws, hcomp_orb, random_gauge_diagram, validate_orb_nat_trans, vcomp_orb, StandardOps};
use orbicat::sample::Sampler;
use proptest::prelude::*;
use std::sync::OnceLock;

type Fixture = (String, Arc<Atlas>, Arc<GroupoidPresentation>);

fn groupoids() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        standard_gallery()
            .into_iter()
            .map(|(n, a)| {
                let a = Arc::new(a);
                let g = Arc::new(build_translation_groupoid(a.clone()).unwrap());
                (n, a, g)
            })
            .collect()
    })
}

fn cyc(m: u32, coeffs: &[(i64, i64)]) -> CycNum {
    let c: Vec<BigRational> = coeffs.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect();
    CycNum::from_power_coeffs(m, &c)
}

fn element(m: u32) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-9i64..=9, 1i64..=6), m as usize).prop_map(move |c| cyc(m, &c))
}

fn triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    prop::sample::select(common::CONDUCTORS.to_vec()).prop_flat_map(|m| (element(m), element(m), element(m)))
}

/// z ↦ s·z + t in dimension 1 with s = r·ζ^k, r ≠ 0.
fn similarity(m: u32) -> impl Strategy<Value = AffineMap> {
    ((1i64..=5, 1i64..=5), 0..m as i64, element(m)).prop_map(move |((p, q), k, t)| {
        let s = &CycNum::from_ratio(m, p, q) * &CycNum::zeta(m, k);
        AffineMap::scale_translate(&s, &PointC::scalar(t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_laws((a, b, c) in triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, CycNum::zero(a.conductor()));
        if !a.is_zero() {
            prop_assert!((&a * &a.checked_inv().unwrap()).is_one());
        }
        prop_assert_eq!((&a * &b).conj(), a.conj() * b.conj());
    }

    #[test]
    fn evaluation_is_a_ring_map((a, b, _c) in triple()) {
        let mut o = common::Oracle::new();
        let (ea, eb) = (o.eval(&a), o.eval(&b));
        let (eab, es) = (o.eval(&(&a * &b)), o.eval(&(&a + &b)));
        prop_assert!(o.same_value(&eab, &o.mul(&ea, &eb)));
        prop_assert!(o.same_value(&es, &o.add(&ea, &eb)));
    }

    #[test]
    fn sign_matches_the_oracle(seed in any::<u64>(), k in 0usize..7) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = common::random_real(&mut rng, common::CONDUCTORS[k]);
        let s = sign_real(&x).unwrap();
        match common::Oracle::new().sign(&x) {
            Some(o) => prop_assert_eq!(s, o),
            None => prop_assert_eq!(s, 0),
        }
        prop_assert_eq!(sign_real(&(-&x)).unwrap(), -s);
    }

    #[test]
    fn sign_is_multiplicative((a, b, _c) in triple()) {
        let (x, y) = (&a + &a.conj(), &b + &b.conj());
        prop_assert_eq!(sign_real(&(&x * &y)).unwrap(), sign_real(&x).unwrap() * sign_real(&y).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn affine_composition(f in similarity(12), g in similarity(12), h in similarity(12)) {
        prop_assert_eq!(f.compose(&g).unwrap().compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(
            fg.similarity_factor().unwrap(),
            &f.similarity_factor().unwrap() * &g.similarity_factor().unwrap()
        );
        prop_assert!(f.compose(&f.inverse().unwrap()).unwrap().is_identity());
    }
}

#[test]
fn roots_of_unity_have_their_order() {
    for m in [1u32, 2, 3, 4, 6, 8, 12] {
        let z = CycNum::zeta(m, 1);
        assert!(z.pow(m).is_one(), "ζ_{m}^{m}");
        // ζ^k = 1 only at k = m
        assert!((1..m).all(|k| !z.pow(k).is_one()) || m == 1);
    }
}

#[test]
fn embedding_torsors_and_induced_homomorphisms() {
    for (name, a, _) in groupoids() {
        for e in a.embeddings() {
            let (src, dst) = (a.chart(e.src), a.chart(e.dst));
            let orbit: Vec<AffineMap> = dst.group.iter().map(|h| h.compose(&e.map).unwrap()).collect();
            for (k, mu) in orbit.iter().enumerate() {
                assert_eq!(orbit.iter().filter(|x| *x == mu).count(), 1, "{name}: orbit of an embedding has repeats");
                assert_eq!(find_conjugator(dst, &e.map, mu).unwrap(), k);
            }
            let lambda = induced_homomorphism(src, dst, &e.map).unwrap();
            let t = a.table(e.src).unwrap();
            let td = a.table(e.dst).unwrap();
            for g in 0..src.order() {
                for h in 0..src.order() {
                    assert_eq!(lambda[t.mul[g][h]], td.mul[lambda[g]][lambda[h]], "{name}: Λ is not multiplicative");
                }
                assert_eq!(overlap_transport(src, dst, &e.map, lambda[g]).unwrap(), Some(g), "{name}");
            }
            let mut seen = lambda.clone();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), lambda.len(), "{name}: Λ is not injective");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn restricted_charts_validate(seed in any::<u64>(), which in 0usize..8, r in 1i64..8) {
        let (_, a, _) = &groupoids()[which];
        let mut s = Sampler::new(seed);
        let i = s.index(a.n_charts());
        let c = a.chart(i);
        let x = s.point_in_ball(&c.domain);
        let (sub, _) = restrict_chart(c, &x, &BigRational::new(1.into(), r.into()), "sub").unwrap();
        prop_assert!(validate_chart(&sub).is_ok());
        let stab: Vec<AffineMap> = c.stabilizer_indices(&x).unwrap().into_iter().map(|k| c.group[k].clone()).collect();
        prop_assert_eq!(sub.group, stab);
    }

    #[test]
    fn axioms_hold_for_any_seed(seed in any::<u64>(), which in 0usize..8) {
        let (name, _, g) = &groupoids()[which];
        let r = check_groupoid_axioms(g, 20, seed);
        prop_assert!(r.is_ok(), "{}: {}", name, r.render_text());
    }

    #[test]
    fn germs_are_functorial(seed in any::<u64>(), which in 0usize..8) {
        let (_, _, g) = &groupoids()[which];
        let mut s = Sampler::new(seed);
        for _ in 0..20 {
            let a = g.sample_arrow(&mut s);
            let b = g.sample_arrow_from(&g.target(&a).unwrap(), &mut s).unwrap();
            let ab = g.multiply(&a, &b).unwrap();
            let (ga, gb, gab) = (local_bisection(g, &a).unwrap(), local_bisection(g, &b).unwrap(), local_bisection(g, &ab).unwrap());
            prop_assert_eq!(gab.3, gb.3.compose(&ga.3).unwrap());
            let gi = local_bisection(g, &g.inverse_of(&a).unwrap()).unwrap();
            prop_assert_eq!(gi.3, ga.3.inverse().unwrap());
        }
    }

    #[test]
    fn arrow_equality_is_an_equivalence(seed in any::<u64>(), which in 0usize..8) {
        let (_, _, g) = &groupoids()[which];
        let mut s = Sampler::new(seed);
        for _ in 0..40 {
            let a = g.sample_arrow(&mut s);
            prop_assert!(g.arrow_equal(&a, &a).unwrap());
            let x = g.source(&a).unwrap();
            let hom = g.hom(&x, &g.target(&a).unwrap()).unwrap();
            // every representative of a class from x is equal to the one listed
            let class: Vec<_> = hom.iter().filter(|b| g.arrow_equal(&a, b).unwrap()).collect();
            prop_assert_eq!(class.len(), 1);
            let b = class[0];
            prop_assert!(g.arrow_equal(b, &a).unwrap());
            // transitivity through a third representative: a·e ~ a ~ b
            let c = g.multiply(&a, &g.unit_arrow(&g.target(&a).unwrap()).unwrap()).unwrap();
            prop_assert!(g.arrow_equal(&c, &a).unwrap() && g.arrow_equal(&c, b).unwrap());
        }
    }

    #[test]
    fn components_are_locally_trivial(seed in any::<u64>(), which in 0usize..8) {
        let (_, _, g) = &groupoids()[which];
        let mut s = Sampler::new(seed);
        for _ in 0..20 {
            let a = g.sample_arrow(&mut s);
            let c = &g.components[a.comp];
            let other = orbicat::groupoid::Arrow { comp: a.comp, point: s.point_in_ball(&c.param) };
            if other.point != a.point {
                prop_assert!(!g.arrow_equal(&a, &other).unwrap());
            }
            // the source map in component coordinates is the embedding
            let src = g.source(&a).unwrap();
            prop_assert_eq!(src, Unit { comp: c.s.0, point: c.s.1.apply(&a.point).unwrap() });
            let t = triple_of_arrow(g, &a).unwrap();
            prop_assert_eq!(t.left.1.apply(&t.point).unwrap(), g.source(&a).unwrap().point);
        }
    }

    #[test]
    fn spans_commute(seed in any::<u64>(), which in 0usize..8) {
        let (_, atlas, g) = &groupoids()[which];
        let mut s = Sampler::new(seed);
        for _ in 0..20 {
            let a = g.sample_arrow(&mut s);
            let b = g.sample_arrow_from(&g.target(&a).unwrap(), &mut s).unwrap();
            let (ta, tb) = (triple_of_arrow(g, &a).unwrap(), triple_of_arrow(g, &b).unwrap());
            prop_assert_eq!(ta.right.0, tb.left.0);
            let (lam, mu) = (&ta.right.1, &tb.left.1);
            let span = common_span(atlas, ta.k, lam, &ta.point, tb.k, mu, &tb.point, ta.right.0).unwrap();
            prop_assert!(span_commutes(&span, lam, &ta.point, mu, &tb.point).unwrap());
        }
    }

    #[test]
    fn two_cell_compositions_close(seed in any::<u64>(), which in 0usize..8) {
        let (name, a, _) = &groupoids()[which];
        let d = random_gauge_diagram(a, &mut Sampler::new(seed));
        let r = check_2cat_laws(&d, &StandardOps).unwrap();
        prop_assert!(r.is_ok(), "{}: {}", name, r.render_text());
        let sq = d.square.unwrap();
        prop_assert!(validate_orb_nat_trans(&vcomp_orb(&sq.sigma, &sq.delta).unwrap()).is_ok());
        prop_assert!(validate_orb_nat_trans(&hcomp_orb(&sq.eta, &sq.delta).unwrap()).is_ok());
    }

    #[test]
    fn pushforward_keeps_the_groupoid(suffix in "[a-z]{1,4}", which in 0usize..8) {
        let (_, a, g) = &groupoids()[which];
        let phi = Relabeling(a.charts().iter().map(|c| (c.id.clone(), format!("{}-{suffix}", c.id))).collect());
        let b = Arc::new(pushforward_atlas(&phi, a).unwrap());
        prop_assert!(build_translation_groupoid(b).unwrap().same_structure(g));
    }
}

/// |Iso(x)| = |Iso(ψ(x))| at sampled units, for morphisms that pass the Morita check.
fn isotropy_preserved(m: &orbicat::groupoid::GroupoidMorphism, seed: u64) {
    assert!(check_morita(m, 50, seed).verdict);
    let mut s = Sampler::new(seed);
    for _ in 0..50 {
        let x = m.src.sample_unit(&mut s);
        let y = m.apply_unit(&x).unwrap();
        assert_eq!(
            isotropy_arrows(&m.src, &x).unwrap().len(),
            isotropy_arrows(&m.dst, &y).unwrap().len(),
            "at {x}"
        );
    }
}

#[test]
fn morita_morphisms_preserve_isotropy() {
    let sub = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
    let full = Arc::new(cone_pair(3).unwrap());
    isotropy_preserved(&subatlas_inclusion_morphism(&sub, &full).unwrap(), 1);
    for (_, _, g) in groupoids() {
        let rec = reconstruct_atlas(g, 2, 3).unwrap();
        isotropy_preserved(&reconstruction_morita_morphism(&rec, g.clone()).unwrap(), 2);
    }
}
