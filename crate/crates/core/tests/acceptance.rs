//! End-to-end acceptance suite. Runs every criterion, prints one line each and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use orbicat::atlas::Atlas;
use orbicat::functor::{build_translation_groupoid, check_action_oracle, check_functor_laws, check_isotropy};
use orbicat::groupoid::{check_groupoid_axioms, isotropy_arrows, ArrowMap, GroupoidMorphism, GroupoidPresentation, Unit};
use orbicat::io::{cone_pair, gallery, standard_gallery, GalleryParams};
use orbicat::morita::{
    atlases_equivalent, bijection_demo, check_morita, common_refinement, inclusion_morphism, matching_witness,
    pushforward_atlas, reconstruct_atlas, reconstruction_morita_morphism, reconstruction_witness, relabel_witness,
    subatlas_inclusion_morphism, Relabeling, Verdict,
};
use orbicat::numerics::{sign_real, CycNum, PointC, PolyMap};
use orbicat::preorb::{check_2cat_laws, random_gauge_diagram, CorruptOps, Corruption, StandardOps};
use orbicat::report::Report;
use orbicat::sample::Sampler;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn shared(p: GalleryParams) -> Arc<Atlas> {
    Arc::new(gallery(&p).expect("gallery atlas"))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn gallery_groupoids() -> Vec<(String, Arc<Atlas>, Arc<GroupoidPresentation>)> {
    standard_gallery()
        .into_iter()
        .map(|(n, a)| {
            let a = Arc::new(a);
            let g = Arc::new(build_translation_groupoid(a.clone()).expect("translation groupoid"));
            (n, a, g)
        })
        .collect()
}

fn require(r: &Report, what: &str) -> Result<usize, String> {
    if r.is_ok() {
        Ok(r.checks.iter().map(|c| c.samples).sum())
    } else {
        Err(format!("{what}: {}", r.render_text().trim_end().replace('\n', " | ")))
    }
}

fn action_groupoids() -> Outcome {
    let mut atlases: Vec<(String, GalleryParams)> = [2, 3, 4, 6].iter().map(|&p| (format!("cone{p}"), GalleryParams::cone(p))).collect();
    atlases.push(("global_quotient2".into(), GalleryParams::global_quotient(2, 2)));
    let mut total = 0;
    for (name, p) in atlases {
        let r = check_action_oracle(&shared(p), 200, 1).map_err(|e| format!("{name}: {e}"))?;
        total += require(&r, &name)?;
    }
    Ok(format!("5 atlases x 200 source points, {total} exact comparisons"))
}

fn groupoid_axioms() -> Outcome {
    let mut total = 0;
    for (name, _, g) in gallery_groupoids() {
        total += require(&check_groupoid_axioms(&g, 1000, 2), &name)?;
    }
    Ok(format!("1000 composable tuples per gallery groupoid, {total} checks"))
}

fn product_well_defined() -> Outcome {
    let mut products = 0;
    let mut max_completions = 0;
    for (name, a, g) in gallery_groupoids() {
        if a.n_charts() < 2 {
            continue;
        }
        let mut s = Sampler::new(3);
        for _ in 0..200 {
            let x = g.sample_arrow(&mut s);
            let y = g
                .sample_arrow_from(&g.target(&x).map_err(|e| e.to_string())?, &mut s)
                .map_err(|e| e.to_string())?;
            let all = g.multiply_all(&x, &y).map_err(|e| format!("{name}: {e}"))?;
            // at most 5 independent completions per product
            let all: Vec<_> = all.into_iter().take(5).collect();
            max_completions = max_completions.max(all.len());
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    if !g.arrow_equal(&all[i], &all[j]).map_err(|e| e.to_string())? {
                        return Err(format!("{name}: completions disagree on m({x}, {y})"));
                    }
                }
            }
            products += 1;
        }
    }
    if max_completions < 2 {
        return Err("no product had more than one span completion".into());
    }
    Ok(format!("{products} products on multi-chart atlases, up to {max_completions} completions each, all equal"))
}

fn isotropy() -> Outcome {
    let mut total = 0;
    for (name, _, g) in gallery_groupoids() {
        total += require(&check_isotropy(&g, 200, 4).map_err(|e| e.to_string())?, &name)?;
    }
    let cone3 = build_translation_groupoid(shared(GalleryParams::cone(3))).map_err(|e| e.to_string())?;
    let at = |p: PointC| isotropy_arrows(&cone3, &Unit { comp: 0, point: p }).map(|v| v.len());
    let origin = at(PointC::zero(12, 1)).map_err(|e| e.to_string())?;
    let generic = at(PointC::scalar(CycNum::from_ratio(12, 1, 3))).map_err(|e| e.to_string())?;
    if (origin, generic) != (3, 1) {
        return Err(format!("cone3: |Iso| is {origin} at the origin and {generic} at 1/3"));
    }
    Ok(format!("{total} points agree with stabilizer orders; cone3 origin 3, generic 1"))
}

fn two_category_laws() -> Outcome {
    let mut squares = 0;
    for (name, a, _) in gallery_groupoids() {
        let mut s = Sampler::new(5);
        for _ in 0..100 {
            let d = random_gauge_diagram(&a, &mut s);
            let r = check_2cat_laws(&d, &StandardOps).map_err(|e| e.to_string())?;
            require(&r, &name)?;
            squares += 1;
        }
        let d = random_gauge_diagram(&a, &mut s);
        let mut kinds = vec![Corruption::Compose, Corruption::Vertical, Corruption::Horizontal];
        if a.n_charts() > 1 {
            kinds.push(Corruption::Theta);
        }
        for c in kinds {
            if check_2cat_laws(&d, &CorruptOps(c)).map_err(|e| e.to_string())?.is_ok() {
                return Err(format!("{name}: corrupted {c:?} composition went unnoticed"));
            }
        }
    }
    Ok(format!("{squares} squares exact; every corrupted fixture detected"))
}

fn functor_laws() -> Outcome {
    let mut fixtures = 0;
    for (name, a, _) in gallery_groupoids() {
        let mut s = Sampler::new(6);
        let d = random_gauge_diagram(&a, &mut s);
        let r = check_functor_laws(&d, &StandardOps, 500, 6).map_err(|e| format!("{name}: {e}"))?;
        require(&r, &name)?;
        fixtures += 1;
    }
    Ok(format!("{fixtures} fixtures, 500 samples each"))
}

fn morita_positive_negative() -> Outcome {
    let sub = shared(GalleryParams::cone(3));
    let full = Arc::new(cone_pair(3).map_err(|e| e.to_string())?);
    let m = subatlas_inclusion_morphism(&sub, &full).map_err(|e| e.to_string())?;
    let r = check_morita(&m, 500, 7);
    if !r.verdict {
        return Err(format!("cone3 into cone_pair: {}", r.render_text()));
    }
    let pt = Arc::new(build_translation_groupoid(shared(GalleryParams::point())).map_err(|e| e.to_string())?);
    let cone = Arc::new(build_translation_groupoid(sub).map_err(|e| e.to_string())?);
    let origin = PointC::zero(12, 1);
    let m = GroupoidMorphism {
        units: vec![(0, PolyMap::constant(12, 0, &origin))],
        arrows: ArrowMap::Table(vec![(cone.identity[0], PolyMap::constant(12, 0, &origin))]),
        src: pt,
        dst: cone,
    };
    let r = check_morita(&m, 50, 7);
    if r.verdict || r.condition_i.is_ok() || r.unreached.is_empty() {
        return Err("point into cone3 was not rejected by condition (i)".into());
    }
    Ok(format!("inclusion passes both conditions; point -> cone3 fails (i), unreached {}", r.unreached[0]))
}

fn equivalence_gives_morita() -> Outcome {
    let u1 = shared(GalleryParams::cone(3));
    let u2 = shared(GalleryParams::cone(3).with_radius(ratio(3, 4)));
    let w = matching_witness(&u1, &u2).ok_or("no witness for the two cones")?;
    if !atlases_equivalent(&u1, &u2, &w).map_err(|e| e.to_string())? {
        return Err("witness does not show equivalence".into());
    }
    let cr = common_refinement(&u1, &u2, &w).map_err(|e| e.to_string())?;
    for (name, u, theta) in [("left", &u1, &cr.left), ("right", &u2, &cr.right)] {
        let m = inclusion_morphism(u, &cr.atlas, theta.clone()).map_err(|e| e.to_string())?;
        let r = check_morita(&m, 200, 8);
        if !r.verdict {
            return Err(format!("{name} inclusion: {}", r.render_text()));
        }
    }
    Ok(format!("common refinement with {} charts, both inclusions Morita", cr.atlas.n_charts()))
}

fn surjectivity_up_to_morita() -> Outcome {
    let mut charts = 0;
    for (name, a, g) in gallery_groupoids() {
        let rec = reconstruct_atlas(&g, 4, 9).map_err(|e| format!("{name}: {e}"))?;
        let m = reconstruction_morita_morphism(&rec, g.clone()).map_err(|e| format!("{name}: {e}"))?;
        let r = check_morita(&m, 100, 9);
        if !r.verdict {
            return Err(format!("{name}: {}", r.render_text()));
        }
        if !atlases_equivalent(&rec.atlas, &a, &reconstruction_witness(&rec, &a)).map_err(|e| format!("{name}: {e}"))? {
            return Err(format!("{name}: reconstruction is not equivalent to the original"));
        }
        charts += rec.atlas.n_charts();
    }
    Ok(format!("8 gallery groupoids reconstructed ({charts} charts), all Morita and equivalent"))
}

fn bijection_coherence() -> Outcome {
    let football = shared(GalleryParams::football(2, 3));
    let phi = Relabeling(football.charts().iter().map(|c| (c.id.clone(), format!("{}'", c.id))).collect());
    let relabelled = Arc::new(pushforward_atlas(&phi, &football).map_err(|e| e.to_string())?);
    let w = relabel_witness(&football, &phi);
    let cases = [
        (shared(GalleryParams::cone(3)), shared(GalleryParams::cone(3).with_radius(ratio(1, 2))), None, Verdict::Equivalent),
        (
            shared(GalleryParams::teardrop(3).with_radius(ratio(1, 10))),
            shared(GalleryParams::teardrop(3).with_radius(ratio(1, 20))),
            None,
            Verdict::Equivalent,
        ),
        (football, relabelled, Some(w), Verdict::Equivalent),
        (shared(GalleryParams::cone(3)), shared(GalleryParams::cone(2)), None, Verdict::Inequivalent),
        (shared(GalleryParams::cone(2)), shared(GalleryParams::global_quotient(2, 2)), None, Verdict::Inequivalent),
        (shared(GalleryParams::football(2, 3)), shared(GalleryParams::teardrop(3)), None, Verdict::Inequivalent),
    ];
    let mut seen = BTreeSet::new();
    for (i, (a, b, w, expect)) in cases.iter().enumerate() {
        let rep = bijection_demo(a, b, w.as_ref(), 32, 10);
        if !rep.agree || rep.atlas_verdict != *expect {
            return Err(format!("pair {i}: {rep:?}"));
        }
        seen.insert(format!("{:?}", rep.atlas_verdict));
    }
    Ok(format!("6 pairs, verdicts agree ({})", seen.into_iter().collect::<Vec<_>>().join(", ")))
}

fn exact_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut oracle = common::Oracle::new();
    let (mut field, mut signs, mut undecided) = (0, 0, 0);
    for n in 0..10_000 {
        let m = common::CONDUCTORS[n % common::CONDUCTORS.len()];
        let (a, b, c) = (common::random_cyc(&mut rng, m), common::random_cyc(&mut rng, m), common::random_cyc(&mut rng, m));
        let exact = (&a + &b) * &c == &a * &c + &b * &c
            && &a * &b == &b * &a
            && (&a + &b) + &c == &a + &(&b + &c)
            && (&a * &b).conj() == a.conj() * b.conj()
            && (a.is_zero() || (&a * &a.checked_inv().map_err(|e| e.to_string())?).is_one());
        let (ea, eb) = (oracle.eval(&a), oracle.eval(&b));
        let (eab, esum) = (oracle.eval(&(&a * &b)), oracle.eval(&(&a + &b)));
        let numeric = oracle.same_value(&eab, &oracle.mul(&ea, &eb)) && oracle.same_value(&esum, &oracle.add(&ea, &eb));
        if !(exact && numeric) {
            return Err(format!("field laws fail at conductor {m}: a = {a}, b = {b}, c = {c}"));
        }
        field += 1;

        let x = common::random_real(&mut rng, m);
        let kernel = sign_real(&x).map_err(|e| e.to_string())?;
        match oracle.sign(&x) {
            Some(s) if s != kernel => return Err(format!("sign of {x}: kernel {kernel}, oracle {s}")),
            None if kernel != 0 => undecided += 1,
            _ => {}
        }
        signs += 1;
        if rng.gen_bool(0.01) && sign_real(&(-&x)).map_err(|e| e.to_string())? != -kernel {
            return Err(format!("sign(-x) is not -sign(x) at {x}"));
        }
    }
    if undecided > 0 {
        return Err(format!("{undecided} nonzero values fell inside the oracle's error band"));
    }
    Ok(format!("{field} field-law cases, {signs} sign cases, zero mismatches"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("action groupoid equivalence", action_groupoids),
        ("groupoid axiom suite", groupoid_axioms),
        ("well-defined multiplication", product_well_defined),
        ("isotropy orders", isotropy),
        ("2-category laws", two_category_laws),
        ("2-functor laws", functor_laws),
        ("Morita positive and negative", morita_positive_negative),
        ("equivalence implies Morita", equivalence_gives_morita),
        ("surjectivity up to Morita", surjectivity_up_to_morita),
        ("bijection coherence", bijection_coherence),
        ("exact arithmetic kernel", exact_kernel),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    let start = Instant::now();
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} failed, total {:.1}s", failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
