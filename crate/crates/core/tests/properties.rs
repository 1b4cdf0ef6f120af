//! Randomized checks of the structural laws.

use frobcat::category::SkeletalCategory;
use frobcat::diagram::{Engine, Morphism, Object};
use frobcat::frobenius::cardy_algebra;
use frobcat::io::MorphismData;
use frobcat::library;
use frobcat::observables::{check_modular_invariance, torus_partition_function, PartitionTable, TableKind};
use frobcat::report::ReportDocument;
use frobcat::rep::{induced_from_object, induced_module, module_hom_dim, module_hom_projector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cat(k: usize) -> SkeletalCategory {
    library::by_name(library::BUNDLED[k % library::BUNDLED.len()]).unwrap()
}

/// A direct sum of up to two words of length one or two.
fn object(c: &SkeletalCategory, rng: &mut ChaCha8Rng) -> Object {
    let n = c.rank();
    let words = (0..rng.random_range(1..=2))
        .map(|_| (0..rng.random_range(1..=2)).map(|_| rng.random_range(0..n)).collect())
        .collect();
    Object::new(words)
}

fn morphism(eng: &Engine, dom: &Object, cod: &Object, rng: &mut ChaCha8Rng) -> Morphism {
    let z = eng.zero(dom, cod);
    let v: Vec<C64> = (0..z.dim()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    z.with_vector(&v)
}

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_is_a_bifunctor(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (object(&c, &mut rng), object(&c, &mut rng), object(&c, &mut rng));
        let (u, v, w) = (object(&c, &mut rng), object(&c, &mut rng), object(&c, &mut rng));
        let f1 = morphism(&eng, &x, &y, &mut rng);
        let f2 = morphism(&eng, &y, &z, &mut rng);
        let g1 = morphism(&eng, &u, &v, &mut rng);
        let g2 = morphism(&eng, &v, &w, &mut rng);
        let lhs = eng.compose(&eng.tensor(&f2, &g2), &eng.tensor(&f1, &g1)).unwrap();
        let rhs = eng.tensor(&eng.compose(&f2, &f1).unwrap(), &eng.compose(&g2, &g1).unwrap());
        prop_assert!(lhs.distance(&rhs).unwrap() < TOL);
        let id = eng.tensor(&eng.identity(&x), &eng.identity(&u));
        prop_assert!(id.distance(&eng.identity(&x.tensor(&u))).unwrap() < TOL);
    }

    #[test]
    fn composition_is_associative(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let obs: Vec<Object> = (0..4).map(|_| object(&c, &mut rng)).collect();
        let f = morphism(&eng, &obs[0], &obs[1], &mut rng);
        let g = morphism(&eng, &obs[1], &obs[2], &mut rng);
        let h = morphism(&eng, &obs[2], &obs[3], &mut rng);
        let a = eng.compose(&h, &eng.compose(&g, &f).unwrap()).unwrap();
        let b = eng.compose(&eng.compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(a.distance(&b).unwrap() < TOL * (1.0 + a.norm()));
    }

    #[test]
    fn braiding_and_twist_are_natural(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, u, v) = (object(&c, &mut rng), object(&c, &mut rng), object(&c, &mut rng), object(&c, &mut rng));
        let f = morphism(&eng, &x, &y, &mut rng);
        let g = morphism(&eng, &u, &v, &mut rng);
        let lhs = eng.compose(&eng.braiding(&y, &v).unwrap(), &eng.tensor(&f, &g)).unwrap();
        let rhs = eng.compose(&eng.tensor(&g, &f), &eng.braiding(&x, &u).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < TOL * (1.0 + lhs.norm()));

        let tw = eng.compose(&eng.twist(&y), &f).unwrap();
        let wt = eng.compose(&f, &eng.twist(&x)).unwrap();
        prop_assert!(tw.distance(&wt).unwrap() < TOL * (1.0 + tw.norm()));

        let round = eng.compose(&eng.braiding_inv(&x, &u).unwrap(), &eng.braiding(&x, &u).unwrap()).unwrap();
        prop_assert!(round.distance(&eng.identity(&x.tensor(&u))).unwrap() < TOL);
    }

    #[test]
    fn trace_is_cyclic(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (object(&c, &mut rng), object(&c, &mut rng));
        let f = morphism(&eng, &x, &y, &mut rng);
        let g = morphism(&eng, &y, &x, &mut rng);
        let a = eng.trace(&eng.compose(&g, &f).unwrap()).unwrap();
        let b = eng.trace(&eng.compose(&f, &g).unwrap()).unwrap();
        prop_assert!((a - b).norm() < TOL * (1.0 + a.norm()));
        // closing the last strand needs a single word
        let n = c.rank();
        let w = Object::word(vec![rng.random_range(0..n), rng.random_range(0..n)]);
        let h = morphism(&eng, &w, &w, &mut rng);
        let by_closure = eng.trace_by_closure(&h).unwrap();
        let direct = eng.trace(&h).unwrap();
        prop_assert!((direct - by_closure).norm() < TOL * (1.0 + direct.norm()));
    }

    #[test]
    fn morphism_files_round_trip(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (object(&c, &mut rng), object(&c, &mut rng));
        let f = morphism(&eng, &x, &y, &mut rng);
        let back = MorphismData::from_morphism(&f).to_morphism(&eng, &x, &y).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn module_projectors_are_idempotent_with_integral_trace(k in 0usize..7, seed in any::<u64>()) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let alg = cardy_algebra(&eng);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (object(&c, &mut rng), object(&c, &mut rng));
        let m = induced_from_object(&eng, &alg, &x);
        let n = induced_from_object(&eng, &alg, &y);
        let p = module_hom_projector(&eng, &alg, &m, &n).unwrap();
        prop_assert!(p.idempotency_residual() < 1e-8);
        let t = p.trace();
        prop_assert!((t - C64::new(t.re.round(), 0.0)).norm() < 1e-6);
        // free modules: Hom_A(A⊗X, A⊗Y) ≅ Hom(X, A⊗Y)
        prop_assert_eq!(p.dim().unwrap(), eng.dim_hom(&x, n.obj()));
    }

    #[test]
    fn report_documents_round_trip(vals in prop::collection::vec(-1e6f64..1e6, 1..6), z in prop::collection::vec(0usize..9, 4)) {
        let mut doc = ReportDocument::new("torus", "fixture", Some("alg"));
        for (i, v) in vals.iter().enumerate() {
            doc.residual(&format!("r{i}"), *v, 1e-9);
        }
        doc.table("Z", vec!["a".into(), "b".into()], vec!["a".into(), "b".into()], vec![z[..2].to_vec(), z[2..].to_vec()]);
        doc.note("n");
        prop_assert_eq!(ReportDocument::from_json(&doc.to_json().unwrap()).unwrap(), doc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fusion_matrices_commute_and_dominate_one(k in 0usize..7) {
        let c = cat(k);
        let ring = c.ring();
        for i in 0..ring.rank() {
            prop_assert!(ring.perron_frobenius(i) >= 1.0 - 1e-9);
            for j in 0..ring.rank() {
                let (a, b) = (ring.fusion_matrix(i), ring.fusion_matrix(j));
                prop_assert_eq!(&a * &b, &b * &a);
            }
        }
    }

    #[test]
    fn induced_modules_satisfy_reciprocity(k in 0usize..7, i in 0usize..5, j in 0usize..5) {
        let c = cat(k);
        let (i, j) = (i % c.rank(), j % c.rank());
        let eng = Engine::new(&c);
        let alg = cardy_algebra(&eng);
        let m = induced_module(&eng, &alg, i);
        let n = induced_module(&eng, &alg, j);
        prop_assert_eq!(module_hom_dim(&eng, &alg, &m, &n).unwrap(), eng.dim_hom(&Object::label(i), n.obj()));
    }

    #[test]
    fn cardy_tables_are_modular_invariant_and_serialize(k in 0usize..7) {
        let c = cat(k);
        let eng = Engine::new(&c);
        let t = torus_partition_function(&eng, &cardy_algebra(&eng)).unwrap();
        prop_assert_eq!(&t.kind, &TableKind::Torus);
        prop_assert!(check_modular_invariance(&c, &t.z, true).unwrap().passed());
        let back: PartitionTable = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}
