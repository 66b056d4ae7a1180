use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{rngs::StdRng, SeedableRng};

use ybe_core::analysis::closure;
use ybe_core::canon::canonical_form;
use ybe_core::constructions::{dynamical_extension, x1, DynamicalPair};
use ybe_core::enumerate::{enumerate_cycle_sets, enumerate_qcycle_sets, Filter};
use ybe_core::perm::Permutation;
use ybe_core::permbrace::permutation_brace;
use ybe_core::qcycle::QCycleSet;

fn pool() -> Vec<QCycleSet> {
    let mut v = Vec::new();
    for n in 1..=5 {
        v.extend(enumerate_cycle_sets(n, Filter::default()).unwrap());
    }
    for n in 2..=3 {
        v.extend(enumerate_qcycle_sets(n, Filter::default()).unwrap());
    }
    v
}

fn shuffled(n: usize, seed: u64) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(&mut StdRng::seed_from_u64(seed));
    Permutation::from_images(images).unwrap()
}

fn instance() -> impl Strategy<Value = QCycleSet> {
    let pool = pool();
    (0..pool.len()).prop_map(move |i| pool[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_relabel_invariant(x in instance(), seed in any::<u64>()) {
        let y = x.relabel(&shuffled(x.n(), seed));
        let cx = canonical_form(&x);
        prop_assert_eq!(&cx.form, &canonical_form(&y).form);
        prop_assert_eq!(&canonical_form(&cx.form).form, &cx.form);
        prop_assert_eq!(&x.relabel(&cx.relabeling), &cx.form);
    }

    #[test]
    fn closure_is_monotone_and_idempotent(x in instance(), a in any::<u16>(), b in any::<u16>()) {
        let n = x.n();
        let s: Vec<usize> = (0..n).filter(|i| a & (1 << i) != 0).collect();
        let t: Vec<usize> = (0..n).filter(|i| (a | b) & (1 << i) != 0).collect();
        let cs = closure(&x, &s);
        let ct = closure(&x, &t);
        prop_assert!(cs.is_subset(&ct));
        let again: Vec<usize> = cs.ones().collect();
        prop_assert_eq!(closure(&x, &again), cs.clone());
        prop_assert!(x.is_closed(&again));
    }

    #[test]
    fn dictionary_round_trip(x in instance()) {
        let s = x.to_solution().unwrap();
        prop_assert!(s.yb_check().is_ok());
        prop_assert_eq!(QCycleSet::from_solution(&s).unwrap(), x);
    }

    /// `α(s, t) = f(t)` and `α'(s, t) = g(t)` satisfy all three identities
    /// whenever `f` and `g` commute.
    #[test]
    fn commuting_constant_pairs_extend(x in instance(), m in 1usize..4, seed in any::<u64>(), i in 0u32..4, j in 0u32..4) {
        let n = x.n();
        let c = shuffled(m, seed);
        let power = |k: u32| (0..k).fold(Permutation::identity(m), |acc, _| acc.compose(&c).unwrap());
        let (f, g) = (power(i), power(j));
        let mut alpha = Vec::with_capacity(n * n * m * m);
        let mut alpha_prime = Vec::with_capacity(n * n * m * m);
        for _ in 0..n * n * m {
            for t in 0..m {
                alpha.push(f.apply(t) as u32);
                alpha_prime.push(g.apply(t) as u32);
            }
        }
        let dp = DynamicalPair { base: x.clone(), fiber: m, alpha, alpha_prime };
        prop_assert!(dp.validate().is_ok());
        let ext = dynamical_extension(&dp, false).unwrap();
        let proj: Vec<usize> = (0..n * m).map(|p| p / m).collect();
        prop_assert!(ext.is_homomorphism(&proj, &x));
    }

    /// A random pair either validates and extends, or reports a witness.
    #[test]
    fn random_pairs_are_judged_consistently(x in instance(), seed in any::<u64>()) {
        let n = x.n();
        let m = 2;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut table = || -> Vec<u32> {
            (0..n * n * m).flat_map(|_| {
                let mut row = vec![0u32, 1];
                row.shuffle(&mut rng);
                row
            }).collect()
        };
        let dp = DynamicalPair { base: x, fiber: m, alpha: table(), alpha_prime: table() };
        match dp.witness() {
            None => {
                prop_assert!(dp.validate().is_ok());
                prop_assert!(dynamical_extension(&dp, false).is_ok());
            }
            Some(_) => prop_assert!(dp.validate().is_err()),
        }
    }
}

#[test]
fn relabeled_x1_has_one_canonical_form() {
    let x = x1();
    let base = canonical_form(&x).form;
    for seed in 0..20 {
        assert_eq!(canonical_form(&x.relabel(&shuffled(8, seed))).form, base);
    }
}

#[test]
fn permutation_brace_folds_any_order() {
    let pb = permutation_brace(&x1()).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 200 {
        for (i, rep) in pb.reps.iter().enumerate() {
            let mut r = rep.clone();
            r.shuffle(&mut rng);
            assert_eq!(pb.fold(&r), pb.elements[i], "element {i}, order {r:?}");
            checked += 1;
        }
    }
}
