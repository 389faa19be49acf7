use std::sync::Arc;

use gsys_core::atoms::{cause_holds, dep_holds};
use gsys_core::classical::{all_initial_states, embed, ClassicalModel};
use gsys_core::coupling::{couple, is_closed};
use gsys_core::reduce::{decide_reducible, verify_decomposition, verify_emergence, Cover, Reducibility};
use gsys_core::{systems_equal, Budget, Config, FnTable, GSystem, Magma, Term, VarSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vs(names: &[&str]) -> VarSet {
    VarSet::new(names.iter().copied()).unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, m: &Arc<Magma>, vars: &VarSet) -> GSystem {
    let n = m.size() as u8;
    GSystem::from_fn(m.clone(), vars.clone(), None, &Budget::default(), |g| {
        let values = (0..g.vars().len()).map(|_| rng.gen_range(0..n)).collect();
        Config::new(g.vars().clone(), values).unwrap()
    })
    .unwrap()
}

#[test]
fn interchange_law_on_small_groups() {
    let b = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let magmas = [
        Arc::new(Magma::cyclic(2).unwrap()),
        Arc::new(Magma::cyclic(3).unwrap()),
        Arc::new(Magma::chain_join(3).unwrap()),
    ];
    let (x, y) = (vs(&["a", "b"]), vs(&["b", "c"]));
    for m in &magmas {
        for _ in 0..20 {
            let (a, a2) = (random_system(&mut rng, m, &x), random_system(&mut rng, m, &x));
            let (c, c2) = (random_system(&mut rng, m, &y), random_system(&mut rng, m, &y));
            let lhs = couple(
                &GSystem::pointwise_combine(&a, &a2, &b).unwrap(),
                &GSystem::pointwise_combine(&c, &c2, &b).unwrap(),
                &b,
            )
            .unwrap();
            let rhs =
                GSystem::pointwise_combine(&couple(&a, &c, &b).unwrap(), &couple(&a2, &c2, &b).unwrap(), &b).unwrap();
            assert!(systems_equal(&lhs, &rhs, &b).unwrap().holds);
        }
    }
}

#[test]
fn coupling_commutes_for_commutative_magmas() {
    let b = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = Arc::new(Magma::cyclic(4).unwrap());
    let (x, y) = (vs(&["a", "b"]), vs(&["b", "c"]));
    for _ in 0..20 {
        let (s, t) = (random_system(&mut rng, &m, &x), random_system(&mut rng, &m, &y));
        let st = couple(&s, &t, &b).unwrap();
        let ts = couple(&t, &s, &b).unwrap();
        assert!(systems_equal(&st, &ts, &b).unwrap().holds);
    }
}

#[test]
fn theorem3_pipeline() {
    let b = Budget::default();
    let m = Arc::new(Magma::cyclic(2).unwrap());
    let max = Arc::new(FnTable::from_fn("max", 2, &m, |a| a[0].max(a[1])).unwrap());
    let z = vs(&["b0", "b1", "b2", "b3"]);
    let gamma = GSystem::from_rules(
        m,
        z.clone(),
        vec![
            Term::Var(0),
            Term::Call(max, vec![Term::Var(0), Term::Var(2)]),
            Term::Var(3),
            Term::Var(3),
        ],
    )
    .unwrap();
    let gamma2 = GSystem::compose(&gamma, &gamma, &b).unwrap();
    let cover = Cover::new(vs(&["b0", "b1", "b2"]), vs(&["b1", "b2", "b3"]), &z).unwrap();

    let Reducibility::Reducible(d) = decide_reducible(&gamma, &cover, &b).unwrap() else {
        panic!("γ should be reducible");
    };
    assert!(verify_decomposition(&gamma, &d, &b).unwrap().holds);
    let Reducibility::Irreducible(cert) = decide_reducible(&gamma2, &cover, &b).unwrap() else {
        panic!("γ² should not be reducible");
    };
    assert!(cert.recheck(&gamma2, &cover, &b).unwrap());
    assert!(
        verify_emergence(&gamma2, &[gamma.clone(), gamma], &cover, &b)
            .unwrap()
            .holds
    );
}

#[test]
fn identity_atoms() {
    let b = Budget::default();
    let m = Arc::new(Magma::cyclic(2).unwrap());
    let s = GSystem::identity(m, vs(&["a", "b"]));
    assert!(dep_holds(&s, &vs(&["a"]), &vs(&["a"]), None, &b).unwrap().holds);
    assert!(!dep_holds(&s, &vs(&["a"]), &vs(&["b"]), None, &b).unwrap().holds);
    assert!(cause_holds(&s, &vs(&["a"]), &vs(&["a", "b"]), None, &b).unwrap().holds);
    assert!(!cause_holds(&s, &vs(&["a"]), &vs(&["b"]), None, &b).unwrap().holds);
}

#[test]
fn classical_embedding_star_set_is_closed() {
    let b = Budget::default();
    let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let model = ClassicalModel {
        states: names("s", 3),
        motors: names("m", 2),
        sensors: names("o", 2),
        internal: names("k", 2),
        f: vec![vec![1, 2], vec![2, 0], vec![0, 1]],
        h: vec![0, 1, 1],
        phi: vec![vec![0, 1], vec![1, 0]],
        pi: vec![1, 0],
    };
    let e = embed(&model, &b).unwrap();
    let star = e.star_set(&b).unwrap();
    assert_eq!(star.len(), 3 * 2 * 2 * 2);
    assert!(is_closed(&star, &e.coupled).unwrap().holds);
    for init in all_initial_states(&model) {
        for g in e.coupled.iterate(&e.encode(&init), 10).unwrap() {
            assert!(e.decode(&g).is_some());
        }
    }
}
