use std::collections::BTreeSet;

use proptest::prelude::*;

use qc_core::conformance::{gen_local, gen_well_typed, GenConfig};
use qc_core::kind::KindCtx;
use qc_core::local::{is_value, lstep, lstep_all, lsubtype, lsynth, LocTable, LocalEnv};
use qc_core::locset::{disjoint, nec_in, poss_in, subset, LocExpr, LocSet, LocSub};
use qc_core::net::{simulate, Scheduler};
use qc_core::proj::{leq, merge, project, project_system};
use qc_core::sem::{enabled_steps, run, Strategy as Eval};
use qc_core::statics::{chor_ty_equiv, type_of};

const UNIVERSE: [&str; 3] = ["A", "B", "C"];

fn loc_set() -> impl Strategy<Value = LocSet> {
    let atom = prop_oneof![
        prop::sample::select(UNIVERSE.to_vec()).prop_map(LocSet::loc),
        Just(LocSet::Sng(LocExpr::Var("a".into()))),
        Just(LocSet::Var("s".into())),
    ];
    atom.prop_recursive(3, 12, 2, |inner| (inner.clone(), inner).prop_map(|(x, y)| LocSet::union(x, y)))
}

fn loc_expr() -> impl Strategy<Value = LocExpr> {
    prop_oneof![
        prop::sample::select(UNIVERSE.to_vec()).prop_map(LocExpr::concrete),
        Just(LocExpr::Var("a".into())),
    ]
}

/// A ground instantiation of `a` and `s`.
fn ground_env() -> impl Strategy<Value = (LocExpr, LocSet)> {
    let names = prop::sample::subsequence(UNIVERSE.to_vec(), 1..=3);
    (prop::sample::select(UNIVERSE.to_vec()), names)
        .prop_map(|(a, s)| (LocExpr::concrete(a), LocSet::of_names(s)))
}

fn instantiate(r: &LocSet, env: &(LocExpr, LocSet)) -> LocSet {
    r.subst("a", LocSub::Loc(&env.0)).subst("s", LocSub::Set(&env.1))
}

fn inst_loc(l: &LocExpr, env: &(LocExpr, LocSet)) -> LocExpr {
    l.subst("a", LocSub::Loc(&env.0))
}

fn denote(r: &LocSet) -> BTreeSet<String> {
    r.ground().expect("ground")
}

proptest! {
    #[test]
    fn necessary_membership_is_possible(l in loc_expr(), r in loc_set()) {
        prop_assert!(!nec_in(&l, &r) || poss_in(&l, &r));
    }

    #[test]
    fn necessary_relations_survive_instantiation(
        l in loc_expr(), x in loc_set(), y in loc_set(), env in ground_env()
    ) {
        let (gx, gy, gl) = (instantiate(&x, &env), instantiate(&y, &env), inst_loc(&l, &env));
        if nec_in(&l, &x) {
            prop_assert!(nec_in(&gl, &gx));
        }
        if subset(&x, &y) {
            prop_assert!(subset(&gx, &gy));
            prop_assert!(denote(&gx).is_subset(&denote(&gy)));
        }
        if disjoint(&x, &y) {
            prop_assert!(denote(&gx).is_disjoint(&denote(&gy)));
        }
        if poss_in(&gl, &gx) && gl == l {
            prop_assert!(poss_in(&l, &x));
        }
    }

    #[test]
    fn subset_is_reflexive_and_absorbs_unions(x in loc_set(), y in loc_set()) {
        prop_assert!(subset(&x, &x));
        let u = LocSet::union(x.clone(), y.clone());
        prop_assert!(subset(&x, &u) && subset(&y, &u));
    }

    #[test]
    fn normalization_keeps_the_denotation(x in loc_set(), env in ground_env()) {
        let n = x.normalize();
        prop_assert_eq!(denote(&instantiate(&x, &env)), denote(&instantiate(&n, &env)));
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn ground_subset_is_inclusion(x in loc_set(), y in loc_set(), env in ground_env()) {
        let (gx, gy) = (instantiate(&x, &env), instantiate(&y, &env));
        prop_assert_eq!(subset(&gx, &gy), denote(&gx).is_subset(&denote(&gy)));
        prop_assert_eq!(disjoint(&gx, &gy), denote(&gx).is_disjoint(&denote(&gy)));
    }

    #[test]
    fn local_steps_are_deterministic_and_typed(seed in any::<u64>()) {
        let (mut e, t) = gen_local(seed, 3);
        let kinds = KindCtx::new();
        let table = LocTable::sequential(&["A", "B"]);
        for _ in 0..200 {
            let mut env = LocalEnv::new(&kinds, &table);
            let u = lsynth(&mut env, &e).map_err(TestCaseError::fail)?;
            prop_assert!(lsubtype(&u, &t), "{} : {} is not below {}", e, u, t);
            if is_value(&e) {
                prop_assert!(lstep_all(&e).is_empty());
                break;
            }
            let next = lstep(&e);
            prop_assert!(next.is_some(), "stuck at {}", e);
            prop_assert_eq!(lstep_all(&e), next.iter().cloned().collect::<Vec<_>>());
            e = next.unwrap();
        }
    }

    #[test]
    fn generated_programs_keep_their_type_for_one_step(seed in any::<u64>()) {
        let cfg = GenConfig::new(seed);
        let (c, ty) = gen_well_typed(&cfg).map_err(|e| TestCaseError::fail(e.last))?;
        let table = cfg.table();
        for (r, next) in enabled_steps(&c, &table) {
            let t2 = type_of(&table, &next).map_err(|e| TestCaseError::fail(format!("after {r}: {e}")))?;
            prop_assert!(chor_ty_equiv(&t2, &ty), "after {}: {} vs {}", r, t2, ty);
        }
    }

    #[test]
    fn projections_are_fixed_points_of_merge(seed in any::<u64>()) {
        let cfg = GenConfig::new(seed);
        let (c, _) = gen_well_typed(&cfg).map_err(|e| TestCaseError::fail(e.last))?;
        for l in cfg.universe_names() {
            let e = project(&c, &l).map_err(|f| TestCaseError::fail(f.to_string()))?;
            prop_assert_eq!(merge(&e, &e), Some(e.clone()));
            prop_assert!(leq(&e, &e));
        }
    }

    #[test]
    fn seeded_runs_replay(seed in any::<u64>(), pick in any::<u64>()) {
        let cfg = GenConfig::new(seed);
        let (c, _) = gen_well_typed(&cfg).map_err(|e| TestCaseError::fail(e.last))?;
        let table = cfg.table();
        let a = run(&c, &table, 200, Eval::Random(pick));
        let b = run(&c, &table, 200, Eval::Random(pick));
        prop_assert_eq!(a.trace, b.trace);
        let names = cfg.universe_names();
        let sys = project_system(&c, names.iter().map(|s| s.as_str())).map_err(|f| TestCaseError::fail(f[0].to_string()))?;
        let x = simulate(&sys, &table, Scheduler::Seeded(pick), 500);
        let y = simulate(&sys, &table, Scheduler::Seeded(pick), 500);
        prop_assert_eq!(x.trace, y.trace);
    }
}
