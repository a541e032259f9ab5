//! The eight acceptance criteria, each reported on its own line.

use std::path::PathBuf;
use std::time::Instant;

use qc_cli::source::{check_source, load, Program};
use qc_cli::suites::par_map;
use qc_cli::parse_chor;
use qc_core::chor::{Chor, Dir, TySub};
use qc_core::conformance::{
    check_completeness, check_confluence, check_deadlock_freedom, check_preservation, check_progress,
    check_soundness, corpus, drop_sync_branch, enumerate_nets, enumerate_sets, local_determinism, local_metatheory,
    locally_terminating, locset_oracle, merge_idempotence, order_laws, subset_transitive, swap_choices, Case,
    Projected, TheoremReport, LOCAL_FUEL,
};
use qc_core::local::{LocTable, LocalTerm as T};
use qc_core::locset::{LocExpr, LocSet};
use qc_core::net::{explore, NodeKind, System};
use qc_core::proj::{project, project_system};
use qc_core::sem::{enabled_steps, run, Outcome, Strategy};
use qc_core::statics::type_of;

const SEED: u64 = 20_240_601;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn program(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name);
    load(&path).unwrap_or_else(|e| panic!("{e}"))
}

fn system_of(p: &Program) -> System {
    project_system(&p.file.main, p.locations()).unwrap_or_else(|fs| panic!("{}", fs[0]))
}

fn first_failure(r: &TheoremReport) -> String {
    let f = &r.failures[0];
    format!("{} failed on seed {:?}: {} | {}", r.theorem.id(), f.seed, f.program, f.message)
}

fn only_step(c: &Chor, table: &LocTable) -> Result<Chor, String> {
    let steps = enabled_steps(c, table);
    ensure(steps.len() == 1, || format!("{c} has {} enabled steps", steps.len()))?;
    Ok(steps.into_iter().next().expect("one step").1)
}

fn worked_examples() -> Verdict {
    let abc = &["A", "B", "C"];
    let t = LocTable::sequential(abc);
    let c = parse_chor("A.3 ~> {B, C}", abc).unwrap();
    let s = only_step(&c, &t)?;
    ensure(s.to_string() == "{A, B, C}.3", || format!("A.3 ~> {{B, C}} stepped to {s}"))?;

    let lb = &["M", "A", "B", "C"];
    let t = LocTable::sequential(lb);
    let c = parse_chor("let {M, A, B, C}.alpha :: loc := M.repr(A) ~> {A, B, C} in alpha.e ~> C", lb).unwrap();
    let s1 = only_step(&c, &t)?;
    let want1 = parse_chor("let {M, A, B, C}.alpha :: loc := {M, A, B, C}.repr(A) in alpha.e ~> C", lb).unwrap();
    ensure(s1 == want1, || format!("first load-balancer step gave {s1}"))?;
    let s2 = only_step(&s1, &t)?;
    let want2 = parse_chor("A.e ~> C", lb).unwrap();
    ensure(s2 == want2, || format!("second load-balancer step gave {s2}"))?;

    let c = parse_chor("A.(2 + 3) ~> B", abc).unwrap();
    let pa = project(&c, "A").map_err(|f| f.to_string())?.to_string();
    let pb = project(&c, "B").map_err(|f| f.to_string())?.to_string();
    ensure(pa == "send(ret(2 + 3), {B})" && pb == "recv(A)", || format!("projections {pa} / {pb}"))?;

    let c = parse_chor(
        "if A.true @ {A} then (sync A[left] ~> {B}; B.1) else sync A[right] ~> {B}; B.2",
        abc,
    )
    .unwrap();
    let m = project(&c, "B").map_err(|f| f.to_string())?.to_string();
    ensure(m == "allow A: left => ret(1) | right => ret(2)", || format!("merged projection {m}"))?;

    let ok = check_source(
        "locations A, B\nmain = let {A, B}.alpha :: loc := {A, B}.repr(A) in let B.x : int := alpha.(1 + 1) ~> B in B.x",
    )
    .map_err(|d| d[0].to_string())?;
    ensure(ok.ty.to_string() == "int @ {B}", || format!("typed as {}", ok.ty))?;
    let escape = check_source("locations A\nmain = let A.alpha :: loc := A.repr(A) in alpha.(1 + 1)");
    ensure(matches!(&escape, Err(d) if d[0].message.contains("escapes")), || format!("{escape:?}"))?;
    let unbound = check_source(
        "locations M, A, B, C\nmain = let {M, B, C}.alpha :: loc := \
         M.(if 1 < 2 then (repr(A) : loc<{A, B}>) else (repr(B) : loc<{A, B}>)) ~> {B, C} in \
         let C.r : int := alpha.(40 + 2) ~> C in C.r",
    );
    ensure(matches!(&unbound, Err(d) if d[0].message.contains("not all among the binders")), || {
        format!("{unbound:?}")
    })?;
    Ok("send, load balancer, projection, merge, typing".into())
}

fn metatheory(cases: &[Case]) -> Verdict {
    ensure(cases.len() >= 500, || format!("only {} programs", cases.len()))?;
    let reports = par_map(&cases[..500], |c| {
        let t = c.table();
        (check_preservation(&c.chor, &c.ty, &t, 6).with_seed(c.seed), check_progress(&c.chor, &t, 6).with_seed(c.seed))
    });
    let mut states = 0;
    for (p, q) in &reports {
        ensure(p.passed(), || first_failure(p))?;
        ensure(q.passed(), || first_failure(q))?;
        states += p.cases;
    }
    let local = local_metatheory(SEED, 500, LOCAL_FUEL);
    ensure(local.passed(), || local.violations[0].clone())?;
    let det = local_determinism(SEED, 10_000);
    ensure(det.passed(), || det.violations[0].clone())?;
    Ok(format!("500 choreographies ({states} states), {} local checks, {} determinism checks", local.checked, det.checked))
}

fn projectable(cases: &[Case]) -> Vec<(&Case, LocTable)> {
    cases.iter().map(|c| (c, c.table())).collect()
}

fn completeness(cases: &[Case]) -> Verdict {
    let tabled = projectable(cases);
    let out = par_map(&tabled, |(c, t)| {
        Projected::new(&c.chor, t, &c.universe()).map(|p| check_completeness(&p, 4).with_seed(c.seed))
    });
    let reps: Vec<TheoremReport> = out.into_iter().flatten().collect();
    ensure(reps.len() >= 100, || format!("only {} projectable programs", reps.len()))?;
    for r in &reps {
        ensure(r.passed(), || first_failure(r))?;
    }
    Ok(format!("{} programs, {} reducts", reps.len(), reps.iter().map(|r| r.cases).sum::<usize>()))
}

fn soundness(cases: &[Case]) -> Verdict {
    let tabled = projectable(cases);
    let out = par_map(&tabled, |(c, t)| {
        Projected::new(&c.chor, t, &c.universe()).map(|p| check_soundness(&p, 6, 12).with_seed(c.seed))
    });
    let reps: Vec<TheoremReport> = out.into_iter().flatten().collect();
    for r in &reps {
        ensure(r.passed(), || first_failure(r))?;
    }
    let checked = reps.iter().filter(|r| r.skipped == 0).count();
    ensure(checked >= 100, || format!("only {checked} programs checked"))?;

    let ab = &["A", "B"];
    let t = LocTable::sequential(ab);
    let looping = parse_chor("let A.x : int := A.((fun f(n: int): int = f n) 0) in {A, B}.(1 + 1)", ab).unwrap();
    type_of(&t, &looping).map_err(|e| e.to_string())?;
    ensure(!locally_terminating(&looping, &t, 12, LOCAL_FUEL), || "loop example passed the fuel scan".into())?;
    let names = vec!["A".to_string(), "B".to_string()];
    let p = Projected::new(&looping, &t, &names).ok_or("loop example does not project")?;
    let r = check_soundness(&p, 6, 12);
    ensure(r.skipped == 1 && r.cases == 0, || format!("loop example was not excluded: {r}"))?;
    let finite = parse_chor("let A.x : int := A.((fun f(n: int) = n) 0) in {A, B}.(1 + 1)", ab).unwrap();
    ensure(locally_terminating(&finite, &t, 12, LOCAL_FUEL), || "terminating variant rejected".into())?;
    Ok(format!("{checked} programs, {} systems; loop example excluded", reps.iter().map(|r| r.cases).sum::<usize>()))
}

fn confluence(cases: &[Case]) -> Verdict {
    let tabled = projectable(cases);
    let out = par_map(&tabled, |(c, t)| {
        Projected::new(&c.chor, t, &c.universe()).map(|p| check_confluence(&p.system, t, 5, 30).with_seed(c.seed))
    });
    let total = out.len();
    let reps: Vec<TheoremReport> = out.into_iter().flatten().collect();
    ensure(reps.len() == total, || format!("{} of {total} programs do not project", total - reps.len()))?;
    for r in &reps {
        ensure(r.passed(), || first_failure(r))?;
    }
    Ok(format!("{} programs, {} pairs", reps.len(), reps.iter().map(|r| r.cases).sum::<usize>()))
}

fn deadlock_freedom() -> Verdict {
    let mut states = 0;
    for name in ["load_balancer.chor", "run_at_w.chor", "if_sync.chor"] {
        let p = program(name);
        let sys = system_of(&p);
        let g = explore(&sys, &p.file.table, 40);
        ensure(g.count(NodeKind::Frontier) == 0, || format!("{name}: exploration did not finish"))?;
        ensure(g.count(NodeKind::AllValues) >= 1, || format!("{name}: no terminal state"))?;
        let r = check_deadlock_freedom(&sys, &p.file.table, 40);
        ensure(r.passed(), || format!("{name}: {}", first_failure(&r)))?;
        states += g.nodes.len();
    }
    let p = program("if_sync.chor");
    let sys = system_of(&p);
    let dropped = drop_sync_branch(&sys, Dir::L).ok_or("no offer to corrupt")?;
    let r = check_deadlock_freedom(&dropped, &p.file.table, 40);
    ensure(!r.passed(), || "dropped sync branch not flagged".into())?;
    let swapped = swap_choices(&sys).ok_or("no selection to corrupt")?;
    let r = check_deadlock_freedom(&swapped, &p.file.table, 40);
    ensure(!r.passed(), || "swapped selection not flagged".into())?;
    Ok(format!("{states} states explored; both corrupted systems flagged"))
}

fn substitution() -> Verdict {
    let ls = &["L"];
    let t = LocTable::sequential(ls);
    let c = parse_chor(
        "tyfun alpha :: loc. let {alpha}.x : int := alpha.2 in let L.x : int := L.3 in \
         let {alpha}.y : int := L.x ~> alpha in alpha.(x + y)",
        ls,
    )
    .unwrap();
    let Chor::TyAbs(a, _, body) = &c else { unreachable!() };
    let l = LocExpr::concrete("L");
    let substituted = body.subst_ty(a, TySub::Loc(&l));
    let rep = run(&substituted, &t, 100, Strategy::Leftmost);
    ensure(rep.outcome == Outcome::Value, || format!("run ended {:?} at {}", rep.outcome, rep.last))?;
    ensure(rep.last == Chor::at("L", T::int(5)), || format!("evaluated to {}", rep.last))?;
    let applied = run(&Chor::tyapp(c.clone(), qc_core::chor::ChorType::Loc(l)), &t, 100, Strategy::Leftmost);
    ensure(applied.last == Chor::at("L", T::int(5)), || format!("application evaluated to {}", applied.last))?;

    let ab = LocSet::of_names(["A", "B"]);
    let fault = qc_core::chor::subst_local(&Chor::Done(ab, T::var("x")), &LocSet::loc("A"), "x", &T::int(1));
    ensure(fault.is_none(), || format!("partial substitution gave {fault:?}"))?;
    Ok("L.5, and the partial substitution faults".into())
}

fn relation_laws(cases: &[Case]) -> Verdict {
    ensure(cases.len() >= 1000, || format!("only {} programs", cases.len()))?;
    let idem = merge_idempotence(&cases[..1000]);
    ensure(idem.passed(), || idem.violations[0].clone())?;
    let nets = enumerate_nets(3);
    let order = order_laws(&nets);
    ensure(order.passed(), || order.violations[0].clone())?;
    let oracle = locset_oracle(&["A", "B", "C", "D"], 3);
    ensure(oracle.passed(), || oracle.violations[0].clone())?;
    let trans = subset_transitive(&enumerate_sets(&["A", "B"], 2));
    ensure(trans.passed(), || trans.violations[0].clone())?;
    Ok(format!(
        "{} merges, {} order checks over {} programs, {} set checks",
        idem.checked,
        order.checked,
        nets.len(),
        oracle.checked + trans.checked
    ))
}

fn main() {
    let (cases, errors) = corpus(SEED, 1000);
    assert!(errors.is_empty(), "generator failed: {:?}", errors.first());
    let projection_corpus = &cases[..150];
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("worked examples", Box::new(worked_examples)),
        ("preservation, progress, local metatheory", Box::new(|| metatheory(&cases))),
        ("projection completeness", Box::new(|| completeness(projection_corpus))),
        ("projection soundness", Box::new(|| soundness(projection_corpus))),
        ("system confluence", Box::new(|| confluence(projection_corpus))),
        ("deadlock freedom", Box::new(deadlock_freedom)),
        ("substitution", Box::new(substitution)),
        ("relation laws", Box::new(|| relation_laws(&cases))),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        match &v {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
