use qc_core::conformance::*;

#[test]
fn generated_corpus_rechecks() {
    let (cases, errors) = corpus(7, 300);
    assert!(errors.is_empty(), "{:?}", errors.first());
    assert_eq!(cases.len(), 300);
}

#[test]
fn preservation_and_progress_on_corpus() {
    let (cases, _) = corpus(11, 100);
    for c in &cases {
        let t = c.table();
        let p = check_preservation(&c.chor, &c.ty, &t, 6).with_seed(c.seed);
        assert!(p.passed(), "{:?}", p.failures.first());
        let q = check_progress(&c.chor, &t, 6).with_seed(c.seed);
        assert!(q.passed(), "{:?}", q.failures.first());
    }
}

#[test]
fn projection_theorems_on_corpus() {
    let (cases, _) = corpus(13, 60);
    let mut projected = 0;
    for c in &cases {
        let t = c.table();
        let u = c.universe();
        let Some(p) = Projected::new(&c.chor, &t, &u) else { continue };
        projected += 1;
        let r = check_completeness(&p, 3).with_seed(c.seed);
        assert!(r.passed(), "{}\n{:?}", c.chor, r.failures.first());
        let r = check_soundness(&p, 5, 12).with_seed(c.seed);
        assert!(r.passed(), "{}\n{:?}", c.chor, r.failures.first());
        let r = check_confluence(&p.system, &t, 4, 30);
        assert!(r.passed(), "{}\n{:?}", c.chor, r.failures.first());
        let r = check_deadlock_freedom(&p.system, &t, 40);
        assert!(r.passed(), "{}\n{:?}", c.chor, r.failures.first());
    }
    assert_eq!(projected, cases.len());
}
