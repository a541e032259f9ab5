//! Conformance suites behind `qc conformance`, run over a seeded corpus.

use std::thread;

use serde::Serialize;

use qc_core::conformance::{
    check_completeness, check_confluence, check_deadlock_freedom, check_preservation, check_progress,
    check_soundness, corpus, enumerate_nets, enumerate_sets, local_determinism, local_metatheory, locset_oracle,
    merge_idempotence, merge_laws, order_laws, subset_transitive, Case, LawReport, Projected, TheoremReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Local,
    Statics,
    Completeness,
    Soundness,
    Confluence,
    Deadlock,
    Laws,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Local,
        Suite::Statics,
        Suite::Completeness,
        Suite::Soundness,
        Suite::Confluence,
        Suite::Deadlock,
        Suite::Laws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Local => "local",
            Suite::Statics => "statics",
            Suite::Completeness => "completeness",
            Suite::Soundness => "soundness",
            Suite::Confluence => "confluence",
            Suite::Deadlock => "deadlock",
            Suite::Laws => "laws",
            Suite::All => "all",
        }
    }
}

/// Bounds for the checks; the defaults are the acceptance settings.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub chor_depth: usize,
    pub completeness_steps: usize,
    pub soundness_depth: usize,
    pub confluence_depth: usize,
    pub confluence_join: usize,
    pub deadlock_depth: usize,
    pub local_fuel: usize,
    pub determinism_terms: usize,
    pub law_depth: usize,
    pub set_universe: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            chor_depth: 6,
            completeness_steps: 4,
            soundness_depth: 6,
            confluence_depth: 5,
            confluence_join: 30,
            deadlock_depth: 40,
            local_fuel: 1000,
            determinism_terms: 10_000,
            law_depth: 3,
            set_universe: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureRecord {
    pub check: String,
    pub seed: Option<u64>,
    pub program: String,
    pub witness: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub seed: u64,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<FailureRecord>,
}

impl SuiteResult {
    fn new(suite: Suite, seed: u64) -> Self {
        SuiteResult { suite: suite.name(), seed, checked: 0, skipped: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn theorem(&mut self, r: TheoremReport) {
        self.checked += r.cases;
        self.skipped += r.skipped;
        let id = r.theorem.id();
        self.failures.extend(r.failures.into_iter().map(|f| FailureRecord {
            check: id.into(),
            seed: f.seed,
            program: f.program,
            witness: f.witness,
            message: f.message,
        }));
    }

    fn laws(&mut self, check: &str, r: LawReport) {
        self.checked += r.checked;
        self.failures.extend(r.violations.into_iter().map(|v| FailureRecord {
            check: check.into(),
            seed: None,
            program: String::new(),
            witness: Vec::new(),
            message: v,
        }));
    }

    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        format!(
            "{}: {verdict} ({} checked, {} skipped, {} failures)",
            self.suite,
            self.checked,
            self.skipped,
            self.failures.len()
        )
    }
}

/// Apply `f` to every item on all available cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let n = thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(n).max(1);
    thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn per_case(res: &mut SuiteResult, cases: &[Case], f: impl Fn(&Case) -> Vec<TheoremReport> + Sync) {
    for reps in par_map(cases, |c| f(c).into_iter().map(|r| r.with_seed(c.seed)).collect::<Vec<_>>()) {
        for r in reps {
            res.theorem(r);
        }
    }
}

/// Cases whose projection is defined; the rest count as skipped.
fn projected(res: &mut SuiteResult, cases: &[Case], f: impl Fn(&Projected) -> Vec<TheoremReport> + Sync) {
    let out = par_map(cases, |c| {
        let t = c.table();
        let p = Projected::new(&c.chor, &t, &c.universe())?;
        Some(f(&p).into_iter().map(|r| r.with_seed(c.seed)).collect::<Vec<_>>())
    });
    for o in out {
        match o {
            None => res.skipped += 1,
            Some(reps) => reps.into_iter().for_each(|r| res.theorem(r)),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, cases: usize, b: &Bounds) -> Vec<SuiteResult> {
    if suite == Suite::All {
        return Suite::EACH.iter().flat_map(|s| run_suite(*s, seed, cases, b)).collect();
    }
    let mut res = SuiteResult::new(suite, seed);
    let corpus_for = |res: &mut SuiteResult| {
        let (cs, errors) = corpus(seed, cases);
        for e in errors {
            res.failures.push(FailureRecord {
                check: "generator".into(),
                seed: Some(e.seed),
                program: String::new(),
                witness: Vec::new(),
                message: format!("no well-typed program after {} attempts: {}", e.attempts, e.last),
            });
        }
        cs
    };
    match suite {
        Suite::Local => {
            res.laws("local-metatheory", local_metatheory(seed, cases, b.local_fuel));
            res.laws("local-determinism", local_determinism(seed, b.determinism_terms));
        }
        Suite::Statics => {
            let cs = corpus_for(&mut res);
            res.checked += cs.len();
            per_case(&mut res, &cs, |c| {
                let t = c.table();
                vec![check_preservation(&c.chor, &c.ty, &t, b.chor_depth), check_progress(&c.chor, &t, b.chor_depth)]
            });
        }
        Suite::Completeness => {
            let cs = corpus_for(&mut res);
            projected(&mut res, &cs, |p| vec![check_completeness(p, b.completeness_steps)]);
        }
        Suite::Soundness => {
            let cs = corpus_for(&mut res);
            projected(&mut res, &cs, |p| vec![check_soundness(p, b.soundness_depth, 2 * b.soundness_depth)]);
        }
        Suite::Confluence => {
            let cs = corpus_for(&mut res);
            projected(&mut res, &cs, |p| {
                vec![check_confluence(&p.system, p.table, b.confluence_depth, b.confluence_join)]
            });
        }
        Suite::Deadlock => {
            let cs = corpus_for(&mut res);
            projected(&mut res, &cs, |p| vec![check_deadlock_freedom(&p.system, p.table, b.deadlock_depth)]);
        }
        Suite::Laws => {
            let cs = corpus_for(&mut res);
            res.laws("merge-idempotence", merge_idempotence(&cs));
            let nets = enumerate_nets(b.law_depth);
            res.laws("order", order_laws(&nets));
            res.laws("merge", merge_laws(&nets));
            let universe = &["A", "B", "C", "D"][..b.set_universe.min(4)];
            res.laws("locset-oracle", locset_oracle(universe, b.law_depth));
            res.laws("subset-transitive", subset_transitive(&enumerate_sets(&universe[..2], 2)));
        }
        Suite::All => unreachable!(),
    }
    vec![res]
}
