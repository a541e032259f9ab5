//! Executable, bounded versions of the metatheory, plus the generators and
//! suites that drive them.

mod checks;
mod gen;
mod laws;

pub use checks::{
    check_completeness, check_confluence, check_deadlock_freedom, check_preservation, check_progress,
    check_soundness, locally_terminating, slack, Failure, Projected, Theorem, TheoremReport, LOCAL_FUEL,
};
pub use gen::{gen_local, gen_well_typed, GenConfig, GenError, LocalGen};
pub use laws::{
    drop_sync_branch, enumerate_nets, enumerate_sets, locset_oracle, merge_laws, order_laws, subset_transitive,
    swap_choices, LawReport,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chor::{Chor, ChorType};
use crate::kind::KindCtx;
use crate::local::{is_value, lstep, lstep_all, lsubtype, lsynth, LocTable, LocalEnv};
use crate::locset::Name;
use crate::proj::merge;

/// One generated corpus entry.
#[derive(Clone, Debug)]
pub struct Case {
    pub seed: u64,
    pub config: GenConfig,
    pub chor: Chor,
    pub ty: ChorType,
}

impl Case {
    pub fn table(&self) -> LocTable {
        self.config.table()
    }

    pub fn universe(&self) -> Vec<Name> {
        self.config.universe_names()
    }
}

/// The configuration used for the `i`-th case of a seeded batch.
pub fn case_config(seed: u64, i: usize) -> GenConfig {
    let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
    GenConfig { seed: s, max_depth: 2 + i % 3, universe: 2 + i % 3, recursion: i % 2 == 0, local_depth: 1 + i % 2 }
}

/// `n` generated well-typed choreographies; generation failures are returned separately.
pub fn corpus(seed: u64, n: usize) -> (Vec<Case>, Vec<GenError>) {
    let mut cases = Vec::new();
    let mut errors = Vec::new();
    for i in 0..n {
        let config = case_config(seed, i);
        match gen_well_typed(&config) {
            Ok((chor, ty)) => cases.push(Case { seed: config.seed, config, chor, ty }),
            Err(e) => errors.push(e),
        }
    }
    (cases, errors)
}

/// Progress and preservation of the local language along full runs of
/// `n` generated terms.
pub fn local_metatheory(seed: u64, n: usize, fuel: usize) -> LawReport {
    let mut rep = LawReport::default();
    let table = LocTable::sequential(&["A", "B"]);
    let kinds = KindCtx::new();
    for i in 0..n {
        let s = seed.wrapping_add(i as u64);
        let (mut e, t) = gen_local(s, 3);
        let mut env = LocalEnv::new(&kinds, &table);
        rep.record(lsynth(&mut env, &e).is_ok_and(|u| lsubtype(&u, &t)), || format!("seed {s}: generated {e} is not of type {t}"));
        for _ in 0..fuel {
            if is_value(&e) {
                break;
            }
            match lstep(&e) {
                None => {
                    rep.record(false, || format!("seed {s}: stuck at {e}"));
                    break;
                }
                Some(e2) => {
                    let ok = lsynth(&mut env, &e2).is_ok_and(|u| lsubtype(&u, &t));
                    rep.record(ok, || format!("seed {s}: {e} steps to {e2}, which is not of type {t}"));
                    e = e2;
                }
            }
        }
    }
    rep
}

/// The single-step relation is a function: every enumerated successor
/// agrees with the deterministic stepper.
pub fn local_determinism(seed: u64, n: usize) -> LawReport {
    let mut rep = LawReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = LocalGen::new(&mut rng);
    for _ in 0..n {
        let e = g.raw(4);
        let all = lstep_all(&e);
        let one = lstep(&e);
        rep.record(all.len() <= 1 && all.first() == one.as_ref(), || format!("{e} has successors {all:?}"));
        rep.record(!(is_value(&e) && one.is_some()), || format!("value {e} steps"));
    }
    rep
}

/// Merge idempotence on the projections of generated programs.
pub fn merge_idempotence(cases: &[Case]) -> LawReport {
    let mut rep = LawReport::default();
    for c in cases {
        for l in c.universe() {
            if let Ok(e) = crate::proj::project(&c.chor, &l) {
                rep.record(merge(&e, &e).as_ref() == Some(&e), || format!("seed {}: {e} is not idempotent", c.seed));
            }
        }
    }
    rep
}

impl LawReport {
    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.violations.len() < 20 {
            self.violations.push(what());
        }
    }
}
