//! Bounded checks of the metatheorems.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chor::{Chor, ChorType};
use crate::local::{run_local, LocTable, LocalRun};
use crate::locset::Name;
use crate::net::{explore, simulate, system_steps, Graph, NodeKind, Scheduler, System};
use crate::proj::{leq_system, named_locs, project_system};
use crate::sem::{enabled_steps, Redex};
use crate::statics::{chor_ty_equiv, type_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Theorem {
    Preservation,
    Progress,
    Completeness,
    Soundness,
    Confluence,
    DeadlockFreedom,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::Preservation => "preservation",
            Theorem::Progress => "progress",
            Theorem::Completeness => "completeness",
            Theorem::Soundness => "soundness",
            Theorem::Confluence => "confluence",
            Theorem::DeadlockFreedom => "deadlock-freedom",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub seed: Option<u64>,
    pub program: String,
    pub witness: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub cases: usize,
    /// Cases not run because a premise does not hold (e.g. local fuel).
    pub skipped: usize,
    pub failures: Vec<Failure>,
}

impl TheoremReport {
    pub fn new(theorem: Theorem) -> Self {
        TheoremReport { theorem, cases: 0, skipped: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn absorb(&mut self, other: TheoremReport) {
        self.cases += other.cases;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        for f in &mut self.failures {
            f.seed = Some(seed);
        }
        self
    }

    fn fail(&mut self, program: &dyn fmt::Display, witness: Vec<String>, message: String) {
        self.failures.push(Failure { seed: None, program: program.to_string(), witness, message });
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} cases, {} skipped, {} failures", self.theorem.id(), self.cases, self.skipped, self.failures.len())
    }
}

/// Choreography states reachable in at most `depth` steps, with the
/// redex path that first reached each one.
fn chor_levels(c: &Chor, table: &LocTable, depth: usize, cap: usize) -> Vec<(Chor, Vec<Redex>)> {
    let mut seen: BTreeSet<Chor> = BTreeSet::new();
    seen.insert(c.clone());
    let mut out = vec![(c.clone(), Vec::new())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if out[i].1.len() >= depth || out.len() >= cap {
            continue;
        }
        for (r, next) in enabled_steps(&out[i].0, table) {
            if seen.insert(next.clone()) {
                let mut path = out[i].1.clone();
                path.push(r);
                out.push((next, path));
                queue.push_back(out.len() - 1);
            }
        }
    }
    out
}

fn path_strings(p: &[Redex]) -> Vec<String> {
    p.iter().map(|r| r.to_string()).collect()
}

/// Every state within `depth` steps re-checks at the original type.
pub fn check_preservation(c: &Chor, ty: &ChorType, table: &LocTable, depth: usize) -> TheoremReport {
    let mut rep = TheoremReport::new(Theorem::Preservation);
    for (s, path) in chor_levels(c, table, depth, 4000) {
        rep.cases += 1;
        match type_of(table, &s) {
            Ok(t) if chor_ty_equiv(&t, ty) => {}
            Ok(t) => rep.fail(c, path_strings(&path), format!("{s} has type {t}, expected {ty}")),
            Err(e) => rep.fail(c, path_strings(&path), format!("{s} is ill-typed: {e}")),
        }
    }
    rep
}

/// Every state within `depth` steps is a value or can step.
pub fn check_progress(c: &Chor, table: &LocTable, depth: usize) -> TheoremReport {
    let mut rep = TheoremReport::new(Theorem::Progress);
    for (s, path) in chor_levels(c, table, depth, 4000) {
        rep.cases += 1;
        if !s.is_value() && enabled_steps(&s, table).is_empty() {
            rep.fail(c, path_strings(&path), format!("stuck at {s}"));
        }
    }
    rep
}

/// Checks that need a projectable program.
pub struct Projected<'a> {
    pub chor: &'a Chor,
    pub table: &'a LocTable,
    pub locs: Vec<Name>,
    pub system: System,
}

impl<'a> Projected<'a> {
    /// `None` when projection fails or a named location is missing.
    pub fn new(chor: &'a Chor, table: &'a LocTable, locs: &[Name]) -> Option<Self> {
        let have: BTreeSet<&Name> = locs.iter().collect();
        if locs.is_empty() || !named_locs(chor).iter().all(|l| have.contains(l)) {
            return None;
        }
        let system = project_system(chor, locs.iter().map(|s| s.as_str())).ok()?;
        Some(Projected { chor, table, locs: locs.to_vec(), system })
    }

    fn project(&self, c: &Chor) -> Option<System> {
        project_system(c, self.locs.iter().map(|s| s.as_str())).ok()
    }
}

/// Default search slack for `n` choreographic steps.
pub fn slack(n: usize) -> usize {
    2 * n + 8
}

/// Systems reachable in exactly `k` steps, for each `k <= max`.
fn exact_levels(sys: &System, table: &LocTable, max: usize, cap: usize) -> Vec<Vec<System>> {
    let mut levels = vec![vec![sys.clone()]];
    for _ in 0..max {
        let mut next: BTreeSet<System> = BTreeSet::new();
        for s in levels.last().expect("nonempty") {
            for (_, t) in system_steps(s, table) {
                next.insert(t);
                if next.len() >= cap {
                    break;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// For every `C ->^n C'` with `n <= max_n`, some system `k` steps away from
/// the projection of `C` (with `n <= k <= slack(n)`) is above the projection of `C'`.
pub fn check_completeness(p: &Projected, max_n: usize) -> TheoremReport {
    let mut rep = TheoremReport::new(Theorem::Completeness);
    let levels = exact_levels(&p.system, p.table, slack(max_n), 20_000);
    for (c2, path) in chor_levels(p.chor, p.table, max_n, 2000) {
        rep.cases += 1;
        let n = path.len();
        let Some(target) = p.project(&c2) else {
            rep.fail(p.chor, path_strings(&path), format!("projection of the reduct {c2} is undefined"));
            continue;
        };
        let found = (n..=slack(n).min(levels.len().saturating_sub(1)))
            .any(|k| levels[k].iter().any(|s| leq_system(&target, s)));
        if !found {
            rep.fail(
                p.chor,
                path_strings(&path),
                format!("no system within {} steps is above the projection {target}", slack(n)),
            );
        }
    }
    rep
}

/// Whether every local computation met in the first `depth` steps finishes
/// within `fuel` steps.
pub fn locally_terminating(c: &Chor, table: &LocTable, depth: usize, fuel: usize) -> bool {
    fn scan(c: &Chor, fuel: usize) -> bool {
        if let Chor::Done(_, e) = c {
            if e.fv().is_empty() && matches!(run_local(e, fuel), LocalRun::OutOfFuel(_)) {
                return false;
            }
        }
        c.children().into_iter().all(|ch| scan(ch, fuel))
    }
    chor_levels(c, table, depth, 2000).iter().all(|(s, _)| scan(s, fuel))
}

pub const LOCAL_FUEL: usize = 1000;

/// For every system reached within `depth` steps, running on reaches a
/// system above the projection of some reduct of the choreography.
pub fn check_soundness(p: &Projected, depth: usize, chor_depth: usize) -> TheoremReport {
    let mut rep = TheoremReport::new(Theorem::Soundness);
    if !locally_terminating(p.chor, p.table, chor_depth, LOCAL_FUEL) {
        rep.skipped += 1;
        return rep;
    }
    let reducts: Vec<System> =
        chor_levels(p.chor, p.table, chor_depth, 4000).iter().filter_map(|(c, _)| p.project(c)).collect();
    let g = explore(&p.system, p.table, depth);
    for (i, sys) in g.nodes.iter().enumerate() {
        rep.cases += 1;
        let run = simulate(sys, p.table, Scheduler::Leftmost, 4 * chor_depth + 16);
        let joined = core::iter::once(sys)
            .chain(run.trace.iter().map(|(_, s)| s))
            .any(|s2| reducts.iter().any(|r| leq_system(r, s2)));
        if !joined {
            rep.fail(p.chor, graph_path(&g, i), format!("no reduct projects below a successor of {sys}"));
        }
    }
    rep
}

fn graph_path(g: &Graph, target: usize) -> Vec<String> {
    let mut parent: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    for (a, l, b) in &g.edges {
        if g.depth[*b] == g.depth[*a] + 1 {
            parent.entry(*b).or_insert((*a, l.to_string()));
        }
    }
    let mut out = Vec::new();
    let mut cur = target;
    while let Some((p, l)) = parent.get(&cur) {
        out.push(l.clone());
        cur = *p;
    }
    out.reverse();
    out
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn or(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= *b;
        }
    }
    fn meets(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }
}

/// Reflexive-transitive successor sets of every node.
fn reach_sets(g: &Graph) -> Vec<Bits> {
    let n = g.nodes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, _, b) in &g.edges {
        succ[*a].push(*b);
    }
    let mut reach: Vec<Bits> = (0..n)
        .map(|i| {
            let mut b = Bits::new(n);
            b.set(i);
            b
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (a, b) in succ.iter().enumerate().flat_map(|(a, bs)| bs.iter().map(move |b| (a, *b))) {
            let add = Bits(reach[b].0.clone());
            let before = reach[a].0.clone();
            reach[a].or(&add);
            changed |= reach[a].0 != before;
        }
    }
    reach
}

/// All pairs of systems reachable within `depth` have a common successor,
/// searching `join_depth` further steps.
pub fn check_confluence(sys: &System, table: &LocTable, depth: usize, join_depth: usize) -> TheoremReport {
    let mut rep = TheoremReport::new(Theorem::Confluence);
    let g = explore(sys, table, depth + join_depth);
    let reach = reach_sets(&g);
    let inner: Vec<usize> = (0..g.nodes.len()).filter(|i| g.depth[*i] <= depth).collect();
    for (x, &i) in inner.iter().enumerate() {
        for &j in &inner[x..] {
            rep.cases += 1;
            if !reach[i].meets(&reach[j]) {
                rep.fail(
                    sys,
                    vec![format!("{}", g.nodes[i]), format!("{}", g.nodes[j])],
                    format!("no common successor within {} steps", depth + join_depth),
                );
            }
        }
    }
    rep
}

/// Every system reached within `depth` steps is all values or can step.
pub fn check_deadlock_freedom(sys: &System, table: &LocTable, depth: usize) -> TheoremReport {
    let g = explore(sys, table, depth);
    let mut rep = TheoremReport::new(Theorem::DeadlockFreedom);
    rep.cases = g.nodes.len();
    for (i, k) in g.kinds.iter().enumerate() {
        if *k == NodeKind::Deadlocked {
            rep.fail(sys, graph_path(&g, i), format!("deadlocked at {}", g.nodes[i]));
        }
    }
    rep
}
