//! Systems of located programs and their interleaving semantics.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::step::{net_step, receive, Action, Label};
use super::Net;
use crate::local::LocTable;
use crate::locset::Name;
use crate::sem::Msg;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct System {
    pub procs: BTreeMap<Name, Net>,
}

impl System {
    pub fn new(procs: BTreeMap<Name, Net>) -> Self {
        assert!(!procs.is_empty(), "a system needs at least one location");
        System { procs }
    }

    pub fn get(&self, l: &str) -> Option<&Net> {
        self.procs.get(l)
    }

    pub fn locations(&self) -> impl Iterator<Item = &Name> {
        self.procs.keys()
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, e)) in self.procs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} ▷ {e}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SysLabel {
    /// An internal step of one location.
    Iota(Name),
    IotaSync,
    Comm { from: Name, msg: Msg, to: BTreeSet<Name> },
}

impl SysLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            SysLabel::Iota(_) => "iota",
            SysLabel::IotaSync => "iota_sync",
            SysLabel::Comm { .. } => "comm",
        }
    }
}

impl fmt::Display for SysLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SysLabel::Iota(l) => write!(f, "iota@{l}"),
            SysLabel::IotaSync => f.write_str("iota_sync"),
            SysLabel::Comm { from, msg, to } => {
                write!(f, "{from}.{msg} ~> {{")?;
                for (i, l) in to.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(l)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// All system transitions: internal steps in location order, then the
/// synchronized step, then communications in sender order.
pub fn system_steps(sys: &System, table: &LocTable) -> Vec<(SysLabel, System)> {
    let actions: BTreeMap<&Name, Option<Action>> =
        sys.procs.iter().map(|(l, e)| (l, net_step(l, e, table))).collect();
    let mut out = Vec::new();
    for (l, a) in &actions {
        if let Some(Action::Step(Label::Iota, next)) = a {
            let mut s = sys.clone();
            s.procs.insert((*l).clone(), next.clone());
            out.push((SysLabel::Iota((*l).clone()), s));
        }
    }
    if actions.values().all(|a| matches!(a, Some(Action::Step(Label::IotaSync, _)))) {
        let mut s = sys.clone();
        for (l, a) in &actions {
            if let Some(Action::Step(_, next)) = a {
                s.procs.insert((*l).clone(), next.clone());
            }
        }
        out.push((SysLabel::IotaSync, s));
    }
    for (l, a) in &actions {
        let Some(Action::Send { msg, to, next }) = a else { continue };
        let mut s = sys.clone();
        s.procs.insert((*l).clone(), next.clone());
        let delivered = to.iter().all(|r| match sys.procs.get(r) {
            Some(e) => match receive(r, e, l, msg, table) {
                Some(e2) => {
                    s.procs.insert(r.clone(), e2);
                    true
                }
                None => false,
            },
            None => false,
        });
        if delivered {
            out.push((SysLabel::Comm { from: (*l).clone(), msg: msg.clone(), to: to.clone() }, s));
        }
    }
    out
}

pub fn is_terminal_values(sys: &System) -> bool {
    sys.procs.values().all(Net::is_value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheduler {
    /// Always the first enabled transition.
    Leftmost,
    /// Uniform choice, reproducible from the seed.
    Seeded(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Every location holds a value.
    AllValues,
    /// Some location is not a value and nothing can step.
    Deadlocked,
    /// Successors were not explored.
    Frontier,
    Inner,
}

#[derive(Clone, Debug)]
pub struct SimReport {
    pub trace: Vec<(SysLabel, System)>,
    /// `None` when fuel ran out first.
    pub end: Option<NodeKind>,
    pub last: System,
}

pub fn simulate(sys: &System, table: &LocTable, scheduler: Scheduler, fuel: usize) -> SimReport {
    let mut rng = match scheduler {
        Scheduler::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        Scheduler::Leftmost => None,
    };
    let mut cur = sys.clone();
    let mut trace = Vec::new();
    loop {
        let mut steps = system_steps(&cur, table);
        if steps.is_empty() {
            let kind = if is_terminal_values(&cur) { NodeKind::AllValues } else { NodeKind::Deadlocked };
            return SimReport { trace, end: Some(kind), last: cur };
        }
        if trace.len() >= fuel {
            return SimReport { trace, end: None, last: cur };
        }
        let i = rng.as_mut().map_or(0, |g| g.gen_range(0..steps.len()));
        let (l, next) = steps.swap_remove(i);
        trace.push((l, next.clone()));
        cur = next;
    }
}

/// A reachability graph rooted at node 0.
#[derive(Clone, Debug)]
pub struct Graph {
    pub nodes: Vec<System>,
    pub kinds: Vec<NodeKind>,
    pub depth: Vec<usize>,
    pub edges: Vec<(usize, SysLabel, usize)>,
}

impl Graph {
    pub fn count(&self, k: NodeKind) -> usize {
        self.kinds.iter().filter(|x| **x == k).count()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(a, _, _)| *a == i).map(|(_, _, b)| *b)
    }
}

/// Breadth-first exploration to `depth` transitions from the root.
pub fn explore(sys: &System, table: &LocTable, depth: usize) -> Graph {
    let mut g = Graph { nodes: alloc::vec![sys.clone()], kinds: alloc::vec![NodeKind::Inner], depth: alloc::vec![0], edges: Vec::new() };
    let mut index: BTreeMap<System, usize> = BTreeMap::new();
    index.insert(sys.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let steps = system_steps(&g.nodes[i], table);
        if steps.is_empty() {
            g.kinds[i] = if is_terminal_values(&g.nodes[i]) { NodeKind::AllValues } else { NodeKind::Deadlocked };
            continue;
        }
        if g.depth[i] >= depth {
            g.kinds[i] = NodeKind::Frontier;
            continue;
        }
        for (l, next) in steps {
            let j = match index.get(&next) {
                Some(j) => *j,
                None => {
                    g.nodes.push(next.clone());
                    g.kinds.push(NodeKind::Inner);
                    g.depth.push(g.depth[i] + 1);
                    let j = g.nodes.len() - 1;
                    index.insert(next, j);
                    queue.push_back(j);
                    j
                }
            };
            g.edges.push((i, l, j));
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalTerm as T;
    use crate::locset::LocSet;
    use alloc::boxed::Box;

    fn table() -> LocTable {
        LocTable::sequential(&["A", "B"])
    }

    fn sys(a: Net, b: Net) -> System {
        System::new([("A".into(), a), ("B".into(), b)].into_iter().collect())
    }

    #[test]
    fn internal_steps_per_location() {
        let s = sys(Net::Ret(T::add(T::int(2), T::int(3))), Net::Ret(T::add(T::int(2), T::int(3))));
        let steps = system_steps(&s, &table());
        assert_eq!(steps.len(), 2);
        assert!(steps.iter().all(|(l, _)| matches!(l, SysLabel::Iota(_))));
    }

    #[test]
    fn comm_delivers() {
        let s = sys(Net::send(Net::Ret(T::int(5)), LocSet::loc("B")), Net::recv("A"));
        let steps = system_steps(&s, &table());
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].1, sys(Net::Ret(T::int(5)), Net::Ret(T::int(5))));
    }

    #[test]
    fn mutual_receive_deadlocks() {
        let s = sys(Net::recv("B"), Net::recv("A"));
        let g = explore(&s, &table(), 10);
        assert_eq!(g.kinds, alloc::vec![NodeKind::Deadlocked]);
    }

    #[test]
    fn sync_needs_everyone() {
        let id = Net::Fun { f: "F".into(), x: "X".into(), rec: false, body: Box::new(Net::Var("X".into())) };
        let app = Net::App(Box::new(id), Box::new(Net::Unit));
        let s = sys(app.clone(), Net::Ret(T::add(T::int(1), T::int(1))));
        assert!(system_steps(&s, &table()).iter().all(|(l, _)| *l != SysLabel::IotaSync));
        let s2 = sys(app.clone(), app);
        assert!(system_steps(&s2, &table()).iter().any(|(l, _)| *l == SysLabel::IotaSync));
    }
}
