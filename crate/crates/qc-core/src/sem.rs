//! Labelled small-step semantics of choreographies, including the
//! out-of-order rules that let independent locations run ahead.

use alloc::boxed::Box;
use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chor::{subst_local, Chor, ChorType, Dir, TySub};
use crate::kind::Kind;
use crate::local::{ascribe, is_value, lstep, reify_ty, strip_ann, LocTable, LocalTerm};
use crate::locset::{disjoint, nec_in, LocExpr, LocSet, Name};

/// A message: a local value or a selection label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Msg {
    Val(LocalTerm),
    Sel(Dir),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Redex {
    Done(LocSet, LocalTerm, LocalTerm),
    Fun(Box<Redex>),
    Arg(Box<Redex>),
    App,
    TApp,
    UnfoldFold,
    PairL(Box<Redex>),
    PairR(Box<Redex>),
    FstPair,
    SndPair,
    CaseInl,
    CaseInr,
    LetV(LocSet, LocalTerm),
    LetTy(LocSet, ChorType),
    Send(LocExpr, Msg, LocSet),
    IfTrue(LocSet),
    IfFalse(LocSet),
}

impl fmt::Display for Msg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Msg::Val(v) => write!(f, "{v}"),
            Msg::Sel(d) => write!(f, "{d}"),
        }
    }
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Redex::Done(r, a, b) => write!(f, "Done({r}, {a}, {b})"),
            Redex::Fun(r) => write!(f, "Fun({r})"),
            Redex::Arg(r) => write!(f, "Arg({r})"),
            Redex::App => f.write_str("App"),
            Redex::TApp => f.write_str("TApp"),
            Redex::UnfoldFold => f.write_str("UnfoldFold"),
            Redex::PairL(r) => write!(f, "PairL({r})"),
            Redex::PairR(r) => write!(f, "PairR({r})"),
            Redex::FstPair => f.write_str("FstPair"),
            Redex::SndPair => f.write_str("SndPair"),
            Redex::CaseInl => f.write_str("CaseInl"),
            Redex::CaseInr => f.write_str("CaseInr"),
            Redex::LetV(r, v) => write!(f, "LetV({r}, {v})"),
            Redex::LetTy(r, t) => write!(f, "LetTy({r}, {t})"),
            Redex::Send(l, m, r) => write!(f, "Send({l}, {m}, {r})"),
            Redex::IfTrue(r) => write!(f, "IfTrue({r})"),
            Redex::IfFalse(r) => write!(f, "IfFalse({r})"),
        }
    }
}

/// Locations a redex or choreography may involve: either every location,
/// or a union of (possibly symbolic) sets. An empty union is the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Blocked {
    All,
    Sets(Vec<LocSet>),
}

impl Blocked {
    pub fn empty() -> Self {
        Blocked::Sets(Vec::new())
    }

    pub fn set(r: &LocSet) -> Self {
        Blocked::Sets(alloc::vec![r.clone()])
    }

    pub fn union(self, other: Blocked) -> Blocked {
        match (self, other) {
            (Blocked::All, _) | (_, Blocked::All) => Blocked::All,
            (Blocked::Sets(mut a), Blocked::Sets(b)) => {
                a.extend(b);
                Blocked::Sets(a)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Blocked::Sets(v) if v.is_empty())
    }

    /// Necessary disjointness.
    pub fn disjoint(&self, other: &Blocked) -> bool {
        match (self, other) {
            (Blocked::All, b) | (b, Blocked::All) => b.is_empty(),
            (Blocked::Sets(a), Blocked::Sets(b)) => a.iter().all(|x| b.iter().all(|y| disjoint(x, y))),
        }
    }

    /// Whether the concrete location `l` may be involved.
    pub fn may_contain(&self, l: &str) -> bool {
        match self {
            Blocked::All => true,
            Blocked::Sets(v) => v.iter().any(|r| crate::locset::poss_in(&LocExpr::concrete(l), r)),
        }
    }
}

impl fmt::Display for Blocked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Blocked::All => f.write_str("*"),
            Blocked::Sets(v) if v.is_empty() => f.write_str("{}"),
            Blocked::Sets(v) => {
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{r}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn rloc(r: &Redex) -> Blocked {
    match r {
        Redex::Done(p, ..) | Redex::LetV(p, _) | Redex::LetTy(p, _) | Redex::IfTrue(p) | Redex::IfFalse(p) => {
            Blocked::set(p)
        }
        Redex::Send(l, _, p) => Blocked::set(&LocSet::union(LocSet::Sng(l.clone()), p.clone())),
        Redex::Fun(r) | Redex::Arg(r) | Redex::PairL(r) | Redex::PairR(r) => rloc(r),
        Redex::App
        | Redex::TApp
        | Redex::UnfoldFold
        | Redex::FstPair
        | Redex::SndPair
        | Redex::CaseInl
        | Redex::CaseInr => Blocked::All,
    }
}

pub fn cloc(c: &Chor) -> Blocked {
    match c {
        Chor::Var(_) | Chor::Fun { .. } | Chor::TyAbs(..) => Blocked::empty(),
        Chor::Done(r, _) => Blocked::set(r),
        Chor::App(..) | Chor::TyApp(..) | Chor::Unfold(_) | Chor::Fst(_) | Chor::Snd(_) | Chor::Case { .. } => {
            Blocked::All
        }
        Chor::Fold(_, c) | Chor::Inl(_, c) | Chor::Inr(_, c) => cloc(c),
        Chor::Pair(a, b) => cloc(a).union(cloc(b)),
        Chor::LetLocal { at, head, body, .. } | Chor::LetType { at, head, body, .. } => {
            Blocked::set(at).union(cloc(head)).union(cloc(body))
        }
        Chor::Send { body, from, to } | Chor::Sync { from, to, body, .. } => {
            Blocked::set(&LocSet::union(LocSet::Sng(from.clone()), to.clone())).union(cloc(body))
        }
        Chor::If { at, cond, then, els } => Blocked::set(at).union(cloc(cond)).union(cloc(then)).union(cloc(els)),
    }
}

/// Union of two ground sets as a flat literal, left atoms first.
fn ground_union(a: &LocSet, b: &LocSet) -> LocSet {
    let mut seen: Vec<LocExpr> = Vec::new();
    for at in a.atoms().into_iter().chain(b.atoms()) {
        if let LocSet::Sng(l) = at {
            if !seen.contains(l) {
                seen.push(l.clone());
            }
        }
    }
    LocSet::of_locs(seen)
}

fn bx(c: Chor) -> Box<Chor> {
    Box::new(c)
}

fn reify(table: &LocTable, v: &LocalTerm, k: Kind) -> Option<ChorType> {
    match k {
        Kind::Loc => Some(ChorType::Loc(LocExpr::Concrete(table.reify_loc(v)?))),
        Kind::Set => {
            let names = table.reify_set(v)?;
            Some(ChorType::Set(LocSet::of_names(names.iter().map(|s| s.as_str()))))
        }
        Kind::Local => Some(ChorType::Local(reify_ty(v)?)),
        Kind::Chor => None,
    }
}

fn as_value(c: &Chor) -> Option<(&LocSet, &LocalTerm)> {
    match c {
        Chor::Done(r, v) if is_value(v) => Some((r, v)),
        _ => None,
    }
}

type Steps = Vec<(Redex, Chor)>;

struct Stepper<'a> {
    table: &'a LocTable,
    out_of_order: bool,
}

impl Stepper<'_> {
    fn steps(&self, c: &Chor) -> Steps {
        let mut out = Vec::new();
        self.collect(c, &mut out);
        out
    }

    fn ctx(&self, c: &Chor, wrap: impl Fn(Redex) -> Redex, rebuild: impl Fn(Chor) -> Chor, out: &mut Steps) {
        for (r, c2) in self.steps(c) {
            out.push((wrap(r), rebuild(c2)));
        }
    }

    /// Steps of `c` whose participants avoid `blocked`.
    fn skip(&self, blocked: &Blocked, c: &Chor, wrap: impl Fn(Redex) -> Redex, rebuild: impl Fn(Chor) -> Chor, out: &mut Steps) {
        if !self.out_of_order {
            return;
        }
        for (r, c2) in self.steps(c) {
            if blocked.disjoint(&rloc(&r)) {
                out.push((wrap(r), rebuild(c2)));
            }
        }
    }

    fn collect(&self, c: &Chor, out: &mut Steps) {
        let id = |r| r;
        match c {
            Chor::Var(_) | Chor::Fun { .. } | Chor::TyAbs(..) => {}
            Chor::Done(r, e) => {
                if r.is_ground() {
                    if let Some(e2) = lstep(e) {
                        out.push((Redex::Done(r.clone(), e.clone(), e2.clone()), Chor::Done(r.clone(), e2)));
                    }
                }
            }
            Chor::App(f, a) => {
                self.ctx(f, |r| Redex::Fun(Box::new(r)), |f2| Chor::App(bx(f2), a.clone()), out);
                if f.is_value() {
                    self.ctx(a, |r| Redex::Arg(Box::new(r)), |a2| Chor::App(f.clone(), bx(a2)), out);
                    if let (Chor::Fun { f: g, x, ret, body, .. }, true) = (&**f, a.is_value()) {
                        let unrolled = if ret.is_some() && g != x { body.subst_var(g, f) } else { (**body).clone() };
                        out.push((Redex::App, unrolled.subst_var(x, a)));
                    }
                } else {
                    self.skip(&cloc(f), a, |r| Redex::Arg(Box::new(r)), |a2| Chor::App(f.clone(), bx(a2)), out);
                }
            }
            Chor::TyApp(f, t) => {
                self.ctx(f, id, |f2| Chor::TyApp(bx(f2), t.clone()), out);
                if let Chor::TyAbs(a, k, body) = &**f {
                    out.push((Redex::TApp, body.subst_ty(a, TySub::for_kind(t, *k))));
                }
            }
            Chor::Fold(t, v) => self.ctx(v, id, |v2| Chor::Fold(t.clone(), bx(v2)), out),
            Chor::Unfold(v) => {
                self.ctx(v, id, |v2| Chor::Unfold(bx(v2)), out);
                if let Chor::Fold(_, inner) = &**v {
                    if inner.is_value() {
                        out.push((Redex::UnfoldFold, (**inner).clone()));
                    }
                }
            }
            Chor::Pair(a, b) => {
                self.ctx(a, |r| Redex::PairL(Box::new(r)), |a2| Chor::Pair(bx(a2), b.clone()), out);
                if a.is_value() {
                    self.ctx(b, |r| Redex::PairR(Box::new(r)), |b2| Chor::Pair(a.clone(), bx(b2)), out);
                } else {
                    self.skip(&cloc(a), b, |r| Redex::PairR(Box::new(r)), |b2| Chor::Pair(a.clone(), bx(b2)), out);
                }
            }
            Chor::Fst(p) | Chor::Snd(p) => {
                let first = matches!(c, Chor::Fst(_));
                let wrap = |p2| if first { Chor::Fst(bx(p2)) } else { Chor::Snd(bx(p2)) };
                self.ctx(p, id, wrap, out);
                if let Chor::Pair(a, b) = &**p {
                    if a.is_value() && b.is_value() {
                        if first {
                            out.push((Redex::FstPair, (**a).clone()));
                        } else {
                            out.push((Redex::SndPair, (**b).clone()));
                        }
                    }
                }
            }
            Chor::Inl(t, v) => self.ctx(v, id, |v2| Chor::Inl(t.clone(), bx(v2)), out),
            Chor::Inr(t, v) => self.ctx(v, id, |v2| Chor::Inr(t.clone(), bx(v2)), out),
            Chor::Case { scrut, x, left, y, right } => {
                self.ctx(
                    scrut,
                    id,
                    |s2| Chor::Case { scrut: bx(s2), x: x.clone(), left: left.clone(), y: y.clone(), right: right.clone() },
                    out,
                );
                match &**scrut {
                    Chor::Inl(_, v) if v.is_value() => out.push((Redex::CaseInl, left.subst_var(x, v))),
                    Chor::Inr(_, v) if v.is_value() => out.push((Redex::CaseInr, right.subst_var(y, v))),
                    _ => {}
                }
            }
            Chor::LetLocal { at, x, ty, head, body } => {
                let rebuild_head = |h2| Chor::LetLocal { at: at.clone(), x: x.clone(), ty: ty.clone(), head: bx(h2), body: body.clone() };
                let rebuild_body = |b2| Chor::LetLocal { at: at.clone(), x: x.clone(), ty: ty.clone(), head: head.clone(), body: bx(b2) };
                self.ctx(head, id, rebuild_head, out);
                if let (Some((_, v)), true) = (as_value(head), at.is_ground()) {
                    let v = ascribe(v, ty);
                    if let Some(next) = subst_local(body, at, x, &v) {
                        out.push((Redex::LetV(at.clone(), v), next));
                    }
                }
                self.skip(&Blocked::set(at).union(cloc(head)), body, id, rebuild_body, out);
            }
            Chor::LetType { at, a, kind, head, body } => {
                let rebuild_head = |h2| Chor::LetType { at: at.clone(), a: a.clone(), kind: *kind, head: bx(h2), body: body.clone() };
                let rebuild_body = |b2| Chor::LetType { at: at.clone(), a: a.clone(), kind: *kind, head: head.clone(), body: bx(b2) };
                self.ctx(head, id, rebuild_head, out);
                if let (Some((_, v)), true) = (as_value(head), at.is_ground()) {
                    if let Some(t) = reify(self.table, v, *kind) {
                        let next = body.subst_ty(a, TySub::for_kind(&t, *kind));
                        out.push((Redex::LetTy(at.clone(), t), next));
                    }
                }
                self.skip(&Blocked::set(at).union(cloc(head)), body, id, rebuild_body, out);
            }
            Chor::Send { body, from, to } => {
                self.ctx(body, id, |b2| Chor::Send { body: bx(b2), from: from.clone(), to: to.clone() }, out);
                if let Some((r, v)) = as_value(body) {
                    if r.is_ground() && to.is_ground() && from.is_ground() && nec_in(from, r) {
                        out.push((
                            Redex::Send(from.clone(), Msg::Val(v.clone()), to.clone()),
                            Chor::Done(ground_union(r, to), v.clone()),
                        ));
                    }
                }
            }
            Chor::Sync { from, dir, to, body } => {
                if from.is_ground() && to.is_ground() {
                    out.push((Redex::Send(from.clone(), Msg::Sel(*dir), to.clone()), (**body).clone()));
                }
                let blocked = Blocked::set(&LocSet::union(LocSet::Sng(from.clone()), to.clone()));
                self.skip(&blocked, body, id, |b2| Chor::sync(from.clone(), *dir, to.clone(), b2), out);
            }
            Chor::If { at, cond, then, els } => {
                self.ctx(cond, id, |c2| Chor::ite(at.clone(), c2, (**then).clone(), (**els).clone()), out);
                if let (Some((_, v)), true) = (as_value(cond), at.is_ground()) {
                    match strip_ann(v) {
                        LocalTerm::Bool(true) => out.push((Redex::IfTrue(at.clone()), (**then).clone())),
                        LocalTerm::Bool(false) => out.push((Redex::IfFalse(at.clone()), (**els).clone())),
                        _ => {}
                    }
                }
                if self.out_of_order {
                    let blocked = Blocked::set(at).union(cloc(cond));
                    let left = self.steps(then);
                    let right = self.steps(els);
                    for (r1, t2) in &left {
                        if !blocked.disjoint(&rloc(r1)) {
                            continue;
                        }
                        for (r2, e2) in &right {
                            if r1 == r2 {
                                out.push((r1.clone(), Chor::ite(at.clone(), (**cond).clone(), t2.clone(), e2.clone())));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Every one-step successor with its redex, in-order steps first.
pub fn enabled_steps(c: &Chor, table: &LocTable) -> Vec<(Redex, Chor)> {
    let mut v = Stepper { table, out_of_order: true }.steps(c);
    let mut seen = BTreeSet::new();
    v.retain(|s| seen.insert(s.clone()));
    v
}

/// The successors allowed without out-of-order rules. For well-typed
/// programs there is at most one.
pub fn in_order_steps(c: &Chor, table: &LocTable) -> Vec<(Redex, Chor)> {
    Stepper { table, out_of_order: false }.steps(c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemError {
    UnknownRedex(Redex),
}

impl fmt::Display for SemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemError::UnknownRedex(r) => write!(f, "redex {r} is not enabled"),
        }
    }
}

/// Take the step labelled `r`.
pub fn step_with(c: &Chor, table: &LocTable, r: &Redex) -> Result<Chor, SemError> {
    enabled_steps(c, table)
        .into_iter()
        .find(|(r2, _)| r2 == r)
        .map(|(_, c2)| c2)
        .ok_or_else(|| SemError::UnknownRedex(r.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// In-order evaluation.
    Leftmost,
    /// Uniform choice among all enabled steps.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value,
    Stuck,
    OutOfFuel,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub trace: Vec<(Redex, Chor)>,
    pub outcome: Outcome,
    pub last: Chor,
}

pub fn run(c: &Chor, table: &LocTable, fuel: usize, strategy: Strategy) -> RunReport {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::Leftmost => None,
    };
    let mut cur = c.clone();
    let mut trace = Vec::new();
    loop {
        if cur.is_value() {
            return RunReport { trace, outcome: Outcome::Value, last: cur };
        }
        if trace.len() >= fuel {
            return RunReport { trace, outcome: Outcome::OutOfFuel, last: cur };
        }
        let mut steps = match &mut rng {
            None => in_order_steps(&cur, table),
            Some(_) => enabled_steps(&cur, table),
        };
        if steps.is_empty() {
            return RunReport { trace, outcome: Outcome::Stuck, last: cur };
        }
        let i = match &mut rng {
            Some(g) => g.gen_range(0..steps.len()),
            None => 0,
        };
        let (r, next) = steps.swap_remove(i);
        trace.push((r, next.clone()));
        cur = next;
    }
}

/// Reachable states, explored breadth first up to `max_states`.
#[derive(Clone, Debug)]
pub struct Reach {
    pub states: Vec<Chor>,
    pub edges: Vec<(usize, Redex, usize)>,
    /// Whether every reachable state was visited.
    pub complete: bool,
}

impl Reach {
    pub fn terminals(&self) -> Vec<&Chor> {
        let mut has_succ = alloc::vec![false; self.states.len()];
        for (a, _, _) in &self.edges {
            has_succ[*a] = true;
        }
        self.states.iter().enumerate().filter(|(i, _)| !has_succ[*i]).map(|(_, c)| c).collect()
    }
}

pub fn explore(c: &Chor, table: &LocTable, max_states: usize) -> Reach {
    let mut index: alloc::collections::BTreeMap<Chor, usize> = alloc::collections::BTreeMap::new();
    let mut states = alloc::vec![c.clone()];
    index.insert(c.clone(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    while let Some(i) = queue.pop_front() {
        for (r, next) in enabled_steps(&states[i].clone(), table) {
            let j = match index.get(&next) {
                Some(j) => *j,
                None => {
                    if states.len() >= max_states {
                        complete = false;
                        continue;
                    }
                    states.push(next.clone());
                    index.insert(next, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            edges.push((i, r, j));
        }
    }
    Reach { states, edges, complete }
}

/// Concrete locations a redex involves, given the universe.
pub fn participants(r: &Redex, universe: &[Name]) -> BTreeSet<Name> {
    universe.iter().filter(|l| rloc(r).may_contain(l)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{LocalTerm as T, LocalType};
    use alloc::string::ToString;

    fn table() -> LocTable {
        LocTable::sequential(&["A", "B", "C", "M"])
    }

    fn plus(a: i64, b: i64) -> T {
        T::add(T::int(a), T::int(b))
    }

    #[test]
    fn collecting_send() {
        let c = Chor::send(Chor::at("A", T::int(3)), LocExpr::concrete("A"), LocSet::of_names(["B", "C"]));
        let steps = enabled_steps(&c, &table());
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0.to_string(), "Send(A, 3, {B, C})");
        assert_eq!(steps[0].1.to_string(), "{A, B, C}.3");
    }

    #[test]
    fn blocked_sets() {
        let s = Redex::Send(LocExpr::concrete("A"), Msg::Val(T::int(1)), LocSet::loc("B"));
        assert!(rloc(&s).disjoint(&Blocked::set(&LocSet::loc("C"))));
        assert!(!rloc(&Redex::App).disjoint(&Blocked::set(&LocSet::loc("C"))));
        assert!(rloc(&Redex::App).disjoint(&Blocked::empty()));
        let f = Chor::fun("F", "X", ChorType::at(LocalType::Int, LocSet::loc("A")), None, Chor::Var("X".into()));
        assert!(cloc(&f).is_empty());
        assert!(cloc(&Chor::Var("X".into())).is_empty());
    }

    #[test]
    fn if_reorders_identical_branches() {
        let c = Chor::ite(
            LocSet::loc("A"),
            Chor::at("A", T::lt(T::int(1), T::int(2))),
            Chor::at("B", plus(2, 3)),
            Chor::at("B", plus(2, 3)),
        );
        let steps = enabled_steps(&c, &table());
        let want = Chor::ite(LocSet::loc("A"), Chor::at("A", T::lt(T::int(1), T::int(2))), Chor::at("B", T::int(5)), Chor::at("B", T::int(5)));
        assert!(steps.iter().any(|(_, c2)| *c2 == want));
        assert_eq!(in_order_steps(&c, &table()).len(), 1);
    }

    #[test]
    fn no_reordering_past_condition_participant() {
        let cond = Chor::let_local(
            LocSet::loc("A"),
            "x",
            LocalType::Int,
            Chor::send(Chor::at("B", T::int(5)), LocExpr::concrete("B"), LocSet::loc("A")),
            Chor::at("A", T::lt(T::var("x"), T::int(4))),
        );
        let c = Chor::ite(LocSet::loc("A"), cond, Chor::at("B", plus(2, 3)), Chor::at("B", plus(2, 3)));
        for (r, _) in enabled_steps(&c, &table()) {
            assert!(matches!(r, Redex::Send(..)), "unexpected step {r}");
        }
    }

    #[test]
    fn values_do_not_step() {
        let v = Chor::at("A", T::int(5));
        assert!(enabled_steps(&v, &table()).is_empty());
        assert!(step_with(&v, &table(), &Redex::App).is_err());
    }
}
