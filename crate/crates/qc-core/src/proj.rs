//! Endpoint projection, merging, and the "fewer leftovers" order on
//! network programs.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chor::{Chor, ChorType, Dir, TySub};
use crate::kind::Kind;
use crate::local::LocalTerm;
use crate::locset::{nec_in, LocExpr, LocSet, Name};
use crate::net::{Net, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailReason {
    MergeUndefined,
    FreeTypevarInBody,
    NamespaceVariableUnresolved,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::MergeUndefined => "merge-undefined",
            FailReason::FreeTypevarInBody => "free-typevar-in-body",
            FailReason::NamespaceVariableUnresolved => "namespace-variable-unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionFailure {
    pub loc: Name,
    pub reason: FailReason,
    /// Child positions from the root to the failing construct.
    pub path: Vec<&'static str>,
    pub detail: String,
}

impl fmt::Display for ProjectionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} at /", self.loc, self.reason.as_str())?;
        for (i, p) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            f.write_str(p)?;
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// `E1 ⨟ E2`: drop a head that is already a value.
pub fn seq_collapse(a: Net, b: Net) -> Net {
    if a.is_value() {
        b
    } else {
        Net::seq(a, b)
    }
}

fn bx(e: Net) -> Box<Net> {
    Box::new(e)
}

fn merge_opt(a: &Option<Box<Net>>, b: &Option<Box<Net>>) -> Option<Option<Box<Net>>> {
    Some(match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(bx(merge(x, y)?)),
    })
}

/// Partial merge; `None` where the programs disagree on anything but
/// which selection branches they offer.
pub fn merge(a: &Net, b: &Net) -> Option<Net> {
    use Net as N;
    let m = |x: &Net, y: &Net| merge(x, y).map(bx);
    Some(match (a, b) {
        (N::Var(x), N::Var(y)) if x == y => a.clone(),
        (N::Unit, N::Unit) => N::Unit,
        (N::Ret(x), N::Ret(y)) if x == y => a.clone(),
        (N::Recv(x), N::Recv(y)) if x == y => a.clone(),
        (N::Seq(a1, a2), N::Seq(b1, b2)) => N::Seq(m(a1, b1)?, m(a2, b2)?),
        (N::App(a1, a2), N::App(b1, b2)) => N::App(m(a1, b1)?, m(a2, b2)?),
        (N::Pair(a1, a2), N::Pair(b1, b2)) => N::Pair(m(a1, b1)?, m(a2, b2)?),
        (N::Fun { f, x, rec, body: p }, N::Fun { f: g, x: y, rec: r2, body: q }) if f == g && x == y && rec == r2 => {
            N::Fun { f: f.clone(), x: x.clone(), rec: *rec, body: m(p, q)? }
        }
        (N::TyAbs(x, k, p), N::TyAbs(y, k2, q)) if x == y && k == k2 => N::TyAbs(x.clone(), *k, m(p, q)?),
        (N::TyApp(p, t), N::TyApp(q, u)) if t == u => N::TyApp(m(p, q)?, t.clone()),
        (N::Fold(p), N::Fold(q)) => N::Fold(m(p, q)?),
        (N::Unfold(p), N::Unfold(q)) => N::Unfold(m(p, q)?),
        (N::Fst(p), N::Fst(q)) => N::Fst(m(p, q)?),
        (N::Snd(p), N::Snd(q)) => N::Snd(m(p, q)?),
        (N::Inl(p), N::Inl(q)) => N::Inl(m(p, q)?),
        (N::Inr(p), N::Inr(q)) => N::Inr(m(p, q)?),
        (
            N::Case { scrut: s1, x: x1, left: l1, y: y1, right: r1 },
            N::Case { scrut: s2, x: x2, left: l2, y: y2, right: r2 },
        ) if x1 == x2 && y1 == y2 => {
            N::Case { scrut: m(s1, s2)?, x: x1.clone(), left: m(l1, l2)?, y: y1.clone(), right: m(r1, r2)? }
        }
        (N::LetLocal { x, ty, head: h1, body: b1 }, N::LetLocal { x: y, ty: u, head: h2, body: b2 })
            if x == y && ty == u =>
        {
            N::LetLocal { x: x.clone(), ty: ty.clone(), head: m(h1, h2)?, body: m(b1, b2)? }
        }
        (N::LetType { a: x, kind, head: h1, body: b1 }, N::LetType { a: y, kind: k2, head: h2, body: b2 })
            if x == y && kind == k2 =>
        {
            N::LetType { a: x.clone(), kind: *kind, head: m(h1, h2)?, body: m(b1, b2)? }
        }
        (N::Send(p, r), N::Send(q, s)) if r == s => N::Send(m(p, q)?, r.clone()),
        (N::Choose(d, r, p), N::Choose(d2, s, q)) if d == d2 && r == s => N::Choose(*d, r.clone(), m(p, q)?),
        (N::Allow { from, left: l1, right: r1 }, N::Allow { from: f2, left: l2, right: r2 }) if from == f2 => {
            N::Allow { from: from.clone(), left: merge_opt(l1, l2)?, right: merge_opt(r1, r2)? }
        }
        (N::If(c1, a1, b1), N::If(c2, a2, b2)) => N::If(m(c1, c2)?, m(a1, a2)?, m(b1, b2)?),
        (N::AmIIn(r, a1, b1), N::AmIIn(s, a2, b2)) if r == s => N::AmIIn(r.clone(), m(a1, a2)?, m(b1, b2)?),
        _ => return None,
    })
}

struct Projector<'a> {
    me: &'a str,
    path: Vec<&'static str>,
}

type PResult = Result<Net, ProjectionFailure>;

impl Projector<'_> {
    fn fail(&self, reason: FailReason, detail: String) -> ProjectionFailure {
        ProjectionFailure { loc: self.me.into(), reason, path: self.path.clone(), detail }
    }

    fn at(&mut self, step: &'static str, c: &Chor) -> PResult {
        self.path.push(step);
        let r = self.go(c);
        self.path.pop();
        r
    }

    fn member(&self, r: &LocSet) -> bool {
        nec_in(&LocExpr::concrete(self.me), r)
    }

    fn is_me(&self, l: &LocExpr) -> bool {
        l.as_concrete() == Some(self.me)
    }

    /// The two branches of an identity test on `a`: the body with `a` made
    /// to include this location, and the body with `a` kept abstract.
    fn identity_split(&mut self, a: &str, kind: Kind, body: &Chor) -> Result<(Net, Net), ProjectionFailure> {
        let me = LocExpr::concrete(self.me);
        let inside = match kind {
            Kind::Loc => body.subst_ty(a, TySub::Loc(&me)),
            _ => {
                let grown = LocSet::union(LocSet::Sng(me), LocSet::Var(a.into()));
                body.subst_ty(a, TySub::Set(&grown))
            }
        };
        let yes = self.at("body", &inside)?;
        let no = self.at("body", body)?;
        Ok((yes, no))
    }

    fn guard(kind: Kind, a: &str) -> LocSet {
        match kind {
            Kind::Loc => LocSet::Sng(LocExpr::Var(a.into())),
            _ => LocSet::Var(a.into()),
        }
    }

    fn go(&mut self, c: &Chor) -> PResult {
        Ok(match c {
            Chor::Var(x) => Net::Var(x.clone()),
            Chor::Done(r, e) => {
                if self.member(r) {
                    Net::Ret(e.clone())
                } else {
                    Net::Unit
                }
            }
            Chor::Fun { f, x, ret, body, .. } => {
                Net::Fun { f: f.clone(), x: x.clone(), rec: ret.is_some(), body: bx(self.at("body", body)?) }
            }
            Chor::App(a, b) => Net::App(bx(self.at("fun", a)?), bx(self.at("arg", b)?)),
            Chor::TyAbs(a, k, body) => match k {
                Kind::Loc | Kind::Set => {
                    let (yes, no) = self.identity_split(a, *k, body)?;
                    Net::TyAbs(a.clone(), *k, bx(Net::AmIIn(Self::guard(*k, a), bx(yes), bx(no))))
                }
                _ => Net::TyAbs(a.clone(), *k, bx(self.at("body", body)?)),
            },
            Chor::TyApp(e, t) => Net::TyApp(bx(self.at("fun", e)?), t.clone()),
            Chor::Fold(_, e) => Net::Fold(bx(self.at("body", e)?)),
            Chor::Unfold(e) => Net::Unfold(bx(self.at("body", e)?)),
            Chor::Pair(a, b) => Net::Pair(bx(self.at("fst", a)?), bx(self.at("snd", b)?)),
            Chor::Fst(e) => Net::Fst(bx(self.at("body", e)?)),
            Chor::Snd(e) => Net::Snd(bx(self.at("body", e)?)),
            Chor::Inl(_, e) => Net::Inl(bx(self.at("body", e)?)),
            Chor::Inr(_, e) => Net::Inr(bx(self.at("body", e)?)),
            Chor::Case { scrut, x, left, y, right } => Net::Case {
                scrut: bx(self.at("scrut", scrut)?),
                x: x.clone(),
                left: bx(self.at("left", left)?),
                y: y.clone(),
                right: bx(self.at("right", right)?),
            },
            Chor::LetLocal { at, x, ty, head, body } => {
                let h = self.at("head", head)?;
                let b = self.at("body", body)?;
                if self.member(at) {
                    Net::LetLocal { x: x.clone(), ty: ty.clone(), head: bx(h), body: bx(b) }
                } else if !b.has_free_local(x) {
                    seq_collapse(h, b)
                } else {
                    return Err(self.fail(FailReason::NamespaceVariableUnresolved, format!("{x} is bound at {at}")));
                }
            }
            Chor::LetType { at, a, kind, head, body } => {
                let h = self.at("head", head)?;
                if self.member(at) {
                    let b = match kind {
                        Kind::Loc | Kind::Set => {
                            let (yes, no) = self.identity_split(a, *kind, body)?;
                            Net::AmIIn(Self::guard(*kind, a), bx(yes), bx(no))
                        }
                        _ => self.at("body", body)?,
                    };
                    Net::LetType { a: a.clone(), kind: *kind, head: bx(h), body: bx(b) }
                } else {
                    let b = self.at("body", body)?;
                    if b.ftv().contains(a) {
                        return Err(self.fail(FailReason::FreeTypevarInBody, format!("{a} is bound at {at}")));
                    }
                    seq_collapse(h, b)
                }
            }
            Chor::Send { body, from, to } => {
                let b = self.at("body", body)?;
                if self.is_me(from) {
                    Net::send(b, to.clone())
                } else if self.member(to) {
                    seq_collapse(b, Net::Recv(from.clone()))
                } else {
                    b
                }
            }
            Chor::Sync { from, dir, to, body } => {
                let b = self.at("body", body)?;
                if self.is_me(from) {
                    Net::Choose(*dir, to.clone(), bx(b))
                } else if self.member(to) {
                    match dir {
                        Dir::L => Net::allow_left(from.clone(), b),
                        Dir::R => Net::allow_right(from.clone(), b),
                    }
                } else {
                    b
                }
            }
            Chor::If { at, cond, then, els } => {
                let c2 = self.at("cond", cond)?;
                let t2 = self.at("then", then)?;
                let e2 = self.at("else", els)?;
                if self.member(at) {
                    Net::If(bx(c2), bx(t2), bx(e2))
                } else {
                    match merge(&t2, &e2) {
                        Some(m) => seq_collapse(c2, m),
                        None => {
                            return Err(self.fail(FailReason::MergeUndefined, format!("branches {t2} and {e2}")));
                        }
                    }
                }
            }
        })
    }
}

/// `⟦C⟧_L`.
pub fn project(c: &Chor, l: &str) -> Result<Net, ProjectionFailure> {
    Projector { me: l, path: Vec::new() }.go(c)
}

/// Pointwise projection onto `locs`; every failing location is reported.
pub fn project_system<'a>(c: &Chor, locs: impl IntoIterator<Item = &'a str>) -> Result<System, Vec<ProjectionFailure>> {
    let mut procs = BTreeMap::new();
    let mut errs = Vec::new();
    for l in locs {
        match project(c, l) {
            Ok(e) => {
                procs.insert(Name::from(l), e);
            }
            Err(e) => errs.push(e),
        }
    }
    assert!(!procs.is_empty() || !errs.is_empty(), "projection needs at least one location");
    if errs.is_empty() {
        Ok(System::new(procs))
    } else {
        Err(errs)
    }
}

fn type_locs(t: &ChorType, out: &mut BTreeSet<Name>) {
    match t {
        ChorType::Var(_) => {}
        ChorType::At(_, r) | ChorType::Set(r) => r.concrete_names(out),
        ChorType::Loc(l) => {
            if let LocExpr::Concrete(n) = l {
                out.insert(n.clone());
            }
        }
        ChorType::Arrow(a, b) | ChorType::Prod(a, b) | ChorType::Sum(a, b) => {
            type_locs(a, out);
            type_locs(b, out);
        }
        ChorType::Forall(_, _, t) | ChorType::Mu(_, t) => type_locs(t, out),
        ChorType::Local(_) => {}
    }
}

/// Concrete locations named by a choreography, including type arguments.
pub fn named_locs(c: &Chor) -> BTreeSet<Name> {
    let mut out = c.locations();
    fn walk(c: &Chor, out: &mut BTreeSet<Name>) {
        if let Chor::TyApp(_, t) = c {
            type_locs(t, out);
        }
        for ch in c.children() {
            walk(ch, out);
        }
    }
    walk(c, &mut out);
    out
}

/// Rename binders to their nesting depth and normalize location sets, so
/// that alpha-equivalent programs become equal.
pub fn canonical(e: &Net) -> Net {
    canon(e, 0).map_sets(&|r: &LocSet| r.normalize())
}

fn level(d: usize) -> Name {
    format!("#{d}")
}

fn canon(e: &Net, d: usize) -> Net {
    match e {
        Net::Fun { f, x, rec, body } => {
            let (f2, x2) = (level(d), level(d + 1));
            let mut b = (**body).clone();
            if *rec && f != x {
                b = b.subst_var(f, &Net::Var(f2.clone()));
            }
            b = b.subst_var(x, &Net::Var(x2.clone()));
            let f_out = if *rec { f2 } else { f.clone() };
            Net::Fun { f: f_out, x: x2, rec: *rec, body: bx(canon(&b, d + 2)) }
        }
        Net::Case { scrut, x, left, y, right } => {
            let v = level(d);
            Net::Case {
                scrut: bx(canon(scrut, d)),
                x: v.clone(),
                left: bx(canon(&left.subst_var(x, &Net::Var(v.clone())), d + 1)),
                y: v.clone(),
                right: bx(canon(&right.subst_var(y, &Net::Var(v)), d + 1)),
            }
        }
        Net::TyAbs(a, k, body) => {
            let v = level(d);
            Net::TyAbs(v.clone(), *k, bx(canon(&body.subst_ty(a, TySub::Rename(&v)), d + 1)))
        }
        Net::LetType { a, kind, head, body } => {
            let v = level(d);
            Net::LetType {
                a: v.clone(),
                kind: *kind,
                head: bx(canon(head, d)),
                body: bx(canon(&body.subst_ty(a, TySub::Rename(&v)), d + 1)),
            }
        }
        Net::LetLocal { x, ty, head, body } => {
            let v = level(d);
            Net::LetLocal {
                x: v.clone(),
                ty: ty.clone(),
                head: bx(canon(head, d)),
                body: bx(canon(&body.subst_local(x, &LocalTerm::Var(v)), d + 1)),
            }
        }
        _ => e.map_children(&mut |c| canon(c, d)),
    }
}

fn leq_opt(a: &Option<Box<Net>>, b: &Option<Box<Net>>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => leq_raw(x, y),
    }
}

/// Whether some value is below `e`: `e` is a value, possibly with
/// absorbed prefixes inside.
fn above_value(e: &Net) -> bool {
    match e {
        Net::Unit | Net::Fun { .. } | Net::TyAbs(..) => true,
        Net::Ret(v) => crate::local::is_value(v),
        Net::Seq(a, b) | Net::Pair(a, b) => above_value(a) && above_value(b),
        Net::Inl(v) | Net::Inr(v) | Net::Fold(v) => above_value(v),
        _ => false,
    }
}

/// The order on canonical forms. The rules are closed under transitivity:
/// an absorbed prefix only has to lie above some value.
fn leq_raw(a: &Net, b: &Net) -> bool {
    use Net as N;
    if let N::Seq(v, rest) = b {
        if above_value(v) && leq_raw(a, rest) {
            return true;
        }
    }
    match (a, b) {
        (N::Var(x), N::Var(y)) => x == y,
        (N::Unit, N::Unit) => true,
        (N::Ret(x), N::Ret(y)) => x == y,
        (N::Recv(x), N::Recv(y)) => x == y,
        (N::Seq(a1, a2), N::Seq(b1, b2))
        | (N::App(a1, a2), N::App(b1, b2))
        | (N::Pair(a1, a2), N::Pair(b1, b2)) => leq_raw(a1, b1) && leq_raw(a2, b2),
        (N::Fun { f, x, rec, body: p }, N::Fun { f: g, x: y, rec: r2, body: q }) => {
            f == g && x == y && rec == r2 && leq_raw(p, q)
        }
        (N::TyAbs(x, k, p), N::TyAbs(y, k2, q)) => x == y && k == k2 && leq_raw(p, q),
        (N::TyApp(p, t), N::TyApp(q, u)) => t == u && leq_raw(p, q),
        (N::Fold(p), N::Fold(q))
        | (N::Unfold(p), N::Unfold(q))
        | (N::Fst(p), N::Fst(q))
        | (N::Snd(p), N::Snd(q))
        | (N::Inl(p), N::Inl(q))
        | (N::Inr(p), N::Inr(q)) => leq_raw(p, q),
        (
            N::Case { scrut: s1, x: x1, left: l1, y: y1, right: r1 },
            N::Case { scrut: s2, x: x2, left: l2, y: y2, right: r2 },
        ) => x1 == x2 && y1 == y2 && leq_raw(s1, s2) && leq_raw(l1, l2) && leq_raw(r1, r2),
        (N::LetLocal { x, ty, head: h1, body: b1 }, N::LetLocal { x: y, ty: u, head: h2, body: b2 }) => {
            x == y && ty == u && leq_raw(h1, h2) && leq_raw(b1, b2)
        }
        (N::LetType { a: x, kind, head: h1, body: b1 }, N::LetType { a: y, kind: k2, head: h2, body: b2 }) => {
            x == y && kind == k2 && leq_raw(h1, h2) && leq_raw(b1, b2)
        }
        (N::Send(p, r), N::Send(q, s)) => r == s && leq_raw(p, q),
        (N::Choose(d, r, p), N::Choose(d2, s, q)) => d == d2 && r == s && leq_raw(p, q),
        (N::Allow { from, left: l1, right: r1 }, N::Allow { from: f2, left: l2, right: r2 }) => {
            from == f2 && leq_opt(l1, l2) && leq_opt(r1, r2)
        }
        (N::If(c1, a1, b1), N::If(c2, a2, b2)) => leq_raw(c1, c2) && leq_raw(a1, a2) && leq_raw(b1, b2),
        (N::AmIIn(r, a1, b1), N::AmIIn(s, a2, b2)) => r == s && leq_raw(a1, a2) && leq_raw(b1, b2),
        _ => false,
    }
}

/// `E1 ⪯ E2`, up to renaming of bound names and location-set normalization.
pub fn leq(a: &Net, b: &Net) -> bool {
    leq_raw(&canonical(a), &canonical(b))
}

/// `leq` on arguments already in canonical form.
pub fn leq_canonical(a: &Net, b: &Net) -> bool {
    leq_raw(a, b)
}

/// Pointwise order over systems with the same locations.
pub fn leq_system(a: &System, b: &System) -> bool {
    a.procs.len() == b.procs.len()
        && a.procs.iter().all(|(l, e)| b.procs.get(l).is_some_and(|e2| leq(e, e2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalTerm as T;
    use alloc::string::ToString;

    fn plus(a: i64, b: i64) -> T {
        T::add(T::int(a), T::int(b))
    }

    #[test]
    fn send_projects_to_both_ends() {
        let c = Chor::send(Chor::at("A", plus(2, 3)), LocExpr::concrete("A"), LocSet::loc("B"));
        assert_eq!(project(&c, "A").unwrap().to_string(), "send(ret(2 + 3), {B})");
        assert_eq!(project(&c, "B").unwrap().to_string(), "recv(A)");
        assert_eq!(project(&c, "C").unwrap(), Net::Unit);
    }

    #[test]
    fn merge_unions_selection_branches() {
        let a = LocExpr::concrete("A");
        let l = Net::allow_left(a.clone(), Net::Ret(T::int(1)));
        let r = Net::allow_right(a, Net::Ret(T::int(2)));
        assert_eq!(merge(&l, &r).unwrap().to_string(), "allow A: left => ret(1) | right => ret(2)");
        assert_eq!(merge(&Net::Ret(T::int(1)), &Net::Ret(T::int(2))), None);
    }

    #[test]
    fn bystander_of_let_collapses() {
        let c = Chor::let_local(LocSet::loc("A"), "x", crate::local::LocalType::Int, Chor::at("A", T::var("e")), Chor::at("B", plus(2, 3)));
        assert_eq!(project(&c, "B").unwrap(), Net::Ret(plus(2, 3)));
    }

    #[test]
    fn order_absorbs_value_prefix() {
        assert!(leq(&Net::Ret(T::int(5)), &Net::seq(Net::Unit, Net::Ret(T::int(5)))));
        let a = LocExpr::concrete("A");
        let one = Net::allow_left(a.clone(), Net::Ret(T::int(1)));
        let both = Net::Allow { from: a, left: Some(bx(Net::Ret(T::int(1)))), right: Some(bx(Net::Ret(T::int(2)))) };
        assert!(leq(&one, &both));
        assert!(!leq(&both, &one));
    }

    #[test]
    fn order_is_transitive_through_nested_prefixes() {
        let u = || Net::Unit;
        let mid = Net::seq(u(), u());
        let top = Net::seq(Net::seq(u(), u()), u());
        assert!(leq(&u(), &mid) && leq(&mid, &top));
        assert!(leq(&u(), &top));
        assert!(!leq(&u(), &Net::seq(Net::recv("A"), u())));
    }
}
