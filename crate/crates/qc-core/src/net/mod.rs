//! Per-location network programs and concurrent systems.

mod step;
mod system;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use core::fmt::{self, Display, Formatter};

use crate::chor::{sub_locexpr, sub_locset, sub_lterm, sub_ltype, ChorType, Dir, TySub};
use crate::kind::Kind;
use crate::local::{LocalTerm, LocalType};
use crate::locset::{LocExpr, LocSet, Name};
use crate::pretty::LP;

pub use step::{net_step, receive, Action, Label};
pub use system::{
    explore, is_terminal_values, simulate, system_steps, Graph, NodeKind, SimReport, Scheduler, SysLabel, System,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Net {
    Var(Name),
    Unit,
    Ret(LocalTerm),
    Seq(Box<Net>, Box<Net>),
    /// Recursive in `f` when `rec` is set.
    Fun {
        f: Name,
        x: Name,
        rec: bool,
        body: Box<Net>,
    },
    App(Box<Net>, Box<Net>),
    TyAbs(Name, Kind, Box<Net>),
    TyApp(Box<Net>, ChorType),
    Pair(Box<Net>, Box<Net>),
    Fst(Box<Net>),
    Snd(Box<Net>),
    Inl(Box<Net>),
    Inr(Box<Net>),
    Case {
        scrut: Box<Net>,
        x: Name,
        left: Box<Net>,
        y: Name,
        right: Box<Net>,
    },
    Fold(Box<Net>),
    Unfold(Box<Net>),
    Send(Box<Net>, LocSet),
    Recv(LocExpr),
    LetLocal {
        x: Name,
        ty: LocalType,
        head: Box<Net>,
        body: Box<Net>,
    },
    LetType {
        a: Name,
        kind: Kind,
        head: Box<Net>,
        body: Box<Net>,
    },
    If(Box<Net>, Box<Net>, Box<Net>),
    Choose(Dir, LocSet, Box<Net>),
    /// External choice; a missing branch gets stuck when selected.
    Allow {
        from: LocExpr,
        left: Option<Box<Net>>,
        right: Option<Box<Net>>,
    },
    AmIIn(LocSet, Box<Net>, Box<Net>),
}

fn bx(e: Net) -> Box<Net> {
    Box::new(e)
}

impl Net {
    pub fn seq(a: Net, b: Net) -> Net {
        Net::Seq(bx(a), bx(b))
    }

    pub fn send(e: Net, to: LocSet) -> Net {
        Net::Send(bx(e), to)
    }

    pub fn recv(from: &str) -> Net {
        Net::Recv(LocExpr::concrete(from))
    }

    pub fn allow_left(from: LocExpr, e: Net) -> Net {
        Net::Allow { from, left: Some(bx(e)), right: None }
    }

    pub fn allow_right(from: LocExpr, e: Net) -> Net {
        Net::Allow { from, left: None, right: Some(bx(e)) }
    }

    pub fn is_value(&self) -> bool {
        match self {
            Net::Unit | Net::Fun { .. } | Net::TyAbs(..) => true,
            Net::Ret(e) => crate::local::is_value(e),
            Net::Pair(a, b) => a.is_value() && b.is_value(),
            Net::Inl(v) | Net::Inr(v) | Net::Fold(v) => v.is_value(),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 1;
        self.for_each_child(&mut |c| n += c.size());
        n
    }

    pub fn for_each_child(&self, f: &mut impl FnMut(&Net)) {
        match self {
            Net::Var(_) | Net::Unit | Net::Ret(_) | Net::Recv(_) => {}
            Net::Fun { body: e, .. }
            | Net::TyAbs(_, _, e)
            | Net::TyApp(e, _)
            | Net::Fst(e)
            | Net::Snd(e)
            | Net::Inl(e)
            | Net::Inr(e)
            | Net::Fold(e)
            | Net::Unfold(e)
            | Net::Send(e, _)
            | Net::Choose(_, _, e) => f(e),
            Net::Seq(a, b)
            | Net::App(a, b)
            | Net::Pair(a, b)
            | Net::LetLocal { head: a, body: b, .. }
            | Net::LetType { head: a, body: b, .. }
            | Net::AmIIn(_, a, b) => {
                f(a);
                f(b);
            }
            Net::Case { scrut, left, right, .. } => {
                f(scrut);
                f(left);
                f(right);
            }
            Net::If(c, a, b) => {
                f(c);
                f(a);
                f(b);
            }
            Net::Allow { left, right, .. } => {
                if let Some(a) = left {
                    f(a);
                }
                if let Some(b) = right {
                    f(b);
                }
            }
        }
    }

    /// Rebuild with `f` applied to every immediate subprogram.
    pub fn map_children(&self, f: &mut impl FnMut(&Net) -> Net) -> Net {
        match self {
            Net::Var(_) | Net::Unit | Net::Ret(_) | Net::Recv(_) => self.clone(),
            Net::Seq(a, b) => Net::Seq(bx(f(a)), bx(f(b))),
            Net::Fun { f: g, x, rec, body } => Net::Fun { f: g.clone(), x: x.clone(), rec: *rec, body: bx(f(body)) },
            Net::App(a, b) => Net::App(bx(f(a)), bx(f(b))),
            Net::TyAbs(a, k, e) => Net::TyAbs(a.clone(), *k, bx(f(e))),
            Net::TyApp(e, t) => Net::TyApp(bx(f(e)), t.clone()),
            Net::Pair(a, b) => Net::Pair(bx(f(a)), bx(f(b))),
            Net::Fst(e) => Net::Fst(bx(f(e))),
            Net::Snd(e) => Net::Snd(bx(f(e))),
            Net::Inl(e) => Net::Inl(bx(f(e))),
            Net::Inr(e) => Net::Inr(bx(f(e))),
            Net::Fold(e) => Net::Fold(bx(f(e))),
            Net::Unfold(e) => Net::Unfold(bx(f(e))),
            Net::Case { scrut, x, left, y, right } => Net::Case {
                scrut: bx(f(scrut)),
                x: x.clone(),
                left: bx(f(left)),
                y: y.clone(),
                right: bx(f(right)),
            },
            Net::Send(e, r) => Net::Send(bx(f(e)), r.clone()),
            Net::LetLocal { x, ty, head, body } => {
                Net::LetLocal { x: x.clone(), ty: ty.clone(), head: bx(f(head)), body: bx(f(body)) }
            }
            Net::LetType { a, kind, head, body } => {
                Net::LetType { a: a.clone(), kind: *kind, head: bx(f(head)), body: bx(f(body)) }
            }
            Net::If(c, a, b) => Net::If(bx(f(c)), bx(f(a)), bx(f(b))),
            Net::Choose(d, r, e) => Net::Choose(*d, r.clone(), bx(f(e))),
            Net::Allow { from, left, right } => Net::Allow {
                from: from.clone(),
                left: left.as_ref().map(|e| bx(f(e))),
                right: right.as_ref().map(|e| bx(f(e))),
            },
            Net::AmIIn(r, a, b) => Net::AmIIn(r.clone(), bx(f(a)), bx(f(b))),
        }
    }

    /// Free program variables.
    pub fn fv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.fv_into(&mut out);
        out
    }

    fn fv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Net::Var(x) => {
                out.insert(x.clone());
            }
            Net::Fun { f, x, rec, body } => {
                let mut inner = body.fv();
                inner.remove(x);
                if *rec {
                    inner.remove(f);
                }
                out.extend(inner);
            }
            Net::Case { scrut, x, left, y, right } => {
                scrut.fv_into(out);
                let mut l = left.fv();
                l.remove(x);
                let mut r = right.fv();
                r.remove(y);
                out.extend(l);
                out.extend(r);
            }
            _ => self.for_each_child(&mut |c| c.fv_into(out)),
        }
    }

    /// Whether the local variable `x` occurs free.
    pub fn has_free_local(&self, x: &str) -> bool {
        match self {
            Net::Ret(e) => e.has_free(x),
            Net::LetLocal { x: y, head, body, .. } => head.has_free_local(x) || (y != x && body.has_free_local(x)),
            _ => {
                let mut found = false;
                self.for_each_child(&mut |c| found = found || c.has_free_local(x));
                found
            }
        }
    }

    /// Free type variables.
    pub fn ftv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.ftv_into(&mut out);
        out
    }

    fn ftv_into(&self, out: &mut BTreeSet<Name>) {
        let add_l = |l: &LocExpr, out: &mut BTreeSet<Name>| {
            if let LocExpr::Var(a) = l {
                out.insert(a.clone());
            }
        };
        match self {
            Net::Ret(e) => e.ftv_into(out),
            Net::TyAbs(a, _, e) => {
                let mut inner = e.ftv();
                inner.remove(a);
                out.extend(inner);
            }
            Net::LetType { a, head, body, .. } => {
                head.ftv_into(out);
                let mut inner = body.ftv();
                inner.remove(a);
                out.extend(inner);
            }
            Net::LetLocal { ty, head, body, .. } => {
                ty.ftv_into(out);
                head.ftv_into(out);
                body.ftv_into(out);
            }
            Net::TyApp(e, t) => {
                t.ftv_into(out);
                e.ftv_into(out);
            }
            Net::Send(e, r) | Net::Choose(_, r, e) => {
                r.vars(out);
                e.ftv_into(out);
            }
            Net::AmIIn(r, a, b) => {
                r.vars(out);
                a.ftv_into(out);
                b.ftv_into(out);
            }
            Net::Recv(l) => add_l(l, out),
            Net::Allow { from, .. } => {
                add_l(from, out);
                self.for_each_child(&mut |c| c.ftv_into(out));
            }
            _ => self.for_each_child(&mut |c| c.ftv_into(out)),
        }
    }

    /// Substitute a closed value for a program variable.
    pub fn subst_var(&self, x: &str, v: &Net) -> Net {
        match self {
            Net::Var(y) if y == x => v.clone(),
            Net::Fun { f, x: y, rec, .. } if y == x || (*rec && f == x) => self.clone(),
            Net::Case { scrut, x: a, left, y: b, right } => Net::Case {
                scrut: bx(scrut.subst_var(x, v)),
                x: a.clone(),
                left: if a == x { left.clone() } else { bx(left.subst_var(x, v)) },
                y: b.clone(),
                right: if b == x { right.clone() } else { bx(right.subst_var(x, v)) },
            },
            _ => self.map_children(&mut |c| c.subst_var(x, v)),
        }
    }

    /// Substitute a closed local value for a local variable.
    pub fn subst_local(&self, x: &str, v: &LocalTerm) -> Net {
        match self {
            Net::Ret(e) => Net::Ret(e.subst(x, v)),
            Net::LetLocal { x: y, ty, head, body } if y == x => {
                Net::LetLocal { x: y.clone(), ty: ty.clone(), head: bx(head.subst_local(x, v)), body: body.clone() }
            }
            _ => self.map_children(&mut |c| c.subst_local(x, v)),
        }
    }

    /// Substitute for a type variable. Replacements are closed during
    /// execution, so binders only shadow.
    pub fn subst_ty(&self, a: &str, s: TySub<'_>) -> Net {
        match self {
            Net::Ret(e) => Net::Ret(sub_lterm(e, a, s)),
            Net::TyAbs(b, _, _) if b == a => self.clone(),
            Net::LetType { a: b, kind, head, body } if b == a => {
                Net::LetType { a: b.clone(), kind: *kind, head: bx(head.subst_ty(a, s)), body: body.clone() }
            }
            Net::LetLocal { x, ty, head, body } => Net::LetLocal {
                x: x.clone(),
                ty: sub_ltype(ty, a, s),
                head: bx(head.subst_ty(a, s)),
                body: bx(body.subst_ty(a, s)),
            },
            Net::TyApp(e, t) => Net::TyApp(bx(e.subst_ty(a, s)), t.subst(a, s)),
            Net::Send(e, r) => Net::Send(bx(e.subst_ty(a, s)), sub_locset(r, a, s)),
            Net::Recv(l) => Net::Recv(sub_locexpr(l, a, s)),
            Net::Choose(d, r, e) => Net::Choose(*d, sub_locset(r, a, s), bx(e.subst_ty(a, s))),
            Net::Allow { from, left, right } => Net::Allow {
                from: sub_locexpr(from, a, s),
                left: left.as_ref().map(|e| bx(e.subst_ty(a, s))),
                right: right.as_ref().map(|e| bx(e.subst_ty(a, s))),
            },
            Net::AmIIn(r, x, y) => Net::AmIIn(sub_locset(r, a, s), bx(x.subst_ty(a, s)), bx(y.subst_ty(a, s))),
            _ => self.map_children(&mut |c| c.subst_ty(a, s)),
        }
    }

    /// Apply `f` to every location set, including those inside local terms.
    pub fn map_sets(&self, f: &dyn Fn(&LocSet) -> LocSet) -> Net {
        match self {
            Net::Ret(e) => Net::Ret(e.map_sets(f)),
            Net::LetLocal { x, ty, head, body } => Net::LetLocal {
                x: x.clone(),
                ty: ty.map_sets(f),
                head: bx(head.map_sets(f)),
                body: bx(body.map_sets(f)),
            },
            Net::TyApp(e, t) => Net::TyApp(bx(e.map_sets(f)), t.map_sets(f)),
            Net::Send(e, r) => Net::Send(bx(e.map_sets(f)), f(r)),
            Net::Choose(d, r, e) => Net::Choose(*d, f(r), bx(e.map_sets(f))),
            Net::AmIIn(r, a, b) => Net::AmIIn(f(r), bx(a.map_sets(f)), bx(b.map_sets(f))),
            _ => self.map_children(&mut |c| c.map_sets(f)),
        }
    }
}

// Precedence: 0 open-ended forms, 1 sequencing, 2 application,
// 3 type application, 4 atoms.
fn prec(e: &Net) -> u8 {
    match e {
        Net::Fun { .. }
        | Net::TyAbs(..)
        | Net::Case { .. }
        | Net::LetLocal { .. }
        | Net::LetType { .. }
        | Net::If(..)
        | Net::Choose(..)
        | Net::Allow { .. }
        | Net::AmIIn(..) => 0,
        Net::Seq(..) => 1,
        Net::App(..) => 2,
        Net::TyApp(..) => 3,
        _ => 4,
    }
}

struct NP<'a>(&'a Net, u8);

impl Display for NP<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Display for Net {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Net::Var(x) => f.write_str(x),
            Net::Unit => f.write_str("()"),
            Net::Ret(e) => write!(f, "ret({})", LP(e, 0)),
            Net::Seq(a, b) => write!(f, "{}; {}", NP(a, 2), NP(b, 1)),
            Net::Fun { f: g, x, rec, body } => {
                let kw = if *rec { "fun rec" } else { "fun" };
                write!(f, "{kw} {g}({x}) = {body}")
            }
            Net::App(a, b) => write!(f, "{} {}", NP(a, 2), NP(b, 3)),
            Net::TyAbs(a, k, e) => write!(f, "tyfun {a} :: {k}. {e}"),
            Net::TyApp(e, t) => write!(f, "{} [{t}]", NP(e, 3)),
            Net::Pair(a, b) => write!(f, "({a}, {b})"),
            Net::Fst(e) => write!(f, "fst({e})"),
            Net::Snd(e) => write!(f, "snd({e})"),
            Net::Inl(e) => write!(f, "inl({e})"),
            Net::Inr(e) => write!(f, "inr({e})"),
            Net::Fold(e) => write!(f, "fold({e})"),
            Net::Unfold(e) => write!(f, "unfold({e})"),
            Net::Case { scrut, x, left, y, right } => {
                write!(f, "case {scrut} of inl {x} => {} | inr {y} => {right}", NP(left, 1))
            }
            Net::Send(e, r) => write!(f, "send({e}, {r})"),
            Net::Recv(l) => write!(f, "recv({l})"),
            Net::LetLocal { x, ty, head, body } => write!(f, "let {x} : {ty} := {head} in {body}"),
            Net::LetType { a, kind, head, body } => write!(f, "let {a} :: {kind} := {head} in {body}"),
            Net::If(c, a, b) => write!(f, "if {c} then {} else {b}", NP(a, 1)),
            Net::Choose(d, r, e) => write!(f, "choose {d} for {r}; {e}"),
            Net::Allow { from, left, right } => {
                write!(f, "allow {from}: ")?;
                match (left, right) {
                    (Some(a), Some(b)) => write!(f, "left => {} | right => {b}", NP(a, 1)),
                    (Some(a), None) => write!(f, "left => {a}"),
                    (None, Some(b)) => write!(f, "right => {b}"),
                    (None, None) => f.write_str("-"),
                }
            }
            Net::AmIIn(r, a, b) => write!(f, "amiin {r} then {} else {b}", NP(a, 1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn printing() {
        let e = Net::send(Net::Ret(LocalTerm::add(LocalTerm::int(2), LocalTerm::int(3))), LocSet::loc("B"));
        assert_eq!(e.to_string(), "send(ret(2 + 3), {B})");
        let a = Net::Allow {
            from: LocExpr::concrete("A"),
            left: Some(bx(Net::Ret(LocalTerm::int(1)))),
            right: Some(bx(Net::Ret(LocalTerm::int(2)))),
        };
        assert_eq!(a.to_string(), "allow A: left => ret(1) | right => ret(2)");
        assert_eq!(Net::seq(Net::Unit, Net::recv("A")).to_string(), "(); recv(A)");
    }

    #[test]
    fn values() {
        assert!(Net::Unit.is_value());
        assert!(Net::Ret(LocalTerm::int(5)).is_value());
        assert!(!Net::recv("A").is_value());
        assert!(!Net::seq(Net::Unit, Net::Unit).is_value());
    }
}
