//! The transition relation of a single location.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use core::fmt;

use super::Net;
use crate::chor::{ChorType, Dir, TySub};
use crate::kind::Kind;
use crate::local::{ascribe, lstep, reify_ty, strip_ann, LocTable, LocalTerm};
use crate::locset::{LocExpr, LocSet, Name};
use crate::sem::Msg;

/// Transition labels as seen by one location.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Iota,
    IotaSync,
    Send(Msg, BTreeSet<Name>),
    Recv(Name, Msg),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Iota => f.write_str("iota"),
            Label::IotaSync => f.write_str("iota_sync"),
            Label::Send(m, to) => {
                write!(f, "send({m}, {{")?;
                for (i, l) in to.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(l)?;
                }
                f.write_str("})")
            }
            Label::Recv(l, m) => write!(f, "recv({l}, {m})"),
        }
    }
}

/// What a location can do next. Programs have at most one redex, so the
/// only nondeterminism is in what arrives at a receive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// An internal step, labelled `Iota` or `IotaSync`.
    Step(Label, Net),
    /// Multicast to the listed locations (the sender itself excluded).
    Send { msg: Msg, to: BTreeSet<Name>, next: Net },
    /// Waiting for a value from `from`.
    Recv { from: Name },
    /// Waiting for a selection from `from`.
    Offer { from: Name },
}

impl Action {
    fn map(self, f: impl FnOnce(Net) -> Net) -> Action {
        match self {
            Action::Step(l, n) => Action::Step(l, f(n)),
            Action::Send { msg, to, next } => Action::Send { msg, to, next: f(next) },
            a => a,
        }
    }
}

fn bx(e: Net) -> Box<Net> {
    Box::new(e)
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

struct Focus<'a> {
    me: &'a str,
    table: &'a LocTable,
    /// A message being delivered to the receive in focus.
    inbox: Option<(&'a str, &'a Msg)>,
}

impl Focus<'_> {
    fn sync(next: Net) -> Option<Action> {
        Some(Action::Step(Label::IotaSync, next))
    }

    fn iota(next: Net) -> Option<Action> {
        Some(Action::Step(Label::Iota, next))
    }

    fn recipients(&self, r: &LocSet) -> Option<BTreeSet<Name>> {
        let mut g = r.ground()?;
        g.remove(self.me);
        Some(g)
    }

    fn go(&self, e: &Net) -> Option<Action> {
        match e {
            Net::Var(_) | Net::Unit | Net::Fun { .. } | Net::TyAbs(..) => None,
            Net::Ret(t) => lstep(t).and_then(|t2| Self::iota(Net::Ret(t2))),
            Net::Seq(a, b) => {
                if a.is_value() {
                    Self::iota((**b).clone())
                } else {
                    Some(self.go(a)?.map(|a2| Net::Seq(bx(a2), b.clone())))
                }
            }
            Net::App(a, b) => {
                if !a.is_value() {
                    return Some(self.go(a)?.map(|a2| Net::App(bx(a2), b.clone())));
                }
                if !b.is_value() {
                    return Some(self.go(b)?.map(|b2| Net::App(a.clone(), bx(b2))));
                }
                match &**a {
                    Net::Fun { f, x, rec, body } => {
                        let unrolled = if *rec && f != x { body.subst_var(f, a) } else { (**body).clone() };
                        Self::sync(unrolled.subst_var(x, b))
                    }
                    _ => None,
                }
            }
            Net::TyApp(a, t) => {
                if !a.is_value() {
                    return Some(self.go(a)?.map(|a2| Net::TyApp(bx(a2), t.clone())));
                }
                match &**a {
                    Net::TyAbs(x, k, body) => Self::sync(body.subst_ty(x, TySub::for_kind(t, *k))),
                    _ => None,
                }
            }
            Net::Pair(a, b) => {
                if !a.is_value() {
                    Some(self.go(a)?.map(|a2| Net::Pair(bx(a2), b.clone())))
                } else {
                    Some(self.go(b)?.map(|b2| Net::Pair(a.clone(), bx(b2))))
                }
            }
            Net::Fst(p) | Net::Snd(p) => {
                let first = matches!(e, Net::Fst(_));
                if !p.is_value() {
                    return Some(self.go(p)?.map(|p2| if first { Net::Fst(bx(p2)) } else { Net::Snd(bx(p2)) }));
                }
                match &**p {
                    Net::Pair(a, b) => Self::sync(if first { (**a).clone() } else { (**b).clone() }),
                    _ => None,
                }
            }
            Net::Inl(v) => Some(self.go(v)?.map(|v2| Net::Inl(bx(v2)))),
            Net::Inr(v) => Some(self.go(v)?.map(|v2| Net::Inr(bx(v2)))),
            Net::Fold(v) => Some(self.go(v)?.map(|v2| Net::Fold(bx(v2)))),
            Net::Unfold(v) => {
                if !v.is_value() {
                    return Some(self.go(v)?.map(|v2| Net::Unfold(bx(v2))));
                }
                match &**v {
                    Net::Fold(inner) => Self::sync((**inner).clone()),
                    _ => None,
                }
            }
            Net::Case { scrut, x, left, y, right } => {
                if !scrut.is_value() {
                    return Some(self.go(scrut)?.map(|s2| Net::Case {
                        scrut: bx(s2),
                        x: x.clone(),
                        left: left.clone(),
                        y: y.clone(),
                        right: right.clone(),
                    }));
                }
                match &**scrut {
                    Net::Inl(v) => Self::sync(left.subst_var(x, v)),
                    Net::Inr(v) => Self::sync(right.subst_var(y, v)),
                    _ => None,
                }
            }
            Net::Send(body, to) => {
                if !body.is_value() {
                    return Some(self.go(body)?.map(|b2| Net::Send(bx(b2), to.clone())));
                }
                match &**body {
                    Net::Ret(v) => Some(Action::Send {
                        msg: Msg::Val(v.clone()),
                        to: self.recipients(to)?,
                        next: Net::Ret(v.clone()),
                    }),
                    _ => None,
                }
            }
            Net::Recv(from) => {
                let from = from.as_concrete()?;
                match self.inbox {
                    None => Some(Action::Recv { from: from.into() }),
                    Some((s, Msg::Val(v))) if s == from => {
                        Some(Action::Step(Label::Recv(from.into(), Msg::Val(v.clone())), Net::Ret(v.clone())))
                    }
                    Some(_) => None,
                }
            }
            Net::LetLocal { x, ty, head, body } => {
                if !head.is_value() {
                    return Some(self.go(head)?.map(|h2| Net::LetLocal {
                        x: x.clone(),
                        ty: ty.clone(),
                        head: bx(h2),
                        body: body.clone(),
                    }));
                }
                match &**head {
                    Net::Ret(v) => Self::iota(body.subst_local(x, &ascribe(v, ty))),
                    _ => None,
                }
            }
            Net::LetType { a, kind, head, body } => {
                if !head.is_value() {
                    return Some(self.go(head)?.map(|h2| Net::LetType {
                        a: a.clone(),
                        kind: *kind,
                        head: bx(h2),
                        body: body.clone(),
                    }));
                }
                match &**head {
                    Net::Ret(v) => {
                        let t = reify(self.table, v, *kind)?;
                        Self::iota(body.subst_ty(a, TySub::for_kind(&t, *kind)))
                    }
                    _ => None,
                }
            }
            Net::If(c, a, b) => {
                if !c.is_value() {
                    return Some(self.go(c)?.map(|c2| Net::If(bx(c2), a.clone(), b.clone())));
                }
                match &**c {
                    Net::Ret(v) => match strip_ann(v) {
                        LocalTerm::Bool(true) => Self::iota((**a).clone()),
                        LocalTerm::Bool(false) => Self::iota((**b).clone()),
                        _ => None,
                    },
                    _ => None,
                }
            }
            Net::Choose(d, to, body) => {
                Some(Action::Send { msg: Msg::Sel(*d), to: self.recipients(to)?, next: (**body).clone() })
            }
            Net::Allow { from, left, right } => {
                let from = from.as_concrete()?;
                match self.inbox {
                    None => Some(Action::Offer { from: from.into() }),
                    Some((s, Msg::Sel(d))) if s == from => {
                        let branch = match d {
                            Dir::L => left,
                            Dir::R => right,
                        };
                        let next = (**branch.as_ref()?).clone();
                        Some(Action::Step(Label::Recv(from.into(), Msg::Sel(*d)), next))
                    }
                    Some(_) => None,
                }
            }
            Net::AmIIn(r, a, b) => {
                let g = r.ground()?;
                Self::iota(if g.contains(self.me) { (**a).clone() } else { (**b).clone() })
            }
        }
    }
}

/// The next action of `me` running `e`, if any.
pub fn net_step(me: &str, e: &Net, table: &LocTable) -> Option<Action> {
    Focus { me, table, inbox: None }.go(e)
}

/// Deliver `msg` from `from` to the receive or offer in focus.
pub fn receive(me: &str, e: &Net, from: &str, msg: &Msg, table: &LocTable) -> Option<Net> {
    match (Focus { me, table, inbox: Some((from, msg)) }).go(e)? {
        Action::Step(Label::Recv(..), next) => Some(next),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalTerm as T;

    fn table() -> LocTable {
        LocTable::sequential(&["A", "B"])
    }

    #[test]
    fn local_step() {
        let e = Net::Ret(T::add(T::int(2), T::int(3)));
        assert_eq!(net_step("A", &e, &table()), Some(Action::Step(Label::Iota, Net::Ret(T::int(5)))));
    }

    #[test]
    fn sender_keeps_value() {
        let e = Net::send(Net::Ret(T::int(5)), LocSet::loc("B"));
        let want = Action::Send {
            msg: Msg::Val(T::int(5)),
            to: ["B".into()].into_iter().collect(),
            next: Net::Ret(T::int(5)),
        };
        assert_eq!(net_step("A", &e, &table()), Some(want));
    }

    #[test]
    fn am_i_in() {
        let e = Net::AmIIn(LocSet::of_names(["A", "B"]), Box::new(Net::Unit), Box::new(Net::recv("B")));
        assert_eq!(net_step("A", &e, &table()), Some(Action::Step(Label::Iota, Net::Unit)));
    }

    #[test]
    fn allow_both_branches() {
        let e = Net::Allow {
            from: LocExpr::concrete("A"),
            left: Some(Box::new(Net::Ret(T::int(1)))),
            right: Some(Box::new(Net::Ret(T::int(2)))),
        };
        assert_eq!(receive("B", &e, "A", &Msg::Sel(Dir::L), &table()), Some(Net::Ret(T::int(1))));
        assert_eq!(receive("B", &e, "A", &Msg::Sel(Dir::R), &table()), Some(Net::Ret(T::int(2))));
        let one = Net::allow_left(LocExpr::concrete("A"), Net::Unit);
        assert_eq!(receive("B", &one, "A", &Msg::Sel(Dir::R), &table()), None);
    }
}
