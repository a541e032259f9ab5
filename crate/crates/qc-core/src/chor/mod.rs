//! Choreographies and choreographic types.

mod names;
mod subst;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;

use crate::kind::Kind;
use crate::local::{LSub, LocalTerm, LocalType};
use crate::locset::{LocExpr, LocSet, LocSub, Name};

pub use names::{free_in_diff, free_in_overlap, local_occurrences, LocalOcc};
pub use subst::{rename_local, subst_local};

/// Branch label carried by a synchronization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChorType {
    Var(Name),
    At(LocalType, LocSet),
    Arrow(Box<ChorType>, Box<ChorType>),
    Forall(Name, Kind, Box<ChorType>),
    Prod(Box<ChorType>, Box<ChorType>),
    Sum(Box<ChorType>, Box<ChorType>),
    Mu(Name, Box<ChorType>),
    Loc(LocExpr),
    Set(LocSet),
    Local(LocalType),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chor {
    Var(Name),
    Done(LocSet, LocalTerm),
    Fun {
        f: Name,
        x: Name,
        arg: ChorType,
        ret: Option<ChorType>,
        body: Box<Chor>,
    },
    App(Box<Chor>, Box<Chor>),
    TyAbs(Name, Kind, Box<Chor>),
    TyApp(Box<Chor>, ChorType),
    Fold(ChorType, Box<Chor>),
    Unfold(Box<Chor>),
    Pair(Box<Chor>, Box<Chor>),
    Fst(Box<Chor>),
    Snd(Box<Chor>),
    Inl(ChorType, Box<Chor>),
    Inr(ChorType, Box<Chor>),
    Case {
        scrut: Box<Chor>,
        x: Name,
        left: Box<Chor>,
        y: Name,
        right: Box<Chor>,
    },
    Send {
        body: Box<Chor>,
        from: LocExpr,
        to: LocSet,
    },
    Sync {
        from: LocExpr,
        dir: Dir,
        to: LocSet,
        body: Box<Chor>,
    },
    If {
        at: LocSet,
        cond: Box<Chor>,
        then: Box<Chor>,
        els: Box<Chor>,
    },
    LetLocal {
        at: LocSet,
        x: Name,
        ty: LocalType,
        head: Box<Chor>,
        body: Box<Chor>,
    },
    LetType {
        at: LocSet,
        a: Name,
        kind: Kind,
        head: Box<Chor>,
        body: Box<Chor>,
    },
}

/// The replacement for a type variable, by sort.
#[derive(Clone, Copy, Debug)]
pub enum TySub<'a> {
    Rename(&'a str),
    Loc(&'a LocExpr),
    Set(&'a LocSet),
    Local(&'a LocalType),
    Chor(&'a ChorType),
}

impl<'a> TySub<'a> {
    /// Interpret a type argument at a binder of kind `k`.
    pub fn for_kind(t: &'a ChorType, k: Kind) -> TySub<'a> {
        match (t, k) {
            (ChorType::Var(b), _) => TySub::Rename(b),
            (ChorType::Set(LocSet::Sng(l)), Kind::Loc) => TySub::Loc(l),
            (ChorType::Loc(l), _) => TySub::Loc(l),
            (ChorType::Set(s), _) => TySub::Set(s),
            (ChorType::Local(t), _) => TySub::Local(t),
            (t, _) => TySub::Chor(t),
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            TySub::Rename(b) => {
                out.insert((*b).into());
            }
            TySub::Loc(LocExpr::Var(b)) => {
                out.insert(b.clone());
            }
            TySub::Loc(_) => {}
            TySub::Set(s) => s.vars(out),
            TySub::Local(t) => t.ftv_into(out),
            TySub::Chor(t) => t.ftv_into(out),
        }
    }

    /// The location set the variable stands for, when it has one.
    pub fn as_set(&self) -> Option<LocSet> {
        match self {
            TySub::Loc(l) => Some(LocSet::Sng((*l).clone())),
            TySub::Set(s) => Some((*s).clone()),
            _ => None,
        }
    }
}

pub(crate) fn sub_locset(r: &LocSet, a: &str, s: TySub<'_>) -> LocSet {
    match s {
        TySub::Rename(b) => r.rename(a, b),
        TySub::Loc(l) => r.subst(a, LocSub::Loc(l)),
        TySub::Set(x) => r.subst(a, LocSub::Set(x)),
        TySub::Local(_) | TySub::Chor(_) => r.clone(),
    }
}

pub(crate) fn sub_locexpr(l: &LocExpr, a: &str, s: TySub<'_>) -> LocExpr {
    match s {
        TySub::Rename(b) => l.rename(a, b),
        TySub::Loc(x) => l.subst(a, LocSub::Loc(x)),
        TySub::Set(x) => l.subst(a, LocSub::Set(x)),
        TySub::Local(_) | TySub::Chor(_) => l.clone(),
    }
}

pub(crate) fn sub_ltype(t: &LocalType, a: &str, s: TySub<'_>) -> LocalType {
    match s {
        TySub::Rename(b) => t.rename_tv(a, b),
        TySub::Loc(x) => t.subst(a, LSub::Loc(LocSub::Loc(x))),
        TySub::Set(x) => t.subst(a, LSub::Loc(LocSub::Set(x))),
        TySub::Local(x) => t.subst(a, LSub::Ty(x)),
        TySub::Chor(_) => t.clone(),
    }
}

pub(crate) fn sub_lterm(e: &LocalTerm, a: &str, s: TySub<'_>) -> LocalTerm {
    match s {
        TySub::Rename(b) => e.rename_tv(a, b),
        TySub::Loc(x) => e.subst_ty(a, LSub::Loc(LocSub::Loc(x))),
        TySub::Set(x) => e.subst_ty(a, LSub::Loc(LocSub::Set(x))),
        TySub::Local(x) => e.subst_ty(a, LSub::Ty(x)),
        TySub::Chor(_) => e.clone(),
    }
}

impl ChorType {
    pub fn at(t: LocalType, r: LocSet) -> Self {
        ChorType::At(t, r)
    }

    pub fn arrow(a: ChorType, b: ChorType) -> Self {
        ChorType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: ChorType, b: ChorType) -> Self {
        ChorType::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: ChorType, b: ChorType) -> Self {
        ChorType::Sum(Box::new(a), Box::new(b))
    }

    pub fn ftv(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        self.ftv_into(&mut s);
        s
    }

    pub fn ftv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            ChorType::Var(a) => {
                out.insert(a.clone());
            }
            ChorType::At(t, r) => {
                t.ftv_into(out);
                r.vars(out);
            }
            ChorType::Arrow(a, b) | ChorType::Prod(a, b) | ChorType::Sum(a, b) => {
                a.ftv_into(out);
                b.ftv_into(out);
            }
            ChorType::Forall(a, _, t) | ChorType::Mu(a, t) => {
                let mut inner = BTreeSet::new();
                t.ftv_into(&mut inner);
                inner.remove(a);
                out.extend(inner);
            }
            ChorType::Loc(l) => {
                if let LocExpr::Var(a) = l {
                    out.insert(a.clone());
                }
            }
            ChorType::Set(r) => r.vars(out),
            ChorType::Local(t) => t.ftv_into(out),
        }
    }

    /// Capture-avoiding substitution.
    pub fn subst(&self, a: &str, s: TySub<'_>) -> ChorType {
        let out = match self {
            ChorType::Var(b) if b == a => match s {
                TySub::Rename(c) => ChorType::Var(c.into()),
                TySub::Loc(l) => ChorType::Loc(l.clone()),
                TySub::Set(r) => ChorType::Set(r.clone()),
                TySub::Local(t) => ChorType::Local(t.clone()),
                TySub::Chor(t) => t.clone(),
            },
            ChorType::Var(_) => self.clone(),
            ChorType::At(t, r) => ChorType::At(sub_ltype(t, a, s), sub_locset(r, a, s)),
            ChorType::Arrow(x, y) => ChorType::arrow(x.subst(a, s), y.subst(a, s)),
            ChorType::Prod(x, y) => ChorType::prod(x.subst(a, s), y.subst(a, s)),
            ChorType::Sum(x, y) => ChorType::sum(x.subst(a, s), y.subst(a, s)),
            ChorType::Forall(b, k, t) => {
                let (b2, t2) = self.binder_subst(b, t, a, s);
                ChorType::Forall(b2, *k, Box::new(t2))
            }
            ChorType::Mu(b, t) => {
                let (b2, t2) = self.binder_subst(b, t, a, s);
                ChorType::Mu(b2, Box::new(t2))
            }
            ChorType::Loc(l) => ChorType::Loc(sub_locexpr(l, a, s)),
            ChorType::Set(r) => ChorType::Set(sub_locset(r, a, s)),
            ChorType::Local(t) => ChorType::Local(sub_ltype(t, a, s)),
        };
        out.normalize_arg()
    }

    fn binder_subst(&self, b: &Name, t: &ChorType, a: &str, s: TySub<'_>) -> (Name, ChorType) {
        if b == a {
            return (b.clone(), t.clone());
        }
        let mut fv = BTreeSet::new();
        s.free_vars(&mut fv);
        if fv.contains(b) {
            let mut avoid = fv;
            t.ftv_into(&mut avoid);
            avoid.insert(a.into());
            let b2 = crate::names::fresh_name(b, |n| avoid.contains(n));
            let t2 = t.subst(b, TySub::Rename(&b2));
            (b2.clone(), t2.subst(a, s))
        } else {
            (b.clone(), t.subst(a, s))
        }
    }

    /// Apply `f` to every location set; single locations count as singletons.
    pub fn map_sets(&self, f: &dyn Fn(&LocSet) -> LocSet) -> ChorType {
        match self {
            ChorType::Var(_) => self.clone(),
            ChorType::At(t, r) => ChorType::At(t.map_sets(f), f(r)),
            ChorType::Arrow(a, b) => ChorType::arrow(a.map_sets(f), b.map_sets(f)),
            ChorType::Prod(a, b) => ChorType::prod(a.map_sets(f), b.map_sets(f)),
            ChorType::Sum(a, b) => ChorType::sum(a.map_sets(f), b.map_sets(f)),
            ChorType::Forall(a, k, t) => ChorType::Forall(a.clone(), *k, Box::new(t.map_sets(f))),
            ChorType::Mu(a, t) => ChorType::Mu(a.clone(), Box::new(t.map_sets(f))),
            ChorType::Loc(_) => self.clone(),
            ChorType::Set(r) => ChorType::Set(f(r)),
            ChorType::Local(t) => ChorType::Local(t.map_sets(f)),
        }
    }

    /// Variables used as type arguments are represented uniformly.
    fn normalize_arg(self) -> ChorType {
        match self {
            ChorType::Loc(LocExpr::Var(b)) => ChorType::Var(b),
            ChorType::Set(LocSet::Var(b)) => ChorType::Var(b),
            ChorType::Local(LocalType::Var(b)) => ChorType::Var(b),
            t => t,
        }
    }
}

impl Chor {
    pub fn done(r: LocSet, e: LocalTerm) -> Self {
        Chor::Done(r, e)
    }

    pub fn at(l: &str, e: LocalTerm) -> Self {
        Chor::Done(LocSet::loc(l), e)
    }

    pub fn send(body: Chor, from: LocExpr, to: LocSet) -> Self {
        Chor::Send { body: Box::new(body), from, to }
    }

    pub fn sync(from: LocExpr, dir: Dir, to: LocSet, body: Chor) -> Self {
        Chor::Sync { from, dir, to, body: Box::new(body) }
    }

    pub fn ite(at: LocSet, cond: Chor, then: Chor, els: Chor) -> Self {
        Chor::If { at, cond: Box::new(cond), then: Box::new(then), els: Box::new(els) }
    }

    pub fn let_local(at: LocSet, x: &str, ty: LocalType, head: Chor, body: Chor) -> Self {
        Chor::LetLocal { at, x: x.into(), ty, head: Box::new(head), body: Box::new(body) }
    }

    pub fn let_type(at: LocSet, a: &str, kind: Kind, head: Chor, body: Chor) -> Self {
        Chor::LetType { at, a: a.into(), kind, head: Box::new(head), body: Box::new(body) }
    }

    pub fn app(f: Chor, x: Chor) -> Self {
        Chor::App(Box::new(f), Box::new(x))
    }

    pub fn tyapp(f: Chor, t: ChorType) -> Self {
        Chor::TyApp(Box::new(f), t)
    }

    pub fn tyabs(a: &str, k: Kind, body: Chor) -> Self {
        Chor::TyAbs(a.into(), k, Box::new(body))
    }

    pub fn pair(a: Chor, b: Chor) -> Self {
        Chor::Pair(Box::new(a), Box::new(b))
    }

    pub fn fun(f: &str, x: &str, arg: ChorType, ret: Option<ChorType>, body: Chor) -> Self {
        Chor::Fun { f: f.into(), x: x.into(), arg, ret, body: Box::new(body) }
    }

    pub fn is_value(&self) -> bool {
        match self {
            Chor::Done(_, e) => crate::local::is_value(e),
            Chor::Fun { .. } | Chor::TyAbs(..) => true,
            Chor::Fold(_, c) | Chor::Inl(_, c) | Chor::Inr(_, c) => c.is_value(),
            Chor::Pair(a, b) => a.is_value() && b.is_value(),
            _ => false,
        }
    }

    /// Immediate subterms.
    pub fn children(&self) -> alloc::vec::Vec<&Chor> {
        use alloc::vec;
        match self {
            Chor::Var(_) | Chor::Done(..) => vec![],
            Chor::Fun { body, .. } | Chor::TyAbs(_, _, body) => vec![body],
            Chor::TyApp(c, _)
            | Chor::Fold(_, c)
            | Chor::Unfold(c)
            | Chor::Fst(c)
            | Chor::Snd(c)
            | Chor::Inl(_, c)
            | Chor::Inr(_, c)
            | Chor::Send { body: c, .. }
            | Chor::Sync { body: c, .. } => vec![c],
            Chor::App(a, b) | Chor::Pair(a, b) => vec![a, b],
            Chor::Case { scrut, left, right, .. } => vec![scrut, left, right],
            Chor::If { cond, then, els, .. } => vec![cond, then, els],
            Chor::LetLocal { head, body, .. } | Chor::LetType { head, body, .. } => vec![head, body],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Concrete location names mentioned anywhere.
    pub fn locations(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.locations_into(&mut out);
        out
    }

    fn locations_into(&self, out: &mut BTreeSet<Name>) {
        let add_l = |l: &LocExpr, out: &mut BTreeSet<Name>| {
            if let LocExpr::Concrete(n) = l {
                out.insert(n.clone());
            }
        };
        match self {
            Chor::Done(r, _) => r.concrete_names(out),
            Chor::Send { from, to, .. } | Chor::Sync { from, to, .. } => {
                add_l(from, out);
                to.concrete_names(out);
            }
            Chor::If { at, .. } | Chor::LetLocal { at, .. } | Chor::LetType { at, .. } => at.concrete_names(out),
            _ => {}
        }
        for c in self.children() {
            c.locations_into(out);
        }
    }

    /// Free choreography variables.
    pub fn fv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.fv_into(&mut out);
        out
    }

    fn fv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Chor::Var(x) => {
                out.insert(x.clone());
            }
            Chor::Fun { f, x, ret, body, .. } => {
                let mut inner = body.fv();
                inner.remove(x);
                if ret.is_some() {
                    inner.remove(f);
                }
                out.extend(inner);
            }
            Chor::Case { scrut, x, left, y, right } => {
                scrut.fv_into(out);
                let mut l = left.fv();
                l.remove(x);
                let mut r = right.fv();
                r.remove(y);
                out.extend(l);
                out.extend(r);
            }
            _ => {
                for c in self.children() {
                    c.fv_into(out);
                }
            }
        }
    }

    pub fn ftv(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.ftv_into(&mut out);
        out
    }

    pub fn ftv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Chor::Var(_) => {}
            Chor::Done(r, e) => {
                r.vars(out);
                e.ftv_into(out);
            }
            Chor::Fun { arg, ret, body, .. } => {
                arg.ftv_into(out);
                if let Some(r) = ret {
                    r.ftv_into(out);
                }
                body.ftv_into(out);
            }
            Chor::TyAbs(a, _, body) => {
                let mut inner = body.ftv();
                inner.remove(a);
                out.extend(inner);
            }
            Chor::TyApp(c, t) | Chor::Fold(t, c) | Chor::Inl(t, c) | Chor::Inr(t, c) => {
                c.ftv_into(out);
                t.ftv_into(out);
            }
            Chor::Send { body, from, to } | Chor::Sync { from, to, body, .. } => {
                if let LocExpr::Var(a) = from {
                    out.insert(a.clone());
                }
                to.vars(out);
                body.ftv_into(out);
            }
            Chor::If { at, cond, then, els } => {
                at.vars(out);
                cond.ftv_into(out);
                then.ftv_into(out);
                els.ftv_into(out);
            }
            Chor::LetLocal { at, ty, head, body, .. } => {
                at.vars(out);
                ty.ftv_into(out);
                head.ftv_into(out);
                body.ftv_into(out);
            }
            Chor::LetType { at, a, head, body, .. } => {
                at.vars(out);
                head.ftv_into(out);
                let mut inner = body.ftv();
                inner.remove(a);
                out.extend(inner);
            }
            _ => {
                for c in self.children() {
                    c.ftv_into(out);
                }
            }
        }
    }

    /// Every local variable name occurring anywhere.
    pub fn local_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Chor::Done(_, e) => e.all_names(out),
            Chor::LetLocal { x, .. } => {
                out.insert(x.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.local_names(out);
        }
    }

    /// Capture-avoiding substitution of a choreography for a variable.
    pub fn subst_var(&self, x: &str, v: &Chor) -> Chor {
        subst::subst_var(self, x, v)
    }

    /// Substitution of a type, location or set for a type variable.
    pub fn subst_ty(&self, a: &str, s: TySub<'_>) -> Chor {
        subst::subst_ty(self, a, s)
    }
}
