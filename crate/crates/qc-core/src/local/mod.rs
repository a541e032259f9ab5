//! The local language: a small polymorphic lambda calculus with integers,
//! booleans, lists, location and location-set values, and type
//! representations.

mod eval;
mod typing;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::locset::{LocExpr, LocSet, LocSub, Name};
use crate::names::fresh_name;

pub use eval::{is_value, lstep, lstep_all, run_local, strip_ann, LocalRun};
pub use typing::{lcheck, lkind, loc_kind, lsubtype, lsynth, set_kind, ty_equiv, LocalEnv};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalType {
    Var(Name),
    Int,
    Bool,
    TyRep,
    List(Box<LocalType>),
    Loc(LocSet),
    LocSetOf(LocSet),
    Arrow(Box<LocalType>, Box<LocalType>),
    Forall(Name, Box<LocalType>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalTerm {
    Var(Name),
    Int(i64),
    Bool(bool),
    Add(Box<LocalTerm>, Box<LocalTerm>),
    Eq(Box<LocalTerm>, Box<LocalTerm>),
    Lt(Box<LocalTerm>, Box<LocalTerm>),
    If(Box<LocalTerm>, Box<LocalTerm>, Box<LocalTerm>),
    /// `fun f(x: arg)[: ret] = body`; `f` is bound in `body` only when `ret` is given.
    Fun {
        f: Name,
        x: Name,
        arg: LocalType,
        ret: Option<LocalType>,
        body: Box<LocalTerm>,
    },
    App(Box<LocalTerm>, Box<LocalTerm>),
    TyAbs(Name, Box<LocalTerm>),
    TyApp(Box<LocalTerm>, LocalType),
    /// Empty list annotated with its element type.
    Nil(LocalType),
    Cons(Box<LocalTerm>, Box<LocalTerm>),
    Case {
        scrut: Box<LocalTerm>,
        nil: Box<LocalTerm>,
        head: Name,
        tail: Name,
        cons: Box<LocalTerm>,
    },
    RepInt,
    RepBool,
    RepArrow(Box<LocalTerm>, Box<LocalTerm>),
    /// Type ascription; `Ann(v, t)` is a value.
    Ann(Box<LocalTerm>, LocalType),
}

/// Substitution for a type variable inside local syntax.
#[derive(Clone, Copy, Debug)]
pub enum LSub<'a> {
    Ty(&'a LocalType),
    Loc(LocSub<'a>),
}

impl LSub<'_> {
    fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            LSub::Ty(t) => t.ftv_into(out),
            LSub::Loc(LocSub::Loc(LocExpr::Var(a))) => {
                out.insert(a.clone());
            }
            LSub::Loc(LocSub::Loc(_)) => {}
            LSub::Loc(LocSub::Set(s)) => s.vars(out),
        }
    }
}

impl LocalType {
    pub fn arrow(a: LocalType, b: LocalType) -> Self {
        LocalType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn list(a: LocalType) -> Self {
        LocalType::List(Box::new(a))
    }

    pub fn ftv(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        self.ftv_into(&mut s);
        s
    }

    pub fn ftv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            LocalType::Var(a) => {
                out.insert(a.clone());
            }
            LocalType::Int | LocalType::Bool | LocalType::TyRep => {}
            LocalType::List(t) => t.ftv_into(out),
            LocalType::Loc(r) | LocalType::LocSetOf(r) => r.vars(out),
            LocalType::Arrow(a, b) => {
                a.ftv_into(out);
                b.ftv_into(out);
            }
            LocalType::Forall(a, t) => {
                let mut inner = BTreeSet::new();
                t.ftv_into(&mut inner);
                inner.remove(a);
                out.extend(inner);
            }
        }
    }

    pub fn subst(&self, a: &str, s: LSub<'_>) -> LocalType {
        match self {
            LocalType::Var(b) if b == a => match s {
                LSub::Ty(t) => t.clone(),
                LSub::Loc(_) => self.clone(),
            },
            LocalType::Var(_) | LocalType::Int | LocalType::Bool | LocalType::TyRep => self.clone(),
            LocalType::List(t) => LocalType::list(t.subst(a, s)),
            LocalType::Loc(r) => match s {
                LSub::Loc(l) => LocalType::Loc(r.subst(a, l)),
                LSub::Ty(_) => self.clone(),
            },
            LocalType::LocSetOf(r) => match s {
                LSub::Loc(l) => LocalType::LocSetOf(r.subst(a, l)),
                LSub::Ty(_) => self.clone(),
            },
            LocalType::Arrow(x, y) => LocalType::arrow(x.subst(a, s), y.subst(a, s)),
            LocalType::Forall(b, t) => {
                if b == a {
                    return self.clone();
                }
                let mut fv = BTreeSet::new();
                s.free_vars(&mut fv);
                if fv.contains(b) {
                    let mut avoid = fv;
                    t.ftv_into(&mut avoid);
                    avoid.insert(a.into());
                    let b2 = fresh_name(b, |n| avoid.contains(n));
                    let t2 = t.rename_tv(b, &b2);
                    LocalType::Forall(b2, Box::new(t2.subst(a, s)))
                } else {
                    LocalType::Forall(b.clone(), Box::new(t.subst(a, s)))
                }
            }
        }
    }

    pub fn rename_tv(&self, a: &str, b: &str) -> LocalType {
        match self {
            LocalType::Var(x) if x == a => LocalType::Var(b.into()),
            LocalType::Loc(r) => LocalType::Loc(r.rename(a, b)),
            LocalType::LocSetOf(r) => LocalType::LocSetOf(r.rename(a, b)),
            LocalType::List(t) => LocalType::list(t.rename_tv(a, b)),
            LocalType::Arrow(x, y) => LocalType::arrow(x.rename_tv(a, b), y.rename_tv(a, b)),
            LocalType::Forall(x, t) if x != a => {
                LocalType::Forall(x.clone(), Box::new(t.rename_tv(a, b)))
            }
            _ => self.clone(),
        }
    }

    /// Apply `f` to every location set.
    pub fn map_sets(&self, f: &dyn Fn(&LocSet) -> LocSet) -> LocalType {
        match self {
            LocalType::Loc(r) => LocalType::Loc(f(r)),
            LocalType::LocSetOf(r) => LocalType::LocSetOf(f(r)),
            LocalType::List(t) => LocalType::list(t.map_sets(f)),
            LocalType::Arrow(x, y) => LocalType::arrow(x.map_sets(f), y.map_sets(f)),
            LocalType::Forall(x, t) => LocalType::Forall(x.clone(), Box::new(t.map_sets(f))),
            _ => self.clone(),
        }
    }
}

impl LocalTerm {
    pub fn int(n: i64) -> Self {
        LocalTerm::Int(n)
    }

    pub fn var(x: &str) -> Self {
        LocalTerm::Var(x.into())
    }

    pub fn add(a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::Add(Box::new(a), Box::new(b))
    }

    pub fn eq(a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::Eq(Box::new(a), Box::new(b))
    }

    pub fn lt(a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::Lt(Box::new(a), Box::new(b))
    }

    pub fn ite(c: LocalTerm, a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::If(Box::new(c), Box::new(a), Box::new(b))
    }

    pub fn app(a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::App(Box::new(a), Box::new(b))
    }

    pub fn cons(a: LocalTerm, b: LocalTerm) -> Self {
        LocalTerm::Cons(Box::new(a), Box::new(b))
    }

    pub fn ann(e: LocalTerm, t: LocalType) -> Self {
        LocalTerm::Ann(Box::new(e), t)
    }

    pub fn fun(f: &str, x: &str, arg: LocalType, ret: Option<LocalType>, body: LocalTerm) -> Self {
        LocalTerm::Fun {
            f: f.into(),
            x: x.into(),
            arg,
            ret,
            body: Box::new(body),
        }
    }

    /// Free term variables.
    pub fn fv(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        self.fv_into(&mut s);
        s
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            LocalTerm::Var(y) => x == y,
            LocalTerm::Int(_) | LocalTerm::Bool(_) | LocalTerm::Nil(_) => false,
            LocalTerm::RepInt | LocalTerm::RepBool => false,
            LocalTerm::Add(a, b)
            | LocalTerm::Eq(a, b)
            | LocalTerm::Lt(a, b)
            | LocalTerm::App(a, b)
            | LocalTerm::Cons(a, b)
            | LocalTerm::RepArrow(a, b) => a.has_free(x) || b.has_free(x),
            LocalTerm::If(c, a, b) => c.has_free(x) || a.has_free(x) || b.has_free(x),
            LocalTerm::Fun { f, x: y, ret, body, .. } => {
                let binds_f = ret.is_some() && f == x;
                y != x && !binds_f && body.has_free(x)
            }
            LocalTerm::TyAbs(_, e) | LocalTerm::TyApp(e, _) | LocalTerm::Ann(e, _) => e.has_free(x),
            LocalTerm::Case { scrut, nil, head, tail, cons } => {
                scrut.has_free(x) || nil.has_free(x) || (head != x && tail != x && cons.has_free(x))
            }
        }
    }

    pub fn fv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            LocalTerm::Var(y) => {
                out.insert(y.clone());
            }
            LocalTerm::Int(_) | LocalTerm::Bool(_) | LocalTerm::Nil(_) => {}
            LocalTerm::RepInt | LocalTerm::RepBool => {}
            LocalTerm::Add(a, b)
            | LocalTerm::Eq(a, b)
            | LocalTerm::Lt(a, b)
            | LocalTerm::App(a, b)
            | LocalTerm::Cons(a, b)
            | LocalTerm::RepArrow(a, b) => {
                a.fv_into(out);
                b.fv_into(out);
            }
            LocalTerm::If(c, a, b) => {
                c.fv_into(out);
                a.fv_into(out);
                b.fv_into(out);
            }
            LocalTerm::Fun { f, x, ret, body, .. } => {
                let mut inner = BTreeSet::new();
                body.fv_into(&mut inner);
                inner.remove(x);
                if ret.is_some() {
                    inner.remove(f);
                }
                out.extend(inner);
            }
            LocalTerm::TyAbs(_, e) | LocalTerm::TyApp(e, _) | LocalTerm::Ann(e, _) => e.fv_into(out),
            LocalTerm::Case { scrut, nil, head, tail, cons } => {
                scrut.fv_into(out);
                nil.fv_into(out);
                let mut inner = BTreeSet::new();
                cons.fv_into(&mut inner);
                inner.remove(head);
                inner.remove(tail);
                out.extend(inner);
            }
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        self.walk(&mut |t| match t {
            LocalTerm::Var(y) => {
                out.insert(y.clone());
            }
            LocalTerm::Fun { f, x, .. } => {
                out.insert(f.clone());
                out.insert(x.clone());
            }
            LocalTerm::Case { head, tail, .. } => {
                out.insert(head.clone());
                out.insert(tail.clone());
            }
            _ => {}
        });
    }

    /// Pre-order traversal.
    pub fn walk<F: FnMut(&LocalTerm)>(&self, f: &mut F) {
        f(self);
        match self {
            LocalTerm::Add(a, b)
            | LocalTerm::Eq(a, b)
            | LocalTerm::Lt(a, b)
            | LocalTerm::App(a, b)
            | LocalTerm::Cons(a, b)
            | LocalTerm::RepArrow(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            LocalTerm::If(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
            LocalTerm::Fun { body, .. } => body.walk(f),
            LocalTerm::TyAbs(_, e) | LocalTerm::TyApp(e, _) | LocalTerm::Ann(e, _) => e.walk(f),
            LocalTerm::Case { scrut, nil, cons, .. } => {
                scrut.walk(f);
                nil.walk(f);
                cons.walk(f);
            }
            _ => {}
        }
    }

    /// Free type variables, including those in annotations.
    pub fn ftv_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            LocalTerm::Fun { arg, ret, body, .. } => {
                arg.ftv_into(out);
                if let Some(r) = ret {
                    r.ftv_into(out);
                }
                body.ftv_into(out);
            }
            LocalTerm::TyAbs(a, e) => {
                let mut inner = BTreeSet::new();
                e.ftv_into(&mut inner);
                inner.remove(a);
                out.extend(inner);
            }
            LocalTerm::TyApp(e, t) | LocalTerm::Ann(e, t) => {
                e.ftv_into(out);
                t.ftv_into(out);
            }
            LocalTerm::Nil(t) => t.ftv_into(out),
            LocalTerm::Add(a, b)
            | LocalTerm::Eq(a, b)
            | LocalTerm::Lt(a, b)
            | LocalTerm::App(a, b)
            | LocalTerm::Cons(a, b)
            | LocalTerm::RepArrow(a, b) => {
                a.ftv_into(out);
                b.ftv_into(out);
            }
            LocalTerm::If(c, a, b) => {
                c.ftv_into(out);
                a.ftv_into(out);
                b.ftv_into(out);
            }
            LocalTerm::Case { scrut, nil, cons, .. } => {
                scrut.ftv_into(out);
                nil.ftv_into(out);
                cons.ftv_into(out);
            }
            LocalTerm::Var(_)
            | LocalTerm::Int(_)
            | LocalTerm::Bool(_)
            | LocalTerm::RepInt
            | LocalTerm::RepBool => {}
        }
    }

    pub fn ftv(&self) -> BTreeSet<Name> {
        let mut s = BTreeSet::new();
        self.ftv_into(&mut s);
        s
    }

    /// Capture-avoiding substitution of `v` for the free variable `x`.
    pub fn subst(&self, x: &str, v: &LocalTerm) -> LocalTerm {
        let fv = v.fv();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &str, v: &LocalTerm, fv: &BTreeSet<Name>) -> LocalTerm {
        use LocalTerm as T;
        let go = |e: &LocalTerm| Box::new(e.subst_with(x, v, fv));
        match self {
            T::Var(y) if y == x => v.clone(),
            T::Var(_) | T::Int(_) | T::Bool(_) | T::Nil(_) | T::RepInt | T::RepBool => self.clone(),
            T::Add(a, b) => T::Add(go(a), go(b)),
            T::Eq(a, b) => T::Eq(go(a), go(b)),
            T::Lt(a, b) => T::Lt(go(a), go(b)),
            T::App(a, b) => T::App(go(a), go(b)),
            T::Cons(a, b) => T::Cons(go(a), go(b)),
            T::RepArrow(a, b) => T::RepArrow(go(a), go(b)),
            T::If(c, a, b) => T::If(go(c), go(a), go(b)),
            T::TyAbs(a, e) => T::TyAbs(a.clone(), go(e)),
            T::TyApp(e, t) => T::TyApp(go(e), t.clone()),
            T::Ann(e, t) => T::Ann(go(e), t.clone()),
            T::Fun { f, x: y, arg, ret, body } => {
                let binds_f = ret.is_some();
                if y == x || (binds_f && f == x) || !body.has_free(x) {
                    return self.clone();
                }
                let mut avoid = fv.clone();
                body.all_names(&mut avoid);
                avoid.insert(x.into());
                let mut f2 = f.clone();
                let mut y2 = y.clone();
                let mut body2 = (**body).clone();
                if binds_f && fv.contains(f) {
                    f2 = fresh_name(f, |n| avoid.contains(n));
                    avoid.insert(f2.clone());
                    body2 = body2.subst(f, &T::Var(f2.clone()));
                }
                if fv.contains(y) {
                    y2 = fresh_name(y, |n| avoid.contains(n));
                    body2 = body2.subst(y, &T::Var(y2.clone()));
                }
                T::Fun {
                    f: f2,
                    x: y2,
                    arg: arg.clone(),
                    ret: ret.clone(),
                    body: Box::new(body2.subst_with(x, v, fv)),
                }
            }
            T::Case { scrut, nil, head, tail, cons } => {
                let scrut2 = go(scrut);
                let nil2 = go(nil);
                if head == x || tail == x || !cons.has_free(x) {
                    return T::Case {
                        scrut: scrut2,
                        nil: nil2,
                        head: head.clone(),
                        tail: tail.clone(),
                        cons: cons.clone(),
                    };
                }
                let mut avoid = fv.clone();
                cons.all_names(&mut avoid);
                avoid.insert(x.into());
                avoid.insert(head.clone());
                avoid.insert(tail.clone());
                let mut h2 = head.clone();
                let mut t2 = tail.clone();
                let mut c2 = (**cons).clone();
                if fv.contains(head) {
                    h2 = fresh_name(head, |n| avoid.contains(n));
                    avoid.insert(h2.clone());
                    c2 = c2.subst(head, &T::Var(h2.clone()));
                }
                if fv.contains(tail) {
                    t2 = fresh_name(tail, |n| avoid.contains(n));
                    c2 = c2.subst(tail, &T::Var(t2.clone()));
                }
                T::Case {
                    scrut: scrut2,
                    nil: nil2,
                    head: h2,
                    tail: t2,
                    cons: Box::new(c2.subst_with(x, v, fv)),
                }
            }
        }
    }

    /// Substitute a type variable throughout annotations.
    pub fn subst_ty(&self, a: &str, s: LSub<'_>) -> LocalTerm {
        use LocalTerm as T;
        let go = |e: &LocalTerm| Box::new(e.subst_ty(a, s));
        match self {
            T::Var(_) | T::Int(_) | T::Bool(_) | T::RepInt | T::RepBool => self.clone(),
            T::Nil(t) => T::Nil(t.subst(a, s)),
            T::Add(x, y) => T::Add(go(x), go(y)),
            T::Eq(x, y) => T::Eq(go(x), go(y)),
            T::Lt(x, y) => T::Lt(go(x), go(y)),
            T::App(x, y) => T::App(go(x), go(y)),
            T::Cons(x, y) => T::Cons(go(x), go(y)),
            T::RepArrow(x, y) => T::RepArrow(go(x), go(y)),
            T::If(c, x, y) => T::If(go(c), go(x), go(y)),
            T::TyApp(e, t) => T::TyApp(go(e), t.subst(a, s)),
            T::Ann(e, t) => T::Ann(go(e), t.subst(a, s)),
            T::Fun { f, x, arg, ret, body } => T::Fun {
                f: f.clone(),
                x: x.clone(),
                arg: arg.subst(a, s),
                ret: ret.as_ref().map(|r| r.subst(a, s)),
                body: go(body),
            },
            T::Case { scrut, nil, head, tail, cons } => T::Case {
                scrut: go(scrut),
                nil: go(nil),
                head: head.clone(),
                tail: tail.clone(),
                cons: go(cons),
            },
            T::TyAbs(b, e) => {
                if b == a {
                    return self.clone();
                }
                let mut fv = BTreeSet::new();
                s.free_vars(&mut fv);
                if fv.contains(b) {
                    let mut avoid = fv;
                    e.ftv_into(&mut avoid);
                    avoid.insert(a.into());
                    let b2 = fresh_name(b, |n| avoid.contains(n));
                    let e2 = e.rename_tv(b, &b2);
                    T::TyAbs(b2, Box::new(e2.subst_ty(a, s)))
                } else {
                    T::TyAbs(b.clone(), go(e))
                }
            }
        }
    }

    /// Rename a free type variable of any sort.
    pub fn rename_tv(&self, a: &str, b: &str) -> LocalTerm {
        use LocalTerm as T;
        let go = |e: &LocalTerm| Box::new(e.rename_tv(a, b));
        match self {
            T::Var(_) | T::Int(_) | T::Bool(_) | T::RepInt | T::RepBool => self.clone(),
            T::Nil(t) => T::Nil(t.rename_tv(a, b)),
            T::Add(x, y) => T::Add(go(x), go(y)),
            T::Eq(x, y) => T::Eq(go(x), go(y)),
            T::Lt(x, y) => T::Lt(go(x), go(y)),
            T::App(x, y) => T::App(go(x), go(y)),
            T::Cons(x, y) => T::Cons(go(x), go(y)),
            T::RepArrow(x, y) => T::RepArrow(go(x), go(y)),
            T::If(c, x, y) => T::If(go(c), go(x), go(y)),
            T::TyApp(e, t) => T::TyApp(go(e), t.rename_tv(a, b)),
            T::Ann(e, t) => T::Ann(go(e), t.rename_tv(a, b)),
            T::Fun { f, x, arg, ret, body } => T::Fun {
                f: f.clone(),
                x: x.clone(),
                arg: arg.rename_tv(a, b),
                ret: ret.as_ref().map(|r| r.rename_tv(a, b)),
                body: go(body),
            },
            T::Case { scrut, nil, head, tail, cons } => T::Case {
                scrut: go(scrut),
                nil: go(nil),
                head: head.clone(),
                tail: tail.clone(),
                cons: go(cons),
            },
            T::TyAbs(c, _) if c == a => self.clone(),
            T::TyAbs(c, e) => T::TyAbs(c.clone(), go(e)),
        }
    }

    /// Apply `f` to every location set in annotations.
    pub fn map_sets(&self, f: &dyn Fn(&LocSet) -> LocSet) -> LocalTerm {
        use LocalTerm as T;
        let go = |e: &LocalTerm| Box::new(e.map_sets(f));
        match self {
            T::Var(_) | T::Int(_) | T::Bool(_) | T::RepInt | T::RepBool => self.clone(),
            T::Nil(t) => T::Nil(t.map_sets(f)),
            T::Add(x, y) => T::Add(go(x), go(y)),
            T::Eq(x, y) => T::Eq(go(x), go(y)),
            T::Lt(x, y) => T::Lt(go(x), go(y)),
            T::App(x, y) => T::App(go(x), go(y)),
            T::Cons(x, y) => T::Cons(go(x), go(y)),
            T::RepArrow(x, y) => T::RepArrow(go(x), go(y)),
            T::If(c, x, y) => T::If(go(c), go(x), go(y)),
            T::TyApp(e, t) => T::TyApp(go(e), t.map_sets(f)),
            T::Ann(e, t) => T::Ann(go(e), t.map_sets(f)),
            T::Fun { f: g, x, arg, ret, body } => T::Fun {
                f: g.clone(),
                x: x.clone(),
                arg: arg.map_sets(f),
                ret: ret.as_ref().map(|r| r.map_sets(f)),
                body: go(body),
            },
            T::Case { scrut, nil, head, tail, cons } => T::Case {
                scrut: go(scrut),
                nil: go(nil),
                head: head.clone(),
                tail: tail.clone(),
                cons: go(cons),
            },
            T::TyAbs(c, e) => T::TyAbs(c.clone(), go(e)),
        }
    }
}

/// Maps integer codes to locations; unmapped integers go to the default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocTable {
    pub map: BTreeMap<i64, Name>,
    pub default: Name,
}

impl LocTable {
    pub fn new(map: BTreeMap<i64, Name>, default: Name) -> Self {
        LocTable { map, default }
    }

    /// Codes `0..n` for the given locations, the last one also being the default.
    pub fn sequential(locs: &[&str]) -> Self {
        let map = locs
            .iter()
            .enumerate()
            .map(|(i, l)| (i as i64, String::from(*l)))
            .collect();
        LocTable::new(map, String::from(*locs.last().expect("nonempty")))
    }

    pub fn lookup(&self, n: i64) -> &str {
        self.map.get(&n).map(|s| s.as_str()).unwrap_or(&self.default)
    }

    /// Smallest code denoting `l`.
    pub fn code(&self, l: &str) -> Option<i64> {
        if let Some((k, _)) = self.map.iter().find(|(_, v)| v.as_str() == l) {
            return Some(*k);
        }
        if l == self.default {
            return (0..).find(|n| !self.map.contains_key(n));
        }
        None
    }

    /// `repr(l)`: an annotated code for a location.
    pub fn repr(&self, l: &str) -> Option<LocalTerm> {
        let c = self.code(l)?;
        Some(LocalTerm::ann(LocalTerm::Int(c), LocalType::Loc(LocSet::loc(l))))
    }

    /// `reprset{ls}`: an annotated list of codes.
    pub fn repr_set(&self, ls: &[&str]) -> Option<LocalTerm> {
        let mut list = LocalTerm::Nil(LocalType::Int);
        for l in ls.iter().rev() {
            list = LocalTerm::cons(LocalTerm::Int(self.code(l)?), list);
        }
        Some(LocalTerm::ann(list, LocalType::LocSetOf(LocSet::of_names(ls.iter().copied()))))
    }

    pub fn reify_loc(&self, v: &LocalTerm) -> Option<Name> {
        match strip_ann(v) {
            LocalTerm::Int(n) => Some(self.lookup(*n).into()),
            _ => None,
        }
    }

    /// Names denoted by a list of codes, in order of first occurrence.
    pub fn reify_set(&self, v: &LocalTerm) -> Option<Vec<Name>> {
        let mut out: Vec<Name> = Vec::new();
        let mut cur = strip_ann(v);
        loop {
            match cur {
                LocalTerm::Nil(_) => break,
                LocalTerm::Cons(h, t) => {
                    let n = self.reify_loc(h)?;
                    if !out.contains(&n) {
                        out.push(n);
                    }
                    cur = strip_ann(t);
                }
                _ => return None,
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(out)
        }
    }
}

pub fn reify_ty(v: &LocalTerm) -> Option<LocalType> {
    match strip_ann(v) {
        LocalTerm::RepInt => Some(LocalType::Int),
        LocalTerm::RepBool => Some(LocalType::Bool),
        LocalTerm::RepArrow(a, b) => Some(LocalType::arrow(reify_ty(a)?, reify_ty(b)?)),
        _ => None,
    }
}

/// Type representation term for a closed local type built from int, bool and arrows.
pub fn repr_ty(t: &LocalType) -> Option<LocalTerm> {
    match t {
        LocalType::Int => Some(LocalTerm::RepInt),
        LocalType::Bool => Some(LocalTerm::RepBool),
        LocalType::Arrow(a, b) => Some(LocalTerm::RepArrow(Box::new(repr_ty(a)?), Box::new(repr_ty(b)?))),
        _ => None,
    }
}

/// Ascribe a value to the type it is bound at, keeping already-precise values.
pub fn ascribe(v: &LocalTerm, t: &LocalType) -> LocalTerm {
    let keep = match (v, t) {
        (LocalTerm::Int(_), LocalType::Int) => true,
        (LocalTerm::Bool(_), LocalType::Bool) => true,
        (LocalTerm::RepInt | LocalTerm::RepBool | LocalTerm::RepArrow(..), LocalType::TyRep) => true,
        (LocalTerm::Ann(_, t2), _) => ty_equiv(t2, t),
        _ => false,
    };
    if keep {
        v.clone()
    } else {
        LocalTerm::ann(v.clone(), t.clone())
    }
}
