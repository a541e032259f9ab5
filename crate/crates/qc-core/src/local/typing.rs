use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{LocTable, LocalTerm as T, LocalType as Ty};
use crate::kind::{Kind, KindCtx};
use crate::locset::{nec_in, set_equiv, subset, LocExpr, LocSet, Name};

/// Kinding, variable and location-table context for local typing.
#[derive(Clone, Debug)]
pub struct LocalEnv<'a> {
    pub kinds: &'a KindCtx,
    pub table: &'a LocTable,
    pub vars: Vec<(Name, Ty)>,
}

impl<'a> LocalEnv<'a> {
    pub fn new(kinds: &'a KindCtx, table: &'a LocTable) -> Self {
        LocalEnv { kinds, table, vars: Vec::new() }
    }

    fn lookup(&self, x: &str) -> Option<&Ty> {
        self.vars.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    fn with_vars<R>(&mut self, binds: &[(Name, Ty)], f: impl FnOnce(&mut Self) -> R) -> R {
        let n = self.vars.len();
        self.vars.extend(binds.iter().cloned());
        let r = f(self);
        self.vars.truncate(n);
        r
    }
}

pub fn set_kind(kinds: &KindCtx, r: &LocSet) -> Result<(), String> {
    match r {
        LocSet::Var(a) => match kinds.lookup(a) {
            Some(Kind::Set) => Ok(()),
            Some(k) => Err(format!("`{a}` has kind {} where a location set is expected", k.keyword())),
            None => Err(format!("unbound location-set variable `{a}`")),
        },
        LocSet::Sng(l) => loc_kind(kinds, l),
        LocSet::Union(a, b) => {
            set_kind(kinds, a)?;
            set_kind(kinds, b)
        }
    }
}

pub fn loc_kind(kinds: &KindCtx, l: &LocExpr) -> Result<(), String> {
    match l {
        LocExpr::Concrete(_) => Ok(()),
        LocExpr::Var(a) => match kinds.lookup(a) {
            Some(Kind::Loc) => Ok(()),
            Some(k) => Err(format!("`{a}` has kind {} where a location is expected", k.keyword())),
            None => Err(format!("unbound location variable `{a}`")),
        },
    }
}

pub fn lkind(kinds: &KindCtx, t: &Ty) -> Result<(), String> {
    match t {
        Ty::Var(a) => match kinds.lookup(a) {
            Some(Kind::Local) => Ok(()),
            Some(k) => Err(format!("`{a}` has kind {} where a local type is expected", k.keyword())),
            None => Err(format!("unbound local type variable `{a}`")),
        },
        Ty::Int | Ty::Bool | Ty::TyRep => Ok(()),
        Ty::List(t) => lkind(kinds, t),
        Ty::Loc(r) | Ty::LocSetOf(r) => set_kind(kinds, r),
        Ty::Arrow(a, b) => {
            lkind(kinds, a)?;
            lkind(kinds, b)
        }
        Ty::Forall(a, t) => lkind(&kinds.with(a.clone(), Kind::Local), t),
    }
}

fn rename_bound(a: &str, b: &str, t: &Ty) -> Ty {
    if a == b {
        t.clone()
    } else {
        t.rename_tv(b, a)
    }
}

/// Type equivalence: structural, with location sets compared by mutual inclusion.
pub fn ty_equiv(a: &Ty, b: &Ty) -> bool {
    match (a, b) {
        (Ty::Var(x), Ty::Var(y)) => x == y,
        (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) | (Ty::TyRep, Ty::TyRep) => true,
        (Ty::List(x), Ty::List(y)) => ty_equiv(x, y),
        (Ty::Loc(r1), Ty::Loc(r2)) | (Ty::LocSetOf(r1), Ty::LocSetOf(r2)) => set_equiv(r1, r2),
        (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => ty_equiv(a1, a2) && ty_equiv(b1, b2),
        (Ty::Forall(x, t1), Ty::Forall(y, t2)) => ty_equiv(t1, &rename_bound(x, y, t2)),
        _ => false,
    }
}

/// Subsumption: location annotations may widen.
pub fn lsubtype(a: &Ty, b: &Ty) -> bool {
    match (a, b) {
        (Ty::Loc(r1), Ty::Loc(r2)) | (Ty::LocSetOf(r1), Ty::LocSetOf(r2)) => subset(r1, r2),
        (Ty::List(x), Ty::List(y)) => lsubtype(x, y),
        (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => lsubtype(a2, a1) && lsubtype(b1, b2),
        (Ty::Forall(x, t1), Ty::Forall(y, t2)) => lsubtype(t1, &rename_bound(x, y, t2)),
        _ => ty_equiv(a, b),
    }
}

fn expect_int(env: &mut LocalEnv, e: &T) -> Result<(), String> {
    lcheck(env, e, &Ty::Int)
}

pub fn lsynth(env: &mut LocalEnv, e: &T) -> Result<Ty, String> {
    match e {
        T::Var(x) => env.lookup(x).cloned().ok_or_else(|| format!("unbound local variable `{x}`")),
        T::Int(_) => Ok(Ty::Int),
        T::Bool(_) => Ok(Ty::Bool),
        T::Add(a, b) => {
            expect_int(env, a)?;
            expect_int(env, b)?;
            Ok(Ty::Int)
        }
        T::Lt(a, b) => {
            expect_int(env, a)?;
            expect_int(env, b)?;
            Ok(Ty::Bool)
        }
        T::Eq(a, b) => {
            let ta = lsynth(env, a)?;
            let tb = lsynth(env, b)?;
            match (&ta, &tb) {
                (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) | (Ty::Loc(_), Ty::Loc(_)) => Ok(Ty::Bool),
                _ => Err(format!("cannot compare {ta} with {tb}")),
            }
        }
        T::If(c, a, b) => {
            lcheck(env, c, &Ty::Bool)?;
            let ta = lsynth(env, a)?;
            let tb = lsynth(env, b)?;
            if ty_equiv(&ta, &tb) {
                Ok(ta)
            } else {
                Err(format!("branches disagree: {ta} vs {tb}"))
            }
        }
        T::Fun { f, x, arg, ret, body } => {
            lkind(env.kinds, arg)?;
            match ret {
                Some(r) => {
                    lkind(env.kinds, r)?;
                    let ft = Ty::arrow(arg.clone(), r.clone());
                    let binds = [(f.clone(), ft.clone()), (x.clone(), arg.clone())];
                    env.with_vars(&binds, |env| lcheck(env, body, r))?;
                    Ok(ft)
                }
                None => {
                    let binds = [(x.clone(), arg.clone())];
                    let r = env.with_vars(&binds, |env| lsynth(env, body))?;
                    Ok(Ty::arrow(arg.clone(), r))
                }
            }
        }
        T::App(f, a) => match lsynth(env, f)? {
            Ty::Arrow(t1, t2) => {
                lcheck(env, a, &t1)?;
                Ok(*t2)
            }
            t => Err(format!("applying a non-function of type {t}")),
        },
        T::TyAbs(a, body) => {
            let kinds = env.kinds.with(a.clone(), Kind::Local);
            let mut inner = LocalEnv { kinds: &kinds, table: env.table, vars: env.vars.clone() };
            let t = lsynth(&mut inner, body)?;
            Ok(Ty::Forall(a.clone(), alloc::boxed::Box::new(t)))
        }
        T::TyApp(f, t) => {
            lkind(env.kinds, t)?;
            match lsynth(env, f)? {
                Ty::Forall(a, body) => Ok(body.subst(&a, super::LSub::Ty(t))),
                other => Err(format!("type application of non-polymorphic {other}")),
            }
        }
        T::Nil(t) => {
            lkind(env.kinds, t)?;
            Ok(Ty::list(t.clone()))
        }
        T::Cons(h, tl) => match lsynth(env, tl)? {
            Ty::List(t) => {
                lcheck(env, h, &t)?;
                Ok(Ty::List(t))
            }
            Ty::LocSetOf(r) => {
                lcheck(env, h, &Ty::Loc(r.clone()))?;
                Ok(Ty::LocSetOf(r))
            }
            t => Err(format!("cons onto non-list {t}")),
        },
        T::Case { scrut, nil, head, tail, cons } => {
            let (ht, tt) = match lsynth(env, scrut)? {
                Ty::List(t) => ((*t).clone(), Ty::List(t)),
                Ty::LocSetOf(r) => (Ty::Loc(r.clone()), Ty::LocSetOf(r)),
                t => return Err(format!("case on non-list {t}")),
            };
            let tn = lsynth(env, nil)?;
            let binds = [(head.clone(), ht), (tail.clone(), tt)];
            let tc = env.with_vars(&binds, |env| lsynth(env, cons))?;
            if ty_equiv(&tn, &tc) {
                Ok(tn)
            } else {
                Err(format!("case branches disagree: {tn} vs {tc}"))
            }
        }
        T::RepInt | T::RepBool => Ok(Ty::TyRep),
        T::RepArrow(a, b) => {
            lcheck(env, a, &Ty::TyRep)?;
            lcheck(env, b, &Ty::TyRep)?;
            Ok(Ty::TyRep)
        }
        T::Ann(x, t) => {
            lkind(env.kinds, t)?;
            lcheck(env, x, t)?;
            Ok(t.clone())
        }
    }
}

pub fn lcheck(env: &mut LocalEnv, e: &T, t: &Ty) -> Result<(), String> {
    match (e, t) {
        (T::Int(n), Ty::Loc(r)) => {
            let l = LocExpr::Concrete(env.table.lookup(*n).into());
            if nec_in(&l, r) {
                Ok(())
            } else {
                Err(format!("code {n} denotes {} outside the annotated set", env.table.lookup(*n)))
            }
        }
        (T::If(c, a, b), _) => {
            lcheck(env, c, &Ty::Bool)?;
            lcheck(env, a, t)?;
            lcheck(env, b, t)
        }
        (T::Nil(_), Ty::LocSetOf(_)) => Ok(()),
        (T::Cons(h, tl), Ty::LocSetOf(r)) => {
            lcheck(env, h, &Ty::Loc(r.clone()))?;
            lcheck(env, tl, t)
        }
        (T::Cons(h, tl), Ty::List(el)) => {
            lcheck(env, h, el)?;
            lcheck(env, tl, t)
        }
        _ => {
            let s = lsynth(env, e)?;
            if lsubtype(&s, t) {
                Ok(())
            } else {
                Err(format!("expected {t}, found {s}"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocTable;

    #[test]
    fn location_literals_check_against_tables() {
        let table = LocTable::sequential(&["A", "B", "C"]);
        let kinds = KindCtx::new();
        let mut env = LocalEnv::new(&kinds, &table);
        let ab = Ty::Loc(LocSet::of_names(["A", "B"]));
        assert!(lcheck(&mut env, &T::int(1), &ab).is_ok());
        assert!(lcheck(&mut env, &T::int(2), &ab).is_err());
        assert!(lcheck(&mut env, &T::int(7), &Ty::Loc(LocSet::loc("C"))).is_ok());
    }

    #[test]
    fn function_without_return_type_is_not_recursive() {
        let table = LocTable::sequential(&["A"]);
        let kinds = KindCtx::new();
        let mut env = LocalEnv::new(&kinds, &table);
        let f = T::fun("f", "x", Ty::Int, None, T::app(T::var("f"), T::var("x")));
        assert!(lsynth(&mut env, &f).is_err());
        let g = T::fun("f", "x", Ty::Int, Some(Ty::Int), T::app(T::var("f"), T::var("x")));
        assert_eq!(lsynth(&mut env, &g).unwrap(), Ty::arrow(Ty::Int, Ty::Int));
    }
}
