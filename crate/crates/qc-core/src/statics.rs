//! Kinding and type synthesis for choreographies.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chor::{Chor, ChorType, TySub};
use crate::kind::{Kind, KindCtx};
use crate::local::{lkind, lsubtype, lsynth, ty_equiv, LocTable, LocalEnv, LocalType};
use crate::locset::{nec_in, set_equiv, subset, LocSet, Name};

pub use crate::local::{loc_kind, set_kind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub msg: String,
    /// Innermost first: the constructs being checked when the error arose.
    pub trail: Vec<&'static str>,
}

impl TypeError {
    fn new(msg: impl Into<String>) -> Self {
        TypeError { msg: msg.into(), trail: Vec::new() }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.msg)?;
        if let Some(c) = self.trail.first() {
            write!(f, " (in {c}")?;
            for c in &self.trail[1..] {
                write!(f, " < {c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

type TResult<T> = Result<T, TypeError>;

fn err<T>(msg: impl Into<String>) -> TResult<T> {
    Err(TypeError::new(msg))
}

fn lift<T>(r: Result<T, String>) -> TResult<T> {
    r.map_err(TypeError::new)
}

/// Typing context: kinds, located local variables and choreography variables.
#[derive(Clone, Debug)]
pub struct Ctx<'a> {
    pub table: &'a LocTable,
    pub kinds: KindCtx,
    pub locals: Vec<(LocSet, Name, LocalType)>,
    pub vars: Vec<(Name, ChorType)>,
}

impl<'a> Ctx<'a> {
    pub fn new(table: &'a LocTable) -> Self {
        Ctx { table, kinds: KindCtx::new(), locals: Vec::new(), vars: Vec::new() }
    }

    /// The local variables visible at every location of `r`.
    pub fn project_locals(&self, r: &LocSet) -> Vec<(Name, LocalType)> {
        self.locals
            .iter()
            .filter(|(at, _, _)| subset(r, at))
            .map(|(_, x, t)| (x.clone(), t.clone()))
            .collect()
    }
}

pub fn kind_of(kinds: &KindCtx, t: &ChorType) -> TResult<Kind> {
    match t {
        ChorType::Var(a) => kinds.lookup(a).ok_or_else(|| TypeError::new(format!("unbound type variable `{a}`"))),
        ChorType::At(lt, r) => {
            lift(lkind(kinds, lt))?;
            lift(set_kind(kinds, r))?;
            Ok(Kind::Chor)
        }
        ChorType::Arrow(a, b) | ChorType::Prod(a, b) | ChorType::Sum(a, b) => {
            expect_kind(kinds, a, Kind::Chor)?;
            expect_kind(kinds, b, Kind::Chor)?;
            Ok(Kind::Chor)
        }
        ChorType::Forall(a, k, body) => {
            expect_kind(&kinds.with(a.clone(), *k), body, Kind::Chor)?;
            Ok(Kind::Chor)
        }
        ChorType::Mu(a, body) => {
            expect_kind(&kinds.with(a.clone(), Kind::Chor), body, Kind::Chor)?;
            Ok(Kind::Chor)
        }
        ChorType::Loc(l) => {
            lift(loc_kind(kinds, l))?;
            Ok(Kind::Loc)
        }
        ChorType::Set(r) => {
            lift(set_kind(kinds, r))?;
            Ok(Kind::Set)
        }
        ChorType::Local(lt) => {
            lift(lkind(kinds, lt))?;
            Ok(Kind::Local)
        }
    }
}

pub fn expect_kind(kinds: &KindCtx, t: &ChorType, k: Kind) -> TResult<()> {
    let found = kind_of(kinds, t)?;
    let ok = found == k || (k == Kind::Loc && matches!(t, ChorType::Set(LocSet::Sng(_))));
    if ok {
        Ok(())
    } else {
        err(format!("expected kind {}, found {}", k.keyword(), found.keyword()))
    }
}

/// Structural equivalence with location sets compared by mutual inclusion.
pub fn chor_ty_equiv(a: &ChorType, b: &ChorType) -> bool {
    use ChorType as T;
    match (a, b) {
        (T::Var(x), T::Var(y)) => x == y,
        (T::At(t1, r1), T::At(t2, r2)) => ty_equiv(t1, t2) && set_equiv(r1, r2),
        (T::Arrow(a1, b1), T::Arrow(a2, b2))
        | (T::Prod(a1, b1), T::Prod(a2, b2))
        | (T::Sum(a1, b1), T::Sum(a2, b2)) => chor_ty_equiv(a1, a2) && chor_ty_equiv(b1, b2),
        (T::Forall(x, k1, t1), T::Forall(y, k2, t2)) => {
            k1 == k2 && chor_ty_equiv(t1, &rename(y, x, t2))
        }
        (T::Mu(x, t1), T::Mu(y, t2)) => chor_ty_equiv(t1, &rename(y, x, t2)),
        (T::Loc(l1), T::Loc(l2)) => l1 == l2,
        (T::Set(r1), T::Set(r2)) => set_equiv(r1, r2),
        (T::Set(LocSet::Sng(l1)), T::Loc(l2)) | (T::Loc(l1), T::Set(LocSet::Sng(l2))) => l1 == l2,
        (T::Local(t1), T::Local(t2)) => ty_equiv(t1, t2),
        _ => false,
    }
}

fn rename(from: &str, to: &str, t: &ChorType) -> ChorType {
    if from == to {
        t.clone()
    } else {
        t.subst(from, TySub::Rename(to))
    }
}

fn expect_equiv(found: &ChorType, want: &ChorType, what: &str) -> TResult<()> {
    if chor_ty_equiv(found, want) {
        Ok(())
    } else {
        err(format!("{what}: expected {want}, found {found}"))
    }
}

fn located(t: ChorType, what: &str) -> TResult<(LocalType, LocSet)> {
    match t {
        ChorType::At(lt, r) => Ok((lt, r)),
        other => err(format!("{what} must be a located value, found {other}")),
    }
}

fn label(c: &Chor) -> &'static str {
    match c {
        Chor::Var(_) => "variable",
        Chor::Done(..) => "located expression",
        Chor::Fun { .. } => "function",
        Chor::App(..) => "application",
        Chor::TyAbs(..) => "type abstraction",
        Chor::TyApp(..) => "type application",
        Chor::Fold(..) => "fold",
        Chor::Unfold(_) => "unfold",
        Chor::Pair(..) => "pair",
        Chor::Fst(_) => "fst",
        Chor::Snd(_) => "snd",
        Chor::Inl(..) => "inl",
        Chor::Inr(..) => "inr",
        Chor::Case { .. } => "case",
        Chor::Send { .. } => "send",
        Chor::Sync { .. } => "sync",
        Chor::If { .. } => "if",
        Chor::LetLocal { .. } => "local let",
        Chor::LetType { .. } => "type let",
    }
}

/// Synthesize the type of `c`.
pub fn synth(ctx: &mut Ctx, c: &Chor) -> TResult<ChorType> {
    synth_inner(ctx, c).map_err(|mut e| {
        e.trail.push(label(c));
        e
    })
}

fn synth_inner(ctx: &mut Ctx, c: &Chor) -> TResult<ChorType> {
    match c {
        Chor::Var(x) => ctx
            .vars
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| TypeError::new(format!("unbound choreography variable `{x}`"))),
        Chor::Done(r, e) => {
            lift(set_kind(&ctx.kinds, r))?;
            let mut env = LocalEnv::new(&ctx.kinds, ctx.table);
            env.vars = ctx.project_locals(r);
            let t = lift(lsynth(&mut env, e))?;
            Ok(ChorType::At(t, r.clone()))
        }
        Chor::Fun { f, x, arg, ret, body } => {
            expect_kind(&ctx.kinds, arg, Kind::Chor)?;
            let n = ctx.vars.len();
            let result = match ret {
                Some(rt) => {
                    expect_kind(&ctx.kinds, rt, Kind::Chor)?;
                    let ft = ChorType::arrow(arg.clone(), rt.clone());
                    ctx.vars.push((f.clone(), ft.clone()));
                    ctx.vars.push((x.clone(), arg.clone()));
                    synth(ctx, body).and_then(|bt| expect_equiv(&bt, rt, "function body").map(|_| ft))
                }
                None => {
                    ctx.vars.push((x.clone(), arg.clone()));
                    synth(ctx, body).map(|bt| ChorType::arrow(arg.clone(), bt))
                }
            };
            ctx.vars.truncate(n);
            result
        }
        Chor::App(f, a) => match synth(ctx, f)? {
            ChorType::Arrow(t1, t2) => {
                let ta = synth(ctx, a)?;
                expect_equiv(&ta, &t1, "argument")?;
                Ok(*t2)
            }
            other => err(format!("applying a non-function of type {other}")),
        },
        Chor::TyAbs(a, k, body) => {
            ctx.kinds.push(a.clone(), *k);
            let r = synth(ctx, body);
            ctx.kinds.pop();
            Ok(ChorType::Forall(a.clone(), *k, alloc::boxed::Box::new(r?)))
        }
        Chor::TyApp(f, t) => match synth(ctx, f)? {
            ChorType::Forall(a, k, body) => {
                expect_kind(&ctx.kinds, t, k)?;
                Ok(body.subst(&a, TySub::for_kind(t, k)))
            }
            other => err(format!("type application of non-polymorphic {other}")),
        },
        Chor::Fold(t, body) => match t {
            ChorType::Mu(a, inner) => {
                expect_kind(&ctx.kinds, t, Kind::Chor)?;
                let want = inner.subst(a, TySub::Chor(t));
                let found = synth(ctx, body)?;
                expect_equiv(&found, &want, "fold body")?;
                Ok(t.clone())
            }
            other => err(format!("fold annotation must be recursive, found {other}")),
        },
        Chor::Unfold(body) => match synth(ctx, body)? {
            mu @ ChorType::Mu(..) => {
                let ChorType::Mu(a, inner) = &mu else { unreachable!() };
                Ok(inner.subst(a, TySub::Chor(&mu)))
            }
            other => err(format!("unfold of non-recursive {other}")),
        },
        Chor::Pair(a, b) => Ok(ChorType::prod(synth(ctx, a)?, synth(ctx, b)?)),
        Chor::Fst(p) | Chor::Snd(p) => match synth(ctx, p)? {
            ChorType::Prod(a, b) => Ok(if matches!(c, Chor::Fst(_)) { *a } else { *b }),
            other => err(format!("projection from non-pair {other}")),
        },
        Chor::Inl(t, body) | Chor::Inr(t, body) => match t {
            ChorType::Sum(l, r) => {
                expect_kind(&ctx.kinds, t, Kind::Chor)?;
                let want = if matches!(c, Chor::Inl(..)) { l } else { r };
                let found = synth(ctx, body)?;
                expect_equiv(&found, want, "injection")?;
                Ok(t.clone())
            }
            other => err(format!("injection annotation must be a sum, found {other}")),
        },
        Chor::Case { scrut, x, left, y, right } => match synth(ctx, scrut)? {
            ChorType::Sum(l, r) => {
                let n = ctx.vars.len();
                ctx.vars.push((x.clone(), *l));
                let tl = synth(ctx, left);
                ctx.vars.truncate(n);
                ctx.vars.push((y.clone(), *r));
                let tr = synth(ctx, right);
                ctx.vars.truncate(n);
                let (tl, tr) = (tl?, tr?);
                expect_equiv(&tr, &tl, "case branches")?;
                Ok(tl)
            }
            other => err(format!("case on non-sum {other}")),
        },
        Chor::Send { body, from, to } => {
            lift(loc_kind(&ctx.kinds, from))?;
            lift(set_kind(&ctx.kinds, to))?;
            let (t, r1) = located(synth(ctx, body)?, "sent value")?;
            if !nec_in(from, &r1) {
                return err(format!("sender {from} does not hold the value located at {r1}"));
            }
            Ok(ChorType::At(t, LocSet::union(r1, to.clone())))
        }
        Chor::Sync { from, to, body, .. } => {
            lift(loc_kind(&ctx.kinds, from))?;
            lift(set_kind(&ctx.kinds, to))?;
            synth(ctx, body)
        }
        Chor::If { at, cond, then, els } => {
            lift(set_kind(&ctx.kinds, at))?;
            let (t, r) = located(synth(ctx, cond)?, "condition")?;
            if !ty_equiv(&t, &LocalType::Bool) {
                return err(format!("condition must be boolean, found {t}"));
            }
            if !subset(at, &r) {
                return err(format!("condition located at {r} is not known to all of {at}"));
            }
            let t1 = synth(ctx, then)?;
            let t2 = synth(ctx, els)?;
            expect_equiv(&t2, &t1, "if branches")?;
            Ok(t1)
        }
        Chor::LetLocal { at, x, ty, head, body } => {
            lift(set_kind(&ctx.kinds, at))?;
            lift(lkind(&ctx.kinds, ty))?;
            let (t, r) = located(synth(ctx, head)?, "bound value")?;
            if !lsubtype(&t, ty) {
                return err(format!("bound value has type {t}, not {ty}"));
            }
            if !subset(at, &r) {
                return err(format!("value located at {r} is not available at all of {at}"));
            }
            ctx.locals.push((at.clone(), x.clone(), ty.clone()));
            let out = synth(ctx, body);
            ctx.locals.pop();
            out
        }
        Chor::LetType { at, a, kind, head, body } => {
            lift(set_kind(&ctx.kinds, at))?;
            let (t, r3) = located(synth(ctx, head)?, "bound representation")?;
            if !subset(at, &r3) {
                return err(format!("representation located at {r3} is not available at all of {at}"));
            }
            match (kind, &t) {
                (Kind::Loc, LocalType::Loc(r1)) | (Kind::Set, LocalType::LocSetOf(r1)) => {
                    if !subset(r1, at) {
                        return err(format!("bound locations {r1} are not all among the binders {at}"));
                    }
                }
                (Kind::Local, LocalType::TyRep) => {}
                _ => return err(format!("cannot bind a {} variable from a value of type {t}", kind.keyword())),
            }
            ctx.kinds.push(a.clone(), *kind);
            let out = synth(ctx, body);
            ctx.kinds.pop();
            let out = out?;
            if out.ftv().contains(a) {
                return err(format!("type variable `{a}` escapes its scope in {out}"));
            }
            Ok(out)
        }
    }
}

/// Type a closed choreography.
pub fn type_of(table: &LocTable, c: &Chor) -> TResult<ChorType> {
    let mut ctx = Ctx::new(table);
    synth(&mut ctx, c)
}

/// Every location a well-formed program may mention must be declared.
pub fn undeclared_locations<'a>(c: &Chor, declared: impl IntoIterator<Item = &'a str>) -> Vec<Name> {
    let declared: alloc::collections::BTreeSet<&str> = declared.into_iter().collect();
    c.locations().into_iter().filter(|l| !declared.contains(l.as_str())).collect()
}
