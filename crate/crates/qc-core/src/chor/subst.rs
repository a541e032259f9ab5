use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::names::{free_in_diff, free_in_overlap};
use super::{sub_locexpr, sub_locset, sub_lterm, sub_ltype, Chor, TySub};
use crate::local::LocalTerm;
use crate::locset::{disjoint, subset, LocExpr, LocSet, Name};
use crate::names::fresh_name;

fn bx(c: Chor) -> Box<Chor> {
    Box::new(c)
}

/// Rebuild `c` with every immediate subterm mapped by `f`.
fn map_children(c: &Chor, f: &mut impl FnMut(&Chor) -> Chor) -> Chor {
    match c {
        Chor::Var(_) | Chor::Done(..) => c.clone(),
        Chor::Fun { f: g, x, arg, ret, body } => Chor::Fun {
            f: g.clone(),
            x: x.clone(),
            arg: arg.clone(),
            ret: ret.clone(),
            body: bx(f(body)),
        },
        Chor::App(a, b) => Chor::App(bx(f(a)), bx(f(b))),
        Chor::TyAbs(a, k, b) => Chor::TyAbs(a.clone(), *k, bx(f(b))),
        Chor::TyApp(b, t) => Chor::TyApp(bx(f(b)), t.clone()),
        Chor::Fold(t, b) => Chor::Fold(t.clone(), bx(f(b))),
        Chor::Unfold(b) => Chor::Unfold(bx(f(b))),
        Chor::Pair(a, b) => Chor::Pair(bx(f(a)), bx(f(b))),
        Chor::Fst(b) => Chor::Fst(bx(f(b))),
        Chor::Snd(b) => Chor::Snd(bx(f(b))),
        Chor::Inl(t, b) => Chor::Inl(t.clone(), bx(f(b))),
        Chor::Inr(t, b) => Chor::Inr(t.clone(), bx(f(b))),
        Chor::Case { scrut, x, left, y, right } => Chor::Case {
            scrut: bx(f(scrut)),
            x: x.clone(),
            left: bx(f(left)),
            y: y.clone(),
            right: bx(f(right)),
        },
        Chor::Send { body, from, to } => Chor::Send { body: bx(f(body)), from: from.clone(), to: to.clone() },
        Chor::Sync { from, dir, to, body } => Chor::Sync {
            from: from.clone(),
            dir: *dir,
            to: to.clone(),
            body: bx(f(body)),
        },
        Chor::If { at, cond, then, els } => Chor::If {
            at: at.clone(),
            cond: bx(f(cond)),
            then: bx(f(then)),
            els: bx(f(els)),
        },
        Chor::LetLocal { at, x, ty, head, body } => Chor::LetLocal {
            at: at.clone(),
            x: x.clone(),
            ty: ty.clone(),
            head: bx(f(head)),
            body: bx(f(body)),
        },
        Chor::LetType { at, a, kind, head, body } => Chor::LetType {
            at: at.clone(),
            a: a.clone(),
            kind: *kind,
            head: bx(f(head)),
            body: bx(f(body)),
        },
    }
}

fn all_chor_names(c: &Chor, out: &mut BTreeSet<Name>) {
    match c {
        Chor::Var(x) => {
            out.insert(x.clone());
        }
        Chor::Fun { f, x, .. } => {
            out.insert(f.clone());
            out.insert(x.clone());
        }
        Chor::Case { x, y, .. } => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        _ => {}
    }
    for ch in c.children() {
        all_chor_names(ch, out);
    }
}

pub(super) fn subst_var(c: &Chor, x: &str, v: &Chor) -> Chor {
    let fv = v.fv();
    go_var(c, x, v, &fv)
}

fn fresh_binder(b: &Name, body: &Chor, fv: &BTreeSet<Name>, x: &str) -> Name {
    let mut avoid = fv.clone();
    all_chor_names(body, &mut avoid);
    avoid.insert(x.into());
    fresh_name(b, |n| avoid.contains(n))
}

fn go_var(c: &Chor, x: &str, v: &Chor, fv: &BTreeSet<Name>) -> Chor {
    match c {
        Chor::Var(y) if y == x => v.clone(),
        Chor::Fun { f, x: y, arg, ret, body } => {
            let binds_f = ret.is_some();
            if y == x || (binds_f && f == x) {
                return c.clone();
            }
            let mut f2 = f.clone();
            let mut y2 = y.clone();
            let mut body2 = (**body).clone();
            if binds_f && fv.contains(f) {
                f2 = fresh_binder(f, &body2, fv, x);
                body2 = body2.subst_var(f, &Chor::Var(f2.clone()));
            }
            if fv.contains(y) {
                y2 = fresh_binder(y, &body2, fv, x);
                body2 = body2.subst_var(y, &Chor::Var(y2.clone()));
            }
            Chor::Fun { f: f2, x: y2, arg: arg.clone(), ret: ret.clone(), body: bx(go_var(&body2, x, v, fv)) }
        }
        Chor::Case { scrut, x: xl, left, y: yr, right } => {
            let side = |b: &Name, body: &Chor| -> (Name, Chor) {
                if b == x {
                    return (b.clone(), body.clone());
                }
                if fv.contains(b) {
                    let b2 = fresh_binder(b, body, fv, x);
                    let body2 = body.subst_var(b, &Chor::Var(b2.clone()));
                    (b2, go_var(&body2, x, v, fv))
                } else {
                    (b.clone(), go_var(body, x, v, fv))
                }
            };
            let (xl2, l2) = side(xl, left);
            let (yr2, r2) = side(yr, right);
            Chor::Case { scrut: bx(go_var(scrut, x, v, fv)), x: xl2, left: bx(l2), y: yr2, right: bx(r2) }
        }
        _ => map_children(c, &mut |ch| go_var(ch, x, v, fv)),
    }
}

/// Rename a type binder if it would capture a free variable of `s`.
fn guard_binder(b: &Name, body: &Chor, a: &str, s: TySub<'_>) -> (Name, Chor) {
    let mut fv = BTreeSet::new();
    s.free_vars(&mut fv);
    if !fv.contains(b) {
        return (b.clone(), body.clone());
    }
    let mut avoid = fv;
    body.ftv_into(&mut avoid);
    avoid.insert(a.into());
    let b2 = fresh_name(b, |n| avoid.contains(n));
    let body2 = subst_ty(body, b, TySub::Rename(&b2));
    (b2, body2)
}

pub(super) fn subst_ty(c: &Chor, a: &str, s: TySub<'_>) -> Chor {
    let ls = |r: &LocSet| sub_locset(r, a, s);
    let le = |l: &LocExpr| sub_locexpr(l, a, s);
    match c {
        Chor::Var(_) => c.clone(),
        Chor::Done(r, e) => Chor::Done(ls(r), sub_lterm(e, a, s)),
        Chor::Fun { f, x, arg, ret, body } => Chor::Fun {
            f: f.clone(),
            x: x.clone(),
            arg: arg.subst(a, s),
            ret: ret.as_ref().map(|r| r.subst(a, s)),
            body: bx(subst_ty(body, a, s)),
        },
        Chor::TyAbs(b, k, body) => {
            if b == a {
                return c.clone();
            }
            let (b2, body2) = guard_binder(b, body, a, s);
            Chor::TyAbs(b2, *k, bx(subst_ty(&body2, a, s)))
        }
        Chor::TyApp(body, t) => Chor::TyApp(bx(subst_ty(body, a, s)), t.subst(a, s)),
        Chor::Fold(t, body) => Chor::Fold(t.subst(a, s), bx(subst_ty(body, a, s))),
        Chor::Inl(t, body) => Chor::Inl(t.subst(a, s), bx(subst_ty(body, a, s))),
        Chor::Inr(t, body) => Chor::Inr(t.subst(a, s), bx(subst_ty(body, a, s))),
        Chor::Send { body, from, to } => Chor::Send { body: bx(subst_ty(body, a, s)), from: le(from), to: ls(to) },
        Chor::Sync { from, dir, to, body } => Chor::Sync {
            from: le(from),
            dir: *dir,
            to: ls(to),
            body: bx(subst_ty(body, a, s)),
        },
        Chor::If { at, cond, then, els } => Chor::If {
            at: ls(at),
            cond: bx(subst_ty(cond, a, s)),
            then: bx(subst_ty(then, a, s)),
            els: bx(subst_ty(els, a, s)),
        },
        Chor::LetType { at, a: b, kind, head, body } => {
            let head2 = bx(subst_ty(head, a, s));
            if b == a {
                return Chor::LetType { at: ls(at), a: b.clone(), kind: *kind, head: head2, body: body.clone() };
            }
            let (b2, body2) = guard_binder(b, body, a, s);
            Chor::LetType { at: ls(at), a: b2, kind: *kind, head: head2, body: bx(subst_ty(&body2, a, s)) }
        }
        Chor::LetLocal { at, x, ty, head, body } => subst_ty_let(at, x, ty, head, body, a, s),
        _ => map_children(c, &mut |ch| subst_ty(ch, a, s)),
    }
}

/// Substitution into `let at.x := head in body`. When the variable stands
/// for locations, the binder may start or stop covering namespaces in which
/// `x` occurs; such binders are renamed first so no occurrence changes owner.
fn subst_ty_let(
    at: &LocSet,
    x: &Name,
    ty: &crate::local::LocalType,
    head: &Chor,
    body: &Chor,
    a: &str,
    s: TySub<'_>,
) -> Chor {
    let head2 = bx(subst_ty(head, a, s));
    let ty2 = sub_ltype(ty, a, s);
    let plain = |at2: LocSet, x2: Name, body2: &Chor| Chor::LetLocal {
        at: at2,
        x: x2,
        ty: ty2.clone(),
        head: head2.clone(),
        body: bx(subst_ty(body2, a, s)),
    };
    let (alpha_set, sigma) = match s {
        TySub::Loc(l) => (LocSet::Sng(LocExpr::Var(a.into())), LocSet::Sng(l.clone())),
        TySub::Set(r) => (LocSet::Var(a.into()), r.clone()),
        _ => return plain(sub_locset(at, a, s), x.clone(), body),
    };
    let fresh = || {
        let mut avoid = BTreeSet::new();
        head.local_names(&mut avoid);
        body.local_names(&mut avoid);
        avoid.insert(x.clone());
        fresh_name(x, |n| avoid.contains(n))
    };
    if subset(&alpha_set, at) {
        if free_in_diff(body, x, &sigma, at) {
            let y = fresh();
            let renamed = rename_local(body, at, x, &y);
            plain(sub_locset(at, a, s), y, &renamed)
        } else {
            plain(sub_locset(at, a, s), x.clone(), body)
        }
    } else if !disjoint(&sigma, at) && free_in_overlap(body, x, &alpha_set) {
        let y = fresh();
        let renamed = rename_local(body, at, x, &y);
        plain(at.clone(), y, &renamed)
    } else {
        plain(sub_locset(at, a, s), x.clone(), body)
    }
}

/// Rename the occurrences of `x` owned by a binder at `r` to `y`.
pub fn rename_local(c: &Chor, r: &LocSet, x: &str, y: &str) -> Chor {
    let yv = LocalTerm::Var(y.into());
    local_map(c, x, &mut Vec::new(), &mut |at, e| {
        if subset(at, r) {
            Some(Some(e.subst(x, &yv)))
        } else {
            Some(None)
        }
    })
    .expect("renaming is total")
}

/// Substitute `v` for `x` in every namespace included in `r`. Fails when an
/// occurrence sits in a namespace that only partly overlaps `r`.
pub fn subst_local(c: &Chor, r: &LocSet, x: &str, v: &LocalTerm) -> Option<Chor> {
    local_map(c, x, &mut Vec::new(), &mut |at, e| {
        if subset(at, r) {
            Some(Some(e.subst(x, v)))
        } else if disjoint(at, r) {
            Some(None)
        } else {
            None
        }
    })
}

/// Visit the free occurrences of `x`. The callback returns `None` to abort,
/// `Some(None)` to keep the term and `Some(Some(e))` to replace it.
fn local_map(
    c: &Chor,
    x: &str,
    binders: &mut Vec<LocSet>,
    f: &mut impl FnMut(&LocSet, &LocalTerm) -> Option<Option<LocalTerm>>,
) -> Option<Chor> {
    match c {
        Chor::Done(at, e) => {
            if !e.has_free(x) || binders.iter().any(|b| subset(at, b)) {
                return Some(c.clone());
            }
            Some(match f(at, e)? {
                Some(e2) => Chor::Done(at.clone(), e2),
                None => c.clone(),
            })
        }
        Chor::LetLocal { at, x: y, ty, head, body } => {
            let head2 = local_map(head, x, binders, f)?;
            let body2 = if y == x {
                binders.push(at.clone());
                let r = local_map(body, x, binders, f);
                binders.pop();
                r?
            } else {
                local_map(body, x, binders, f)?
            };
            Some(Chor::LetLocal { at: at.clone(), x: y.clone(), ty: ty.clone(), head: bx(head2), body: bx(body2) })
        }
        _ => {
            let mut failed = false;
            let out = map_children(c, &mut |ch| match local_map(ch, x, binders, f) {
                Some(ch2) => ch2,
                None => {
                    failed = true;
                    ch.clone()
                }
            });
            if failed {
                None
            } else {
                Some(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::LocalType;

    fn lv(a: &str) -> LocSet {
        LocSet::Sng(LocExpr::Var(a.into()))
    }

    /// `let {α}.x := α.2 in let L.x := L.3 in let α.y := (L.x ~> α) in α.(x + y)`
    fn capture_example() -> Chor {
        let int = LocalType::Int;
        Chor::let_local(
            lv("a"),
            "x",
            int.clone(),
            Chor::Done(lv("a"), LocalTerm::int(2)),
            Chor::let_local(
                LocSet::loc("L"),
                "x",
                int.clone(),
                Chor::at("L", LocalTerm::int(3)),
                Chor::let_local(
                    lv("a"),
                    "y",
                    int,
                    Chor::send(Chor::at("L", LocalTerm::var("x")), LocExpr::concrete("L"), lv("a")),
                    Chor::Done(lv("a"), LocalTerm::add(LocalTerm::var("x"), LocalTerm::var("y"))),
                ),
            ),
        )
    }

    #[test]
    fn location_substitution_does_not_capture() {
        let l = LocExpr::concrete("L");
        let c = capture_example().subst_ty("a", TySub::Loc(&l));
        // the outer binder and its use were renamed together
        match &c {
            Chor::LetLocal { x, body, .. } => {
                assert_ne!(x, "x");
                let Chor::LetLocal { x: x2, body: b2, .. } = &**body else { panic!() };
                let Chor::LetLocal { x: y, body: b3, head: h3, .. } = &**b2 else { panic!() };
                let Chor::Send { body: sent, .. } = &**h3 else { panic!() };
                assert_eq!(**sent, Chor::at("L", LocalTerm::Var(x2.clone())));
                assert_eq!(
                    **b3,
                    Chor::at("L", LocalTerm::add(LocalTerm::Var(x.clone()), LocalTerm::Var(y.clone())))
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subst_local_respects_namespaces() {
        let c = Chor::pair(Chor::at("A", LocalTerm::var("x")), Chor::at("B", LocalTerm::var("x")));
        let r = subst_local(&c, &LocSet::loc("A"), "x", &LocalTerm::int(1)).unwrap();
        assert_eq!(r, Chor::pair(Chor::at("A", LocalTerm::int(1)), Chor::at("B", LocalTerm::var("x"))));
        let partial = Chor::Done(LocSet::of_names(["A", "B"]), LocalTerm::var("x"));
        assert!(subst_local(&partial, &LocSet::loc("A"), "x", &LocalTerm::int(1)).is_none());
    }
}
