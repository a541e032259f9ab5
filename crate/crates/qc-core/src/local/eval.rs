use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{ascribe, LSub, LocalTerm as T, LocalType};

pub fn strip_ann(v: &T) -> &T {
    match v {
        T::Ann(e, _) => strip_ann(e),
        _ => v,
    }
}

pub fn is_value(e: &T) -> bool {
    match e {
        T::Int(_) | T::Bool(_) | T::Nil(_) | T::Fun { .. } | T::TyAbs(..) => true,
        T::RepInt | T::RepBool => true,
        T::Cons(a, b) | T::RepArrow(a, b) => is_value(a) && is_value(b),
        T::Ann(e, _) => is_value(e),
        _ => false,
    }
}

fn beta(fun: &T, arg: &T) -> Option<T> {
    match strip_ann(fun) {
        f @ T::Fun { f: fname, x, arg: at, ret, body } => {
            let v = ascribe(arg, at);
            let b = if ret.is_some() && fname != x {
                body.subst(fname, f)
            } else {
                (**body).clone()
            };
            Some(b.subst(x, &v))
        }
        _ => None,
    }
}

fn tbeta(e: &T, t: &LocalType) -> Option<T> {
    match strip_ann(e) {
        T::TyAbs(a, body) => Some(body.subst_ty(a, LSub::Ty(t))),
        _ => None,
    }
}

fn prim(e: &T) -> Option<T> {
    let (a, b) = match e {
        T::Add(a, b) | T::Eq(a, b) | T::Lt(a, b) => (strip_ann(a), strip_ann(b)),
        _ => return None,
    };
    match (e, a, b) {
        (T::Add(..), T::Int(x), T::Int(y)) => Some(T::Int(x.wrapping_add(*y))),
        (T::Eq(..), T::Int(x), T::Int(y)) => Some(T::Bool(x == y)),
        (T::Eq(..), T::Bool(x), T::Bool(y)) => Some(T::Bool(x == y)),
        (T::Lt(..), T::Int(x), T::Int(y)) => Some(T::Bool(x < y)),
        _ => None,
    }
}

/// Element and tail ascriptions for a list scrutinee.
fn list_types(scrut: &T) -> Option<(LocalType, LocalType)> {
    match scrut {
        T::Ann(_, LocalType::List(t)) => Some(((**t).clone(), LocalType::List(t.clone()))),
        T::Ann(_, LocalType::LocSetOf(r)) => Some((LocalType::Loc(r.clone()), LocalType::LocSetOf(r.clone()))),
        _ => None,
    }
}

fn case_step(scrut: &T, nil: &T, head: &str, tail: &str, cons: &T) -> Option<T> {
    match strip_ann(scrut) {
        T::Nil(_) => Some(nil.clone()),
        T::Cons(h, t) => {
            let (h, t) = match list_types(scrut) {
                Some((ht, tt)) => (ascribe(h, &ht), ascribe(t, &tt)),
                None => ((**h).clone(), (**t).clone()),
            };
            let c = if head == tail {
                cons.subst(tail, &t)
            } else {
                cons.subst(tail, &t).subst(head, &h)
            };
            Some(c)
        }
        _ => None,
    }
}

/// One call-by-value, left-to-right step. `None` for values and stuck terms.
pub fn lstep(e: &T) -> Option<T> {
    let bx = Box::new;
    match e {
        T::Var(_) | T::Int(_) | T::Bool(_) | T::Nil(_) | T::Fun { .. } | T::TyAbs(..) => None,
        T::RepInt | T::RepBool => None,
        T::Add(a, b) | T::Eq(a, b) | T::Lt(a, b) => {
            if !is_value(a) {
                let a2 = bx(lstep(a)?);
                return Some(match e {
                    T::Add(..) => T::Add(a2, b.clone()),
                    T::Eq(..) => T::Eq(a2, b.clone()),
                    _ => T::Lt(a2, b.clone()),
                });
            }
            if !is_value(b) {
                let b2 = bx(lstep(b)?);
                return Some(match e {
                    T::Add(..) => T::Add(a.clone(), b2),
                    T::Eq(..) => T::Eq(a.clone(), b2),
                    _ => T::Lt(a.clone(), b2),
                });
            }
            prim(e)
        }
        T::If(c, a, b) => {
            if !is_value(c) {
                return Some(T::If(bx(lstep(c)?), a.clone(), b.clone()));
            }
            match strip_ann(c) {
                T::Bool(true) => Some((**a).clone()),
                T::Bool(false) => Some((**b).clone()),
                _ => None,
            }
        }
        T::App(f, a) => {
            if !is_value(f) {
                return Some(T::App(bx(lstep(f)?), a.clone()));
            }
            if !is_value(a) {
                return Some(T::App(f.clone(), bx(lstep(a)?)));
            }
            beta(f, a)
        }
        T::TyApp(f, t) => {
            if !is_value(f) {
                return Some(T::TyApp(bx(lstep(f)?), t.clone()));
            }
            tbeta(f, t)
        }
        T::Cons(h, t) => {
            if !is_value(h) {
                return Some(T::Cons(bx(lstep(h)?), t.clone()));
            }
            Some(T::Cons(h.clone(), bx(lstep(t)?)))
        }
        T::RepArrow(a, b) => {
            if !is_value(a) {
                return Some(T::RepArrow(bx(lstep(a)?), b.clone()));
            }
            Some(T::RepArrow(a.clone(), bx(lstep(b)?)))
        }
        T::Case { scrut, nil, head, tail, cons } => {
            if !is_value(scrut) {
                return Some(T::Case {
                    scrut: bx(lstep(scrut)?),
                    nil: nil.clone(),
                    head: head.clone(),
                    tail: tail.clone(),
                    cons: cons.clone(),
                });
            }
            case_step(scrut, nil, head, tail, cons)
        }
        T::Ann(x, t) => Some(T::Ann(bx(lstep(x)?), t.clone())),
    }
}

/// Relational enumeration of every single step the rules permit.
/// Independent of `lstep`: each rule is tried separately, so determinism
/// amounts to this never returning more than one result.
pub fn lstep_all(e: &T) -> Vec<T> {
    let bx = Box::new;
    let mut out = Vec::new();
    let lift = |sub: &T, out: &mut Vec<T>, mk: &dyn Fn(T) -> T| {
        for s in lstep_all(sub) {
            out.push(mk(s));
        }
    };
    match e {
        T::Add(a, b) | T::Eq(a, b) | T::Lt(a, b) => {
            let rebuild = |x: T, y: T| match e {
                T::Add(..) => T::Add(bx(x), bx(y)),
                T::Eq(..) => T::Eq(bx(x), bx(y)),
                _ => T::Lt(bx(x), bx(y)),
            };
            lift(a, &mut out, &|a2| rebuild(a2, (**b).clone()));
            if is_value(a) {
                lift(b, &mut out, &|b2| rebuild((**a).clone(), b2));
            }
            if is_value(a) && is_value(b) {
                out.extend(prim(e));
            }
        }
        T::If(c, a, b) => {
            lift(c, &mut out, &|c2| T::If(bx(c2), a.clone(), b.clone()));
            if let T::Bool(v) = strip_ann(c) {
                out.push(if *v { (**a).clone() } else { (**b).clone() });
            }
        }
        T::App(f, a) => {
            lift(f, &mut out, &|f2| T::App(bx(f2), a.clone()));
            if is_value(f) {
                lift(a, &mut out, &|a2| T::App(f.clone(), bx(a2)));
                if is_value(a) {
                    out.extend(beta(f, a));
                }
            }
        }
        T::TyApp(f, t) => {
            lift(f, &mut out, &|f2| T::TyApp(bx(f2), t.clone()));
            if is_value(f) {
                out.extend(tbeta(f, t));
            }
        }
        T::Cons(h, t) => {
            lift(h, &mut out, &|h2| T::Cons(bx(h2), t.clone()));
            if is_value(h) {
                lift(t, &mut out, &|t2| T::Cons(h.clone(), bx(t2)));
            }
        }
        T::RepArrow(a, b) => {
            lift(a, &mut out, &|a2| T::RepArrow(bx(a2), b.clone()));
            if is_value(a) {
                lift(b, &mut out, &|b2| T::RepArrow(a.clone(), bx(b2)));
            }
        }
        T::Case { scrut, nil, head, tail, cons } => {
            lift(scrut, &mut out, &|s2| T::Case {
                scrut: bx(s2),
                nil: nil.clone(),
                head: head.clone(),
                tail: tail.clone(),
                cons: cons.clone(),
            });
            if is_value(scrut) {
                out.extend(case_step(scrut, nil, head, tail, cons));
            }
        }
        T::Ann(x, t) => lift(x, &mut out, &|x2| T::Ann(bx(x2), t.clone())),
        _ => {}
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalRun {
    Value(T, usize),
    Stuck(T, usize),
    OutOfFuel(T),
}

/// Evaluate for at most `fuel` steps.
pub fn run_local(e: &T, fuel: usize) -> LocalRun {
    let mut cur = e.clone();
    for n in 0..fuel {
        if is_value(&cur) {
            return LocalRun::Value(cur, n);
        }
        match lstep(&cur) {
            Some(next) => cur = next,
            None => return LocalRun::Stuck(cur, n),
        }
    }
    if is_value(&cur) {
        LocalRun::Value(cur, fuel)
    } else {
        LocalRun::OutOfFuel(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn arithmetic_and_branching() {
        let e = T::ite(T::lt(T::int(1), T::add(T::int(1), T::int(1))), T::int(7), T::int(8));
        assert_eq!(run_local(&e, 10), LocalRun::Value(T::int(7), 3));
    }

    #[test]
    fn recursive_function_unfolds() {
        // sum of a two-element list
        let body = T::Case {
            scrut: bx_var("l"),
            nil: Box::new(T::int(0)),
            head: "h".into(),
            tail: "t".into(),
            cons: Box::new(T::add(T::var("h"), T::app(T::var("s"), T::var("t")))),
        };
        let lt = LocalType::list(LocalType::Int);
        let f = T::fun("s", "l", lt.clone(), Some(LocalType::Int), body);
        let list = T::cons(T::int(3), T::cons(T::int(4), T::Nil(LocalType::Int)));
        match run_local(&T::app(f, list), 100) {
            LocalRun::Value(v, _) => assert_eq!(v, T::int(7)),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn relational_enumerator_agrees_on_a_redex() {
        let e = T::add(T::add(T::int(1), T::int(2)), T::int(3));
        assert_eq!(lstep_all(&e), vec![lstep(&e).unwrap()]);
    }

    fn bx_var(x: &str) -> Box<T> {
        Box::new(T::var(x))
    }
}
