//! Concrete syntax for every AST. The CLI parser reads exactly this syntax.

use core::fmt::{self, Display, Formatter, Write};

use crate::chor::{Chor, ChorType, Dir};
use crate::kind::Kind;
use crate::local::{LocalTerm, LocalType};
use crate::locset::{LocExpr, LocSet};

impl Display for LocExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            LocExpr::Concrete(n) | LocExpr::Var(n) => f.write_str(n),
        }
    }
}

/// Whether the set is a right-nested chain of singletons, printable as `{..}`.
fn singleton_chain(r: &LocSet) -> bool {
    match r {
        LocSet::Sng(_) => true,
        LocSet::Union(a, b) => matches!(**a, LocSet::Sng(_)) && singleton_chain(b),
        LocSet::Var(_) => false,
    }
}

impl Display for LocSet {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if singleton_chain(self) {
            f.write_char('{')?;
            for (i, a) in self.atoms().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                if let LocSet::Sng(l) = a {
                    write!(f, "{l}")?;
                }
            }
            return f.write_char('}');
        }
        match self {
            LocSet::Var(a) => f.write_str(a),
            LocSet::Union(a, b) => write!(f, "({a} | {b})"),
            LocSet::Sng(_) => unreachable!(),
        }
    }
}

impl Display for Kind {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl Display for Dir {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "left",
            Dir::R => "right",
        })
    }
}

fn ltype_atomic(t: &LocalType) -> bool {
    !matches!(t, LocalType::Arrow(..) | LocalType::Forall(..))
}

pub struct LAtom<'a>(pub &'a LocalType);

impl Display for LAtom<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if ltype_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl Display for LocalType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            LocalType::Var(a) => f.write_str(a),
            LocalType::Int => f.write_str("int"),
            LocalType::Bool => f.write_str("bool"),
            LocalType::TyRep => f.write_str("tyrep"),
            LocalType::List(t) => write!(f, "list[{t}]"),
            LocalType::Loc(r) => write!(f, "loc<{r}>"),
            LocalType::LocSetOf(r) => write!(f, "locset<{r}>"),
            LocalType::Arrow(a, b) => write!(f, "{} -> {b}", LAtom(a)),
            LocalType::Forall(a, t) => write!(f, "forall {a}. {t}"),
        }
    }
}

// Local term precedence: 0 open-ended forms, 1 comparisons, 2 `#->`,
// 3 sums, 4 application, 5 postfix, 6 atoms.
fn lterm_prec(e: &LocalTerm) -> u8 {
    match e {
        LocalTerm::If(..) | LocalTerm::Fun { .. } | LocalTerm::TyAbs(..) | LocalTerm::Case { .. } => 0,
        LocalTerm::Eq(..) | LocalTerm::Lt(..) => 1,
        LocalTerm::RepArrow(..) => 2,
        LocalTerm::Add(..) => 3,
        LocalTerm::App(..) => 4,
        LocalTerm::TyApp(..) => 5,
        _ => 6,
    }
}

pub struct LP<'a>(pub &'a LocalTerm, pub u8);

impl Display for LP<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if lterm_prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Display for LocalTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            LocalTerm::Var(x) => f.write_str(x),
            LocalTerm::Int(n) => write!(f, "{n}"),
            LocalTerm::Bool(b) => write!(f, "{b}"),
            LocalTerm::Add(a, b) => write!(f, "{} + {}", LP(a, 3), LP(b, 4)),
            LocalTerm::Eq(a, b) => write!(f, "{} == {}", LP(a, 2), LP(b, 2)),
            LocalTerm::Lt(a, b) => write!(f, "{} < {}", LP(a, 2), LP(b, 2)),
            LocalTerm::RepArrow(a, b) => write!(f, "{} #-> {}", LP(a, 3), LP(b, 2)),
            LocalTerm::If(c, a, b) => write!(f, "if {c} then {a} else {b}"),
            LocalTerm::Fun { f: g, x, arg, ret, body } => {
                write!(f, "fun {g}({x}: {arg})")?;
                if let Some(r) = ret {
                    write!(f, ": {r}")?;
                }
                write!(f, " = {body}")
            }
            LocalTerm::App(a, b) => write!(f, "{} {}", LP(a, 4), LP(b, 5)),
            LocalTerm::TyAbs(a, e) => write!(f, "tfun {a}. {e}"),
            LocalTerm::TyApp(e, t) => write!(f, "{} [{t}]", LP(e, 5)),
            LocalTerm::Nil(t) => write!(f, "nil[{t}]"),
            LocalTerm::Cons(h, t) => write!(f, "cons({h}, {t})"),
            LocalTerm::Case { scrut, nil, head, tail, cons } => {
                write!(f, "case {scrut} of nil => {} | cons({head}, {tail}) => {cons}", LP(nil, 1))
            }
            LocalTerm::RepInt => f.write_str("#int"),
            LocalTerm::RepBool => f.write_str("#bool"),
            LocalTerm::Ann(e, t) => write!(f, "({e} : {t})"),
        }
    }
}

// Choreographic type precedence: 0 binders, 1 arrows, 2 sums, 3 products, 4 atoms.
fn cty_prec(t: &ChorType) -> u8 {
    match t {
        ChorType::Forall(..) | ChorType::Mu(..) => 0,
        ChorType::Arrow(..) => 1,
        ChorType::Sum(..) => 2,
        ChorType::Prod(..) => 3,
        _ => 4,
    }
}

struct TP<'a>(&'a ChorType, u8);

impl Display for TP<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if cty_prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Display for ChorType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ChorType::Var(a) => f.write_str(a),
            ChorType::At(t, r) => write!(f, "{} @ {r}", LAtom(t)),
            ChorType::Arrow(a, b) => write!(f, "{} -> {}", TP(a, 2), TP(b, 1)),
            ChorType::Sum(a, b) => write!(f, "{} + {}", TP(a, 2), TP(b, 3)),
            ChorType::Prod(a, b) => write!(f, "{} * {}", TP(a, 3), TP(b, 4)),
            ChorType::Forall(a, k, t) => write!(f, "forall {a} :: {k}. {t}"),
            ChorType::Mu(a, t) => write!(f, "mu {a}. {t}"),
            ChorType::Loc(l) => write!(f, "{l}"),
            ChorType::Set(r) => write!(f, "{r}"),
            ChorType::Local(t) => write!(f, "{t}"),
        }
    }
}

// Choreography precedence: 0 open-ended forms, 1 sends, 2 application,
// 3 postfix type application, 4 atoms.
fn chor_prec(c: &Chor) -> u8 {
    match c {
        Chor::Fun { .. }
        | Chor::TyAbs(..)
        | Chor::Case { .. }
        | Chor::Sync { .. }
        | Chor::If { .. }
        | Chor::LetLocal { .. }
        | Chor::LetType { .. } => 0,
        Chor::Send { .. } => 1,
        Chor::App(..) => 2,
        Chor::TyApp(..) => 3,
        _ => 4,
    }
}

pub struct CP<'a>(pub &'a Chor, pub u8);

impl Display for CP<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if chor_prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// A location-set prefix for `ρ.e`: single concrete locations print bare.
pub struct Owner<'a>(pub &'a LocSet);

impl Display for Owner<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            LocSet::Sng(LocExpr::Concrete(n)) => f.write_str(n),
            r => write!(f, "{r}"),
        }
    }
}

/// Type arguments, whose sort the parser recovers from their shape.
pub struct TyArg<'a>(pub &'a ChorType);

impl Display for TyArg<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Display for Chor {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Chor::Var(x) => f.write_str(x),
            Chor::Done(r, e) => write!(f, "{}.{}", Owner(r), LP(e, 6)),
            Chor::Fun { f: g, x, arg, ret, body } => {
                write!(f, "fun {g}({x}: {arg})")?;
                if let Some(r) = ret {
                    write!(f, ": {r}")?;
                }
                write!(f, " = {body}")
            }
            Chor::App(a, b) => write!(f, "{} {}", CP(a, 2), CP(b, 3)),
            Chor::TyAbs(a, k, body) => write!(f, "tyfun {a} :: {k}. {body}"),
            Chor::TyApp(c, t) => write!(f, "{} [{}]", CP(c, 3), TyArg(t)),
            Chor::Fold(t, c) => write!(f, "fold[{t}]({c})"),
            Chor::Unfold(c) => write!(f, "unfold({c})"),
            Chor::Pair(a, b) => write!(f, "({a}, {b})"),
            Chor::Fst(c) => write!(f, "fst({c})"),
            Chor::Snd(c) => write!(f, "snd({c})"),
            Chor::Inl(t, c) => write!(f, "inl[{t}]({c})"),
            Chor::Inr(t, c) => write!(f, "inr[{t}]({c})"),
            Chor::Case { scrut, x, left, y, right } => {
                write!(f, "case {scrut} of inl {x} => {} | inr {y} => {right}", CP(left, 1))
            }
            Chor::Send { body, from, to } => {
                let implicit = matches!(&**body, Chor::Done(LocSet::Sng(l), _) if l == from);
                if implicit {
                    write!(f, "{} ~> {to}", CP(body, 1))
                } else {
                    write!(f, "{} ~>[{from}] {to}", CP(body, 1))
                }
            }
            Chor::Sync { from, dir, to, body } => write!(f, "sync {from}[{dir}] ~> {to}; {body}"),
            Chor::If { at, cond, then, els } => write!(f, "if {cond} @ {at} then {} else {els}", CP(then, 1)),
            Chor::LetLocal { at, x, ty, head, body } => write!(f, "let {at}.{x} : {ty} := {head} in {body}"),
            Chor::LetType { at, a, kind, head, body } => write!(f, "let {at}.{a} :: {kind} := {head} in {body}"),
        }
    }
}
