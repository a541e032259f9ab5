//! Recursive-descent parser for `.chor` files. It accepts everything the
//! pretty-printer emits, plus a few conveniences for hand-written programs.

use std::collections::{BTreeMap, BTreeSet};

use qc_core::chor::{Chor, ChorType, Dir};
use qc_core::kind::Kind;
use qc_core::local::{repr_ty, LocTable, LocalTerm as T, LocalType as Ty};
use qc_core::locset::{LocExpr, LocSet, Name};

use crate::diag::{Diagnostic, Span};
use crate::lexer::{lex, Tok, Token};

const KEYWORDS: &[&str] = &[
    "let", "in", "if", "then", "else", "fun", "tyfun", "tfun", "case", "of", "inl", "inr", "fst", "snd", "fold",
    "unfold", "sync", "left", "right", "true", "false", "nil", "cons", "forall", "mu", "int", "bool", "tyrep", "list",
    "loc", "locset", "ty", "repr", "reprset", "reprty", "locations", "codes", "default", "def", "main",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A parsed source file.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub locations: Vec<Name>,
    pub table: LocTable,
    pub defs: Vec<(Name, T)>,
    pub declared: Option<ChorType>,
    pub main: Chor,
    pub main_span: Span,
}

type PResult<X> = Result<X, Diagnostic>;

pub struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    declared: BTreeSet<Name>,
    table: LocTable,
    /// Type variables in scope, innermost last.
    tyvars: Vec<(Name, Kind)>,
    /// Local variables in scope, which shadow definitions.
    locals: Vec<Name>,
    defs: BTreeMap<Name, T>,
}

impl<'s> Parser<'s> {
    pub fn new(src: &'s str, declared: &[&str], table: LocTable) -> PResult<Self> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
            declared: declared.iter().map(|s| s.to_string()).collect(),
            table,
            tyvars: Vec::new(),
            locals: Vec::new(),
            defs: BTreeMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<X>(&self, msg: impl Into<String>) -> PResult<X> {
        Err(Diagnostic::error(self.span(), "syntax", msg))
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected a name, found {}", Self::describe(&t))),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(format!("unexpected {} after the end of the program", Self::describe(self.peek())))
        }
    }

    fn tyvar_kind(&self, a: &str) -> Option<Kind> {
        self.tyvars.iter().rev().find(|(n, _)| n == a).map(|(_, k)| *k)
    }

    fn with_tyvar<X>(&mut self, a: Name, k: Kind, f: impl FnOnce(&mut Self) -> PResult<X>) -> PResult<X> {
        self.tyvars.push((a, k));
        let r = f(self);
        self.tyvars.pop();
        r
    }

    fn with_locals<X>(&mut self, xs: &[&Name], f: impl FnOnce(&mut Self) -> PResult<X>) -> PResult<X> {
        let n = self.locals.len();
        self.locals.extend(xs.iter().map(|x| (*x).clone()));
        let r = f(self);
        self.locals.truncate(n);
        r
    }

    // ---- locations ----

    fn loc_expr(&mut self) -> PResult<LocExpr> {
        let sp = self.span();
        let n = self.name()?;
        match self.tyvar_kind(&n) {
            Some(Kind::Loc) => Ok(LocExpr::Var(n)),
            Some(k) => Err(Diagnostic::error(sp, "kinding", format!("`{n}` has kind {k}, expected loc"))),
            None if self.declared.contains(&n) => Ok(LocExpr::Concrete(n)),
            None => Err(Diagnostic::error(sp, "undeclared-location", format!("`{n}` is not a declared location"))),
        }
    }

    fn loc_set(&mut self) -> PResult<LocSet> {
        if self.eat_sym("{") {
            let mut ls = vec![self.loc_expr()?];
            while self.eat_sym(",") {
                ls.push(self.loc_expr()?);
            }
            self.expect_sym("}")?;
            return Ok(LocSet::of_locs(ls));
        }
        if self.eat_sym("(") {
            let a = self.loc_set()?;
            self.expect_sym("|")?;
            let b = self.loc_set()?;
            self.expect_sym(")")?;
            return Ok(LocSet::union(a, b));
        }
        let sp = self.span();
        let n = self.name()?;
        match self.tyvar_kind(&n) {
            Some(Kind::Set) => Ok(LocSet::Var(n)),
            Some(Kind::Loc) => Ok(LocSet::Sng(LocExpr::Var(n))),
            Some(k) => Err(Diagnostic::error(sp, "kinding", format!("`{n}` has kind {k}, expected a location set"))),
            None if self.declared.contains(&n) => Ok(LocSet::loc(&n)),
            None => Err(Diagnostic::error(sp, "undeclared-location", format!("`{n}` is not a declared location"))),
        }
    }

    fn kind(&mut self) -> PResult<Kind> {
        if self.eat_sym("*") {
            return Ok(Kind::Chor);
        }
        for k in [Kind::Local, Kind::Loc, Kind::Set] {
            if self.eat_kw(k.keyword()) {
                return Ok(k);
            }
        }
        self.err(format!("expected a kind, found {}", Self::describe(self.peek())))
    }

    // ---- local types ----

    pub fn local_type(&mut self) -> PResult<Ty> {
        if self.eat_kw("forall") {
            let a = self.name()?;
            self.expect_sym(".")?;
            let t = self.with_tyvar(a.clone(), Kind::Local, |p| p.local_type())?;
            return Ok(Ty::Forall(a, Box::new(t)));
        }
        let a = self.local_type_atom()?;
        if self.eat_sym("->") {
            return Ok(Ty::arrow(a, self.local_type()?));
        }
        Ok(a)
    }

    fn local_type_atom(&mut self) -> PResult<Ty> {
        if self.eat_sym("(") {
            let t = self.local_type()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if let Some(t) = self.local_type_keyword()? {
            return Ok(t);
        }
        Ok(Ty::Var(self.name()?))
    }

    fn local_type_keyword(&mut self) -> PResult<Option<Ty>> {
        Ok(Some(if self.eat_kw("int") {
            Ty::Int
        } else if self.eat_kw("bool") {
            Ty::Bool
        } else if self.eat_kw("tyrep") {
            Ty::TyRep
        } else if self.eat_kw("list") {
            self.expect_sym("[")?;
            let t = self.local_type()?;
            self.expect_sym("]")?;
            Ty::list(t)
        } else if self.is_kw("loc") || self.is_kw("locset") {
            let set = self.is_kw("locset");
            self.bump();
            self.expect_sym("<")?;
            let r = self.loc_set()?;
            self.expect_sym(">")?;
            if set {
                Ty::LocSetOf(r)
            } else {
                Ty::Loc(r)
            }
        } else {
            return Ok(None);
        }))
    }

    // ---- choreographic types ----

    pub fn chor_type(&mut self) -> PResult<ChorType> {
        if self.is_kw("forall") && matches!(self.peek_at(2), Tok::Sym("::")) {
            self.bump();
            let a = self.name()?;
            self.expect_sym("::")?;
            let k = self.kind()?;
            self.expect_sym(".")?;
            let t = self.with_tyvar(a.clone(), k, |p| p.chor_type())?;
            return Ok(ChorType::Forall(a, k, Box::new(t)));
        }
        if self.is_kw("forall") {
            return Ok(ChorType::Local(self.local_type()?));
        }
        if self.eat_kw("mu") {
            let a = self.name()?;
            self.expect_sym(".")?;
            let t = self.with_tyvar(a.clone(), Kind::Chor, |p| p.chor_type())?;
            return Ok(ChorType::Mu(a, Box::new(t)));
        }
        let a = self.chor_type_sum()?;
        if self.eat_sym("->") {
            let b = self.chor_type()?;
            return Ok(match (as_local(&a), as_local(&b)) {
                (Some(x), Some(y)) => ChorType::Local(Ty::arrow(x, y)),
                _ => ChorType::arrow(a, b),
            });
        }
        Ok(a)
    }

    fn chor_type_sum(&mut self) -> PResult<ChorType> {
        let mut a = self.chor_type_prod()?;
        while self.eat_sym("+") {
            a = ChorType::sum(a, self.chor_type_prod()?);
        }
        Ok(a)
    }

    fn chor_type_prod(&mut self) -> PResult<ChorType> {
        let mut a = self.chor_type_atom()?;
        while self.eat_sym("*") {
            a = ChorType::prod(a, self.chor_type_atom()?);
        }
        Ok(a)
    }

    fn located(&mut self, t: ChorType) -> PResult<ChorType> {
        if !self.is_sym("@") {
            return Ok(t);
        }
        let sp = self.span();
        self.bump();
        match as_local(&t) {
            Some(l) => Ok(ChorType::At(l, self.loc_set()?)),
            None => Err(Diagnostic::error(sp, "syntax", format!("only local types can be located, found {t}"))),
        }
    }

    fn chor_type_atom(&mut self) -> PResult<ChorType> {
        if self.is_sym("{") {
            return Ok(ChorType::Set(self.loc_set()?));
        }
        if self.is_sym("(") {
            let save = self.pos;
            if let Ok(r) = self.loc_set() {
                return Ok(ChorType::Set(r));
            }
            self.pos = save;
            self.bump();
            let t = self.chor_type()?;
            self.expect_sym(")")?;
            return self.located(t);
        }
        if let Some(t) = self.local_type_keyword()? {
            return self.located(ChorType::Local(t));
        }
        let sp = self.span();
        let n = self.name()?;
        let t = match self.tyvar_kind(&n) {
            Some(Kind::Chor) => ChorType::Var(n),
            Some(Kind::Local) => ChorType::Local(Ty::Var(n)),
            Some(Kind::Loc) => ChorType::Loc(LocExpr::Var(n)),
            Some(Kind::Set) => ChorType::Set(LocSet::Var(n)),
            None if self.declared.contains(&n) => ChorType::Loc(LocExpr::Concrete(n)),
            None => {
                return Err(Diagnostic::error(sp, "unbound-type-variable", format!("type variable `{n}` is not in scope")))
            }
        };
        self.located(t)
    }

    // ---- local terms ----

    pub fn local(&mut self) -> PResult<T> {
        if self.eat_kw("if") {
            let c = self.local()?;
            self.expect_kw("then")?;
            let a = self.local()?;
            self.expect_kw("else")?;
            let b = self.local()?;
            return Ok(T::ite(c, a, b));
        }
        if self.eat_kw("fun") {
            let f = self.name()?;
            self.expect_sym("(")?;
            let x = self.name()?;
            self.expect_sym(":")?;
            let arg = self.local_type()?;
            self.expect_sym(")")?;
            let ret = if self.eat_sym(":") { Some(self.local_type()?) } else { None };
            self.expect_sym("=")?;
            let bound: Vec<&Name> = if ret.is_some() { vec![&f, &x] } else { vec![&x] };
            let body = self.with_locals(&bound, |p| p.local())?;
            return Ok(T::fun(&f, &x, arg, ret, body));
        }
        if self.eat_kw("tfun") {
            let a = self.name()?;
            self.expect_sym(".")?;
            let body = self.with_tyvar(a.clone(), Kind::Local, |p| p.local())?;
            return Ok(T::TyAbs(a, Box::new(body)));
        }
        if self.eat_kw("case") {
            let scrut = self.local()?;
            self.expect_kw("of")?;
            self.expect_kw("nil")?;
            self.expect_sym("=>")?;
            let nil = self.local_cmp()?;
            self.expect_sym("|")?;
            self.expect_kw("cons")?;
            self.expect_sym("(")?;
            let h = self.name()?;
            self.expect_sym(",")?;
            let t = self.name()?;
            self.expect_sym(")")?;
            self.expect_sym("=>")?;
            let cons = self.with_locals(&[&h, &t], |p| p.local())?;
            return Ok(T::Case { scrut: Box::new(scrut), nil: Box::new(nil), head: h, tail: t, cons: Box::new(cons) });
        }
        self.local_cmp()
    }

    fn local_cmp(&mut self) -> PResult<T> {
        let a = self.local_rep()?;
        if self.eat_sym("==") {
            return Ok(T::eq(a, self.local_rep()?));
        }
        if self.eat_sym("<") {
            return Ok(T::lt(a, self.local_rep()?));
        }
        Ok(a)
    }

    fn local_rep(&mut self) -> PResult<T> {
        let a = self.local_sum()?;
        if self.eat_sym("#->") {
            return Ok(T::RepArrow(Box::new(a), Box::new(self.local_rep()?)));
        }
        Ok(a)
    }

    fn local_sum(&mut self) -> PResult<T> {
        let mut a = self.local_app()?;
        while self.eat_sym("+") {
            a = T::add(a, self.local_app()?);
        }
        Ok(a)
    }

    fn starts_local_atom(&self) -> bool {
        match self.peek() {
            Tok::Int(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "#int" | "#bool"),
            Tok::Ident(s) => {
                !is_keyword(s) || matches!(s.as_str(), "true" | "false" | "nil" | "cons" | "repr" | "reprset" | "reprty")
            }
            Tok::Eof => false,
        }
    }

    fn local_app(&mut self) -> PResult<T> {
        let mut a = self.local_postfix()?;
        while self.starts_local_atom() {
            a = T::app(a, self.local_postfix()?);
        }
        Ok(a)
    }

    fn local_postfix(&mut self) -> PResult<T> {
        let mut a = self.local_atom()?;
        while self.eat_sym("[") {
            let t = self.local_type()?;
            self.expect_sym("]")?;
            a = T::TyApp(Box::new(a), t);
        }
        Ok(a)
    }

    pub fn local_atom(&mut self) -> PResult<T> {
        let sp = self.span();
        match self.bump() {
            Tok::Int(n) => Ok(T::Int(n)),
            Tok::Sym("#int") => Ok(T::RepInt),
            Tok::Sym("#bool") => Ok(T::RepBool),
            Tok::Sym("(") => {
                let e = self.local()?;
                if self.eat_sym(":") {
                    let t = self.local_type()?;
                    self.expect_sym(")")?;
                    return Ok(T::ann(e, t));
                }
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => Ok(T::Bool(true)),
                "false" => Ok(T::Bool(false)),
                "nil" => {
                    self.expect_sym("[")?;
                    let t = self.local_type()?;
                    self.expect_sym("]")?;
                    Ok(T::Nil(t))
                }
                "cons" => {
                    self.expect_sym("(")?;
                    let h = self.local()?;
                    self.expect_sym(",")?;
                    let t = self.local()?;
                    self.expect_sym(")")?;
                    Ok(T::cons(h, t))
                }
                "repr" => {
                    self.expect_sym("(")?;
                    let l = self.concrete_loc()?;
                    self.expect_sym(")")?;
                    Ok(self.table.repr(&l).expect("declared locations have codes"))
                }
                "reprset" => {
                    let close = if self.eat_sym("{") {
                        "}"
                    } else {
                        self.expect_sym("(")?;
                        ")"
                    };
                    let mut ls = vec![self.concrete_loc()?];
                    while self.eat_sym(",") {
                        ls.push(self.concrete_loc()?);
                    }
                    self.expect_sym(close)?;
                    let refs: Vec<&str> = ls.iter().map(|s| s.as_str()).collect();
                    Ok(self.table.repr_set(&refs).expect("declared locations have codes"))
                }
                "reprty" => {
                    self.expect_sym("(")?;
                    let t = self.local_type()?;
                    self.expect_sym(")")?;
                    repr_ty(&t).ok_or_else(|| {
                        Diagnostic::error(sp.join(self.prev_span()), "syntax", format!("no representation for type {t}"))
                    })
                }
                _ if is_keyword(&s) => Err(Diagnostic::error(sp, "syntax", format!("unexpected keyword `{s}`"))),
                _ => {
                    if !self.locals.contains(&s) {
                        if let Some(d) = self.defs.get(&s) {
                            return Ok(d.clone());
                        }
                    }
                    Ok(T::Var(s))
                }
            },
            t => Err(Diagnostic::error(sp, "syntax", format!("expected a local expression, found {}", Self::describe(&t)))),
        }
    }

    fn concrete_loc(&mut self) -> PResult<Name> {
        let sp = self.span();
        let n = self.name()?;
        if self.declared.contains(&n) {
            Ok(n)
        } else {
            Err(Diagnostic::error(sp, "undeclared-location", format!("`{n}` is not a declared location")))
        }
    }

    // ---- choreographies ----

    pub fn chor(&mut self) -> PResult<Chor> {
        if self.eat_kw("fun") {
            let f = self.name()?;
            self.expect_sym("(")?;
            let x = self.name()?;
            self.expect_sym(":")?;
            let arg = self.chor_type()?;
            self.expect_sym(")")?;
            let ret = if self.eat_sym(":") { Some(self.chor_type()?) } else { None };
            self.expect_sym("=")?;
            let body = self.chor()?;
            return Ok(Chor::fun(&f, &x, arg, ret, body));
        }
        if self.eat_kw("tyfun") {
            let a = self.name()?;
            self.expect_sym("::")?;
            let k = self.kind()?;
            if !self.eat_sym("=>") {
                self.expect_sym(".")?;
            }
            let body = self.with_tyvar(a.clone(), k, |p| p.chor())?;
            return Ok(Chor::tyabs(&a, k, body));
        }
        if self.eat_kw("case") {
            let scrut = self.chor()?;
            self.expect_kw("of")?;
            self.expect_kw("inl")?;
            let x = self.name()?;
            self.expect_sym("=>")?;
            let left = self.chor()?;
            self.expect_sym("|")?;
            self.expect_kw("inr")?;
            let y = self.name()?;
            self.expect_sym("=>")?;
            let right = self.chor()?;
            return Ok(Chor::Case { scrut: Box::new(scrut), x, left: Box::new(left), y, right: Box::new(right) });
        }
        if self.eat_kw("sync") {
            let from = self.loc_expr()?;
            self.expect_sym("[")?;
            let dir = if self.eat_kw("left") {
                Dir::L
            } else if self.eat_kw("right") {
                Dir::R
            } else {
                return self.err("expected `left` or `right`");
            };
            self.expect_sym("]")?;
            self.expect_sym("~>")?;
            let to = self.loc_set()?;
            self.expect_sym(";")?;
            let body = self.chor()?;
            return Ok(Chor::sync(from, dir, to, body));
        }
        if self.eat_kw("if") {
            let cond = self.chor()?;
            self.expect_sym("@")?;
            let at = self.loc_set()?;
            self.expect_kw("then")?;
            let then = self.chor()?;
            self.expect_kw("else")?;
            let els = self.chor()?;
            return Ok(Chor::ite(at, cond, then, els));
        }
        if self.eat_kw("let") {
            let at = self.loc_set()?;
            self.expect_sym(".")?;
            let x = self.name()?;
            if self.eat_sym("::") {
                let k = self.kind()?;
                self.expect_sym(":=")?;
                let head = self.chor()?;
                self.expect_kw("in")?;
                let body = self.with_tyvar(x.clone(), k, |p| p.chor())?;
                return Ok(Chor::let_type(at, &x, k, head, body));
            }
            self.expect_sym(":")?;
            let ty = self.local_type()?;
            self.expect_sym(":=")?;
            let head = self.chor()?;
            self.expect_kw("in")?;
            let body = self.with_locals(&[&x], |p| p.chor())?;
            return Ok(Chor::let_local(at, &x, ty, head, body));
        }
        self.chor_send()
    }

    fn chor_send(&mut self) -> PResult<Chor> {
        let start = self.span();
        let mut c = self.chor_app()?;
        while self.eat_sym("~>") {
            let from = if self.eat_sym("[") {
                let l = self.loc_expr()?;
                self.expect_sym("]")?;
                l
            } else {
                match &c {
                    Chor::Done(LocSet::Sng(l), _) => l.clone(),
                    _ => {
                        return Err(Diagnostic::error(
                            start.join(self.prev_span()),
                            "syntax",
                            "the sender must be written as `~>[L]` unless the value has a single owner",
                        ))
                    }
                }
            };
            let to = self.loc_set()?;
            c = Chor::send(c, from, to);
        }
        Ok(c)
    }

    fn starts_chor_atom(&self) -> bool {
        match self.peek() {
            Tok::Sym(s) => matches!(*s, "(" | "{"),
            Tok::Ident(s) => {
                !is_keyword(s) || matches!(s.as_str(), "fold" | "unfold" | "fst" | "snd" | "inl" | "inr")
            }
            _ => false,
        }
    }

    fn chor_app(&mut self) -> PResult<Chor> {
        let mut c = self.chor_postfix()?;
        while self.starts_chor_atom() {
            c = Chor::app(c, self.chor_postfix()?);
        }
        Ok(c)
    }

    fn chor_postfix(&mut self) -> PResult<Chor> {
        let mut c = self.chor_atom()?;
        while self.eat_sym("[") {
            let t = self.chor_type()?;
            self.expect_sym("]")?;
            c = Chor::tyapp(c, t);
        }
        Ok(c)
    }

    fn done(&mut self, owner: LocSet) -> PResult<Chor> {
        self.expect_sym(".")?;
        Ok(Chor::done(owner, self.local_atom()?))
    }

    fn wrapped(&mut self) -> PResult<Chor> {
        self.expect_sym("(")?;
        let c = self.chor()?;
        self.expect_sym(")")?;
        Ok(c)
    }

    fn annotated(&mut self) -> PResult<(ChorType, Chor)> {
        self.expect_sym("[")?;
        let t = self.chor_type()?;
        self.expect_sym("]")?;
        Ok((t, self.wrapped()?))
    }

    fn chor_atom(&mut self) -> PResult<Chor> {
        if self.is_sym("{") {
            let r = self.loc_set()?;
            return self.done(r);
        }
        if self.is_sym("(") {
            let save = self.pos;
            if let Ok(r) = self.loc_set() {
                if self.is_sym(".") {
                    return self.done(r);
                }
            }
            self.pos = save;
            self.bump();
            let a = self.chor()?;
            if self.eat_sym(",") {
                let b = self.chor()?;
                self.expect_sym(")")?;
                return Ok(Chor::pair(a, b));
            }
            self.expect_sym(")")?;
            return Ok(a);
        }
        if self.eat_kw("fold") {
            let (t, c) = self.annotated()?;
            return Ok(Chor::Fold(t, Box::new(c)));
        }
        if self.eat_kw("inl") {
            let (t, c) = self.annotated()?;
            return Ok(Chor::Inl(t, Box::new(c)));
        }
        if self.eat_kw("inr") {
            let (t, c) = self.annotated()?;
            return Ok(Chor::Inr(t, Box::new(c)));
        }
        if self.eat_kw("unfold") {
            return Ok(Chor::Unfold(Box::new(self.wrapped()?)));
        }
        if self.eat_kw("fst") {
            return Ok(Chor::Fst(Box::new(self.wrapped()?)));
        }
        if self.eat_kw("snd") {
            return Ok(Chor::Snd(Box::new(self.wrapped()?)));
        }
        if matches!(self.peek_at(1), Tok::Sym(".")) {
            let r = self.loc_set()?;
            return self.done(r);
        }
        Ok(Chor::Var(self.name()?))
    }

    // ---- files ----

    fn header(&mut self) -> PResult<(Vec<Name>, LocTable)> {
        self.expect_kw("locations")?;
        let mut locs = Vec::new();
        loop {
            let sp = self.span();
            let n = self.name()?;
            if locs.contains(&n) {
                return Err(Diagnostic::error(sp, "duplicate-location", format!("location `{n}` is declared twice")));
            }
            locs.push(n);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.declared = locs.iter().cloned().collect();
        let refs: Vec<&str> = locs.iter().map(|s| s.as_str()).collect();
        if !self.eat_kw("codes") {
            return Ok((locs.clone(), LocTable::sequential(&refs)));
        }
        self.expect_sym("{")?;
        let mut map = BTreeMap::new();
        let mut default = None;
        while !self.is_sym("}") {
            if self.eat_kw("default") {
                default = Some(self.concrete_loc()?);
            } else {
                let sp = self.span();
                let Tok::Int(n) = self.bump() else {
                    return Err(Diagnostic::error(sp, "syntax", "expected an integer code"));
                };
                self.expect_sym("->")?;
                let l = self.concrete_loc()?;
                if map.insert(n, l).is_some() {
                    return Err(Diagnostic::error(sp, "duplicate-code", format!("code {n} is assigned twice")));
                }
            }
            if !self.eat_sym(";") {
                break;
            }
        }
        let close = self.span();
        self.expect_sym("}")?;
        let default = match default {
            Some(d) => d,
            None => return Err(Diagnostic::error(close, "missing-default", "the code table needs a `default` location")),
        };
        Ok((locs, LocTable::new(map, default)))
    }

    pub fn file(&mut self) -> PResult<SourceFile> {
        let (locations, table) = self.header()?;
        self.table = table.clone();
        let mut defs = Vec::new();
        while self.eat_kw("def") {
            let n = self.name()?;
            self.expect_sym("=")?;
            let e = self.local()?;
            self.expect_sym(";")?;
            self.defs.insert(n.clone(), e.clone());
            defs.push((n, e));
        }
        self.expect_kw("main")?;
        let declared = if self.eat_sym(":") { Some(self.chor_type()?) } else { None };
        self.expect_sym("=")?;
        let start = self.span();
        let main = self.chor()?;
        let main_span = start.join(self.prev_span());
        self.expect_eof()?;
        Ok(SourceFile { locations, table, defs, declared, main, main_span })
    }

    pub fn source(&self) -> &str {
        self.src
    }
}

fn as_local(t: &ChorType) -> Option<Ty> {
    match t {
        ChorType::Local(l) => Some(l.clone()),
        ChorType::Arrow(a, b) => Some(Ty::arrow(as_local(a)?, as_local(b)?)),
        _ => None,
    }
}

pub fn parse_file(src: &str) -> PResult<SourceFile> {
    Parser::new(src, &[], LocTable::sequential(&["_"]))?.file()
}

/// Parse a bare choreography over the given locations.
pub fn parse_chor(src: &str, locations: &[&str]) -> PResult<Chor> {
    let mut p = Parser::new(src, locations, LocTable::sequential(locations))?;
    let c = p.chor()?;
    p.expect_eof()?;
    Ok(c)
}

pub fn parse_chor_type(src: &str, locations: &[&str]) -> PResult<ChorType> {
    let mut p = Parser::new(src, locations, LocTable::sequential(locations))?;
    let t = p.chor_type()?;
    p.expect_eof()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qc_core::local::LocalTerm;

    const ABC: &[&str] = &["A", "B", "C"];

    #[test]
    fn send_sugar() {
        let c = parse_chor("A.(2+3) ~> B", ABC).unwrap();
        let want = Chor::send(
            Chor::at("A", LocalTerm::add(LocalTerm::int(2), LocalTerm::int(3))),
            LocExpr::concrete("A"),
            LocSet::loc("B"),
        );
        assert_eq!(c, want);
    }

    #[test]
    fn type_let_at_loc() {
        let c = parse_chor("let {A,B}.alpha :: loc := {A,B}.repr(A) in alpha.(1 + 1) ~> B", ABC).unwrap();
        let Chor::LetType { kind, body, .. } = &c else { panic!("{c:?}") };
        assert_eq!(*kind, Kind::Loc);
        assert!(matches!(&**body, Chor::Send { from: LocExpr::Var(a), .. } if a == "alpha"));
    }

    #[test]
    fn unbalanced_let_reports_span() {
        let e = parse_chor("let A.x : int := A.1 ; B.x", ABC).unwrap_err();
        assert_eq!(e.rule, "syntax");
        assert_eq!(e.span.col, 22);
    }

    #[test]
    fn undeclared_location() {
        let e = parse_chor("Q.1", ABC).unwrap_err();
        assert_eq!(e.rule, "undeclared-location");
    }

    #[test]
    fn header_codes() {
        let f = parse_file("locations A, B, C\ncodes { 0 -> A; 1 -> B; default C }\nmain = C.repr(B)").unwrap();
        assert_eq!(f.table.lookup(7), "C");
        assert_eq!(f.table.code("B"), Some(1));
        let dup = parse_file("locations A\ncodes { 0 -> A; 0 -> A; default A }\nmain = A.1").unwrap_err();
        assert_eq!(dup.rule, "duplicate-code");
    }

    #[test]
    fn definitions_inline() {
        let f = parse_file("locations A\ndef two = 1 + 1;\nmain = A.(two + two)").unwrap();
        assert_eq!(f.main.to_string(), "A.(1 + 1 + (1 + 1))");
    }
}
