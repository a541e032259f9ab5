//! Rule-directed generators for well-typed local terms and choreographies.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chor::{Chor, ChorType, Dir};
use crate::kind::Kind;
use crate::local::{LocTable, LocalTerm as T, LocalType as Ty};
use crate::locset::{LocExpr, LocSet, Name};
use crate::statics::{chor_ty_equiv, type_of};

const LOCATIONS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    /// Number of locations, at least 1.
    pub universe: usize,
    /// Allow functions typed as recursive.
    pub recursion: bool,
    pub local_depth: usize,
}

impl GenConfig {
    pub fn new(seed: u64) -> Self {
        GenConfig { seed, max_depth: 3, universe: 3, recursion: true, local_depth: 2 }
    }

    pub fn universe_names(&self) -> Vec<Name> {
        assert!(self.universe >= 1 && self.universe <= LOCATIONS.len(), "universe size out of range");
        LOCATIONS[..self.universe].iter().map(|s| Name::from(*s)).collect()
    }

    pub fn table(&self) -> LocTable {
        LocTable::sequential(&LOCATIONS[..self.universe])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenError {
    pub seed: u64,
    pub attempts: usize,
    pub last: String,
}

type Set = BTreeSet<Name>;

fn set_of(s: &Set) -> LocSet {
    LocSet::of_names(s.iter().map(|n| n.as_str()))
}

fn at(t: &Ty, s: &Set) -> ChorType {
    ChorType::At(t.clone(), set_of(s))
}

/// Local-term generation over `int`, `bool`, `list[int]`, `int -> int` and `tyrep`.
pub struct LocalGen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    fresh: usize,
}

impl<'r> LocalGen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng) -> Self {
        LocalGen { rng, fresh: 0 }
    }

    fn name(&mut self, base: &str) -> Name {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn int_lit(&mut self) -> T {
        T::Int(self.rng.gen_range(-3..10))
    }

    fn pick_var(&mut self, t: &Ty, vars: &[(Name, Ty)]) -> Option<T> {
        let cands: Vec<&Name> = vars.iter().filter(|(_, u)| u == t).map(|(x, _)| x).collect();
        cands.choose(self.rng).map(|x| T::Var((*x).clone()))
    }

    /// A closed-over-`vars` term of type `t`; only `int` and `bool` use the
    /// full rule set, other types fall back to canonical forms.
    pub fn term(&mut self, t: &Ty, vars: &[(Name, Ty)], depth: usize) -> T {
        if depth == 0 || self.rng.gen_bool(0.25) {
            if self.rng.gen_bool(0.4) {
                if let Some(v) = self.pick_var(t, vars) {
                    return v;
                }
            }
            return self.leaf(t, vars);
        }
        let d = depth - 1;
        match t {
            Ty::Int => match self.rng.gen_range(0..7) {
                0 | 1 => T::add(self.term(&Ty::Int, vars, d), self.term(&Ty::Int, vars, d)),
                2 => T::ite(self.term(&Ty::Bool, vars, d), self.term(&Ty::Int, vars, d), self.term(&Ty::Int, vars, d)),
                3 => T::app(self.term(&Ty::arrow(Ty::Int, Ty::Int), vars, d), self.term(&Ty::Int, vars, d)),
                4 => {
                    let (h, tl) = (self.name("h"), self.name("t"));
                    let mut inner = vars.to_vec();
                    inner.push((h.clone(), Ty::Int));
                    inner.push((tl.clone(), Ty::list(Ty::Int)));
                    T::Case {
                        scrut: Box::new(self.term(&Ty::list(Ty::Int), vars, d)),
                        nil: Box::new(self.term(&Ty::Int, vars, d)),
                        head: h,
                        tail: tl,
                        cons: Box::new(self.term(&Ty::Int, &inner, d)),
                    }
                }
                5 => {
                    let a = self.name("t");
                    T::TyApp(Box::new(T::TyAbs(a, Box::new(self.term(&Ty::Int, vars, d)))), Ty::Int)
                }
                _ => T::ann(self.term(&Ty::Int, vars, d), Ty::Int),
            },
            Ty::Bool => match self.rng.gen_range(0..4) {
                0 => T::eq(self.term(&Ty::Int, vars, d), self.term(&Ty::Int, vars, d)),
                1 => T::lt(self.term(&Ty::Int, vars, d), self.term(&Ty::Int, vars, d)),
                2 => T::eq(self.term(&Ty::Bool, vars, d), self.term(&Ty::Bool, vars, d)),
                _ => T::ite(self.term(&Ty::Bool, vars, d), self.term(&Ty::Bool, vars, d), self.term(&Ty::Bool, vars, d)),
            },
            Ty::List(_) => T::cons(self.term(&Ty::Int, vars, d), self.term(t, vars, d)),
            Ty::Arrow(..) => {
                if self.rng.gen_bool(0.3) {
                    T::ite(self.term(&Ty::Bool, vars, d), self.term(t, vars, d), self.term(t, vars, d))
                } else {
                    let (f, x) = (self.name("f"), self.name("x"));
                    let mut inner = vars.to_vec();
                    inner.push((x.clone(), Ty::Int));
                    let body = self.term(&Ty::Int, &inner, d);
                    let ret = self.rng.gen_bool(0.3).then_some(Ty::Int);
                    T::fun(&f, &x, Ty::Int, ret, body)
                }
            }
            Ty::TyRep => T::RepArrow(Box::new(self.term(t, vars, d)), Box::new(self.term(t, vars, d))),
            _ => self.leaf(t, vars),
        }
    }

    fn leaf(&mut self, t: &Ty, vars: &[(Name, Ty)]) -> T {
        match t {
            Ty::Int => self.int_lit(),
            Ty::Bool => T::Bool(self.rng.gen()),
            Ty::List(e) => T::Nil((**e).clone()),
            Ty::Arrow(..) => {
                let (f, x) = (self.name("f"), self.name("x"));
                let k = self.int_lit();
                T::fun(&f, &x, Ty::Int, None, T::add(T::var(&x), k))
            }
            Ty::TyRep => {
                if self.rng.gen() {
                    T::RepInt
                } else {
                    T::RepBool
                }
            }
            _ => self.pick_var(t, vars).expect("no canonical leaf for this type"),
        }
    }

    /// Arbitrary, frequently ill-typed terms for determinism checks.
    pub fn raw(&mut self, depth: usize) -> T {
        if depth == 0 {
            return match self.rng.gen_range(0..5) {
                0 => self.int_lit(),
                1 => T::Bool(self.rng.gen()),
                2 => T::var("x"),
                3 => T::Nil(Ty::Int),
                _ => T::RepInt,
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => T::add(self.raw(d), self.raw(d)),
            1 => T::eq(self.raw(d), self.raw(d)),
            2 => T::lt(self.raw(d), self.raw(d)),
            3 => T::ite(self.raw(d), self.raw(d), self.raw(d)),
            4 => T::fun("f", "x", Ty::Int, None, self.raw(d)),
            5 => T::app(self.raw(d), self.raw(d)),
            6 => T::cons(self.raw(d), self.raw(d)),
            7 => T::Case {
                scrut: Box::new(self.raw(d)),
                nil: Box::new(self.raw(d)),
                head: "h".into(),
                tail: "t".into(),
                cons: Box::new(self.raw(d)),
            },
            8 => T::TyApp(Box::new(T::TyAbs("a".into(), Box::new(self.raw(d)))), Ty::Int),
            _ => T::ann(self.raw(d), Ty::Int),
        }
    }
}

/// A closed, well-typed local term of a random type, with that type.
pub fn gen_local(seed: u64, depth: usize) -> (T, Ty) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tys = [Ty::Int, Ty::Bool, Ty::list(Ty::Int), Ty::arrow(Ty::Int, Ty::Int), Ty::TyRep];
    let t = tys.choose(&mut rng).cloned().expect("nonempty");
    let e = LocalGen::new(&mut rng).term(&t, &[], depth);
    (e, t)
}

struct ChorGen<'c> {
    rng: ChaCha8Rng,
    cfg: &'c GenConfig,
    universe: Set,
    table: LocTable,
    fresh: usize,
    /// Choreography variables with their located types.
    vars: Vec<(Name, Ty, Set)>,
    /// Local variables with the set they are bound at.
    locals: Vec<(Set, Name, Ty)>,
}

impl ChorGen<'_> {
    fn name(&mut self, base: &str) -> Name {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn base_ty(&mut self) -> Ty {
        if self.rng.gen_bool(0.7) {
            Ty::Int
        } else {
            Ty::Bool
        }
    }

    fn subset_of(&mut self, s: &Set) -> Set {
        let items: Vec<&Name> = s.iter().collect();
        loop {
            let out: Set = items.iter().filter(|_| self.rng.gen_bool(0.5)).map(|n| (*n).clone()).collect();
            if !out.is_empty() {
                return out;
            }
        }
    }

    fn any_set(&mut self) -> Set {
        let u = self.universe.clone();
        self.subset_of(&u)
    }

    fn pick(&mut self, s: &Set) -> Name {
        let items: Vec<&Name> = s.iter().collect();
        (*items.choose(&mut self.rng).expect("nonempty")).clone()
    }

    fn local(&mut self, t: &Ty, r: &Set) -> T {
        let vars: Vec<(Name, Ty)> =
            self.locals.iter().filter(|(s, _, _)| r.is_subset(s)).map(|(_, x, t)| (x.clone(), t.clone())).collect();
        let depth = self.rng.gen_range(0..=self.cfg.local_depth);
        LocalGen::new(&mut self.rng).term(t, &vars, depth)
    }

    fn done(&mut self, t: &Ty, r: &Set) -> Chor {
        let e = self.local(t, r);
        Chor::done(set_of(r), e)
    }

    /// A choreography of type `t @ r`.
    fn chor(&mut self, t: &Ty, r: &Set, depth: usize) -> Chor {
        if depth == 0 || self.rng.gen_bool(0.15) {
            let hits: Vec<Name> =
                self.vars.iter().filter(|(_, u, s)| u == t && s == r).map(|(x, _, _)| x.clone()).collect();
            if !hits.is_empty() && self.rng.gen_bool(0.5) {
                return Chor::Var(hits.choose(&mut self.rng).expect("nonempty").clone());
            }
            return self.done(t, r);
        }
        let d = depth - 1;
        loop {
            let rule = self.rng.gen_range(0..13);
            if let Some(c) = self.rule(rule, t, r, d) {
                return c;
            }
        }
    }

    fn rule(&mut self, rule: u32, t: &Ty, r: &Set, d: usize) -> Option<Chor> {
        Some(match rule {
            // send: part of `r` computes, the rest receives
            0 | 1 => {
                if r.len() < 2 {
                    return None;
                }
                let src = loop {
                    let s = self.subset_of(r);
                    if s.len() < r.len() {
                        break s;
                    }
                };
                let to: Set = r.difference(&src).cloned().collect();
                let from = self.pick(&src);
                let body = self.chor(t, &src, d);
                Chor::send(body, LocExpr::Concrete(from), set_of(&to))
            }
            2 | 3 => {
                let th = self.base_ty();
                let rh = self.any_set();
                let bind = self.subset_of(&rh);
                let head = self.chor(&th, &rh, d);
                let x = self.name("x");
                self.locals.push((bind.clone(), x.clone(), th.clone()));
                let body = self.chor(t, r, d);
                self.locals.pop();
                Chor::let_local(set_of(&bind), &x, th, head, body)
            }
            // conditional with a selection to everyone else
            4 | 5 => {
                let rc = self.any_set();
                let deciders = self.subset_of(&rc);
                let cond = self.chor(&Ty::Bool, &rc, d);
                let others: Set = self.universe.difference(&deciders).cloned().collect();
                let chooser = LocExpr::Concrete(self.pick(&deciders));
                let branch = |g: &mut Self, dir: Dir| {
                    let c = g.chor(t, r, d);
                    if others.is_empty() {
                        c
                    } else {
                        Chor::sync(chooser.clone(), dir, set_of(&others), c)
                    }
                };
                let then = branch(self, Dir::L);
                let els = branch(self, Dir::R);
                Chor::ite(set_of(&deciders), cond, then, els)
            }
            6 => {
                let ta = self.base_ty();
                let ra = self.any_set();
                let (f, x) = (self.name("F"), self.name("X"));
                self.vars.push((x.clone(), ta.clone(), ra.clone()));
                let body = self.chor(t, r, d);
                self.vars.pop();
                let ret = (self.cfg.recursion && self.rng.gen_bool(0.5)).then(|| at(t, r));
                let fun = Chor::fun(&f, &x, at(&ta, &ra), ret, body);
                let arg = self.chor(&ta, &ra, d);
                Chor::app(fun, arg)
            }
            7 => {
                let to = self.base_ty();
                let ro = self.any_set();
                let other = self.chor(&to, &ro, d);
                let mine = self.chor(t, r, d);
                if self.rng.gen() {
                    Chor::Fst(Box::new(Chor::pair(mine, other)))
                } else {
                    Chor::Snd(Box::new(Chor::pair(other, mine)))
                }
            }
            8 => {
                let (t1, t2) = (self.base_ty(), self.base_ty());
                let (r1, r2) = (self.any_set(), self.any_set());
                let sum = ChorType::sum(at(&t1, &r1), at(&t2, &r2));
                let scrut = if self.rng.gen() {
                    Chor::Inl(sum, Box::new(self.chor(&t1, &r1, d)))
                } else {
                    Chor::Inr(sum, Box::new(self.chor(&t2, &r2, d)))
                };
                let (x, y) = (self.name("X"), self.name("Y"));
                self.vars.push((x.clone(), t1, r1));
                let left = self.chor(t, r, d);
                self.vars.pop();
                self.vars.push((y.clone(), t2, r2));
                let right = self.chor(t, r, d);
                self.vars.pop();
                Chor::Case { scrut: Box::new(scrut), x, left: Box::new(left), y, right: Box::new(right) }
            }
            9 => {
                let m = self.name("m");
                let mu = ChorType::Mu(m, Box::new(at(t, r)));
                Chor::Unfold(Box::new(Chor::Fold(mu, Box::new(self.chor(t, r, d)))))
            }
            // location abstraction instantiated at a member of `r`
            10 => {
                let a = self.name("a");
                let x = self.pick(r);
                let rest: Set = r.iter().filter(|l| **l != x).cloned().collect();
                let av = LocExpr::Var(a.clone());
                let e = LocalGen::new(&mut self.rng).term(t, &[], self.cfg.local_depth);
                let here = Chor::done(LocSet::Sng(av.clone()), e);
                let body = if rest.is_empty() { here } else { Chor::send(here, av, set_of(&rest)) };
                Chor::tyapp(Chor::tyabs(&a, Kind::Loc, body), ChorType::Loc(LocExpr::Concrete(x)))
            }
            11 => {
                if self.rng.gen() {
                    let s = self.name("s");
                    let e = LocalGen::new(&mut self.rng).term(t, &[], self.cfg.local_depth);
                    let body = Chor::done(LocSet::Var(s.clone()), e);
                    Chor::tyapp(Chor::tyabs(&s, Kind::Set, body), ChorType::Set(set_of(r)))
                } else {
                    let b = self.name("b");
                    let u = self.universe.clone();
                    let rep = self.rng.gen_range(0..3);
                    let head = Chor::done(set_of(&u), [T::RepInt, T::RepBool, T::RepArrow(Box::new(T::RepInt), Box::new(T::RepInt))][rep].clone());
                    let body = self.chor(t, r, d);
                    Chor::let_type(set_of(&u), &b, Kind::Local, head, body)
                }
            }
            // everyone learns a location, which then sends to `r`
            _ => {
                let u = self.universe.clone();
                let a = self.name("a");
                let target = self.pick(&u);
                let rep = self.table.repr(&target).expect("declared location");
                let l0 = self.pick(&u);
                let rest: Set = u.iter().filter(|l| **l != l0).cloned().collect();
                let announce = Chor::at(&l0, rep);
                let head = if rest.is_empty() || self.rng.gen_bool(0.3) {
                    Chor::done(set_of(&u), self.table.repr(&target).expect("declared location"))
                } else {
                    Chor::send(announce, LocExpr::concrete(&l0), set_of(&rest))
                };
                let av = LocExpr::Var(a.clone());
                let e = LocalGen::new(&mut self.rng).term(t, &[], self.cfg.local_depth);
                let sent = Chor::send(Chor::done(LocSet::Sng(av.clone()), e), av, set_of(r));
                let x = self.name("x");
                self.locals.push((r.clone(), x.clone(), t.clone()));
                let rest_body = if self.rng.gen() { Chor::done(set_of(r), T::Var(x.clone())) } else { self.chor(t, r, d) };
                self.locals.pop();
                let body = Chor::let_local(set_of(r), &x, t.clone(), sent, rest_body);
                Chor::let_type(set_of(&u), &a, Kind::Loc, head, body)
            }
        })
    }
}

/// A closed well-typed choreography and its type; the result is re-checked.
pub fn gen_well_typed(cfg: &GenConfig) -> Result<(Chor, ChorType), GenError> {
    const ATTEMPTS: usize = 16;
    let table = cfg.table();
    let mut last = String::new();
    for attempt in 0..ATTEMPTS {
        let mut g = ChorGen {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add((attempt as u64) << 40)),
            cfg,
            universe: cfg.universe_names().into_iter().collect(),
            table: table.clone(),
            fresh: 0,
            vars: Vec::new(),
            locals: Vec::new(),
        };
        let t = g.base_ty();
        let u = g.universe.clone();
        let r = g.subset_of(&u);
        let c = g.chor(&t, &r, cfg.max_depth);
        let want = at(&t, &r);
        match type_of(&table, &c) {
            Ok(found) if chor_ty_equiv(&found, &want) => return Ok((c, found)),
            Ok(found) => last = format!("{c} has type {found}, wanted {want}"),
            Err(e) => last = format!("{c}: {e}"),
        }
    }
    Err(GenError { seed: cfg.seed, attempts: ATTEMPTS, last })
}
