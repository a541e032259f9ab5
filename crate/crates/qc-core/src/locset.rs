//! Locations and symbolic location sets.
//!
//! Sets are built from set variables, singletons and unions. All relations
//! here are the syntactic ones used by the type system; they only coincide
//! with set semantics when a set is ground.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

pub type Name = String;

/// A single location: either concrete or a location variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocExpr {
    Concrete(Name),
    Var(Name),
}

impl LocExpr {
    pub fn concrete(n: &str) -> Self {
        LocExpr::Concrete(n.into())
    }

    pub fn as_concrete(&self) -> Option<&str> {
        match self {
            LocExpr::Concrete(n) => Some(n),
            LocExpr::Var(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, LocExpr::Concrete(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocSet {
    Var(Name),
    Sng(LocExpr),
    Union(Box<LocSet>, Box<LocSet>),
}

/// What a type variable is replaced by inside location positions.
#[derive(Clone, Copy, Debug)]
pub enum LocSub<'a> {
    Loc(&'a LocExpr),
    Set(&'a LocSet),
}

impl LocSet {
    pub fn sng(l: LocExpr) -> Self {
        LocSet::Sng(l)
    }

    pub fn loc(n: &str) -> Self {
        LocSet::Sng(LocExpr::concrete(n))
    }

    pub fn union(a: LocSet, b: LocSet) -> Self {
        LocSet::Union(Box::new(a), Box::new(b))
    }

    /// Right-nested union of singletons, `{A, B, C}`. Panics on an empty list.
    pub fn of_locs<I: IntoIterator<Item = LocExpr>>(it: I) -> Self {
        let v: Vec<LocExpr> = it.into_iter().collect();
        assert!(!v.is_empty(), "location set literal must be nonempty");
        let mut iter = v.into_iter().rev();
        let mut acc = LocSet::Sng(iter.next().unwrap());
        for l in iter {
            acc = LocSet::union(LocSet::Sng(l), acc);
        }
        acc
    }

    pub fn of_names<'a, I: IntoIterator<Item = &'a str>>(it: I) -> Self {
        Self::of_locs(it.into_iter().map(LocExpr::concrete))
    }

    /// The concrete denotation, if the set mentions no variables.
    pub fn ground(&self) -> Option<BTreeSet<Name>> {
        let mut out = BTreeSet::new();
        if self.ground_into(&mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn ground_into(&self, out: &mut BTreeSet<Name>) -> bool {
        match self {
            LocSet::Var(_) => false,
            LocSet::Sng(LocExpr::Var(_)) => false,
            LocSet::Sng(LocExpr::Concrete(n)) => {
                out.insert(n.clone());
                true
            }
            LocSet::Union(a, b) => a.ground_into(out) && b.ground_into(out),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.ground().is_some()
    }

    /// Leaves of the union tree, left to right.
    pub fn atoms(&self) -> Vec<&LocSet> {
        let mut v = Vec::new();
        self.atoms_into(&mut v);
        v
    }

    fn atoms_into<'a>(&'a self, v: &mut Vec<&'a LocSet>) {
        match self {
            LocSet::Union(a, b) => {
                a.atoms_into(v);
                b.atoms_into(v);
            }
            _ => v.push(self),
        }
    }

    /// Flattened, sorted and deduplicated form.
    pub fn normalize(&self) -> LocSet {
        let atoms: BTreeSet<LocSet> = self.atoms().into_iter().cloned().collect();
        let mut it = atoms.into_iter().rev();
        let mut acc = it.next().expect("union has at least one atom");
        for a in it {
            acc = LocSet::union(a, acc);
        }
        acc
    }

    pub fn concrete_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            LocSet::Sng(LocExpr::Concrete(n)) => {
                out.insert(n.clone());
            }
            LocSet::Union(a, b) => {
                a.concrete_names(out);
                b.concrete_names(out);
            }
            _ => {}
        }
    }

    /// Variables of either sort occurring in the set.
    pub fn vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            LocSet::Var(a) | LocSet::Sng(LocExpr::Var(a)) => {
                out.insert(a.clone());
            }
            LocSet::Sng(LocExpr::Concrete(_)) => {}
            LocSet::Union(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn mentions(&self, v: &str) -> bool {
        match self {
            LocSet::Var(a) | LocSet::Sng(LocExpr::Var(a)) => a == v,
            LocSet::Sng(LocExpr::Concrete(_)) => false,
            LocSet::Union(a, b) => a.mentions(v) || b.mentions(v),
        }
    }

    pub fn subst(&self, a: &str, s: LocSub<'_>) -> LocSet {
        match self {
            LocSet::Var(b) | LocSet::Sng(LocExpr::Var(b)) if b == a => match s {
                LocSub::Loc(l) => LocSet::Sng(l.clone()),
                LocSub::Set(r) => r.clone(),
            },
            LocSet::Union(x, y) => LocSet::union(x.subst(a, s), y.subst(a, s)),
            _ => self.clone(),
        }
    }

    pub fn rename(&self, a: &str, b: &str) -> LocSet {
        match self {
            LocSet::Var(x) if x == a => LocSet::Var(b.into()),
            LocSet::Sng(LocExpr::Var(x)) if x == a => LocSet::Sng(LocExpr::Var(b.into())),
            LocSet::Union(x, y) => LocSet::union(x.rename(a, b), y.rename(a, b)),
            _ => self.clone(),
        }
    }
}

impl LocExpr {
    pub fn subst(&self, a: &str, s: LocSub<'_>) -> LocExpr {
        match (self, s) {
            (LocExpr::Var(b), LocSub::Loc(l)) if b == a => l.clone(),
            (LocExpr::Var(b), LocSub::Set(LocSet::Sng(l))) if b == a => l.clone(),
            _ => self.clone(),
        }
    }

    pub fn rename(&self, a: &str, b: &str) -> LocExpr {
        match self {
            LocExpr::Var(x) if x == a => LocExpr::Var(b.into()),
            _ => self.clone(),
        }
    }
}

/// Necessary membership: `l` is in `r` under every instantiation.
pub fn nec_in(l: &LocExpr, r: &LocSet) -> bool {
    match r {
        LocSet::Var(_) => false,
        LocSet::Sng(m) => m == l,
        LocSet::Union(a, b) => nec_in(l, a) || nec_in(l, b),
    }
}

/// Possible membership: `l` is in `r` under some instantiation.
pub fn poss_in(l: &LocExpr, r: &LocSet) -> bool {
    match r {
        LocSet::Var(_) => true,
        LocSet::Sng(LocExpr::Var(_)) => true,
        LocSet::Sng(m @ LocExpr::Concrete(_)) => m == l,
        LocSet::Union(a, b) => poss_in(l, a) || poss_in(l, b),
    }
}

/// Syntactic inclusion, decided by searching the four inclusion rules.
pub fn subset(a: &LocSet, b: &LocSet) -> bool {
    if a == b {
        return true;
    }
    if let LocSet::Union(a1, a2) = a {
        if subset(a1, b) && subset(a2, b) {
            return true;
        }
    }
    if let LocSet::Sng(l) = a {
        if nec_in(l, b) {
            return true;
        }
    }
    if let LocSet::Union(b1, b2) = b {
        if subset(a, b1) || subset(a, b2) {
            return true;
        }
    }
    false
}

pub fn set_equiv(a: &LocSet, b: &LocSet) -> bool {
    subset(a, b) && subset(b, a)
}

const FRESH_WITNESS: &str = "\u{0}fresh";

fn witnesses(sets: &[&LocSet]) -> Vec<LocExpr> {
    let mut names = BTreeSet::new();
    let mut vars = BTreeSet::new();
    for s in sets {
        s.concrete_names(&mut names);
        s.vars(&mut vars);
    }
    let mut w: Vec<LocExpr> = names.into_iter().map(LocExpr::Concrete).collect();
    w.push(LocExpr::Concrete(FRESH_WITNESS.into()));
    w.extend(vars.into_iter().map(LocExpr::Var));
    w
}

/// No location could be in both sets.
pub fn disjoint(a: &LocSet, b: &LocSet) -> bool {
    witnesses(&[a, b])
        .iter()
        .all(|w| !(poss_in(w, a) && poss_in(w, b)))
}

/// Could some location be in `s` and outside `r`?
pub fn poss_in_diff(w_set: &LocSet, s: &LocSet, r: &LocSet) -> bool {
    witnesses(&[w_set, s, r])
        .iter()
        .any(|w| poss_in(w, w_set) && poss_in(w, s) && !nec_in(w, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(a: &str) -> LocSet {
        LocSet::Var(a.into())
    }

    fn lvar(a: &str) -> LocSet {
        LocSet::Sng(LocExpr::Var(a.into()))
    }

    #[test]
    fn membership_rules() {
        let a = LocExpr::concrete("A");
        assert!(nec_in(&a, &LocSet::of_names(["B", "A"])));
        assert!(!nec_in(&a, &var("x")));
        assert!(poss_in(&a, &var("x")));
        assert!(poss_in(&a, &lvar("x")));
        assert!(!poss_in(&LocExpr::Var("x".into()), &LocSet::loc("A")));
        assert!(!poss_in(&a, &LocSet::loc("B")));
    }

    #[test]
    fn subset_with_variables() {
        let s = LocSet::union(LocSet::loc("A"), var("x"));
        assert!(subset(&var("x"), &s));
        assert!(subset(&LocSet::loc("A"), &s));
        assert!(!subset(&s, &var("x")));
        assert!(subset(&lvar("a"), &LocSet::union(LocSet::loc("B"), lvar("a"))));
    }

    #[test]
    fn disjoint_is_conservative_with_variables() {
        assert!(disjoint(&LocSet::loc("A"), &LocSet::loc("B")));
        assert!(!disjoint(&LocSet::loc("A"), &var("x")));
        assert!(!disjoint(&lvar("a"), &LocSet::loc("B")));
    }

    #[test]
    fn normalize_sorts_and_dedups() {
        let s = LocSet::union(LocSet::of_names(["C", "A"]), LocSet::of_names(["A", "B"]));
        assert_eq!(s.normalize(), LocSet::of_names(["A", "B", "C"]));
    }
}
