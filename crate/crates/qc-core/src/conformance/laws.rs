//! Algebraic laws of merge, the program order and location-set relations,
//! checked by enumeration, plus corrupted projections for negative controls.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chor::Dir;
use crate::local::LocalTerm as T;
use crate::locset::{disjoint, nec_in, poss_in, subset, LocExpr, LocSet, Name};
use crate::net::{Net, System};
use crate::proj::{canonical, leq, leq_canonical, merge};

/// Small network programs, all shapes up to `depth` constructors deep.
pub fn enumerate_nets(depth: usize) -> Vec<Net> {
    let a = || LocExpr::concrete("A");
    let mut all = vec![Net::Unit, Net::Ret(T::int(1)), Net::Ret(T::int(2)), Net::recv("A")];
    let mut prev = all.clone();
    for _ in 1..depth {
        let mut next = Vec::new();
        for e in &prev {
            let b = || Box::new(e.clone());
            next.push(Net::Send(b(), LocSet::loc("B")));
            next.push(Net::allow_left(a(), e.clone()));
            next.push(Net::allow_right(a(), e.clone()));
            next.push(Net::Choose(Dir::L, LocSet::loc("B"), b()));
            next.push(Net::TyAbs("t".into(), crate::kind::Kind::Loc, b()));
            for f in &all {
                next.push(Net::seq(e.clone(), f.clone()));
                next.push(Net::seq(f.clone(), e.clone()));
                next.push(Net::Allow { from: a(), left: Some(b()), right: Some(Box::new(f.clone())) });
            }
        }
        all.extend(next.iter().cloned());
        prev = next;
    }
    let mut seen = BTreeSet::new();
    all.retain(|e| seen.insert(e.clone()));
    all
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reflexivity, antisymmetry (up to canonical form) and transitivity.
pub fn order_laws(nets: &[Net]) -> LawReport {
    let mut rep = LawReport::default();
    let n = nets.len();
    let canon: Vec<Net> = nets.iter().map(canonical).collect();
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if leq_canonical(&canon[i], &canon[j]) {
                above[i].push(j);
            }
        }
    }
    for i in 0..n {
        rep.record(above[i].contains(&i), || format!("not reflexive: {}", nets[i]));
        for &j in &above[i] {
            if above[j].contains(&i) {
                rep.record(canon[i] == canon[j], || format!("not antisymmetric: {} and {}", nets[i], nets[j]));
            }
            for &k in &above[j] {
                rep.record(above[i].contains(&k), || {
                    format!("not transitive: {} <= {} <= {}", nets[i], nets[j], nets[k])
                });
            }
        }
    }
    rep
}

/// Idempotence, commutativity, associativity and the upper-bound property.
pub fn merge_laws(nets: &[Net]) -> LawReport {
    let mut rep = LawReport::default();
    for a in nets {
        rep.record(merge(a, a).as_ref() == Some(a), || format!("not idempotent: {a}"));
    }
    for a in nets {
        for b in nets {
            let ab = merge(a, b);
            rep.record(ab == merge(b, a), || format!("not commutative: {a} and {b}"));
            if let Some(m) = &ab {
                rep.record(leq(a, m) && leq(b, m), || format!("not an upper bound: {a} and {b} give {m}"));
            }
        }
    }
    let small: Vec<&Net> = nets.iter().filter(|e| e.size() <= 3).collect();
    for a in &small {
        for b in &small {
            for c in &small {
                let left = merge(a, b).and_then(|ab| merge(&ab, c));
                let right = merge(b, c).and_then(|bc| merge(a, &bc));
                rep.record(left == right, || format!("not associative: {a}, {b}, {c}"));
            }
        }
    }
    rep
}

/// Set expressions over `universe`, one location variable `a` and one set
/// variable `s`, of union depth at most `depth`.
pub fn enumerate_sets(universe: &[&str], depth: usize) -> Vec<LocSet> {
    let mut atoms: Vec<LocSet> = universe.iter().map(|l| LocSet::loc(l)).collect();
    atoms.push(LocSet::Sng(LocExpr::Var("a".into())));
    atoms.push(LocSet::Var("s".into()));
    let mut all = atoms.clone();
    for _ in 1..depth {
        let mut next = atoms.clone();
        for x in &all {
            for y in &all {
                next.push(LocSet::union(x.clone(), y.clone()));
            }
        }
        all = next;
    }
    all
}

struct Assignment {
    a: Name,
    s: BTreeSet<Name>,
}

fn denote(r: &LocSet, env: &Assignment) -> BTreeSet<Name> {
    match r {
        LocSet::Var(_) => env.s.clone(),
        LocSet::Sng(LocExpr::Var(_)) => [env.a.clone()].into_iter().collect(),
        LocSet::Sng(LocExpr::Concrete(l)) => [l.clone()].into_iter().collect(),
        LocSet::Union(x, y) => denote(x, env).union(&denote(y, env)).cloned().collect(),
    }
}

fn assignments(universe: &[&str]) -> Vec<Assignment> {
    let n = universe.len();
    let mut out = Vec::new();
    for a in universe {
        for mask in 1u32..(1 << n) {
            let s = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| Name::from(universe[i])).collect();
            out.push(Assignment { a: Name::from(*a), s });
        }
    }
    out
}

/// Location-set relations against the semantics: exact on ground sets,
/// sound on symbolic ones (necessary relations hold under every assignment,
/// possible membership of a concrete location covers every assignment).
pub fn locset_oracle(universe: &[&str], depth: usize) -> LawReport {
    let mut rep = LawReport::default();
    let sets = enumerate_sets(universe, depth);
    let envs = assignments(universe);
    let locs: Vec<LocExpr> = universe.iter().map(|l| LocExpr::concrete(l)).chain([LocExpr::Var("a".into())]).collect();
    let den: Vec<Vec<BTreeSet<Name>>> = sets.iter().map(|r| envs.iter().map(|e| denote(r, e)).collect()).collect();
    let loc_den = |l: &LocExpr, e: &Assignment| -> Name {
        match l {
            LocExpr::Concrete(n) => n.clone(),
            LocExpr::Var(_) => e.a.clone(),
        }
    };
    for (i, r) in sets.iter().enumerate() {
        let ground = r.is_ground();
        for l in &locs {
            let nec = nec_in(l, r);
            let pos = poss_in(l, r);
            let always = envs.iter().zip(&den[i]).all(|(e, d)| d.contains(&loc_den(l, e)));
            let sometimes = envs.iter().zip(&den[i]).any(|(e, d)| d.contains(&loc_den(l, e)));
            rep.record(!nec || pos, || format!("nec_in without poss_in: {l} in {r}"));
            rep.record(!nec || always, || format!("nec_in unsound: {l} in {r}"));
            // Possible membership is only complete for concrete elements: a
            // location variable is possibly in a set only through a variable.
            if l.is_ground() {
                rep.record(!sometimes || pos, || format!("poss_in incomplete: {l} in {r}"));
            }
            if ground && l.is_ground() {
                rep.record(nec == always && pos == always, || format!("ground membership wrong: {l} in {r}"));
            }
        }
        rep.record(subset(r, r), || format!("subset not reflexive: {r}"));
    }
    for (i, r1) in sets.iter().enumerate() {
        for (j, r2) in sets.iter().enumerate() {
            let sub = subset(r1, r2);
            let dis = disjoint(r1, r2);
            let sem_sub = den[i].iter().zip(&den[j]).all(|(a, b)| a.is_subset(b));
            let sem_dis = den[i].iter().zip(&den[j]).all(|(a, b)| a.is_disjoint(b));
            rep.record(!sub || sem_sub, || format!("subset unsound: {r1} <= {r2}"));
            rep.record(!dis || sem_dis, || format!("disjoint unsound: {r1}, {r2}"));
            if r1.is_ground() && r2.is_ground() {
                rep.record(sub == sem_sub, || format!("ground subset wrong: {r1} <= {r2}"));
                rep.record(dis == sem_dis, || format!("ground disjoint wrong: {r1}, {r2}"));
            }
        }
    }
    rep
}

/// Transitivity of `subset` over a bounded set of expressions.
pub fn subset_transitive(sets: &[LocSet]) -> LawReport {
    let mut rep = LawReport::default();
    let n = sets.len();
    let rel: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|j| subset(&sets[i], &sets[*j])).collect()).collect();
    for i in 0..n {
        for &j in &rel[i] {
            for &k in &rel[j] {
                rep.record(rel[i].binary_search(&k).is_ok(), || {
                    format!("subset not transitive: {} <= {} <= {}", sets[i], sets[j], sets[k])
                });
            }
        }
    }
    rep
}

fn drop_in(e: &Net, dir: Dir, done: &mut bool) -> Net {
    if *done {
        return e.clone();
    }
    if let Net::Allow { from, left: Some(l), right: Some(r) } = e {
        *done = true;
        return match dir {
            Dir::L => Net::Allow { from: from.clone(), left: None, right: Some(r.clone()) },
            Dir::R => Net::Allow { from: from.clone(), left: Some(l.clone()), right: None },
        };
    }
    e.map_children(&mut |c| drop_in(c, dir, done))
}

/// Remove the `dir` branch of the first two-sided offer at each location.
pub fn drop_sync_branch(sys: &System, dir: Dir) -> Option<System> {
    let mut any = false;
    let mut out = sys.clone();
    for e in out.procs.values_mut() {
        let mut done = false;
        *e = drop_in(e, dir, &mut done);
        any |= done;
    }
    any.then_some(out)
}

fn swap_in(e: &Net, done: &mut bool) -> Net {
    if *done {
        return e.clone();
    }
    if let Net::Choose(d, to, body) = e {
        *done = true;
        let flipped = match d {
            Dir::L => Dir::R,
            Dir::R => Dir::L,
        };
        return Net::Choose(flipped, to.clone(), body.clone());
    }
    e.map_children(&mut |c| swap_in(c, done))
}

/// Flip the direction of the first selection at each location.
pub fn swap_choices(sys: &System) -> Option<System> {
    let mut any = false;
    let mut out = sys.clone();
    for e in out.procs.values_mut() {
        let mut done = false;
        *e = swap_in(e, &mut done);
        any |= done;
    }
    any.then_some(out)
}
