//! Local variables live in location-indexed namespaces: an occurrence at
//! `ρ'.e` refers to the innermost enclosing `let ρ.x` with `ρ' ⊆ ρ`.

use alloc::vec::Vec;

use super::Chor;
use crate::locset::{disjoint, poss_in_diff, subset, LocSet, Name};

/// A free occurrence of a local variable inside `at.e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalOcc {
    pub x: Name,
    pub at: LocSet,
}

fn bound_by(binders: &[(Name, LocSet)], x: &str, at: &LocSet) -> bool {
    binders.iter().any(|(y, r)| y == x && subset(at, r))
}

/// Free local-variable occurrences, with the namespace they occur in.
pub fn local_occurrences(c: &Chor) -> Vec<LocalOcc> {
    let mut out = Vec::new();
    let mut binders = Vec::new();
    collect(c, &mut binders, &mut out);
    out
}

fn collect(c: &Chor, binders: &mut Vec<(Name, LocSet)>, out: &mut Vec<LocalOcc>) {
    match c {
        Chor::Done(at, e) => {
            for x in e.fv() {
                if !bound_by(binders, &x, at) {
                    out.push(LocalOcc { x, at: at.clone() });
                }
            }
        }
        Chor::LetLocal { at, x, head, body, .. } => {
            collect(head, binders, out);
            binders.push((x.clone(), at.clone()));
            collect(body, binders, out);
            binders.pop();
        }
        _ => {
            for ch in c.children() {
                collect(ch, binders, out);
            }
        }
    }
}

/// `x` occurs free in a namespace that may meet `s`.
pub fn free_in_overlap(c: &Chor, x: &str, s: &LocSet) -> bool {
    local_occurrences(c)
        .iter()
        .any(|o| o.x == x && !disjoint(&o.at, s))
}

/// `x` occurs free in a namespace that may meet `s` outside `r`.
pub fn free_in_diff(c: &Chor, x: &str, s: &LocSet, r: &LocSet) -> bool {
    local_occurrences(c)
        .iter()
        .any(|o| o.x == x && poss_in_diff(&o.at, s, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{LocalTerm, LocalType};

    #[test]
    fn inner_binder_hides_only_its_namespace() {
        let c = Chor::let_local(
            LocSet::loc("A"),
            "x",
            LocalType::Int,
            Chor::at("A", LocalTerm::int(1)),
            Chor::pair(
                Chor::at("A", LocalTerm::var("x")),
                Chor::at("B", LocalTerm::var("x")),
            ),
        );
        let occ = local_occurrences(&c);
        assert_eq!(occ, alloc::vec![LocalOcc { x: "x".into(), at: LocSet::loc("B") }]);
    }
}
