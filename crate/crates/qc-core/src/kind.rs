use alloc::vec::Vec;

use crate::locset::Name;

/// Kinds of type variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Choreographic types.
    Chor,
    /// Local types.
    Local,
    /// Single locations.
    Loc,
    /// Location sets.
    Set,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Chor => "*",
            Kind::Local => "ty",
            Kind::Loc => "loc",
            Kind::Set => "locset",
        }
    }
}

/// Ordered kinding context; later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KindCtx {
    entries: Vec<(Name, Kind)>,
}

impl KindCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, a: &str) -> Option<Kind> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == a)
            .map(|(_, k)| *k)
    }

    pub fn push(&mut self, a: Name, k: Kind) {
        self.entries.push((a, k));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn with(&self, a: Name, k: Kind) -> Self {
        let mut c = self.clone();
        c.push(a, k);
        c
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }
}
