use alloc::vec::{self, Vec};
use core::hash::BuildHasher;
use core::slice;

use hashbrown::{DefaultHashBuilder, HashTable};

use crate::dsl::Transformation;

/// A set of candidate transformations keyed by their rendering.
///
/// Iteration follows insertion order. Equality compares contents only.
#[derive(Clone, Debug, Default)]
pub struct Pool {
    items: Vec<Transformation>,
    index: HashTable<usize>,
    hasher: DefaultHashBuilder,
}

impl Pool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Pool { items: Vec::with_capacity(capacity), index: HashTable::with_capacity(capacity), ..Self::default() }
    }

    fn find(&self, rendering: &str) -> Option<usize> {
        let hash = self.hasher.hash_one(rendering);
        self.index.find(hash, |&i| self.items[i].as_str() == rendering).copied()
    }

    /// Adds `t`; returns false if an identical rendering was already present.
    pub fn insert(&mut self, t: Transformation) -> bool {
        let hash = self.hasher.hash_one(t.as_str());
        if self.contains_hashed(hash, t.as_str()) {
            return false;
        }
        self.push_hashed(hash, t);
        true
    }

    /// Adds the transformation built by `make` unless `rendering` is already
    /// present; `make` must produce a transformation with that rendering.
    pub fn insert_with(&mut self, rendering: &str, make: impl FnOnce() -> Transformation) -> bool {
        let hash = self.hasher.hash_one(rendering);
        if self.contains_hashed(hash, rendering) {
            return false;
        }
        let t = make();
        debug_assert_eq!(t.as_str(), rendering);
        self.push_hashed(hash, t);
        true
    }

    fn contains_hashed(&self, hash: u64, rendering: &str) -> bool {
        self.index.find(hash, |&i| self.items[i].as_str() == rendering).is_some()
    }

    fn push_hashed(&mut self, hash: u64, t: Transformation) {
        let (items, hasher) = (&self.items, &self.hasher);
        self.index.insert_unique(hash, items.len(), |&i| hasher.hash_one(items[i].as_str()));
        self.items.push(t);
    }

    /// Keeps the entries before `from` followed by the lexicographically
    /// smallest entries after it, in rendering order, `len` entries in total.
    pub(crate) fn sort_tail_and_truncate(&mut self, from: usize, len: usize) {
        if len < self.items.len() {
            self.items[from..].select_nth_unstable(len - from);
            self.items.truncate(len);
        }
        self.items[from..].sort_unstable();
        self.index.clear();
        let (items, hasher) = (&self.items, &self.hasher);
        for i in 0..items.len() {
            self.index.insert_unique(hasher.hash_one(items[i].as_str()), i, |&j| hasher.hash_one(items[j].as_str()));
        }
    }

    pub fn contains(&self, t: &Transformation) -> bool {
        self.find(t.as_str()).is_some()
    }

    pub fn contains_rendering(&self, rendering: &str) -> bool {
        self.find(rendering).is_some()
    }

    pub fn get(&self, rendering: &str) -> Option<&Transformation> {
        self.find(rendering).map(|i| &self.items[i])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Transformations in insertion order.
    pub fn iter(&self) -> slice::Iter<'_, Transformation> {
        self.items.iter()
    }

    pub fn renderings(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(Transformation::as_str)
    }

    pub fn is_subset(&self, other: &Pool) -> bool {
        self.len() <= other.len() && self.iter().all(|t| other.contains(t))
    }
}

impl PartialEq for Pool {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }
}

impl Eq for Pool {}

impl Extend<Transformation> for Pool {
    fn extend<I: IntoIterator<Item = Transformation>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Transformation> for Pool {
    fn from_iter<I: IntoIterator<Item = Transformation>>(iter: I) -> Self {
        let mut pool = Pool::new();
        pool.extend(iter);
        pool
    }
}

impl IntoIterator for Pool {
    type Item = Transformation;
    type IntoIter = vec::IntoIter<Transformation>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a Pool {
    type Item = &'a Transformation;
    type IntoIter = slice::Iter<'a, Transformation>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
