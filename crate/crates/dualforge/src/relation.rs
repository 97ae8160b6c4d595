use crate::error::{Error, Result};

/// A finite k-ary relation: a lexicographically sorted, duplicate-free list
/// of k-tuples over some universe `0..n-1`. The canonical tuple order makes
/// relation values comparable independently of how they were discovered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(arity: usize, mut tuples: Vec<Vec<usize>>) -> Result<Relation> {
        if arity == 0 {
            return Err(Error::ArityMismatch("relation arity must be >= 1".into()));
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch(format!(
                    "tuple {:?} has length {}, expected {}",
                    t,
                    t.len(),
                    arity
                )));
            }
        }
        tuples.sort();
        tuples.dedup();
        Ok(Relation { arity, tuples })
    }

    /// The diagonal relation on a universe of the given size.
    pub fn diagonal(size: usize) -> Relation {
        Relation { arity: 2, tuples: (0..size).map(|i| vec![i, i]).collect() }
    }

    /// The full binary relation on a universe of the given size.
    pub fn full_binary(size: usize) -> Relation {
        let mut tuples = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                tuples.push(vec![a, b]);
            }
        }
        Relation { arity: 2, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }

    pub fn max_entry(&self) -> Option<usize> {
        self.tuples.iter().flat_map(|t| t.iter().copied()).max()
    }

    /// Binary only: swap the two coordinates of every tuple.
    pub fn converse(&self) -> Result<Relation> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch("converse needs a binary relation".into()));
        }
        Relation::new(2, self.tuples.iter().map(|t| vec![t[1], t[0]]).collect())
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch("intersecting relations of different arity".into()));
        }
        let tuples = self.tuples.iter().filter(|t| other.contains(t)).cloned().collect();
        Relation::new(self.arity, tuples)
    }

    /// Binary only: `(a,a)` present for every `a` in `0..size`.
    pub fn is_reflexive(&self, size: usize) -> bool {
        self.arity == 2 && (0..size).all(|a| self.contains(&[a, a]))
    }

    /// Binary only: `(a,b)` and `(b,a)` both present forces `a == b`.
    pub fn is_antisymmetric(&self) -> bool {
        self.arity == 2
            && self
                .tuples
                .iter()
                .all(|t| t[0] == t[1] || !self.contains(&[t[1], t[0]]))
    }

    /// Binary only: is every tuple on the diagonal?
    pub fn subset_of_diagonal(&self) -> bool {
        self.arity == 2 && self.tuples.iter().all(|t| t[0] == t[1])
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.iter().all(|t| other.contains(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_dedup() {
        let r = Relation::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(r.tuples(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn reflexive_antisymmetric() {
        let leq = Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(leq.is_reflexive(2));
        assert!(leq.is_antisymmetric());
        let sym = Relation::new(2, vec![vec![0, 1], vec![1, 0], vec![0, 0], vec![1, 1]]).unwrap();
        assert!(!sym.is_antisymmetric());
    }

    #[test]
    fn converse_and_intersect() {
        let leq = Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let geq = leq.converse().unwrap();
        assert!(geq.contains(&[1, 0]));
        let diag = leq.intersect(&geq).unwrap();
        assert_eq!(diag, Relation::diagonal(2));
    }

    #[test]
    fn arity_checked() {
        assert!(Relation::new(2, vec![vec![0, 1, 2]]).is_err());
        assert!(Relation::new(0, vec![]).is_err());
    }
}
