use serde::Serialize;

use crate::error::{Error, Result};

/// Strictly increasing zero-based indices drawn from `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    #[serde(skip)]
    universe: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, universe: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedIndexSet);
        }
        if let Some(&last) = indices.last() {
            if last >= universe {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    dim: universe,
                });
            }
        }
        Ok(Self { indices, universe })
    }

    /// All of `0..universe`.
    pub fn full(universe: usize) -> Self {
        Self {
            indices: (0..universe).collect(),
            universe,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Indices of `0..universe` not in the set.
    pub fn complement(&self) -> IndexSet {
        let indices = (0..self.universe).filter(|&i| !self.contains(i)).collect();
        IndexSet {
            indices,
            universe: self.universe,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_out_of_range() {
        assert!(matches!(
            IndexSet::new(vec![2, 1], 4),
            Err(Error::UnsortedIndexSet)
        ));
        assert!(matches!(
            IndexSet::new(vec![1, 1], 4),
            Err(Error::UnsortedIndexSet)
        ));
        assert!(matches!(
            IndexSet::new(vec![0, 4], 4),
            Err(Error::IndexOutOfRange { index: 4, dim: 4 })
        ));
    }

    #[test]
    fn complement_partitions_universe() {
        let s = IndexSet::new(vec![0, 2], 5).unwrap();
        assert_eq!(s.complement().indices(), &[1, 3, 4]);
        assert_eq!(IndexSet::full(3).complement().len(), 0);
    }
}
