use crate::error::{Error, Result};

/// A subset of `{0, …, n-1}` kept both as a sorted index list and a mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subset {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; n];
        for index in indices {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
            mask[index] = true;
        }
        Ok(Self::from_mask(mask))
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self { members, mask }
    }

    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self::from_mask((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    /// `{start, …, end}` clipped to the state space.
    pub fn range(n: usize, start: usize, end: usize) -> Self {
        Self::from_mask((0..n).map(|i| i >= start && i <= end).collect())
    }

    pub fn full(n: usize) -> Self {
        Self::from_mask(vec![true; n])
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        Self::from_mask(self.mask.iter().map(|m| !m).collect())
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.universe() == other.universe() && self.members.iter().all(|&i| other.contains(i))
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySubset)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_and_bits() {
        let s = Subset::from_bits(4, 0b0101);
        assert_eq!(s.members(), &[0, 2]);
        assert_eq!(s.complement().members(), &[1, 3]);
        assert!(Subset::range(5, 1, 2).is_subset_of(&Subset::range(5, 0, 3)));
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(
            Subset::new(3, [0, 3]),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        );
    }
}
