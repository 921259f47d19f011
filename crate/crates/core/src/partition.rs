//! Integer partitions, used as Jordan types of torsion modules.

use crate::{Error, Result};
use std::fmt;

/// A partition: weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build from parts, which must be positive and weakly decreasing.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidInput("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "partition parts must be weakly decreasing".into(),
            ));
        }
        Ok(Partition { parts })
    }

    /// Build from parts in any order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.retain(|&p| p != 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    pub fn empty() -> Self {
        Partition { parts: vec![] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ| = Σ λ_i`.
    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// Number of parts; this is `t'` of the standard module of type `λ`.
    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Largest part, or 0 for the empty partition.
    pub fn max_part(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape() {
        assert!(Partition::new(vec![3, 2, 2, 1]).is_ok());
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        let p = Partition::from_unsorted(vec![1, 3, 0, 2]).unwrap();
        assert_eq!(p.parts(), &[3, 2, 1]);
        assert_eq!(p.size(), 6);
        assert_eq!(p.num_parts(), 3);
        assert_eq!(p.max_part(), 3);
    }
}
