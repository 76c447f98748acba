use alloc::vec::Vec;

use crate::{BiMatrix, Error, Result};

/// An eventually periodic sequence of row indices: `prefix` followed by
/// `cycle` repeated forever.
///
/// On a finite index set every net has its limit superior realized by such
/// a sequence, so this is the only sequence model needed here.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexSequence {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl IndexSequence {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Self { prefix, cycle })
    }

    pub fn constant(index: usize) -> Self {
        Self {
            prefix: Vec::new(),
            cycle: alloc::vec![index],
        }
    }

    /// Checks the sequence against a matrix's row count.
    pub fn validate_for(&self, f: &BiMatrix) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        let len = f.rows();
        match self.prefix.iter().chain(&self.cycle).find(|&&i| i >= len) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len }),
            None => Ok(()),
        }
    }

    /// The `k`-th term of the sequence.
    pub fn term(&self, k: usize) -> usize {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_empty_cycle() {
        assert_eq!(IndexSequence::new(vec![0], vec![]).unwrap_err(), Error::EmptyCycle);
    }

    #[test]
    fn terms_wrap_around_the_cycle() {
        let s = IndexSequence::new(vec![7], vec![1, 2]).unwrap();
        let terms: Vec<usize> = (0..6).map(|k| s.term(k)).collect();
        assert_eq!(terms, vec![7, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn out_of_range_index() {
        let f = crate::validate_bimatrix(&[vec![0.0], vec![1.0]]).unwrap();
        let s = IndexSequence::new(vec![5], vec![0]).unwrap();
        assert_eq!(
            s.validate_for(&f).unwrap_err(),
            Error::IndexOutOfRange { index: 5, len: 2 }
        );
    }
}
