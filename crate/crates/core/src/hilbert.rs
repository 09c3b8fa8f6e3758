use serde::{Deserialize, Serialize};
use std::fmt;

/// Dimensions of the graded pieces of a finite-dimensional graded algebra,
/// indexed by degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSeries(Vec<u64>);

impl HilbertSeries {
    /// Trailing zeros are dropped so that equal algebras compare equal.
    pub fn new(mut coefficients: Vec<u64>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        HilbertSeries(coefficients)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    pub fn coefficient(&self, degree: usize) -> u64 {
        self.0.get(degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Highest degree with a nonzero coefficient, `None` for the zero series.
    pub fn top_degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_palindromic(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    /// `true` when no zero coefficient is followed by a nonzero one, as must
    /// hold for an algebra generated in degree one.
    pub fn has_no_internal_gaps(&self) -> bool {
        match self.0.iter().position(|&c| c == 0) {
            None => true,
            Some(first_zero) => self.0[first_zero..].iter().all(|&c| c == 0),
        }
    }

    /// Coefficient-wise `self - other`, padded to the longer length.
    pub fn difference(&self, other: &HilbertSeries) -> Vec<i64> {
        let len = self.len().max(other.len());
        (0..len)
            .map(|d| self.coefficient(d) as i64 - other.coefficient(d) as i64)
            .collect()
    }
}

impl From<Vec<u64>> for HilbertSeries {
    fn from(v: Vec<u64>) -> Self {
        HilbertSeries::new(v)
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
