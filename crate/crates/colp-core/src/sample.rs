//! Observations of a categorical variable pair.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// n paired observations of categorical X (S levels) and Y (L levels),
/// stored as 0-based level indices with the original level names kept for
/// reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedSample {
    x: Vec<usize>,
    y: Vec<usize>,
    x_labels: Vec<String>,
    y_labels: Vec<String>,
}

impl PairedSample {
    /// Build from index vectors with declared level counts; labels default to
    /// the 1-based level numbers.
    pub fn new(x: Vec<usize>, y: Vec<usize>, s_levels: usize, l_levels: usize) -> Result<Self> {
        let numbered = |k: usize| (1..=k).map(|i| i.to_string()).collect();
        Self::with_labels(x, y, numbered(s_levels), numbered(l_levels))
    }

    /// Build with explicit level names; the label vectors define S and L.
    pub fn with_labels(
        x: Vec<usize>,
        y: Vec<usize>,
        x_labels: Vec<String>,
        y_labels: Vec<String>,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::SampleLengthMismatch {
                x_len: x.len(),
                y_len: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::EmptySample);
        }
        for &xi in &x {
            if xi >= x_labels.len() {
                return Err(Error::LevelOutOfRange {
                    axis: "x",
                    index: xi,
                    levels: x_labels.len(),
                });
            }
        }
        for &yi in &y {
            if yi >= y_labels.len() {
                return Err(Error::LevelOutOfRange {
                    axis: "y",
                    index: yi,
                    levels: y_labels.len(),
                });
            }
        }
        Ok(Self {
            x,
            y,
            x_labels,
            y_labels,
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Declared number of X levels (S).
    pub fn s_levels(&self) -> usize {
        self.x_labels.len()
    }

    /// Declared number of Y levels (L).
    pub fn l_levels(&self) -> usize {
        self.y_labels.len()
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    /// The same observations with the roles of X and Y exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            x_labels: self.y_labels.clone(),
            y_labels: self.x_labels.clone(),
        }
    }

    pub fn x_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.s_levels()];
        for &xi in &self.x {
            counts[xi] += 1;
        }
        counts
    }

    pub fn y_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.l_levels()];
        for &yi in &self.y {
            counts[yi] += 1;
        }
        counts
    }

    /// S x L table of joint observation counts.
    pub fn contingency(&self) -> Vec<Vec<usize>> {
        let mut table = vec![vec![0usize; self.l_levels()]; self.s_levels()];
        for (&xi, &yi) in self.x.iter().zip(&self.y) {
            table[xi][yi] += 1;
        }
        table
    }

    /// Number of distinct observed X levels.
    pub fn distinct_x(&self) -> usize {
        self.x_counts().iter().filter(|&&c| c > 0).count()
    }

    /// Number of distinct observed Y levels.
    pub fn distinct_y(&self) -> usize {
        self.y_counts().iter().filter(|&&c| c > 0).count()
    }
}
