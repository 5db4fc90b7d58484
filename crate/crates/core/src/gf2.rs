//! Rank of sparse matrices over GF(2).
//!
//! Columns are stored as sorted lists of row indices. Reduction is the usual
//! "lowest one" column elimination: a column is added (symmetric difference)
//! to the earlier column owning the same pivot until its pivot is unique or
//! the column vanishes.

use std::collections::HashMap;

/// A sparse GF(2) matrix stored column by column.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<usize>>,
}

impl SparseMatrix {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            columns: Vec::new(),
        }
    }

    /// Appends a column given by its nonzero row indices. Repeated indices
    /// cancel in pairs.
    pub fn push_column(&mut self, entries: impl IntoIterator<Item = usize>) {
        let mut col: Vec<usize> = entries.into_iter().collect();
        debug_assert!(col.iter().all(|&r| r < self.rows));
        col.sort_unstable();
        let mut reduced: Vec<usize> = Vec::with_capacity(col.len());
        for r in col {
            if reduced.last() == Some(&r) {
                reduced.pop();
            } else {
                reduced.push(r);
            }
        }
        self.columns.push(reduced);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut rank = 0;
        for col in &self.columns {
            let mut col = col.clone();
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some(other) => col = symmetric_difference(&col, other),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivots.insert(low, col);
                rank += 1;
            }
        }
        rank
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
