//! Exact linear algebra over the radical number field, shared by the
//! canonical-form extraction and the Jacobi/obstruction row reductions.

use alloc::vec::Vec;

use crate::exactnum::RadicalNumber;

/// Reduced row echelon form in place; returns the rank. Zero rows are
/// removed and every pivot is normalized to 1.
pub(crate) fn rref(rows: &mut Vec<Vec<RadicalNumber>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].inverse().expect("nonzero pivot");
        for c in col..cols {
            rows[pivot_row][c] = &rows[pivot_row][c] * &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &rows[pivot_row][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows.len()
}

/// Incremental exact solver for (typically overdetermined) systems
/// `A x = b`; rows are fed one at a time as `[a_0, …, a_{n-1}, b]`.
pub(crate) struct ExactSystem {
    cols: usize,
    /// pivot column and fully reduced row (length `cols + 1`)
    pivots: Vec<(usize, Vec<RadicalNumber>)>,
}

/// The fed rows admit no common solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Inconsistent;

impl ExactSystem {
    pub(crate) fn new(cols: usize) -> Self {
        ExactSystem {
            cols,
            pivots: Vec::new(),
        }
    }

    pub(crate) fn add_row(&mut self, mut row: Vec<RadicalNumber>) -> Result<(), Inconsistent> {
        debug_assert_eq!(row.len(), self.cols + 1);
        for (pc, pr) in &self.pivots {
            if !row[*pc].is_zero() {
                let factor = row[*pc].clone();
                for c in *pc..=self.cols {
                    let delta = &factor * &pr[c];
                    row[c] = &row[c] - &delta;
                }
            }
        }
        let Some(col) = (0..self.cols).find(|&c| !row[c].is_zero()) else {
            if row[self.cols].is_zero() {
                return Ok(());
            }
            return Err(Inconsistent);
        };
        let inv = row[col].inverse().expect("nonzero pivot");
        for c in col..=self.cols {
            row[c] = &row[c] * &inv;
        }
        for (_, pr) in self.pivots.iter_mut() {
            if !pr[col].is_zero() {
                let factor = pr[col].clone();
                for c in col..=self.cols {
                    let delta = &factor * &row[c];
                    pr[c] = &pr[c] - &delta;
                }
            }
        }
        self.pivots.push((col, row));
        Ok(())
    }

    /// Solution with free variables set to zero.
    pub(crate) fn solve(&self) -> Vec<RadicalNumber> {
        let mut x = alloc::vec![RadicalNumber::zero(); self.cols];
        for (pc, pr) in &self.pivots {
            x[*pc] = pr[self.cols].clone();
        }
        x
    }
}
