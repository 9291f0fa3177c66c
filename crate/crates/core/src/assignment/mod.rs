//! Rectangular linear assignment: the optimal solution and Murty's ranked
//! enumeration of the k best.
//!
//! Every row (observation) must be assigned to a distinct column. Entries
//! that are non-finite or at least [`FORBIDDEN`] cannot be selected.

mod cluster;
mod lap;
mod murty;

pub use cluster::{kbest_decomposed, kbest_sparse};
pub use lap::solve_optimal;
pub use murty::murty_kbest;

use crate::error::{dims, Error, Result};
use crate::scalar::Real;

/// Costs at or above this value mark forbidden pairings.
pub const FORBIDDEN: f64 = 1e9;

#[inline]
pub(crate) fn is_forbidden<T: Real>(x: T) -> bool {
    !x.is_finite() || x >= T::lit(FORBIDDEN)
}

/// Dense row-major cost matrix with at least as many columns as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T: Real> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
    /// Number of leading "existing track" columns when the matrix follows the
    /// `[tracks | new-object diagonal]` layout.
    old_track_count: Option<usize>,
}

impl<T: Real> CostMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "cost matrix",
                expected: format!("{} entries", rows * cols),
                found: entries.len().to_string(),
            });
        }
        if rows > cols {
            return Err(Error::DimensionMismatch {
                context: "cost matrix (rows must not exceed columns)",
                expected: format!("cols >= {rows}"),
                found: dims(rows, cols),
            });
        }
        if entries.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain { what: "cost entry", value: f64::NAN });
        }
        Ok(Self { rows, cols, entries, old_track_count: None })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "cost matrix rows",
                expected: cols.to_string(),
                found: "ragged".into(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds the `M × (n_o + M)` matrix whose right block is diagonal:
    /// `track_costs[m][n]` for old track `n`, `new_costs[m]` at `(m, n_o + m)`.
    pub fn with_new_object_block(track_costs: &[Vec<T>], new_costs: &[T], old_track_count: usize) -> Result<Self> {
        let m = new_costs.len();
        if track_costs.len() != m || track_costs.iter().any(|r| r.len() != old_track_count) {
            return Err(Error::DimensionMismatch {
                context: "track cost block",
                expected: dims(m, old_track_count),
                found: format!("{} rows", track_costs.len()),
            });
        }
        let cols = old_track_count + m;
        let mut entries = vec![T::infinity(); m * cols];
        for (row, costs) in track_costs.iter().enumerate() {
            entries[row * cols..row * cols + old_track_count].copy_from_slice(costs);
            entries[row * cols + old_track_count + row] = new_costs[row];
        }
        let mut c = Self::new(m, cols, entries)?;
        c.old_track_count = Some(old_track_count);
        Ok(c)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn old_track_count(&self) -> Option<usize> {
        self.old_track_count
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.cols + col]
    }

    pub fn is_allowed(&self, row: usize, col: usize) -> bool {
        !is_forbidden(self.get(row, col))
    }

    /// Sum of the selected entries in row order, or `None` if any is forbidden.
    pub fn total_cost(&self, row_to_column: &[usize]) -> Option<T> {
        let mut total = T::zero();
        for (r, &c) in row_to_column.iter().enumerate() {
            let x = self.get(r, c);
            if is_forbidden(x) {
                return None;
            }
            total += x;
        }
        Some(total)
    }
}

/// Admissible `(column, cost)` pairs of each row, columns ascending.
///
/// Equivalent to a [`CostMatrix`] whose omitted entries are forbidden, and
/// much cheaper when most pairings are gated out.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCosts<T: Real> {
    cols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseCosts<T> {
    /// Forbidden entries are dropped. Columns must be strictly increasing
    /// within a row and below `cols`.
    pub fn new(cols: usize, mut rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        if rows.len() > cols {
            return Err(Error::DimensionMismatch {
                context: "sparse costs (rows must not exceed columns)",
                expected: format!("cols >= {}", rows.len()),
                found: dims(rows.len(), cols),
            });
        }
        for row in &mut rows {
            if row.iter().any(|(_, x)| x.is_nan()) {
                return Err(Error::Domain { what: "cost entry", value: f64::NAN });
            }
            if row.windows(2).any(|w| w[0].0 >= w[1].0) || row.last().is_some_and(|&(j, _)| j >= cols) {
                return Err(Error::DimensionMismatch {
                    context: "sparse cost row",
                    expected: format!("increasing columns below {cols}"),
                    found: format!("{:?}", row.iter().map(|e| e.0).collect::<Vec<_>>()),
                });
            }
            row.retain(|&(_, x)| !is_forbidden(x));
        }
        Ok(Self { cols, rows })
    }

    /// Rows already satisfying the invariants of [`SparseCosts::new`].
    pub(crate) fn from_parts(cols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        debug_assert!(rows.len() <= cols);
        debug_assert!(rows.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)
            && r.iter().all(|&(j, x)| j < cols && !is_forbidden(x))));
        Self { cols, rows }
    }

    pub fn from_dense(c: &CostMatrix<T>) -> Self {
        let rows = (0..c.rows())
            .map(|r| {
                (0..c.cols())
                    .map(|col| (col, c.get(r, col)))
                    .filter(|&(_, x)| !is_forbidden(x))
                    .collect()
            })
            .collect();
        Self { cols: c.cols(), rows }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, T)] {
        &self.rows[r]
    }

    pub(crate) fn adjacency(&self) -> &[Vec<(usize, T)>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        let entries = &self.rows[row];
        entries.binary_search_by_key(&col, |e| e.0).ok().map(|i| entries[i].1)
    }

    /// Sum of the selected entries in row order, or `None` if any is missing.
    pub fn total_cost(&self, row_to_column: &[usize]) -> Option<T> {
        let mut total = T::zero();
        for (r, &c) in row_to_column.iter().enumerate() {
            total += self.get(r, c)?;
        }
        Some(total)
    }
}

/// One complete row-to-column assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    pub row_to_column: Vec<usize>,
    pub total_cost: T,
}
