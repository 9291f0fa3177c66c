//! Murty's ranked assignment enumeration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::lap::{augment, solve_sparse, DualState, Workspace, NONE};
use super::{Assignment, CostMatrix, SparseCosts};
use crate::scalar::Real;

struct Node<T> {
    cost: T,
    /// Optimal assignment of this subproblem and its dual certificate.
    state: DualState<T>,
    /// Pinned `(row, column)` pairs, in row order.
    fixed: Vec<(usize, usize)>,
    excluded: Vec<(usize, usize)>,
}

impl<T: Real> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Node<T> {}

impl<T: Real> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Node<T> {
    // Reversed so that `BinaryHeap` pops the cheapest, then lexicographically
    // smallest, solution first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.state.row_col.cmp(&self.state.row_col))
    }
}

/// Lazily ranked assignments of a matrix, cheapest first.
///
/// Each subproblem of the partition differs from its parent by one excluded
/// pair and some pinned rows. The parent's optimal assignment without the
/// excluded row, together with the parent's duals, is optimal for the
/// remaining rows of the child, so a single augmenting path solves it.
pub(crate) struct MurtyStream<T: Real> {
    c: SparseCosts<T>,
    heap: BinaryHeap<Node<T>>,
    ranked: Vec<Assignment<T>>,
    ws: Workspace<T>,
}

impl<T: Real> MurtyStream<T> {
    pub(crate) fn new(c: SparseCosts<T>) -> Self {
        let mut heap = BinaryHeap::new();
        let mut ws = Workspace::new(c.cols());
        if let Some(state) = solve_sparse(c.cols(), c.adjacency(), &mut ws) {
            let cost = c.total_cost(&state.row_col).expect("admissible solution");
            heap.push(Node { cost, state, fixed: Vec::new(), excluded: Vec::new() });
        }
        Self { c, heap, ranked: Vec::new(), ws }
    }

    /// The `i`-th best assignment (0-based), computing it if needed.
    pub(crate) fn get(&mut self, i: usize) -> Option<&Assignment<T>> {
        while self.ranked.len() <= i {
            if !self.advance() {
                return None;
            }
        }
        Some(&self.ranked[i])
    }

    fn advance(&mut self) -> bool {
        let Some(node) = self.heap.pop() else {
            return false;
        };
        let (c, rows, cols) = (&self.c, self.c.rows(), self.c.cols());
        // Partition the node's solution space around its solution: subproblem
        // i pins the first i free rows and excludes the (i+1)-th pairing.
        let mut is_fixed = vec![false; rows];
        let mut taken = vec![false; cols];
        for &(r, col) in &node.fixed {
            is_fixed[r] = true;
            taken[col] = true;
        }
        let mut fixed = node.fixed.clone();
        for r in 0..rows {
            if is_fixed[r] {
                continue;
            }
            let col = node.state.row_col[r];
            let mut excluded = node.excluded.clone();
            excluded.push((r, col));
            let mut state = node.state.clone();
            state.row_col[r] = NONE;
            state.owner[col] = NONE;
            // Pinned rows can still be reached through a dummy relay; they must not move.
            let allowed = |row: usize, j: usize| !is_fixed[row] && !taken[j] && !excluded.contains(&(row, j));
            if augment(c.adjacency(), allowed, r, Some(col), &mut state, &mut self.ws) {
                let cost = c.total_cost(&state.row_col).expect("admissible solution");
                self.heap.push(Node { cost, state, fixed: fixed.clone(), excluded });
            }
            fixed.push((r, col));
            is_fixed[r] = true;
            taken[col] = true;
        }
        self.ranked.push(Assignment { row_to_column: node.state.row_col, total_cost: node.cost });
        true
    }

    pub(crate) fn into_ranked(self) -> Vec<Assignment<T>> {
        self.ranked
    }
}

/// The `k` lowest-cost assignments in nondecreasing cost order (fewer if the
/// feasible set is smaller). The first equals [`super::solve_optimal`].
pub fn murty_kbest<T: Real>(c: &CostMatrix<T>, k: usize) -> Vec<Assignment<T>> {
    if k == 0 {
        return Vec::new();
    }
    let mut stream = MurtyStream::new(SparseCosts::from_dense(c));
    stream.get(k - 1);
    let mut out = stream.into_ranked();
    out.truncate(k);
    out.sort_by(|a, b| {
        a.total_cost
            .partial_cmp(&b.total_cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.row_to_column.cmp(&b.row_to_column))
    });
    out
}
