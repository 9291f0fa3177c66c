//! k-best assignment by splitting the admissible bipartite graph into
//! independent clusters.
//!
//! Gated cost matrices are very sparse: most observations can only pair with
//! a handful of columns. Ranking each connected cluster with Murty's method
//! and merging the per-cluster lists is equivalent to ranking the whole
//! matrix, and far cheaper.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::murty::MurtyStream;
use super::{Assignment, CostMatrix, SparseCosts};
use crate::scalar::Real;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Same contract as [`super::murty_kbest`], computed cluster by cluster.
pub fn kbest_decomposed<T: Real>(c: &CostMatrix<T>, k: usize) -> Vec<Assignment<T>> {
    kbest_sparse(&SparseCosts::from_dense(c), k)
}

/// [`kbest_decomposed`] on a sparse cost structure.
pub fn kbest_sparse<T: Real>(c: &SparseCosts<T>, k: usize) -> Vec<Assignment<T>> {
    if k == 0 {
        return Vec::new();
    }
    let (rows, cols) = (c.rows(), c.cols());
    if rows == 0 {
        return vec![Assignment { row_to_column: Vec::new(), total_cost: T::zero() }];
    }

    // Nodes 0..rows are rows, rows..rows+cols are columns.
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    for r in 0..rows {
        for &(col, _) in c.row(r) {
            let (a, b) = (find(&mut parent, r), find(&mut parent, rows + col));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    // Clusters in order of their first row.
    let mut cluster_of_root = vec![usize::MAX; rows + cols];
    let mut cluster_rows: Vec<Vec<usize>> = Vec::new();
    for r in 0..rows {
        let root = find(&mut parent, r);
        if cluster_of_root[root] == usize::MAX {
            cluster_of_root[root] = cluster_rows.len();
            cluster_rows.push(Vec::new());
        }
        cluster_rows[cluster_of_root[root]].push(r);
    }
    let mut cluster_cols: Vec<Vec<usize>> = vec![Vec::new(); cluster_rows.len()];
    let mut local_col = vec![usize::MAX; cols];
    for col in 0..cols {
        let ci = cluster_of_root[find(&mut parent, rows + col)];
        if ci != usize::MAX {
            local_col[col] = cluster_cols[ci].len();
            cluster_cols[ci].push(col);
        }
    }

    let mut ranked = Vec::with_capacity(cluster_rows.len());
    for (rs, cs) in cluster_rows.iter().zip(&cluster_cols) {
        if rs.len() > cs.len() {
            return Vec::new();
        }
        let local = rs
            .iter()
            .map(|&r| c.row(r).iter().map(|&(col, x)| (local_col[col], x)).collect())
            .collect();
        let sub = SparseCosts::from_parts(cs.len(), local);
        let mut stream = MurtyStream::new(sub);
        if stream.get(0).is_none() {
            return Vec::new();
        }
        ranked.push(stream);
    }

    let combos = kbest_index_tuples(&mut ranked, k);
    let mut out: Vec<Assignment<T>> = combos
        .into_iter()
        .map(|idx| {
            let mut row_to_column = vec![usize::MAX; rows];
            for (ci, &i) in idx.iter().enumerate() {
                let local = ranked[ci].get(i).expect("ranked entry exists");
                for (local_r, &local_c) in local.row_to_column.iter().enumerate() {
                    row_to_column[cluster_rows[ci][local_r]] = cluster_cols[ci][local_c];
                }
            }
            let total_cost = c.total_cost(&row_to_column).expect("admissible combination");
            Assignment { row_to_column, total_cost }
        })
        .collect();
    out.sort_by(|a, b| {
        a.total_cost
            .partial_cmp(&b.total_cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.row_to_column.cmp(&b.row_to_column))
    });
    out
}

struct Combo<T> {
    cost: T,
    idx: Vec<usize>,
    /// Only positions at or after this one may be advanced, so each tuple is
    /// generated from exactly one parent.
    pivot: usize,
}

impl<T: Real> PartialEq for Combo<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Combo<T> {}
impl<T: Real> PartialOrd for Combo<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Combo<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// A list of assignments sorted by cost, possibly produced on demand.
trait Ranked<T> {
    fn cost(&mut self, i: usize) -> Option<T>;
}

impl<T: Real> Ranked<T> for Vec<Assignment<T>> {
    fn cost(&mut self, i: usize) -> Option<T> {
        self.get(i).map(|a| a.total_cost)
    }
}

impl<T: Real> Ranked<T> for MurtyStream<T> {
    fn cost(&mut self, i: usize) -> Option<T> {
        self.get(i).map(|a| a.total_cost)
    }
}

/// The `k` smallest-sum index tuples picking one entry from each sorted,
/// nonempty list.
fn kbest_index_tuples<T: Real, L: Ranked<T>>(lists: &mut [L], k: usize) -> Vec<Vec<usize>> {
    let n = lists.len();
    let cost_of = |lists: &mut [L], idx: &[usize]| {
        idx.iter()
            .enumerate()
            .fold(T::zero(), |acc, (l, &i)| acc + lists[l].cost(i).expect("entry exists"))
    };
    let start = vec![0usize; n];
    let mut heap = BinaryHeap::new();
    heap.push(Combo { cost: cost_of(lists, &start), idx: start, pivot: 0 });
    let mut out = Vec::new();
    while let Some(Combo { idx, pivot, .. }) = heap.pop() {
        out.push(idx.clone());
        if out.len() >= k {
            break;
        }
        for q in pivot..n {
            if lists[q].cost(idx[q] + 1).is_some() {
                let mut next = idx.clone();
                next[q] += 1;
                heap.push(Combo { cost: cost_of(lists, &next), idx: next, pivot: q });
            }
        }
    }
    out
}
