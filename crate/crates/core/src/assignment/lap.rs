//! Shortest augmenting path solver (Jonker-Volgenant / Hungarian with
//! potentials) for rectangular problems with forbidden entries.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{is_forbidden, Assignment, CostMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum-cost assignment of every row to a distinct column.
pub fn solve_optimal<T: Real>(c: &CostMatrix<T>) -> Result<Assignment<T>> {
    let row_to_column = solve_with(c.rows(), c.cols(), |r, col| c.get(r, col))?;
    let total_cost = c
        .total_cost(&row_to_column)
        .expect("solver selects admissible entries only");
    Ok(Assignment { row_to_column, total_cost })
}

/// Runs the solver on an implicit `rows × cols` matrix. Forbidden entries of
/// `cost` are never selected.
pub(crate) fn solve_with<T: Real>(
    rows: usize,
    cols: usize,
    cost: impl Fn(usize, usize) -> T,
) -> Result<Vec<usize>> {
    let inf = T::infinity();
    let mut dense = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let x = cost(r, c);
            dense.push(if is_forbidden(x) { inf } else { x });
        }
    }
    solve_dense(rows, cols, &dense)
}

/// Row-major `rows × cols` costs where forbidden entries are `+inf`.
pub(crate) fn solve_dense<T: Real>(rows: usize, cols: usize, cost: &[T]) -> Result<Vec<usize>> {
    debug_assert_eq!(cost.len(), rows * cols);
    if rows == 0 {
        return Ok(Vec::new());
    }
    if rows > cols {
        return Err(Error::Infeasible { row: cols });
    }
    let inf = T::infinity();

    // Columns are 1-based; column 0 is the virtual root of each search.
    let mut u = vec![T::zero(); rows + 1];
    let mut v = vec![T::zero(); cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut minv = vec![inf; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(inf);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = &cost[(i0 - 1) * cols..i0 * cols];
            let ui = u[i0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for (j, &a) in row.iter().enumerate() {
                let j = j + 1;
                if used[j] {
                    continue;
                }
                if a < inf {
                    let cur = a - ui - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if delta == inf {
                return Err(Error::Infeasible { row: i - 1 });
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else if minv[j] < inf {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_column = vec![usize::MAX; rows];
    for j in 1..=cols {
        if owner[j] != 0 {
            row_to_column[owner[j] - 1] = j - 1;
        }
    }
    Ok(row_to_column)
}

struct Label<T> {
    dist: T,
    col: usize,
}

impl<T: Real> PartialEq for Label<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Label<T> {}
impl<T: Real> PartialOrd for Label<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Label<T> {
    // Min-heap on distance, then column index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.col.cmp(&self.col))
    }
}

pub(crate) const NONE: usize = usize::MAX;
const HUB: usize = usize::MAX - 1;

/// A partial assignment with dual potentials. Every matched pair has zero
/// reduced cost `c - u - v` and every admissible pair a nonnegative one.
#[derive(Debug, Clone)]
pub(crate) struct DualState<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    /// Column matched to each row, or `NONE`.
    pub row_col: Vec<usize>,
    /// Row matched to each column, or `NONE`.
    pub owner: Vec<usize>,
}

impl<T: Real> DualState<T> {
    pub(crate) fn empty(rows: usize, cols: usize) -> Self {
        Self { u: vec![T::zero(); rows], v: vec![T::zero(); cols], row_col: vec![NONE; rows], owner: vec![NONE; cols] }
    }
}

/// Scratch buffers for [`augment`], reusable across calls on one matrix.
pub(crate) struct Workspace<T> {
    dist: Vec<T>,
    pred: Vec<usize>,
    done: Vec<bool>,
    touched: Vec<usize>,
    finals: Vec<usize>,
    heap: BinaryHeap<Label<T>>,
}

impl<T: Real> Workspace<T> {
    pub(crate) fn new(cols: usize) -> Self {
        Self {
            dist: vec![T::infinity(); cols],
            pred: vec![NONE; cols],
            done: vec![false; cols],
            touched: Vec::new(),
            finals: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        let inf = T::infinity();
        for &j in &self.touched {
            self.dist[j] = inf;
            self.done[j] = false;
        }
        self.touched.clear();
        self.finals.clear();
        self.heap.clear();
    }
}

/// Extends the assignment by the unmatched row `i0` along a shortest
/// augmenting path over the pairs accepted by `allowed`, keeping the duals
/// feasible. `adj[r]` lists the admissible `(column, cost)` pairs of row `r`.
/// Returns `false` (leaving `state` untouched) when no augmenting path exists.
///
/// Unmatched columns behave as if held by zero-cost dummy rows, so they all
/// carry the largest column potential. `freed` names an unmatched column
/// whose potential may be lower (it was just released by `i0`); the path then
/// has to end there, possibly relaying through a dummy row.
pub(crate) fn augment<T: Real>(
    adj: &[Vec<(usize, T)>],
    allowed: impl Fn(usize, usize) -> bool,
    i0: usize,
    freed: Option<usize>,
    state: &mut DualState<T>,
    ws: &mut Workspace<T>,
) -> bool {
    debug_assert_eq!(state.row_col[i0], NONE);
    let DualState { u, v, row_col, owner } = state;
    // Most paths end at the first column reached; skip the heap when the
    // cheapest column of `i0` is already free.
    let mut best = (T::infinity(), NONE);
    for &(j, c) in &adj[i0] {
        if allowed(i0, j) {
            let d = c - u[i0] - v[j];
            if d < best.0 {
                best = (d, j);
            }
        }
    }
    match best {
        (_, NONE) => return false,
        (d, j) if owner[j] == NONE && freed.map_or(true, |f| f == j || v[f] >= v[j]) => {
            u[i0] += d;
            row_col[i0] = j;
            owner[j] = i0;
            return true;
        }
        _ => {}
    }
    ws.reset();
    for &(j, c) in &adj[i0] {
        if !allowed(i0, j) {
            continue;
        }
        let d = c - u[i0] - v[j];
        if d < ws.dist[j] {
            if !ws.done[j] && ws.dist[j] == T::infinity() {
                ws.touched.push(j);
            }
            ws.dist[j] = d;
            ws.pred[j] = i0;
            ws.heap.push(Label { dist: d, col: j });
        }
    }
    let mut sink = NONE;
    let mut hub = NONE;
    while let Some(Label { dist: dj, col: j }) = ws.heap.pop() {
        if ws.done[j] || dj > ws.dist[j] {
            continue;
        }
        ws.done[j] = true;
        ws.finals.push(j);
        let i = owner[j];
        if i == NONE {
            if freed.map_or(true, |f| f == j) {
                sink = j;
                break;
            }
            if hub == NONE {
                hub = j;
                let top = v[j];
                for j2 in 0..v.len() {
                    if ws.done[j2] {
                        continue;
                    }
                    if owner[j2] == NONE && freed != Some(j2) {
                        // Other dummy-held columns are final at the hub distance.
                        if ws.dist[j2] == T::infinity() {
                            ws.touched.push(j2);
                        }
                        ws.dist[j2] = dj;
                        ws.done[j2] = true;
                        ws.finals.push(j2);
                        continue;
                    }
                    let d = dj + (top - v[j2]).max(T::zero());
                    if d < ws.dist[j2] {
                        if ws.dist[j2] == T::infinity() {
                            ws.touched.push(j2);
                        }
                        ws.dist[j2] = d;
                        ws.pred[j2] = HUB;
                        ws.heap.push(Label { dist: d, col: j2 });
                    }
                }
            }
            continue;
        }
        for &(j2, c) in &adj[i] {
            if ws.done[j2] || !allowed(i, j2) {
                continue;
            }
            let d = dj + c - u[i] - v[j2];
            if d < ws.dist[j2] {
                if ws.dist[j2] == T::infinity() {
                    ws.touched.push(j2);
                }
                ws.dist[j2] = d;
                ws.pred[j2] = i;
                ws.heap.push(Label { dist: d, col: j2 });
            }
        }
    }
    if sink == NONE {
        return false;
    }
    let total = ws.dist[sink];
    for &j in &ws.finals {
        let slack = total - ws.dist[j];
        v[j] -= slack;
        if owner[j] != NONE {
            u[owner[j]] += slack;
        }
    }
    u[i0] += total;
    let mut j = sink;
    loop {
        let i = ws.pred[j];
        if i == HUB {
            // A dummy row leaves `hub` for `j`.
            owner[j] = NONE;
            j = hub;
            continue;
        }
        let prev = row_col[i];
        owner[j] = i;
        row_col[i] = j;
        if i == i0 {
            break;
        }
        j = prev;
    }
    true
}

/// Sparse solver: `adj[r]` lists the admissible `(column, cost)` pairs of
/// row `r`. Work scales with the number of admissible entries rather than
/// with `rows × cols`. `None` when no complete assignment exists.
pub(crate) fn solve_sparse<T: Real>(
    cols: usize,
    adj: &[Vec<(usize, T)>],
    ws: &mut Workspace<T>,
) -> Option<DualState<T>> {
    let rows = adj.len();
    if rows > cols {
        return None;
    }
    let mut state = DualState::empty(rows, cols);
    for i0 in 0..rows {
        if !augment(adj, |_, _| true, i0, None, &mut state, ws) {
            return None;
        }
    }
    Some(state)
}
