//! Optimal sub-pattern assignment (OSPA) error between point sets.

use nalgebra::DVector;

use crate::assignment::{solve_optimal, CostMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// OSPA distance of order `p` with cutoff `c` between two sets of position
/// vectors, using Euclidean base distance.
pub fn ospa<T: Real>(x: &[DVector<T>], y: &[DVector<T>], c: T, p: T) -> Result<T> {
    Ok(ospa_components(x, y, c, p)?.total)
}

/// OSPA with its localization and cardinality parts. For `p = 1` the two
/// parts add up to the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OspaComponents<T> {
    pub total: T,
    pub localization: T,
    pub cardinality: T,
}

pub fn ospa_components<T: Real>(x: &[DVector<T>], y: &[DVector<T>], c: T, p: T) -> Result<OspaComponents<T>> {
    if !(c > T::zero()) {
        return Err(Error::Domain { what: "ospa cutoff c", value: c.as_f64() });
    }
    if !(p >= T::one()) {
        return Err(Error::Domain { what: "ospa order p", value: p.as_f64() });
    }
    let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let (m, n) = (small.len(), large.len());
    if n == 0 {
        return Ok(OspaComponents { total: T::zero(), localization: T::zero(), cardinality: T::zero() });
    }
    let mut entries = Vec::with_capacity(m * n);
    for a in small {
        for b in large {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    context: "ospa points",
                    expected: a.len().to_string(),
                    found: b.len().to_string(),
                });
            }
            entries.push((a - b).norm().min(c).powf(p));
        }
    }
    let matched = solve_optimal(&CostMatrix::new(m, n, entries)?)?.total_cost;
    let nf = T::lit(n as f64);
    let card = c.powf(p) * T::lit((n - m) as f64);
    let inv_p = T::one() / p;
    Ok(OspaComponents {
        total: ((matched + card) / nf).powf(inv_p),
        localization: (matched / nf).powf(inv_p),
        cardinality: (card / nf).powf(inv_p),
    })
}
