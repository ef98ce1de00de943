//! Brute-force reference for `SI~` on tiny instances: exhaustive grid search
//! over the free coordinates of every per-`s` transportation polytope,
//! followed by a shrinking coordinate search.

use std::collections::BTreeMap;

use super::BivariateInstance;
use crate::error::{argument, Error, Result};
use crate::prob::Outcome;

/// Largest free dimension allowed for a single value of `s`.
pub const MAX_ORACLE_BLOCK_DIM: usize = 4;

/// Largest number of grid points evaluated.
pub const MAX_ORACLE_POINTS: usize = 20_000_000;

const FEASIBLE_SLACK: f64 = 1e-12;
const FINEST_STEP: f64 = 1e-10;

struct Slice {
    s: Outcome,
    xs: Vec<Outcome>,
    ys: Vec<Outcome>,
    row: Vec<f64>,
    col: Vec<f64>,
}

impl Slice {
    fn free(&self) -> usize {
        (self.xs.len() - 1) * (self.ys.len() - 1)
    }

    /// Completes the free top-left entries to a full matrix; `None` when a
    /// completed entry is negative.
    fn complete(&self, free: &[f64]) -> Option<Vec<f64>> {
        let (m, n) = (self.xs.len(), self.ys.len());
        let mut q = vec![0.0; m * n];
        for i in 0..m - 1 {
            for j in 0..n - 1 {
                q[i * n + j] = free[i * (n - 1) + j];
            }
        }
        for i in 0..m - 1 {
            q[i * n + n - 1] = self.row[i] - (0..n - 1).map(|j| q[i * n + j]).sum::<f64>();
        }
        for j in 0..n - 1 {
            q[(m - 1) * n + j] = self.col[j] - (0..m - 1).map(|i| q[i * n + j]).sum::<f64>();
        }
        q[m * n - 1] = self.row[m - 1] - (0..n - 1).map(|j| q[(m - 1) * n + j]).sum::<f64>();
        if q.iter().any(|v| *v < -FEASIBLE_SLACK) {
            return None;
        }
        Some(q.into_iter().map(|v| v.max(0.0)).collect())
    }

    fn upper(&self) -> Vec<f64> {
        let n = self.ys.len();
        (0..self.free())
            .map(|k| self.row[k / (n - 1)].min(self.col[k % (n - 1)]))
            .collect()
    }
}

fn entropy<K: Ord>(table: &BTreeMap<K, f64>) -> f64 {
    table
        .values()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `I(S;X) − I(S;X|Y)` written out in joint entropies.
fn shared(slices: &[Slice], free: &[f64]) -> Option<f64> {
    let mut h: [BTreeMap<Vec<&Outcome>, f64>; 7] = Default::default();
    let mut offset = 0;
    for sl in slices {
        let k = sl.free();
        let q = sl.complete(&free[offset..offset + k])?;
        offset += k;
        let n = sl.ys.len();
        for (idx, p) in q.into_iter().enumerate() {
            let (x, y) = (&sl.xs[idx / n], &sl.ys[idx % n]);
            let keys = [
                vec![&sl.s],
                vec![x],
                vec![y],
                vec![&sl.s, x],
                vec![&sl.s, y],
                vec![x, y],
                vec![&sl.s, x, y],
            ];
            for (t, key) in h.iter_mut().zip(keys) {
                *t.entry(key).or_insert(0.0) += p;
            }
        }
    }
    let [s, x, y, sx, sy, xy, sxy] = h.map(|t| entropy(&t));
    Some((s + x - sx) - (sy + xy - sxy - y))
}

/// Best `SI~` found with `grid` points per free coordinate.
pub fn oracle_si_tilde(inst: &BivariateInstance, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(argument("oracle grid must have at least one point"));
    }
    let (s, x, y) = (inst.s(), inst.x(), inst.y());
    let sx = inst.dist().tabulate(&[&s, &x])?;
    let sy = inst.dist().tabulate(&[&s, &y])?;
    let mut slices: BTreeMap<Outcome, Slice> = BTreeMap::new();
    for (key, p) in &sx {
        let sl = slices.entry(key[0].clone()).or_insert_with(|| Slice {
            s: key[0].clone(),
            xs: vec![],
            ys: vec![],
            row: vec![],
            col: vec![],
        });
        sl.xs.push(key[1].clone());
        sl.row.push(*p);
    }
    for (key, p) in &sy {
        let sl = slices.get_mut(&key[0]).expect("same target support");
        sl.ys.push(key[1].clone());
        sl.col.push(*p);
    }
    let slices: Vec<Slice> = slices.into_values().collect();

    if let Some(sl) = slices.iter().find(|sl| sl.free() > MAX_ORACLE_BLOCK_DIM) {
        return Err(Error::Capacity(format!(
            "oracle block has {} free coordinates (limit {MAX_ORACLE_BLOCK_DIM})",
            sl.free()
        )));
    }
    let upper: Vec<f64> = slices.iter().flat_map(Slice::upper).collect();
    let dim = upper.len();
    let points = u32::try_from(dim)
        .ok()
        .and_then(|d| grid.checked_pow(d))
        .filter(|&p| p <= MAX_ORACLE_POINTS)
        .ok_or_else(|| Error::Capacity(format!("oracle grid {grid}^{dim} is too large")))?;

    let coord = |k: usize, i: usize| {
        if grid == 1 {
            upper[k] / 2.0
        } else {
            upper[k] * i as f64 / (grid - 1) as f64
        }
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut digits = vec![0usize; dim];
    let mut u = vec![0.0; dim];
    for _ in 0..points {
        for k in 0..dim {
            u[k] = coord(k, digits[k]);
        }
        if let Some(v) = shared(&slices, &u) {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, u.clone()));
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < grid {
                break;
            }
            *d = 0;
        }
    }
    let (mut value, mut u) = best.ok_or_else(|| Error::Consistency("oracle grid has no feasible point".into()))?;

    let mut step: Vec<f64> = upper
        .iter()
        .map(|w| w / (grid.max(2) - 1) as f64)
        .collect();
    while step.iter().any(|h| *h > FINEST_STEP) {
        let mut improved = false;
        for k in 0..dim {
            for dir in [1.0, -1.0] {
                let mut trial = u.clone();
                trial[k] = (u[k] + dir * step[k]).clamp(0.0, upper[k]);
                if let Some(v) = shared(&slices, &trial) {
                    if v > value {
                        value = v;
                        u = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|h| *h *= 0.5);
        }
    }
    Ok(value)
}
