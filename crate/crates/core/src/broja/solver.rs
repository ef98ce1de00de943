//! Entropic mirror ascent on the per-`s` transportation polytopes.
//!
//! Each step multiplies `Q` entrywise by `2^(t·∇H)` and maps the result back
//! onto the polytope by its Kullback–Leibler projection. Multiplicative
//! steps keep every entry positive and take relative rather than absolute
//! steps, which matches the `1/q` curvature of the entropy near the boundary.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::Cells;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 10_000;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1e4;
const STALL_LIMIT: usize = 5;
/// Exponents are clipped here so no entry underflows to zero.
const MIN_EXPONENT: f64 = -200.0;
const SCALING_RESIDUAL: f64 = 1e-13;
const SINKHORN_SWEEPS: usize = 20;
const NEWTON_ROUNDS: usize = 100;
const SINKHORN_FALLBACK: usize = 10_000;

/// One value of `s`: a `rows × cols` matrix of masses `q(s,x,y)` with row sums
/// `P(s,x)` and column sums `P(s,y)`. Rows and columns where `P` vanishes are
/// left out, which pins those coordinates of `Q` to zero.
struct Block {
    s: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    r: Vec<f64>,
    c: Vec<f64>,
}

impl Block {
    fn is_fixed(&self) -> bool {
        self.rows.len() == 1 || self.cols.len() == 1
    }
}

type Point = Vec<Vec<f64>>;

pub(crate) struct Problem {
    ny: usize,
    nxy: usize,
    blocks: Vec<Block>,
}

impl Problem {
    pub fn new(cells: &Cells) -> Self {
        let mut sx: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut sy: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(s, x, y, p) in &cells.entries {
            *sx.entry((s, x)).or_default() += p;
            *sy.entry((s, y)).or_default() += p;
        }
        let blocks = (0..cells.s_vals.len())
            .map(|s| {
                let (rows, r) = sx.range((s, 0)..(s + 1, 0)).map(|(&(_, x), &p)| (x, p)).unzip();
                let (cols, c) = sy.range((s, 0)..(s + 1, 0)).map(|(&(_, y), &p)| (y, p)).unzip();
                Block { s, rows, cols, r, c }
            })
            .collect();
        Self {
            ny: cells.y_vals.len(),
            nxy: cells.x_vals.len() * cells.y_vals.len(),
            blocks,
        }
    }

    fn qstar(&self) -> Point {
        self.blocks
            .iter()
            .map(|b| {
                let ps: f64 = b.r.iter().sum();
                b.r.iter()
                    .flat_map(|ri| b.c.iter().map(move |cj| ri * cj / ps))
                    .collect()
            })
            .collect()
    }

    fn xy_marginal(&self, q: &Point) -> Vec<f64> {
        let mut m = vec![0.0; self.nxy];
        for (b, qb) in self.blocks.iter().zip(q) {
            let n = b.cols.len();
            for (k, v) in qb.iter().enumerate() {
                m[b.rows[k / n] * self.ny + b.cols[k % n]] += v;
            }
        }
        m
    }

    /// `H_Q(S | X, Y)` in bits.
    fn objective(&self, q: &Point) -> f64 {
        let qxy = self.xy_marginal(q);
        let mut h = 0.0;
        for (b, qb) in self.blocks.iter().zip(q) {
            let n = b.cols.len();
            for (k, &v) in qb.iter().enumerate() {
                if v > 0.0 {
                    h -= v * (v / qxy[b.rows[k / n] * self.ny + b.cols[k % n]]).log2();
                }
            }
        }
        h
    }

    /// `∂H/∂q(s,x,y) = −log2 q(s|x,y)`.
    fn gradient(&self, q: &Point) -> Point {
        let qxy = self.xy_marginal(q);
        self.blocks
            .iter()
            .zip(q)
            .map(|(b, qb)| {
                let n = b.cols.len();
                qb.iter()
                    .enumerate()
                    .map(|(k, &v)| -(v / qxy[b.rows[k / n] * self.ny + b.cols[k % n]]).log2())
                    .collect()
            })
            .collect()
    }

    fn step(&self, q: &Point, g: &Point, t: f64) -> Point {
        self.blocks
            .iter()
            .zip(q.iter().zip(g))
            .map(|(b, (qb, gb))| {
                if b.is_fixed() {
                    return qb.clone();
                }
                let top = gb.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let z: Vec<f64> = qb
                    .iter()
                    .zip(gb)
                    .map(|(v, d)| v * (t * (d - top)).max(MIN_EXPONENT).exp2())
                    .collect();
                kl_project(&z, &b.r, &b.c)
            })
            .collect()
    }

    pub fn maximize(&self, tol: f64) -> Result<Point> {
        let mut q = self.qstar();
        if self.blocks.iter().all(Block::is_fixed) {
            return Ok(q);
        }
        let mut f = self.objective(&q);
        let mut t: f64 = 1.0;
        let mut stalled = 0;
        for _ in 0..MAX_ITERATIONS {
            let g = self.gradient(&q);
            let accepted = loop {
                if t < MIN_STEP {
                    break None;
                }
                let cand = self.step(&q, &g, t);
                let rise = inner(&g, &cand, &q);
                let fc = self.objective(&cand);
                if fc >= f + ARMIJO * rise {
                    break Some((cand, fc));
                }
                t *= 0.5;
            };
            let Some((cand, fc)) = accepted else {
                return Ok(q);
            };
            let gain = fc - f;
            q = cand;
            f = fc;
            if gain < tol * 1e-3 {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    return Ok(q);
                }
            } else {
                stalled = 0;
            }
            t = (2.0 * t).min(MAX_STEP);
        }
        Err(Error::Convergence {
            iterations: MAX_ITERATIONS,
            best: f,
        })
    }

    pub fn entries<'a>(&'a self, q: &'a Point) -> impl Iterator<Item = (usize, usize, usize, f64)> + 'a {
        self.blocks.iter().zip(q).flat_map(|(b, qb)| {
            let n = b.cols.len();
            qb.iter()
                .enumerate()
                .filter(|(_, v)| **v > 0.0)
                .map(move |(k, &v)| (b.s, b.rows[k / n], b.cols[k % n], v))
        })
    }
}

fn inner(g: &Point, a: &Point, b: &Point) -> f64 {
    g.iter()
        .flatten()
        .zip(a.iter().flatten().zip(b.iter().flatten()))
        .map(|(g, (a, b))| g * (a - b))
        .sum()
}

/// Kullback–Leibler projection of the positive row-major matrix `z` onto
/// the matrices with row sums `r` and column sums `c`.
///
/// The projection has the form `z_ij · e^(α_i + β_j)`. A few Sinkhorn sweeps
/// give a starting point; Newton's method on the convex dual
/// `φ(α, β) = Σ z_ij e^(α_i+β_j) − Σ r_i α_i − Σ c_j β_j` then finishes,
/// since Sinkhorn alone slows down arbitrarily near a vertex.
pub(crate) fn kl_project(z: &[f64], r: &[f64], c: &[f64]) -> Vec<f64> {
    let (m, n) = (r.len(), c.len());
    let total: f64 = r.iter().sum();
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; n];
    let scaled = |alpha: &[f64], beta: &[f64]| -> Vec<f64> {
        (0..m * n)
            .map(|k| z[k] * (alpha[k / n] + beta[k % n]).exp())
            .collect()
    };
    let sinkhorn = |alpha: &mut [f64], beta: &mut [f64]| {
        let q = scaled(alpha, beta);
        for i in 0..m {
            alpha[i] += (r[i] / q[i * n..(i + 1) * n].iter().sum::<f64>()).ln();
        }
        let q = scaled(alpha, beta);
        for j in 0..n {
            beta[j] += (c[j] / (0..m).map(|i| q[i * n + j]).sum::<f64>()).ln();
        }
    };
    let residual = |q: &[f64]| -> f64 {
        let rows = (0..m).map(|i| (q[i * n..(i + 1) * n].iter().sum::<f64>() - r[i]).abs());
        let cols = (0..n).map(|j| ((0..m).map(|i| q[i * n + j]).sum::<f64>() - c[j]).abs());
        rows.chain(cols).sum()
    };
    for _ in 0..SINKHORN_SWEEPS {
        sinkhorn(&mut alpha, &mut beta);
    }

    // β_(n−1) stays fixed: the dual is invariant under α + t, β − t.
    let dim = m + n - 1;
    let dual = |alpha: &[f64], beta: &[f64]| -> f64 {
        scaled(alpha, beta).iter().sum::<f64>()
            - r.iter().zip(alpha).map(|(a, b)| a * b).sum::<f64>()
            - c.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut q = scaled(&alpha, &beta);
    'newton: for _ in 0..NEWTON_ROUNDS {
        if residual(&q) <= SCALING_RESIDUAL * total {
            return q;
        }
        let rows: Vec<f64> = (0..m).map(|i| q[i * n..(i + 1) * n].iter().sum()).collect();
        let cols: Vec<f64> = (0..n).map(|j| (0..m).map(|i| q[i * n + j]).sum()).collect();
        let mut h = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for i in 0..m {
            h[(i, i)] = rows[i];
            rhs[i] = r[i] - rows[i];
            for j in 0..n - 1 {
                h[(i, m + j)] = q[i * n + j];
                h[(m + j, i)] = q[i * n + j];
            }
        }
        for j in 0..n - 1 {
            h[(m + j, m + j)] = cols[j];
            rhs[m + j] = c[j] - cols[j];
        }
        let Some(d) = h.lu().solve(&rhs) else { break };
        let before = dual(&alpha, &beta);
        let mut step = 1.0;
        loop {
            let a: Vec<f64> = (0..m).map(|i| alpha[i] + step * d[i]).collect();
            let mut b = beta.clone();
            (0..n - 1).for_each(|j| b[j] += step * d[m + j]);
            let after = dual(&a, &b);
            if after.is_finite() && after <= before {
                alpha = a;
                beta = b;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                break 'newton;
            }
        }
        q = scaled(&alpha, &beta);
    }
    for _ in 0..SINKHORN_FALLBACK {
        if residual(&q) <= SCALING_RESIDUAL * total {
            break;
        }
        sinkhorn(&mut alpha, &mut beta);
        q = scaled(&alpha, &beta);
    }
    q
}
