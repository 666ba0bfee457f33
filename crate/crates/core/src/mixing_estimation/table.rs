//! Joint cell tables over a left window (X_t, …, X_{t−r₁}) and a right
//! window (X_{t+k}, …, X_{t+k+r₂}) discretised by marginal-quantile grids.

use crate::error::{Error, Result};
use crate::process_models::PathEnsemble;
use rayon::prelude::*;

/// Most cells allowed on one side of a table.
pub const SIDE_CELL_LIMIT: usize = 4096;
/// Most cells allowed in a whole table.
pub const TABLE_CELL_LIMIT: usize = 1 << 20;
/// Number of batches used for standard errors.
pub const BATCHES: usize = 16;
/// Largest sample count for which the integer deviation numerators fit i64.
pub const SAMPLE_LIMIT: u64 = 1 << 31;

/// Which anchor times t enter the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// Every admissible t of every replicate (a t-average for
    /// nonstationary specs).
    Pooled,
    /// One window per replicate at this t.
    Fixed(i64),
}

impl std::fmt::Display for Anchor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Anchor::Pooled => write!(f, "pooled"),
            Anchor::Fixed(t) => write!(f, "t={t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointCellTable {
    pub k: usize,
    pub anchor: Anchor,
    pub r_left: usize,
    pub r_right: usize,
    pub m: usize,
    /// Interior bin edges (m − 1 each) for X_t, X_{t−1}, …, X_{t−r₁}.
    pub left_edges: Vec<Vec<f64>>,
    /// Interior bin edges for X_{t+k}, …, X_{t+k+r₂}.
    pub right_edges: Vec<Vec<f64>>,
    pub n_left: usize,
    pub n_right: usize,
    /// Counts per batch, row-major over (left cell, right cell).
    pub batch_counts: Vec<Vec<u32>>,
    pub sample_count: u64,
}

/// Cell counts of one table (or one batch) with exact deviation numerators
/// n·n(i,j) − n_L(i)·n_R(j) = n²·(p(i,j) − p(i)q(j)).
#[derive(Debug, Clone, PartialEq)]
pub struct CellMatrix {
    pub n_left: usize,
    pub n_right: usize,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl CellMatrix {
    pub fn new(n_left: usize, n_right: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n_left * n_right || n_left == 0 || n_right == 0 {
            return Err(Error::validation(
                "counts",
                format!("expected {n_left}×{n_right} cells, got {}", counts.len()),
            ));
        }
        let total: u64 = counts.iter().sum();
        if total > SAMPLE_LIMIT {
            return Err(Error::validation("counts", format!("total {total} exceeds {SAMPLE_LIMIT}")));
        }
        Ok(CellMatrix {
            n_left,
            n_right,
            counts,
            total,
        })
    }

    pub fn left_marginal(&self) -> Vec<u64> {
        self.counts.chunks(self.n_right).map(|row| row.iter().sum()).collect()
    }

    pub fn right_marginal(&self) -> Vec<u64> {
        let mut q = vec![0u64; self.n_right];
        for row in self.counts.chunks(self.n_right) {
            for (acc, c) in q.iter_mut().zip(row) {
                *acc += c;
            }
        }
        q
    }

    /// n²·D(i,j), row-major.
    pub fn deviation_numerators(&self) -> Vec<i64> {
        let n = self.total as i64;
        let p = self.left_marginal();
        let q = self.right_marginal();
        let mut out = Vec::with_capacity(self.counts.len());
        for (i, row) in self.counts.chunks(self.n_right).enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.push(n * *c as i64 - p[i] as i64 * q[j] as i64);
            }
        }
        out
    }

    /// n² as a float, the common denominator of all deviations.
    pub fn scale(&self) -> f64 {
        let n = self.total as f64;
        n * n
    }

    pub fn probs(&self) -> Vec<f64> {
        let n = self.total as f64;
        self.counts.iter().map(|c| *c as f64 / n).collect()
    }
}

impl JointCellTable {
    pub fn counts(&self) -> Vec<u64> {
        let mut total = vec![0u64; self.n_left * self.n_right];
        for b in &self.batch_counts {
            for (acc, c) in total.iter_mut().zip(b) {
                *acc += *c as u64;
            }
        }
        total
    }

    pub fn matrix(&self) -> CellMatrix {
        CellMatrix {
            n_left: self.n_left,
            n_right: self.n_right,
            counts: self.counts(),
            total: self.sample_count,
        }
    }

    pub fn cell_probs(&self) -> Vec<f64> {
        self.matrix().probs()
    }

    /// (left marginal, right marginal) probabilities.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.matrix();
        let n = m.total as f64;
        (
            m.left_marginal().iter().map(|c| *c as f64 / n).collect(),
            m.right_marginal().iter().map(|c| *c as f64 / n).collect(),
        )
    }

    /// One matrix per nonempty batch.
    pub fn batch_matrices(&self) -> Vec<CellMatrix> {
        self.batch_counts
            .iter()
            .map(|b| CellMatrix {
                n_left: self.n_left,
                n_right: self.n_right,
                counts: b.iter().map(|c| *c as u64).collect(),
                total: b.iter().map(|c| *c as u64).sum(),
            })
            .filter(|m| m.total > 0)
            .collect()
    }

    /// Left cell index → bin of X_t; right cell index → bin of X_{t+k}.
    pub fn lead_bins(&self) -> (usize, usize) {
        (self.m.pow(self.r_left as u32), self.m.pow(self.r_right as u32))
    }
}

/// Marginalises a matrix onto the leading coordinate of each window.
pub fn lead_coordinate_matrix(table: &JointCellTable, matrix: &CellMatrix) -> CellMatrix {
    let (dl, dr) = table.lead_bins();
    let m = table.m;
    let mut counts = vec![0u64; m * m];
    for i in 0..matrix.n_left {
        for j in 0..matrix.n_right {
            counts[(i / dl) * m + j / dr] += matrix.counts[i * matrix.n_right + j];
        }
    }
    CellMatrix {
        n_left: m,
        n_right: m,
        counts,
        total: matrix.total,
    }
}

fn cells_for(m: usize, coords: usize) -> Result<usize> {
    let mut cells: usize = 1;
    for _ in 0..coords {
        cells = cells.saturating_mul(m);
        if cells > SIDE_CELL_LIMIT {
            return Err(Error::EnumerationLimit {
                cells: m.saturating_pow(coords as u32),
                limit: SIDE_CELL_LIMIT,
            });
        }
    }
    Ok(cells)
}

/// Interior quantile edges sorted[⌊j n / m⌋], j = 1..m−1.
fn quantile_edges(mut values: Vec<f64>, m: usize) -> Vec<f64> {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    (1..m).map(|j| values[j * n / m]).collect()
}

fn bin(edges: &[f64], x: f64) -> usize {
    edges.partition_point(|e| *e <= x)
}

/// Anchor times per replicate as path indices.
fn anchor_indices(ensemble: &PathEnsemble, anchor: Anchor, k: usize, r_left: usize, r_right: usize) -> Result<Vec<usize>> {
    let len = ensemble.path_len();
    let lo = r_left;
    let hi = (len as i64) - (k + r_right) as i64; // exclusive
    match anchor {
        Anchor::Pooled => {
            if hi <= lo as i64 {
                return Err(Error::validation(
                    "k",
                    format!("paths of length {len} cannot hold windows r_left={r_left}, k={k}, r_right={r_right}"),
                ));
            }
            Ok((lo..hi as usize).collect())
        }
        Anchor::Fixed(t) => {
            let i = t - ensemble.t_start;
            if i < lo as i64 || i >= hi {
                return Err(Error::validation(
                    "t",
                    format!("anchor {t} leaves the windows outside the simulated range {:?}", ensemble.times()),
                ));
            }
            Ok(vec![i as usize])
        }
    }
}

/// Builds the joint cell table for lag `k`.
pub fn build_table(
    ensemble: &PathEnsemble,
    anchor: Anchor,
    k: usize,
    r_left: usize,
    r_right: usize,
    m: usize,
) -> Result<JointCellTable> {
    if k == 0 {
        return Err(Error::validation("k", "must be at least 1"));
    }
    if m < 2 {
        return Err(Error::validation("m", format!("need at least 2 bins, got {m}")));
    }
    let n_left = cells_for(m, r_left + 1)?;
    let n_right = cells_for(m, r_right + 1)?;
    if n_left * n_right > TABLE_CELL_LIMIT {
        return Err(Error::EnumerationLimit {
            cells: n_left * n_right,
            limit: TABLE_CELL_LIMIT,
        });
    }
    let idx = anchor_indices(ensemble, anchor, k, r_left, r_right)?;
    let reps = ensemble.paths.len();
    let per_rep = idx.len();
    let n = (reps * per_rep) as u64;
    if n > SAMPLE_LIMIT {
        return Err(Error::validation("samples", format!("{n} samples exceed {SAMPLE_LIMIT}")));
    }
    if (n as usize) < m {
        return Err(Error::validation("samples", format!("{n} samples cannot fill {m} quantile bins")));
    }
    // offsets relative to the anchor index: left −c, right k + c
    let left_offsets: Vec<i64> = (0..=r_left).map(|c| -(c as i64)).collect();
    let right_offsets: Vec<i64> = (0..=r_right).map(|c| (k + c) as i64).collect();
    let edges_for = |off: i64| -> Vec<f64> {
        let vals: Vec<f64> = ensemble
            .paths
            .iter()
            .flat_map(|p| idx.iter().map(move |&i| p[(i as i64 + off) as usize]))
            .collect();
        quantile_edges(vals, m)
    };
    let left_edges: Vec<Vec<f64>> = left_offsets.par_iter().map(|&o| edges_for(o)).collect();
    let right_edges: Vec<Vec<f64>> = right_offsets.par_iter().map(|&o| edges_for(o)).collect();
    let cell_of = |path: &[f64], i: usize| -> usize {
        let mut l = 0;
        for (c, off) in left_offsets.iter().enumerate() {
            l = l * m + bin(&left_edges[c], path[(i as i64 + off) as usize]);
        }
        let mut r = 0;
        for (c, off) in right_offsets.iter().enumerate() {
            r = r * m + bin(&right_edges[c], path[(i as i64 + off) as usize]);
        }
        l * n_right + r
    };
    let batch_counts: Vec<Vec<u32>> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let lo = (b as u64 * n / BATCHES as u64) as usize;
            let hi = ((b as u64 + 1) * n / BATCHES as u64) as usize;
            let mut counts = vec![0u32; n_left * n_right];
            for pos in lo..hi {
                let r = pos / per_rep;
                let i = idx[pos % per_rep];
                counts[cell_of(&ensemble.paths[r], i)] += 1;
            }
            counts
        })
        .collect();
    Ok(JointCellTable {
        k,
        anchor,
        r_left,
        r_right,
        m,
        left_edges,
        right_edges,
        n_left,
        n_right,
        batch_counts,
        sample_count: n,
    })
}
