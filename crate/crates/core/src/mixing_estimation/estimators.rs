//! Exact suprema over the finite event algebras of a cell table.
//!
//! With D(i,j) = p(i,j) − p(i)q(j) every row and column of D sums to zero, so
//! sup_{A,B} |Σ_{A×B} D| = sup_{A,B} Σ_{A×B} D, and for a fixed B the best A
//! is {i : Σ_{j∈B} D(i,j) > 0}. Enumerating every subset of the smaller side
//! is therefore exact. All sums run on the integer numerators n²·D, so the
//! orderings between estimators hold without rounding.

use super::table::{lead_coordinate_matrix, Anchor, CellMatrix, JointCellTable};
use crate::error::Result;
use crate::process_models::PathEnsemble;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest side (in cells) enumerated exhaustively (2^12 subsets).
pub const EXACT_SIDE_LIMIT: usize = 12;
/// Random restarts of the heuristic search.
pub const HEURISTIC_RESTARTS: usize = 64;
const HEURISTIC_SEED: u64 = 0x6d69_7869_6e67;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaHat {
    pub value: f64,
    /// Numerator n²·value.
    pub numerator: i64,
    /// False when the heuristic search was used.
    pub exact: bool,
    pub left_set: Vec<bool>,
    pub right_set: Vec<bool>,
}

fn transpose(dev: &[i64], rows: usize, cols: usize) -> Vec<i64> {
    let mut out = vec![0; dev.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = dev[i * cols + j];
        }
    }
    out
}

/// Best positive sum Σ_{A×B} D over all subsets B of the columns, by Gray
/// code; returns (numerator, A, B).
fn enumerate_columns(dev: &[i64], rows: usize, cols: usize) -> (i64, Vec<bool>, Vec<bool>) {
    let mut s = vec![0i64; rows];
    let mut best = 0i64;
    let mut best_code = 0u64;
    for g in 1u64..(1u64 << cols) {
        let bit = g.trailing_zeros() as usize;
        let code = g ^ (g >> 1);
        let added = code & (1 << bit) != 0;
        for (i, si) in s.iter_mut().enumerate() {
            let d = dev[i * cols + bit];
            if added {
                *si += d;
            } else {
                *si -= d;
            }
        }
        let pos: i64 = s.iter().filter(|v| **v > 0).sum();
        if pos > best {
            best = pos;
            best_code = code;
        }
    }
    let b: Vec<bool> = (0..cols).map(|j| best_code & (1 << j) != 0).collect();
    let a = best_rows(dev, rows, cols, &b);
    (best, a, b)
}

fn best_rows(dev: &[i64], rows: usize, cols: usize, b: &[bool]) -> Vec<bool> {
    (0..rows)
        .map(|i| (0..cols).filter(|&j| b[j]).map(|j| dev[i * cols + j]).sum::<i64>() > 0)
        .collect()
}

fn block_sum(dev: &[i64], cols: usize, a: &[bool], b: &[bool]) -> i64 {
    let mut total = 0;
    for (i, ai) in a.iter().enumerate() {
        if *ai {
            for (j, bj) in b.iter().enumerate() {
                if *bj {
                    total += dev[i * cols + j];
                }
            }
        }
    }
    total
}

/// Alternating threshold ascent from a starting B until neither side changes.
fn ascend(dev: &[i64], rows: usize, cols: usize, mut b: Vec<bool>) -> (i64, Vec<bool>, Vec<bool>) {
    let mut a = best_rows(dev, rows, cols, &b);
    let mut value = block_sum(dev, cols, &a, &b);
    loop {
        let new_b: Vec<bool> = (0..cols)
            .map(|j| (0..rows).filter(|&i| a[i]).map(|i| dev[i * cols + j]).sum::<i64>() > 0)
            .collect();
        let new_a = best_rows(dev, rows, cols, &new_b);
        let new_value = block_sum(dev, cols, &new_a, &new_b);
        if new_value <= value {
            return (value, a, b);
        }
        value = new_value;
        a = new_a;
        b = new_b;
    }
}

/// sup over unions of cells of |P(G∩H) − P(G)P(H)|. `hints` are starting
/// right-cell sets for the heuristic path.
pub fn alpha_sup_with_hints(matrix: &CellMatrix, hints: &[Vec<bool>]) -> AlphaHat {
    let (rows, cols) = (matrix.n_left, matrix.n_right);
    let dev = matrix.deviation_numerators();
    let scale = matrix.scale();
    let finish = |(num, a, b): (i64, Vec<bool>, Vec<bool>), exact: bool| AlphaHat {
        value: num as f64 / scale,
        numerator: num,
        exact,
        left_set: a,
        right_set: b,
    };
    if cols <= EXACT_SIDE_LIMIT && cols <= rows {
        return finish(enumerate_columns(&dev, rows, cols), true);
    }
    if rows <= EXACT_SIDE_LIMIT {
        let (num, b, a) = enumerate_columns(&transpose(&dev, rows, cols), cols, rows);
        return finish((num, a, b), true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(HEURISTIC_SEED);
    let mut best = (0i64, vec![false; rows], vec![false; cols]);
    let starts = hints
        .iter()
        .cloned()
        .chain((0..HEURISTIC_RESTARTS).map(|_| (0..cols).map(|_| rng.random::<bool>()).collect()));
    for b in starts {
        let cand = ascend(&dev, rows, cols, b);
        if cand.0 > best.0 {
            best = cand;
        }
    }
    finish(best, false)
}

pub fn alpha_sup(matrix: &CellMatrix) -> AlphaHat {
    alpha_sup_with_hints(matrix, &[])
}

/// Σ_{i,j} |p(i,j) − p(i)q(j)| as (value, numerator).
pub fn beta_sup(matrix: &CellMatrix) -> (f64, i64) {
    let num: i64 = matrix.deviation_numerators().iter().map(|d| d.abs()).sum();
    (num as f64 / matrix.scale(), num)
}

/// The 2-mixing table of `matrix` (leading coordinates) and its supremum.
pub fn two_mix_sup(table: &JointCellTable, matrix: &CellMatrix) -> AlphaHat {
    alpha_sup(&lead_coordinate_matrix(table, matrix))
}

/// Lifts a leading-coordinate right set to the full right cells.
fn lift_right(table: &JointCellTable, lead: &[bool]) -> Vec<bool> {
    let (_, dr) = table.lead_bins();
    (0..table.n_right).map(|j| lead[j / dr]).collect()
}

/// α̂, β̂ and 2-mix estimate on one matrix of `table`; the heuristic α
/// search starts from the lifted 2-mix optimum so α̂ ≥ 2-mix always.
pub fn estimates_on(table: &JointCellTable, matrix: &CellMatrix) -> (AlphaHat, (f64, i64), AlphaHat) {
    let two = two_mix_sup(table, matrix);
    let alpha = alpha_sup_with_hints(matrix, &[lift_right(table, &two.right_set)]);
    (alpha, beta_sup(matrix), two)
}

pub fn alpha_hat(table: &JointCellTable) -> AlphaHat {
    estimates_on(table, &table.matrix()).0
}

pub fn beta_hat(table: &JointCellTable) -> f64 {
    beta_sup(&table.matrix()).0
}

/// 2-mixing estimate on single-coordinate windows.
pub fn two_mix_hat(ensemble: &PathEnsemble, anchor: Anchor, k: usize, m: usize) -> Result<AlphaHat> {
    let table = super::table::build_table(ensemble, anchor, k, 0, 0, m)?;
    Ok(alpha_sup(&table.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: usize, cols: usize, counts: &[u64]) -> CellMatrix {
        CellMatrix::new(rows, cols, counts.to_vec()).unwrap()
    }

    /// Direct oracle: every (A, B) pair.
    fn brute(m: &CellMatrix) -> f64 {
        let probs = m.probs();
        let (r, c) = (m.n_left, m.n_right);
        let mut best: f64 = 0.0;
        for a in 0u32..(1 << r) {
            for b in 0u32..(1 << c) {
                let mut joint = 0.0;
                let mut pa = 0.0;
                let mut pb = 0.0;
                for i in 0..r {
                    for j in 0..c {
                        let p = probs[i * c + j];
                        let ia = a & (1 << i) != 0;
                        let jb = b & (1 << j) != 0;
                        if ia && jb {
                            joint += p;
                        }
                        if ia {
                            pa += p;
                        }
                        if jb {
                            pb += p;
                        }
                    }
                }
                best = best.max((joint - pa * pb).abs());
            }
        }
        best
    }

    #[test]
    fn two_by_two_example() {
        let m = matrix(2, 2, &[3, 2, 1, 4]);
        let a = alpha_sup(&m);
        assert!((a.value - 0.1).abs() < 1e-15);
        assert!(a.exact);
        assert!((beta_sup(&m).0 - 0.4).abs() < 1e-15);
        assert!((brute(&m) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn product_table_is_zero() {
        let m = matrix(3, 2, &[2, 4, 3, 6, 5, 10]);
        assert_eq!(alpha_sup(&m).value, 0.0);
        assert_eq!(beta_sup(&m).0, 0.0);
    }

    #[test]
    fn matches_brute_force_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let r = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let counts: Vec<u64> = (0..r * c).map(|_| rng.random_range(0..20)).collect();
            if counts.iter().sum::<u64>() == 0 {
                continue;
            }
            let m = matrix(r, c, &counts);
            let a = alpha_sup(&m);
            assert!((a.value - brute(&m)).abs() < 1e-12);
            assert!(a.value <= beta_sup(&m).0);
        }
    }

    #[test]
    fn heuristic_on_large_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let counts: Vec<u64> = (0..20 * 16).map(|_| rng.random_range(0..50)).collect();
        let m = matrix(20, 16, &counts);
        let a = alpha_sup(&m);
        assert!(!a.exact);
        assert!(a.value > 0.0 && a.value <= beta_sup(&m).0);
        // the reported sets realise the value
        let probs = m.probs();
        let mut joint = 0.0;
        let mut pa = 0.0;
        let mut pb = 0.0;
        for i in 0..20 {
            for j in 0..16 {
                let p = probs[i * 16 + j];
                if a.left_set[i] && a.right_set[j] {
                    joint += p;
                }
                if a.left_set[i] {
                    pa += p;
                }
                if a.right_set[j] {
                    pb += p;
                }
            }
        }
        assert!(((joint - pa * pb) - a.value).abs() < 1e-12);
    }
}
