//! Dense exact linear algebra over k₀ (or any [`Field`]).
//!
//! Matrices are small (tens of rows); everything is plain Gaussian
//! elimination on `Vec<Vec<F>>`, rows of equal length.

use crate::scalars::{Field, Rational};

pub type Vector<F = Rational> = Vec<F>;

/// Row space in reduced echelon form with pivots taken greedily in
/// `col_priority` order (columns missing from the list are never pivots).
#[derive(Debug, Clone)]
pub struct Echelon<F = Rational> {
    pub rows: Vec<Vector<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(vectors: &[Vector<F>], col_priority: &[usize]) -> Self {
        let mut rows: Vec<Vector<F>> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for &col in col_priority {
            if next == rows.len() {
                break;
            }
            let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(next, found);
            let inv = rows[next][col].inv().expect("pivot is nonzero");
            for x in rows[next].iter_mut() {
                *x = x.clone() * &inv;
            }
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == next || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = x.clone() - factor.clone() * p;
                    }
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Self { rows, pivots }
    }

    /// Echelon form with the natural column order.
    pub fn natural(vectors: &[Vector<F>]) -> Self {
        let width = vectors.first().map_or(0, Vec::len);
        Self::new(vectors, &(0..width).collect::<Vec<_>>())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` modulo the row space; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &Vector<F>) -> Vector<F> {
        let mut out = v.clone();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if out[col].is_zero() {
                continue;
            }
            let factor = out[col].clone();
            for (x, p) in out.iter_mut().zip(row) {
                if !p.is_zero() {
                    *x = x.clone() - factor.clone() * p;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &Vector<F>) -> bool {
        self.reduce(v).iter().all(F::is_zero)
    }
}

pub fn rank<F: Field>(vectors: &[Vector<F>]) -> usize {
    Echelon::natural(vectors).rank()
}

/// Basis of {x : Σ_j x_j·columns[j] = 0}, where each column is a vector of
/// the given height. The basis is the reduced echelon form of the kernel
/// with pivots taken in `var_priority` order.
pub fn kernel<F: Field>(columns: &[Vector<F>], height: usize, var_priority: &[usize]) -> Vec<Vector<F>> {
    let n = columns.len();
    // rows of the coefficient matrix
    let rows: Vec<Vector<F>> = (0..height).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let ech = Echelon::natural(&rows);
    let free: Vec<usize> = (0..n).filter(|j| !ech.pivots.contains(j)).collect();
    let basis: Vec<Vector<F>> = free
        .iter()
        .map(|&f| {
            let mut x = vec![F::zero(); n];
            x[f] = F::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect();
    Echelon::new(&basis, var_priority).rows
}

/// Coordinates of `target` in terms of `vectors` when it lies in their span.
pub fn solve<F: Field>(vectors: &[Vector<F>], target: &Vector<F>) -> Option<Vector<F>> {
    let n = vectors.len();
    let height = target.len();
    // augmented columns: vectors then −target; look for a kernel element with last entry 1
    let mut cols: Vec<Vector<F>> = vectors.to_vec();
    cols.push(target.iter().map(|x| -x.clone()).collect());
    let order: Vec<usize> = (0..=n).rev().collect();
    let ker = kernel(&cols, height, &order);
    let sol = ker.into_iter().find(|x| !x[n].is_zero())?;
    let scale = sol[n].inv().ok()?;
    Some(sol[..n].iter().map(|x| x.clone() * &scale).collect())
}
