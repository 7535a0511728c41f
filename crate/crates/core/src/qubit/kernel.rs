//! Index arithmetic on big-endian qubit registers.
//!
//! Qubit `k` of an `n`-qubit register owns bit `n - 1 - k` of the basis
//! index, so the first listed label is the most significant bit.

use nalgebra::DMatrix;

use crate::C64;

/// Split of a register into a selected subset of positions and the rest.
pub(crate) struct Layout {
    /// Offset contributed by each value of the selected sub-index.
    pub sub: Vec<usize>,
    /// Offset contributed by each value of the remaining sub-index.
    pub rest: Vec<usize>,
}

impl Layout {
    pub fn new(n: usize, positions: &[usize]) -> Self {
        let rest_positions: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        Layout {
            sub: offsets(n, positions),
            rest: offsets(n, &rest_positions),
        }
    }

    #[inline]
    pub fn index(&self, sub: usize, rest: usize) -> usize {
        self.sub[sub] | self.rest[rest]
    }
}

fn offsets(n: usize, positions: &[usize]) -> Vec<usize> {
    let m = positions.len();
    (0..1usize << m)
        .map(|value| {
            positions.iter().enumerate().fold(0usize, |acc, (j, &p)| {
                let bit = (value >> (m - 1 - j)) & 1;
                acc | (bit << (n - 1 - p))
            })
        })
        .collect()
}

/// `u` (2^m × 2^m) applied to the listed positions of a state vector.
pub(crate) fn apply_vec(amps: &[C64], n: usize, positions: &[usize], u: &DMatrix<C64>) -> Vec<C64> {
    let layout = Layout::new(n, positions);
    let sub_dim = layout.sub.len();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut column = vec![C64::new(0.0, 0.0); sub_dim];
    for r in 0..layout.rest.len() {
        for (s, c) in column.iter_mut().enumerate() {
            *c = amps[layout.index(s, r)];
        }
        for s_out in 0..sub_dim {
            let mut acc = C64::new(0.0, 0.0);
            for (s_in, c) in column.iter().enumerate() {
                acc += u[(s_out, s_in)] * c;
            }
            out[layout.index(s_out, r)] = acc;
        }
    }
    out
}

/// `u ρ u†` with `u` acting on the listed positions.
pub(crate) fn conjugate(rho: &DMatrix<C64>, n: usize, positions: &[usize], u: &DMatrix<C64>) -> DMatrix<C64> {
    let left = apply_left(rho, n, positions, u);
    apply_left(&left.adjoint(), n, positions, u).adjoint()
}

/// `u ρ` with `u` acting on the listed positions (column by column).
pub(crate) fn apply_left(rho: &DMatrix<C64>, n: usize, positions: &[usize], u: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = rho.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col: Vec<C64> = rho.column(j).iter().copied().collect();
        let mapped = apply_vec(&col, n, positions, u);
        for (i, v) in mapped.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// Contract a bra `row` (length 2^m) against the listed positions of a vector.
pub(crate) fn contract_vec(amps: &[C64], n: usize, positions: &[usize], row: &[C64]) -> Vec<C64> {
    let layout = Layout::new(n, positions);
    (0..layout.rest.len())
        .map(|r| row.iter().enumerate().map(|(s, k)| k * amps[layout.index(s, r)]).sum())
        .collect()
}

/// `K ρ K†` for a bra `row` on the listed positions; the result lives on the
/// remaining positions.
pub(crate) fn contract_mat(rho: &DMatrix<C64>, n: usize, positions: &[usize], row: &[C64]) -> DMatrix<C64> {
    let layout = Layout::new(n, positions);
    let rest_dim = layout.rest.len();
    let sub_dim = layout.sub.len();
    // First contract the row index, then the column index.
    let mut half = vec![C64::new(0.0, 0.0); rest_dim * rho.ncols()];
    for r in 0..rest_dim {
        for col in 0..rho.ncols() {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..sub_dim {
                acc += row[s] * rho[(layout.index(s, r), col)];
            }
            half[r * rho.ncols() + col] = acc;
        }
    }
    let mut out = DMatrix::zeros(rest_dim, rest_dim);
    for r in 0..rest_dim {
        for r2 in 0..rest_dim {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..sub_dim {
                acc += half[r * rho.ncols() + layout.index(s, r2)] * row[s].conj();
            }
            out[(r, r2)] = acc;
        }
    }
    out
}

/// Trace out the listed positions.
pub(crate) fn trace_out(rho: &DMatrix<C64>, n: usize, positions: &[usize]) -> DMatrix<C64> {
    let layout = Layout::new(n, positions);
    let rest_dim = layout.rest.len();
    let mut out = DMatrix::zeros(rest_dim, rest_dim);
    for r in 0..rest_dim {
        for r2 in 0..rest_dim {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..layout.sub.len() {
                acc += rho[(layout.index(s, r), layout.index(s, r2))];
            }
            out[(r, r2)] = acc;
        }
    }
    out
}

pub(crate) fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_big_endian() {
        let l = Layout::new(3, &[2]);
        assert_eq!(l.sub, vec![0, 1]);
        assert_eq!(l.rest, vec![0, 2, 4, 6]);
        let l = Layout::new(3, &[0]);
        assert_eq!(l.sub, vec![0, 4]);
    }
}
