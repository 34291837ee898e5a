use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use super::{EqualityRow, RowKind, SdpInstance};
use crate::error::{Error, Result};
use crate::laurent::diagonal_trace;

/// Which diagonal block a column of the basis change belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    /// `J v = v`, size `ceil(N/2)`.
    Sym,
    /// `J v = -v`, size `floor(N/2)`.
    Anti,
}

/// Orthogonal `U` block-diagonalizing every matrix that commutes with the
/// counteridentity `J`.
///
/// Columns are ordered as in the standard construction: for even `N`,
/// `U = [[I, I], [J, -J]] / sqrt(2)`; for odd `N` the middle row and column
/// carry the single unscaled entry. The first `ceil(N/2)` columns span the
/// `J`-even subspace, the remaining `floor(N/2)` the `J`-odd one.
#[derive(Debug, Clone)]
pub struct BasisChange {
    n: usize,
    // row r of U as (block, index within block, value)
    rows: Vec<Vec<(Block, usize, f64)>>,
}

impl BasisChange {
    pub fn new(n: usize) -> Self {
        let half = n / 2;
        let rows = (0..n)
            .map(|r| {
                if r < half {
                    vec![(Block::Sym, r, FRAC_1_SQRT_2), (Block::Anti, r, FRAC_1_SQRT_2)]
                } else if r >= n - half {
                    let a = n - 1 - r;
                    vec![(Block::Sym, a, FRAC_1_SQRT_2), (Block::Anti, a, -FRAC_1_SQRT_2)]
                } else {
                    vec![(Block::Sym, half, 1.0)]
                }
            })
            .collect();
        Self { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sym_size(&self) -> usize {
        self.n.div_ceil(2)
    }

    pub fn anti_size(&self) -> usize {
        self.n / 2
    }

    /// Dense `U`.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut u = DMatrix::zeros(self.n, self.n);
        for (r, entries) in self.rows.iter().enumerate() {
            for &(block, idx, v) in entries {
                u[(r, self.column(block, idx))] = v;
            }
        }
        u
    }

    fn column(&self, block: Block, idx: usize) -> usize {
        match block {
            Block::Sym => idx,
            Block::Anti => self.sym_size() + idx,
        }
    }

    /// Diagonal blocks of `U^T Q U`. Exact for `J`-commuting `Q`; for other
    /// inputs this is the block part of the symmetrization `(Q + JQJ)/2`.
    pub fn reduce(&self, q: &DMatrix<f64>) -> BlockPair {
        let mut out = BlockPair::zeros(self.sym_size(), self.anti_size());
        for (r, er) in self.rows.iter().enumerate() {
            for (c, ec) in self.rows.iter().enumerate() {
                let v = q[(r, c)];
                if v == 0.0 {
                    continue;
                }
                for &(br, ir, ur) in er {
                    for &(bc, ic, uc) in ec {
                        if br == bc {
                            out.block_mut(br)[(ir, ic)] += ur * uc * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// `U blockdiag(sym, anti) U^T`.
    pub fn expand(&self, blocks: &BlockPair) -> Result<DMatrix<f64>> {
        self.check_sizes(blocks)?;
        let mut q = DMatrix::zeros(self.n, self.n);
        for (r, er) in self.rows.iter().enumerate() {
            for (c, ec) in self.rows.iter().enumerate() {
                let mut acc = 0.0;
                for &(br, ir, ur) in er {
                    for &(bc, ic, uc) in ec {
                        if br == bc {
                            acc += ur * uc * blocks.block(br)[(ir, ic)];
                        }
                    }
                }
                q[(r, c)] = acc;
            }
        }
        Ok(q)
    }

    pub(crate) fn check_sizes(&self, blocks: &BlockPair) -> Result<()> {
        for (m, want) in [(&blocks.sym, self.sym_size()), (&blocks.anti, self.anti_size())] {
            if m.nrows() != want || m.ncols() != want {
                return Err(Error::DimensionMismatch {
                    expected: want,
                    found: m.nrows(),
                });
            }
        }
        Ok(())
    }

    /// Sparse reduced form of `Tr_i`: `Tr_i(expand(B)) = <F, B>` for
    /// symmetric blocks `B`.
    pub fn diagonal_functional(&self, i: usize) -> BlockFunctional {
        let mut acc: BTreeMap<(bool, usize, usize), f64> = BTreeMap::new();
        for l in 0..self.n.saturating_sub(i) {
            for &(br, ir, ur) in &self.rows[l] {
                for &(bc, ic, uc) in &self.rows[l + i] {
                    if br == bc {
                        *acc.entry((br == Block::Sym, ir, ic)).or_default() += ur * uc;
                    }
                }
            }
        }
        let mut f = BlockFunctional::default();
        for ((sym, r, c), v) in acc {
            if v.abs() > 1e-15 {
                if sym {
                    f.sym.push((r, c, v));
                } else {
                    f.anti.push((r, c, v));
                }
            }
        }
        f
    }
}

/// Triplet coefficients of a linear functional on a [`BlockPair`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockFunctional {
    pub sym: Vec<(usize, usize, f64)>,
    pub anti: Vec<(usize, usize, f64)>,
}

impl BlockFunctional {
    pub fn apply(&self, b: &BlockPair) -> f64 {
        let part = |f: &[(usize, usize, f64)], m: &DMatrix<f64>| -> f64 {
            f.iter().map(|&(r, c, v)| v * m[(r, c)]).sum()
        };
        part(&self.sym, &b.sym) + part(&self.anti, &b.anti)
    }
}

/// The two diagonal blocks of a `J`-commuting symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPair {
    pub sym: DMatrix<f64>,
    pub anti: DMatrix<f64>,
}

impl BlockPair {
    pub fn zeros(sym: usize, anti: usize) -> Self {
        Self {
            sym: DMatrix::zeros(sym, sym),
            anti: DMatrix::zeros(anti, anti),
        }
    }

    pub fn scaled_identity(sym: usize, anti: usize, s: f64) -> Self {
        Self {
            sym: DMatrix::identity(sym, sym) * s,
            anti: DMatrix::identity(anti, anti) * s,
        }
    }

    fn block(&self, b: Block) -> &DMatrix<f64> {
        match b {
            Block::Sym => &self.sym,
            Block::Anti => &self.anti,
        }
    }

    fn block_mut(&mut self, b: Block) -> &mut DMatrix<f64> {
        match b {
            Block::Sym => &mut self.sym,
            Block::Anti => &mut self.anti,
        }
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace() + self.anti.trace()
    }

    /// Frobenius inner product summed over both blocks.
    pub fn dot(&self, other: &BlockPair) -> f64 {
        self.sym.dot(&other.sym) + self.anti.dot(&other.anti)
    }

    pub fn blocks(&self) -> [&DMatrix<f64>; 2] {
        [&self.sym, &self.anti]
    }

    pub fn map(&self, mut f: impl FnMut(&DMatrix<f64>) -> DMatrix<f64>) -> BlockPair {
        BlockPair {
            sym: f(&self.sym),
            anti: f(&self.anti),
        }
    }

    pub fn zip_map(
        &self,
        other: &BlockPair,
        mut f: impl FnMut(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
    ) -> BlockPair {
        BlockPair {
            sym: f(&self.sym, &other.sym),
            anti: f(&self.anti, &other.anti),
        }
    }
}

/// `S(k, N)` rewritten over `J`-symmetric block pairs.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    k: usize,
    n: usize,
    basis: BasisChange,
    rows: Vec<EqualityRow>,
    functionals: Vec<BlockFunctional>,
}

/// Reduces every free `N x N` variable to a pair of symmetric blocks of
/// sizes `ceil(N/2)` and `floor(N/2)`.
pub fn reduce(inst: &SdpInstance) -> ReducedInstance {
    let basis = BasisChange::new(inst.n());
    let functionals = (0..inst.n()).map(|i| basis.diagonal_functional(i)).collect();
    ReducedInstance {
        k: inst.k(),
        n: inst.n(),
        basis,
        rows: inst.rows().to_vec(),
        functionals,
    }
}

impl ReducedInstance {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_count(&self) -> usize {
        self.k - 1
    }

    pub fn basis_change(&self) -> &BasisChange {
        &self.basis
    }

    pub fn rows(&self) -> &[EqualityRow] {
        &self.rows
    }

    /// `(floor(N/2), ceil(N/2))`.
    pub fn block_sizes(&self) -> (usize, usize) {
        (self.basis.anti_size(), self.basis.sym_size())
    }

    pub fn params_per_matrix(&self) -> usize {
        let (f, c) = self.block_sizes();
        f * (f + 1) / 2 + c * (c + 1) / 2
    }

    pub fn total_params(&self) -> usize {
        self.params_per_matrix() * self.free_count()
    }

    /// Reduced form of the diagonal trace `Tr_i`.
    pub fn functional(&self, i: usize) -> &BlockFunctional {
        &self.functionals[i]
    }

    /// Coefficients `Tr_i` of the expanded matrix, from the block functionals.
    pub fn coefficients(&self, b: &BlockPair) -> Vec<f64> {
        self.functionals.iter().map(|f| f.apply(b)).collect()
    }

    /// Left-hand side of row `r` at a reduced point.
    pub fn row_value(&self, r: usize, point: &[BlockPair]) -> f64 {
        self.rows[r]
            .terms
            .iter()
            .map(|t| t.coef * self.functionals[t.diag].apply(&point[t.matrix]))
            .sum()
    }

    pub fn max_violation(&self, point: &[BlockPair]) -> f64 {
        (0..self.rows.len())
            .map(|r| (self.row_value(r, point) - self.rows[r].rhs).abs())
            .fold(0.0, f64::max)
    }

    pub fn expand(&self, point: &[BlockPair]) -> Result<Vec<DMatrix<f64>>> {
        if point.len() != self.free_count() {
            return Err(Error::DimensionMismatch {
                expected: self.free_count(),
                found: point.len(),
            });
        }
        point.iter().map(|b| self.basis.expand(b)).collect()
    }

    /// A maximal linearly independent subset of the rows.
    ///
    /// On symmetric matrices the signed-trace rows `i` and `N - i` of the
    /// same query coincide up to sign, and the middle row of an odd query
    /// vanishes. Keeping `i <= N/2` with a non-empty left-hand side plus all
    /// trace rows gives independent functionals.
    pub fn independent_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                !r.terms.is_empty()
                    && match r.kind {
                        RowKind::SignedTrace { i, .. } => 2 * i <= self.n,
                        RowKind::Trace { .. } => true,
                    }
            })
            .map(|(idx, _)| idx)
            .collect()
    }
}

/// Symmetrization `(Q + JQJ)/2`.
pub fn j_symmetrize(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    DMatrix::from_fn(n, n, |r, c| 0.5 * (q[(r, c)] + q[(n - 1 - r, n - 1 - c)]))
}

/// Checks `Tr_i` of a full matrix against its reduced functional.
pub fn functional_mismatch(red: &ReducedInstance, q: &DMatrix<f64>) -> f64 {
    let blocks = red.basis.reduce(q);
    (0..red.n)
        .map(|i| (red.functionals[i].apply(&blocks) - diagonal_trace(q, i as isize)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp_model::{build_instance, min_eigenvalue};

    #[test]
    fn basis_is_orthogonal_and_matches_block_form() {
        for n in 1..=9 {
            let u = BasisChange::new(n).dense();
            let gram = u.transpose() * &u;
            assert!((gram - DMatrix::<f64>::identity(n, n)).amax() < 1e-15);
        }
        let u = BasisChange::new(4).dense();
        let s = FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let expect = DMatrix::from_row_slice(4, 4, &[
            s, 0.0, s, 0.0,
            0.0, s, 0.0, s,
            0.0, s, 0.0, -s,
            s, 0.0, -s, 0.0,
        ]);
        assert_eq!(u, expect);
        let u = BasisChange::new(3).dense();
        assert_eq!(u[(1, 1)], 1.0);
    }

    #[test]
    fn block_sizes_and_params() {
        let red = reduce(&build_instance(2, 6).unwrap());
        assert_eq!(red.block_sizes(), (3, 3));
        assert_eq!(red.params_per_matrix(), 12);
        let red = reduce(&build_instance(2, 7).unwrap());
        assert_eq!(red.block_sizes(), (3, 4));
        assert_eq!(red.params_per_matrix(), 16);
        let red = reduce(&build_instance(2, 1).unwrap());
        assert_eq!(red.block_sizes(), (0, 1));
    }

    #[test]
    fn scalar_reduction_is_identity() {
        let basis = BasisChange::new(1);
        let q = DMatrix::from_element(1, 1, 0.7);
        let b = basis.reduce(&q);
        assert_eq!(b.sym[(0, 0)], 0.7);
        assert_eq!(basis.expand(&b).unwrap(), q);
    }

    #[test]
    fn half_identity_roundtrip() {
        let basis = BasisChange::new(2);
        let b = BlockPair::scaled_identity(1, 1, 0.5);
        let q = basis.expand(&b).unwrap();
        assert!((q - DMatrix::<f64>::identity(2, 2) * 0.5).amax() < 1e-15);
    }

    #[test]
    fn all_ones_roundtrip() {
        let basis = BasisChange::new(6);
        let e = DMatrix::<f64>::from_element(6, 6, 1.0 / 6.0);
        let b = basis.reduce(&e);
        // E/N is rank one on the all-ones vector, which is J-even
        assert!(b.anti.amax() < 1e-15);
        assert!((basis.expand(&b).unwrap() - &e).amax() < 1e-15);
        let direct = basis.dense().transpose() * &e * basis.dense();
        assert!((direct.view((0, 0), (3, 3)) - &b.sym).amax() < 1e-15);
    }

    #[test]
    fn spectrum_is_union_of_blocks() {
        let basis = BasisChange::new(8);
        let a = DMatrix::from_fn(4, 4, |r, c| ((r * 7 + c * 3) % 5) as f64 - 2.0);
        let b = DMatrix::from_fn(4, 4, |r, c| ((r * 2 + c * 5) % 7) as f64 - 3.0);
        let pair = BlockPair {
            sym: &a * a.transpose(),
            anti: &b * b.transpose(),
        };
        let q = basis.expand(&pair).unwrap();
        let mut full: Vec<f64> = nalgebra::SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
        let mut parts: Vec<f64> = nalgebra::SymmetricEigen::new(pair.sym.clone())
            .eigenvalues
            .iter()
            .chain(nalgebra::SymmetricEigen::new(pair.anti.clone()).eigenvalues.iter())
            .copied()
            .collect();
        full.sort_by(f64::total_cmp);
        parts.sort_by(f64::total_cmp);
        for (x, y) in full.iter().zip(&parts) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(basis.expand(&BlockPair::zeros(3, 4)).is_err());
        let _ = min_eigenvalue(&pair.sym);
    }

    #[test]
    fn functionals_match_diagonal_traces() {
        for n in [1usize, 2, 5, 6, 9] {
            let red = reduce(&build_instance(3, n).unwrap());
            let x = DMatrix::from_fn(n, n, |r, c| 1.0 / (1.0 + r as f64 + c as f64) + (r * c) as f64 * 0.01);
            let q = j_symmetrize(&(&x + x.transpose()));
            assert!(functional_mismatch(&red, &q) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn independent_row_count() {
        // k = 2: the coefficients of Q_1 are uniquely determined
        for n in 2..12 {
            let red = reduce(&build_instance(2, n).unwrap());
            assert_eq!(red.independent_rows().len(), n, "n={n}");
        }
    }
}
