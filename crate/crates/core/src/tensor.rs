//! Orthonormal spherical-tensor operator basis `T^(k)_m`, `k = 0..=N`,
//! `m = -k..=k`, and conversion of density matrices to and from tensor
//! coefficients.
//!
//! `[Jz, T^(k)_m] = m T^(k)_m` forces every tensor onto a single diagonal of
//! the Dicke-basis matrix (column index minus row index equals `m`), so each
//! tensor is stored as that diagonal only. For fixed `m` the `N + 1 - |m|`
//! tensors form an orthonormal basis of the diagonal, which makes
//! decomposition a small matrix-vector product per `m`. Storage is
//! `O(N^3)` complex numbers instead of `O(N^4)`.
//!
//! Phase convention: `T^(k)_k` is the unit-norm multiple of `(J+)^k` with a
//! positive coefficient, and `T^(k)_{m-1} = [J-, T^(k)_m] / sqrt(k(k+1) - m(m-1))`.
//! The tensors themselves are computed as Casimir eigenvectors per diagonal
//! and only their signs are taken from these relations.
//!
//! Coefficients are stored as `c^(k)_m = Tr(T^(k)†_m ρ)`, so that
//! `ρ = Σ c^(k)_m T^(k)_m`. For Hermitian `ρ` this equals the complex
//! conjugate of `Tr(T^(k)_m ρ)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{CMatrix, SpinSystem};

#[derive(Clone, Debug)]
pub struct TensorBasis {
    system: SpinSystem,
    // blocks[m + N][(k - |m|) * len + p] is entry p of T^(k)_m's diagonal.
    blocks: Vec<Vec<Complex64>>,
}

/// Row/column of entry `p` on the diagonal with offset `m` (`col - row = m`).
#[inline]
pub fn diagonal_position(m: i64, p: usize) -> (usize, usize) {
    if m >= 0 {
        (p, p + m as usize)
    } else {
        (p + m.unsigned_abs() as usize, p)
    }
}


impl TensorBasis {
    pub fn new(system: SpinSystem) -> Self {
        let n = system.n() as i64;
        let mut blocks: Vec<Vec<Complex64>> = (-n..=n).map(|m| casimir_block(system, m)).collect();

        // Fix signs: positive highest weight, positive overlap with the
        // lowered neighbour.
        for k in 0..=n {
            let top = diagonal_real(&blocks, n, k, k);
            if top.iter().sum::<f64>() < 0.0 {
                flip(&mut blocks, n, k, k);
            }
            for m in (-k + 1..=k).rev() {
                let lowered = lower(system, m, &diagonal_real(&blocks, n, k, m));
                let current = diagonal_real(&blocks, n, k, m - 1);
                let overlap: f64 = lowered.iter().zip(&current).map(|(a, b)| a * b).sum();
                if overlap < 0.0 {
                    flip(&mut blocks, n, k, m - 1);
                }
            }
        }

        Self { system, blocks }
    }

    pub fn system(&self) -> SpinSystem {
        self.system
    }

    fn block_len(&self, m: i64) -> usize {
        self.system.dim() - m.unsigned_abs() as usize
    }

    fn block(&self, m: i64) -> &[Complex64] {
        &self.blocks[(m + self.system.n() as i64) as usize]
    }

    /// Diagonal entries of `T^(k)_m`, ordered by increasing row.
    pub fn diagonal(&self, k: usize, m: i64) -> &[Complex64] {
        assert!(m.unsigned_abs() as usize <= k && k <= self.system.n());
        let len = self.block_len(m);
        let row = k - m.unsigned_abs() as usize;
        &self.block(m)[row * len..(row + 1) * len]
    }

    /// `T^(k)_m` as a dense matrix.
    pub fn dense(&self, k: usize, m: i64) -> CMatrix {
        let mut out = self.system.zeros();
        for (p, &v) in self.diagonal(k, m).iter().enumerate() {
            out[diagonal_position(m, p)] = v;
        }
        out
    }

    /// Copy with `T^(k)_m` multiplied by `phase(k, m)`. Unit-modulus phases
    /// keep the basis orthonormal; phases depending on `k` only also keep the
    /// ladder relations.
    pub fn rephased(&self, mut phase: impl FnMut(usize, i64) -> Complex64) -> Self {
        let mut out = self.clone();
        let n = self.system.n() as i64;
        for m in -n..=n {
            let len = self.block_len(m);
            let block = &mut out.blocks[(m + n) as usize];
            for k in m.unsigned_abs() as usize..=n as usize {
                let f = phase(k, m);
                let row = k - m.unsigned_abs() as usize;
                for v in &mut block[row * len..(row + 1) * len] {
                    *v *= f;
                }
            }
        }
        out
    }

    /// `c^(k)_m = Tr(T^(k)†_m ρ)` for every `(k, m)`.
    pub fn decompose(&self, rho: &CMatrix) -> Result<TensorCoefficients> {
        self.system.check_dim(rho)?;
        let n = self.system.n() as i64;
        let mut coeffs = TensorCoefficients::zeros(self.system);
        for m in -n..=n {
            let len = self.block_len(m);
            let diag: Vec<Complex64> = (0..len).map(|p| rho[diagonal_position(m, p)]).collect();
            let block = self.block(m);
            let out = coeffs.block_mut(m);
            for (row, c) in out.iter_mut().enumerate() {
                let t = &block[row * len..(row + 1) * len];
                *c = t.iter().zip(&diag).map(|(a, b)| a.conj() * b).sum();
            }
        }
        Ok(coeffs)
    }

    /// `Σ c^(k)_m T^(k)_m`.
    pub fn reconstruct(&self, coeffs: &TensorCoefficients) -> Result<CMatrix> {
        if coeffs.system != self.system {
            return Err(Error::DimensionMismatch {
                expected: self.system.dim(),
                got: coeffs.system.dim(),
            });
        }
        let n = self.system.n() as i64;
        let mut out = self.system.zeros();
        for m in -n..=n {
            let len = self.block_len(m);
            let block = self.block(m);
            let cs = coeffs.block(m);
            for p in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for (row, c) in cs.iter().enumerate() {
                    acc += c * block[row * len + p];
                }
                out[diagonal_position(m, p)] = acc;
            }
        }
        Ok(out)
    }

    /// `K_m = Σ_{k=m}^{N} |Tr(ρ T^(k)_m)|²` for `m = 0..=N`.
    pub fn km_distribution(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        self.system.check_dim(rho)?;
        let n = self.system.n();
        let mut out = vec![0.0; n + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mi = m as i64;
            for k in m..=n {
                let tr: Complex64 = self
                    .diagonal(k, mi)
                    .iter()
                    .enumerate()
                    .map(|(p, t)| {
                        let (r, c) = diagonal_position(mi, p);
                        t * rho[(c, r)]
                    })
                    .sum();
                *slot += tr.norm_sqr();
            }
        }
        Ok(out)
    }
}

/// Rows of the offset-`m` block: eigenvectors of the Casimir superoperator
/// `X ↦ Σ_a [J_a, [J_a, X]]` restricted to that diagonal, ordered by rank.
///
/// On one diagonal the superoperator is real symmetric tridiagonal with the
/// well separated eigenvalues `k(k+1)`, so the eigenvectors are accurate to
/// round-off for any `N`. Building the tensors by repeated lowering instead
/// loses orthogonality exponentially in `N`.
fn casimir_block(system: SpinSystem, m: i64) -> Vec<Complex64> {
    let len = system.dim() - m.unsigned_abs() as usize;
    let j = system.j();
    let mut c = DMatrix::<f64>::zeros(len, len);
    for p in 0..len {
        let (r, col) = diagonal_position(m, p);
        c[(p, p)] = 2.0 * j * (j + 1.0) - 2.0 * system.magnetic(r) * system.magnetic(col);
        if p + 1 < len {
            let v = -system.raising_element(r + 1) * system.raising_element(col + 1);
            c[(p, p + 1)] = v;
            c[(p + 1, p)] = v;
        }
    }
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut block = vec![Complex64::new(0.0, 0.0); len * len];
    for (row, &src) in order.iter().enumerate() {
        for p in 0..len {
            block[row * len + p] = Complex64::new(eig.eigenvectors[(p, src)], 0.0);
        }
    }
    block
}

fn block_row(n: i64, k: i64, m: i64) -> (usize, usize, usize) {
    let len = (n + 1 - m.abs()) as usize;
    ((m + n) as usize, (k - m.abs()) as usize, len)
}

fn diagonal_real(blocks: &[Vec<Complex64>], n: i64, k: i64, m: i64) -> Vec<f64> {
    let (b, row, len) = block_row(n, k, m);
    blocks[b][row * len..(row + 1) * len].iter().map(|z| z.re).collect()
}

fn flip(blocks: &mut [Vec<Complex64>], n: i64, k: i64, m: i64) {
    let (b, row, len) = block_row(n, k, m);
    for v in &mut blocks[b][row * len..(row + 1) * len] {
        *v = -*v;
    }
}

/// `[J-, T]` for `T` on diagonal offset `m`; the result lives on offset `m-1`.
fn lower(system: SpinSystem, m: i64, t: &[f64]) -> Vec<f64> {
    let dim = system.dim();
    let get = |r: usize, c: usize| -> f64 {
        // entry (r, c) of T, zero off its diagonal
        if c as i64 - r as i64 != m {
            return 0.0;
        }
        let p = if m >= 0 { r } else { c };
        t[p]
    };
    let new_m = m - 1;
    let len = dim - new_m.unsigned_abs() as usize;
    (0..len)
        .map(|p| {
            let (r, c) = diagonal_position(new_m, p);
            // (J- T)[r][c] = J-[r][r-1] T[r-1][c], J-[r][r-1] = ⟨r-1|J+|r⟩
            let left = if r >= 1 { system.raising_element(r) * get(r - 1, c) } else { 0.0 };
            // (T J-)[r][c] = T[r][c+1] J-[c+1][c]
            let right = if c + 1 < dim {
                get(r, c + 1) * system.raising_element(c + 1)
            } else {
                0.0
            };
            left - right
        })
        .collect()
}

/// Coefficients `c^(k)_m` of an operator in a [`TensorBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct TensorCoefficients {
    system: SpinSystem,
    // blocks[m + N][k - |m|]
    blocks: Vec<Vec<Complex64>>,
}

impl TensorCoefficients {
    pub fn zeros(system: SpinSystem) -> Self {
        let n = system.n() as i64;
        let blocks = (-n..=n)
            .map(|m| vec![Complex64::new(0.0, 0.0); (n + 1 - m.abs()) as usize])
            .collect();
        Self { system, blocks }
    }

    pub fn system(&self) -> SpinSystem {
        self.system
    }

    fn block(&self, m: i64) -> &[Complex64] {
        &self.blocks[(m + self.system.n() as i64) as usize]
    }

    fn block_mut(&mut self, m: i64) -> &mut [Complex64] {
        let n = self.system.n() as i64;
        &mut self.blocks[(m + n) as usize]
    }

    pub fn get(&self, k: usize, m: i64) -> Complex64 {
        assert!(m.unsigned_abs() as usize <= k && k <= self.system.n());
        self.block(m)[k - m.unsigned_abs() as usize]
    }

    pub fn set(&mut self, k: usize, m: i64, value: Complex64) {
        assert!(m.unsigned_abs() as usize <= k && k <= self.system.n());
        self.block_mut(m)[k - m.unsigned_abs() as usize] = value;
    }

    /// Applies `f(k, m, c)` to every coefficient in place.
    pub fn map_in_place(&mut self, mut f: impl FnMut(usize, i64, Complex64) -> Complex64) {
        let n = self.system.n() as i64;
        for (b, block) in self.blocks.iter_mut().enumerate() {
            let m = b as i64 - n;
            for (row, c) in block.iter_mut().enumerate() {
                *c = f(row + m.unsigned_abs() as usize, m, *c);
            }
        }
    }

    /// `(k, m, c)` triples, grouped by `m`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        let n = self.system.n() as i64;
        self.blocks.iter().enumerate().flat_map(move |(b, block)| {
            let m = b as i64 - n;
            block
                .iter()
                .enumerate()
                .map(move |(row, &c)| (row + m.unsigned_abs() as usize, m, c))
        })
    }

    /// `Σ |c|²`, equal to `Tr(ρ†ρ)` by orthonormality.
    pub fn norm_sqr(&self) -> f64 {
        self.iter().map(|(_, _, c)| c.norm_sqr()).sum()
    }
}
