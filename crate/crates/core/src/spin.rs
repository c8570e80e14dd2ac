//! Dicke-basis angular momentum and dense Hermitian matrix algebra.
//!
//! Basis ordering is fixed for the whole crate: index `0` is `|j, m = j⟩` and
//! index `N` is `|j, m = -j⟩`, with `j = N/2`. All index/magnetic-number
//! conversions go through [`SpinSystem`].

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::tolerance;

pub type CMatrix = DMatrix<Complex64>;

/// `N` bosonic qubits, i.e. a single spin `j = N/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinSystem {
    n: usize,
}

impl SpinSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        Ok(Self { n })
    }

    /// Particle number.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Total spin `N/2`.
    pub fn j(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// Magnetic number of basis index `i`.
    pub fn magnetic(&self, index: usize) -> f64 {
        self.j() - index as f64
    }

    /// `⟨i-1| J+ |i⟩ = sqrt((j - m)(j + m + 1))`, written with the integer
    /// index so no half-integer arithmetic is involved.
    pub fn raising_element(&self, index: usize) -> f64 {
        debug_assert!(index >= 1 && index <= self.n);
        math::sqrt((index * (self.n + 1 - index)) as f64)
    }

    pub fn zeros(&self) -> CMatrix {
        CMatrix::zeros(self.dim(), self.dim())
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    pub(crate) fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }
}

pub fn build_jz(system: SpinSystem) -> CMatrix {
    let mut m = system.zeros();
    for i in 0..system.dim() {
        m[(i, i)] = Complex64::new(system.magnetic(i), 0.0);
    }
    m
}

/// Raising operator. Not Hermitian; `J- = J+†`.
pub fn build_jplus(system: SpinSystem) -> CMatrix {
    let mut m = system.zeros();
    for i in 1..system.dim() {
        m[(i - 1, i)] = Complex64::new(system.raising_element(i), 0.0);
    }
    m
}

pub fn build_jminus(system: SpinSystem) -> CMatrix {
    build_jplus(system).adjoint()
}

pub fn build_jx(system: SpinSystem) -> CMatrix {
    let jp = build_jplus(system);
    (&jp + jp.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn build_jy(system: SpinSystem) -> CMatrix {
    let jp = build_jplus(system);
    (&jp - jp.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Collective operators bundled for repeated use.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub system: SpinSystem,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

impl SpinOperators {
    pub fn new(system: SpinSystem) -> Self {
        Self {
            system,
            jx: build_jx(system),
            jy: build_jy(system),
            jz: build_jz(system),
        }
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Real expectation value `Tr(op ρ)` of a Hermitian observable.
pub fn expectation(op: &CMatrix, rho: &CMatrix) -> f64 {
    trace_product(op, rho).re
}

/// Max-abs deviation from Hermiticity, relative to the largest entry.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.adjoint())) / scale
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > tolerance::HERMITIAN {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Checks Hermiticity, unit trace and positivity of an input state.
pub fn check_density(system: SpinSystem, rho: &CMatrix) -> Result<()> {
    system.check_dim(rho)?;
    check_hermitian(rho)?;
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > tolerance::TRACE || tr.im.abs() > tolerance::TRACE {
        return Err(Error::InvalidState("trace differs from one"));
    }
    let eig = hermitian_eigendecomposition(rho)?;
    if eig.values[0] < tolerance::DENSITY_EIGEN {
        return Err(Error::InvalidState("negative eigenvalue"));
    }
    Ok(())
}

/// Eigenvalues ascending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        let d = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| Complex64::new(v, 0.0)),
        );
        &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

/// Dense Hermitian eigendecomposition. Rejects inputs that are not Hermitian
/// within [`tolerance::HERMITIAN`].
pub fn hermitian_eigendecomposition(op: &CMatrix) -> Result<Eigen> {
    check_hermitian(op)?;
    Ok(eigh_unchecked(op))
}

pub(crate) fn eigh_unchecked(op: &CMatrix) -> Eigen {
    let n = op.nrows();
    // Exact symmetrisation so the solver sees a Hermitian matrix.
    let sym = (op + op.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Eigen { values, vectors }
}

/// `exp(-i t h)` through the eigendecomposition of `h`.
pub fn unitary_from_generator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = hermitian_eigendecomposition(h)?;
    Ok(unitary_from_eigen(&eig, t))
}

pub(crate) fn unitary_from_eigen(eig: &Eigen, t: f64) -> CMatrix {
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let phase = Complex64::new(math::cos(t * lambda), -math::sin(t * lambda));
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    scaled * eig.vectors.adjoint()
}

/// `U ρ U†`.
pub fn conjugate(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    u * rho * u.adjoint()
}

/// Pure-state projector `|ψ⟩⟨ψ|` of a normalised vector.
pub fn projector(psi: &DVector<Complex64>) -> CMatrix {
    psi * psi.adjoint()
}

/// Trace distance `½ Tr|A - B|` between two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    let eig = eigh_unchecked(&diff);
    0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sys(n: usize) -> SpinSystem {
        SpinSystem::new(n).unwrap()
    }

    #[test]
    fn zero_particles_rejected() {
        assert_eq!(SpinSystem::new(0), Err(Error::EmptySystem));
    }

    #[test]
    fn jz_is_descending_diagonal() {
        let jz = build_jz(sys(4));
        let diag: Vec<f64> = jz.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, [2.0, 1.0, 0.0, -1.0, -2.0]);
        assert_eq!(build_jz(sys(1)).diagonal().iter().map(|z| z.re).collect::<Vec<_>>(), [0.5, -0.5]);
    }

    #[test]
    fn ladder_elements() {
        assert_eq!(build_jplus(sys(1))[(0, 1)], c(1.0));
        let jp = build_jplus(sys(2));
        assert!((jp[(0, 1)].re - 2f64.sqrt()).abs() < 1e-15);
        let jm = build_jminus(sys(2));
        let comm = commutator(&jp, &jm);
        let expect = build_jz(sys(2)) * c(2.0);
        assert!(max_abs(&(comm - expect)) < 1e-12);
    }

    #[test]
    fn spin_half_is_half_pauli() {
        let s = sys(1);
        let jx = build_jx(s);
        let jy = build_jy(s);
        assert_eq!(jx[(0, 1)], c(0.5));
        assert_eq!(jy[(0, 1)], Complex64::new(0.0, -0.5));
        assert_eq!(jy[(1, 0)], Complex64::new(0.0, 0.5));
    }

    #[test]
    fn su2_and_casimir() {
        for n in [1usize, 2, 3, 7, 40, 200] {
            let s = sys(n);
            let ops = SpinOperators::new(s);
            let i = Complex64::new(0.0, 1.0);
            let xy = commutator(&ops.jx, &ops.jy) - &ops.jz * i;
            let yz = commutator(&ops.jy, &ops.jz) - &ops.jx * i;
            let zx = commutator(&ops.jz, &ops.jx) - &ops.jy * i;
            // Entries grow like j, so compare relative to j.
            let scale = s.j().max(1.0);
            assert!(max_abs(&xy) / scale < 1e-12, "n={n}");
            assert!(max_abs(&yz) / scale < 1e-12, "n={n}");
            assert!(max_abs(&zx) / scale < 1e-12, "n={n}");
            let cas = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz;
            let jj = s.j() * (s.j() + 1.0);
            assert!(max_abs(&(cas - s.identity() * c(jj))) / jj < 1e-12, "n={n}");
        }
    }

    #[test]
    fn eigen_of_jx_spin_one() {
        let eig = hermitian_eigendecomposition(&build_jx(sys(2))).unwrap();
        for (v, e) in eig.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(0.0), c(-1.0)]));
        let eig = hermitian_eigendecomposition(&d).unwrap();
        assert_eq!(eig.values, [-1.0, 0.0, 1.0]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let jp = build_jplus(sys(3));
        assert!(matches!(hermitian_eigendecomposition(&jp), Err(Error::NotHermitian(_))));
        assert!(unitary_from_generator(&jp, 1.0).is_err());
    }

    #[test]
    fn pi_rotation_of_spin_half() {
        let u = unitary_from_generator(&build_jx(sys(1)), core::f64::consts::PI).unwrap();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), c(0.0)],
        );
        assert!(max_abs(&(u - expect)) < 1e-12);
    }

    #[test]
    fn zero_time_is_identity_and_jz_gives_phases() {
        let s = sys(5);
        let h = build_jx(s) + build_jz(s) * c(0.3);
        let u = unitary_from_generator(&h, 0.0).unwrap();
        assert!(max_abs(&(u - s.identity())) < 1e-12);
        let theta = 0.77;
        let u = unitary_from_generator(&build_jz(s), theta).unwrap();
        for i in 0..s.dim() {
            let m = s.magnetic(i);
            let expect = Complex64::new(0.0, -theta * m).exp();
            assert!((u[(i, i)] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_of_orthogonal_projectors() {
        let s = sys(2);
        let mut a = s.zeros();
        let mut b = s.zeros();
        a[(0, 0)] = c(1.0);
        b[(2, 2)] = c(1.0);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
        assert_eq!(trace_distance(&a, &a), 0.0);
    }
}
