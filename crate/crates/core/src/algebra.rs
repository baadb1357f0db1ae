//! Fixed matrices of the (1,0)⊕(0,1) representation and the plane-wave
//! symbols of the differential operators that act on six-component spinors.
//!
//! Plane waves carry `exp(-i(ωt - k·x))`, so `∂_t → -iω` and `∇ → ik` in
//! every symbol built here.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Mat6 = Matrix6<C64>;
pub type Vec3c = Vector3<C64>;
pub type Vec6 = Vector6<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Levi-Civita symbol on indices 0..3.
pub fn levi_civita(l: usize, m: usize, n: usize) -> f64 {
    match (l, m, n) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Minkowski metric diag(1,-1,-1,-1).
#[inline]
pub fn metric(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A real wave vector together with its frequency ω = |k|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveVector {
    k: Vector3<f64>,
}

impl WaveVector {
    pub fn new(k: [f64; 3]) -> Self {
        Self { k: Vector3::from(k) }
    }

    /// Like [`WaveVector::new`] but rejects zero or non-finite input.
    pub fn nonzero(k: [f64; 3]) -> Result<Self> {
        let w = Self::new(k);
        if !w.k.iter().all(|x| x.is_finite()) || w.omega() == 0.0 {
            return Err(Error::ZeroWaveVector(k));
        }
        Ok(w)
    }

    pub fn k(&self) -> Vector3<f64> {
        self.k
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.k[0], self.k[1], self.k[2]]
    }

    pub fn omega(&self) -> f64 {
        self.k.norm()
    }

    pub fn unit(&self) -> Vector3<f64> {
        self.k / self.omega()
    }

    pub fn neg(&self) -> Self {
        Self { k: -self.k }
    }

    pub fn complex(&self) -> Vec3c {
        self.k.map(|x| c(x, 0.0))
    }
}

/// The τ, β^μ, S, χ and Σ_{μν} matrices.
#[derive(Clone, Debug)]
pub struct MatrixSet {
    pub tau: [Mat3; 3],
    pub beta0: Mat6,
    pub beta: [Mat6; 3],
    pub spin: [Mat6; 3],
    pub chi: [Mat6; 3],
}

fn blocks(a: &Mat3, b: &Mat3, cc: &Mat3, d: &Mat3) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(cc);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

/// Spin-1 matrices with entries `(τ_l)_{mn} = -i ε_{lmn}`.
pub fn tau() -> [Mat3; 3] {
    std::array::from_fn(|l| Mat3::from_fn(|m, n| c(0.0, -levi_civita(l, m, n))))
}

/// `τ·v` for a complex 3-vector. Acting on `u` it gives `i v × u`.
pub fn tau_dot(v: &Vec3c) -> Mat3 {
    let t = tau();
    t[0] * v[0] + t[1] * v[1] + t[2] * v[2]
}

pub fn build_matrix_set() -> MatrixSet {
    let tau = tau();
    let id = Mat3::identity();
    let zero = Mat3::zeros();
    let beta0 = blocks(&id, &zero, &zero, &(-id));
    let beta = std::array::from_fn(|i| blocks(&zero, &tau[i], &(-tau[i]), &zero));
    let spin = std::array::from_fn(|i| blocks(&tau[i], &zero, &zero, &tau[i]));
    let chi = std::array::from_fn(|i| beta0 * beta[i]);
    MatrixSet {
        tau,
        beta0,
        beta,
        spin,
        chi,
    }
}

impl MatrixSet {
    /// β^μ with an upper index, μ = 0..4.
    pub fn beta_upper(&self, mu: usize) -> Mat6 {
        if mu == 0 {
            self.beta0
        } else {
            self.beta[mu - 1]
        }
    }

    /// β_μ = g_{μν} β^ν.
    pub fn beta_lower(&self, mu: usize) -> Mat6 {
        self.beta_upper(mu) * c(metric(mu), 0.0)
    }

    /// Lorentz generator Σ_{μν}: Σ_{lm} = ε_{lmn} S_n, Σ_{l0} = -Σ_{0l} = iχ_l.
    pub fn sigma(&self, mu: usize, nu: usize) -> Mat6 {
        match (mu, nu) {
            (0, 0) => Mat6::zeros(),
            (l, 0) => self.chi[l - 1] * I,
            (0, l) => self.chi[l - 1] * (-I),
            (l, m) => {
                let mut s = Mat6::zeros();
                for n in 0..3 {
                    let e = levi_civita(l - 1, m - 1, n);
                    if e != 0.0 {
                        s += self.spin[n] * c(e, 0.0);
                    }
                }
                s
            }
        }
    }

    /// χ·v for a real 3-vector.
    pub fn chi_dot(&self, v: &Vector3<f64>) -> Mat6 {
        self.chi[0] * c(v[0], 0.0) + self.chi[1] * c(v[1], 0.0) + self.chi[2] * c(v[2], 0.0)
    }
}

/// Fourier symbol of the Hamiltonian, `H(k) = β⁰(β·k) = χ·k`.
pub fn hamiltonian_symbol(k: &WaveVector) -> Mat6 {
    build_matrix_set().chi_dot(&k.k())
}

/// Fourier symbol of Ω for `exp(ik·x)`: `-I₂ ⊗ (k kᵀ)`.
pub fn omega_symbol(k: &WaveVector) -> Mat6 {
    let kk = k.k() * k.k().transpose();
    let block = kk.map(|x| c(-x, 0.0));
    blocks(&block, &Mat3::zeros(), &Mat3::zeros(), &block)
}

/// Plane-wave symbol of `β^μ∂_μ`: `-iωβ⁰ + i β·k`.
pub fn dirac_symbol(omega: f64, k: &WaveVector) -> Mat6 {
    let m = build_matrix_set();
    let kv = k.k();
    m.beta0 * c(0.0, -omega)
        + m.beta[0] * c(0.0, kv[0])
        + m.beta[1] * c(0.0, kv[1])
        + m.beta[2] * c(0.0, kv[2])
}

/// Max-norm of `M(ω,k)² - [(|k|²-ω²) I₆ + Ω̂(k)]`; zero up to roundoff.
pub fn factorization_residual(omega: f64, k: &WaveVector) -> f64 {
    let m = dirac_symbol(omega, k);
    let lhs = m * m;
    let rhs = Mat6::identity() * c(k.omega().powi(2) - omega * omega, 0.0) + omega_symbol(k);
    max_abs(&(lhs - rhs))
}

pub fn max_abs<R: nalgebra::Dim, Cc: nalgebra::Dim, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn commutator<const N: usize>(
    a: &nalgebra::SMatrix<C64, N, N>,
    b: &nalgebra::SMatrix<C64, N, N>,
) -> nalgebra::SMatrix<C64, N, N> {
    a * b - b * a
}

/// `exp(-i H t)` for a Hermitian `H` through its eigendecomposition.
pub fn unitary_propagator(h: &Mat6, t: f64) -> Mat6 {
    let eig = h.symmetric_eigen();
    let phases = Vec6::from_fn(|i, _| (I * (-eig.eigenvalues[i] * t)).exp());
    let v = &eig.eigenvectors;
    v * Mat6::from_diagonal(&phases) * v.adjoint()
}

/// `exp(s G)` for a Hermitian generator `G` and real `s`.
pub fn hermitian_exp(g: &Mat6, s: f64) -> Mat6 {
    let eig = g.symmetric_eigen();
    let diag = Vec6::from_fn(|i, _| c((eig.eigenvalues[i] * s).exp(), 0.0));
    let v = &eig.eigenvectors;
    v * Mat6::from_diagonal(&diag) * v.adjoint()
}

/// Splits a 6-spinor into its upper and lower 3-blocks.
pub fn split(v: &Vec6) -> (Vec3c, Vec3c) {
    (
        Vec3c::new(v[0], v[1], v[2]),
        Vec3c::new(v[3], v[4], v[5]),
    )
}

pub fn join(upper: &Vec3c, lower: &Vec3c) -> Vec6 {
    Vec6::new(upper[0], upper[1], upper[2], lower[0], lower[1], lower[2])
}
