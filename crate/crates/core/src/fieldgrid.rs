//! Periodic lattices of six-component spinors, their observables, and two
//! independent ways of advancing them in time.

use std::f64::consts::{SQRT_2, TAU};

use nalgebra::Vector3;

use crate::algebra::{self, c, Vec3c, Vec6, WaveVector, C64, I};
use crate::error::{Error, Result};
use crate::spectral::{self, pairwise_sum, signed_harmonic, Fft3};

/// Lattice shape and box geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dims: [usize; 3],
    box_len: [f64; 3],
}

impl GridSpec {
    pub fn new(dims: [usize; 3], box_len: [f64; 3]) -> Result<Self> {
        for &n in &dims {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "every axis needs an even number of points >= 4, got {dims:?}"
                )));
            }
        }
        if !box_len.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box lengths must be positive, got {box_len:?}"
            )));
        }
        Ok(Self { dims, box_len })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn box_len(&self) -> [f64; 3] {
        self.box_len
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.box_len.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.dims[1] + i[1]) * self.dims[2] + i[2]
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i2 = idx % self.dims[2];
        let r = idx / self.dims[2];
        [r / self.dims[1], r % self.dims[1], i2]
    }

    pub fn position(&self, i: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| i[a] as f64 * self.box_len[a] / self.dims[a] as f64)
    }

    /// Physical wave vector `2π n / L` of a lattice harmonic.
    pub fn wave_vector(&self, n: [i64; 3]) -> WaveVector {
        harmonic_wave_vector(n, self.box_len)
    }

    /// Signed harmonic held by FFT bin index `idx`.
    pub fn harmonic_at(&self, idx: usize) -> [i64; 3] {
        let i = self.coords(idx);
        std::array::from_fn(|a| signed_harmonic(i[a], self.dims[a]))
    }

    /// True when `n` and `-n` are both strictly inside the band.
    pub fn in_band(&self, n: [i64; 3]) -> bool {
        (0..3).all(|a| 2 * n[a].unsigned_abs() < self.dims[a] as u64)
    }
}

pub fn harmonic_wave_vector(n: [i64; 3], box_len: [f64; 3]) -> WaveVector {
    WaveVector::new(std::array::from_fn(|a| TAU * n[a] as f64 / box_len[a]))
}

/// Sampled spinor field on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    spec: GridSpec,
    data: Vec<Vec6>,
}

impl FieldGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            data: vec![Vec6::zeros(); spec.len()],
        }
    }

    pub fn from_data(spec: GridSpec, data: Vec<Vec6>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::ShapeMismatch {
                expected: spec.len(),
                got: data.len(),
            });
        }
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn data(&self) -> &[Vec6] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Vec6] {
        &mut self.data
    }

    pub fn at(&self, i: [usize; 3]) -> &Vec6 {
        &self.data[self.spec.index(i)]
    }

    pub fn map<F: Fn(&Vec6) -> Vec6>(&self, f: F) -> Self {
        Self {
            spec: self.spec,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Largest sitewise component difference.
    pub fn max_abs_diff(&self, other: &FieldGrid) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| algebra::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(algebra::max_abs).fold(0.0, f64::max)
    }

    /// Largest deviation from "upper block real, lower block imaginary".
    pub fn physicality_deviation(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|v| (0..3).map(move |i| v[i].im.abs().max(v[i + 3].re.abs())))
            .fold(0.0, f64::max)
    }

    pub(crate) fn component(&self, i: usize) -> Vec<C64> {
        self.data.iter().map(|v| v[i]).collect()
    }

    pub(crate) fn from_components(spec: GridSpec, comps: &[Vec<C64>; 6]) -> Self {
        let data = (0..spec.len())
            .map(|s| Vec6::from_fn(|i, _| comps[i][s]))
            .collect();
        Self { spec, data }
    }

    /// Electric field `√2 · upper`.
    pub fn electric(&self) -> Vec<Vec3c> {
        self.data
            .iter()
            .map(|v| Vec3c::new(v[0], v[1], v[2]) * c(SQRT_2, 0.0))
            .collect()
    }

    /// Magnetic field `-i√2 · lower`.
    pub fn magnetic(&self) -> Vec<Vec3c> {
        self.data
            .iter()
            .map(|v| Vec3c::new(v[3], v[4], v[5]) * c(0.0, -SQRT_2))
            .collect()
    }

    /// Fourier coefficients of every component, normalized so that the field
    /// equals `Σ_n ĉ_n exp(ik_n·x)`.
    pub fn fourier_coefficients(&self) -> Vec<Vec6> {
        let fft = Fft3::new(self.spec.dims);
        let mut comps: [Vec<C64>; 6] = std::array::from_fn(|i| self.component(i));
        let scale = 1.0 / self.spec.len() as f64;
        for comp in comps.iter_mut() {
            fft.forward(comp);
        }
        (0..self.spec.len())
            .map(|s| Vec6::from_fn(|i, _| comps[i][s] * scale))
            .collect()
    }

    pub fn from_fourier_coefficients(spec: GridSpec, coeffs: &[Vec6]) -> Self {
        let fft = Fft3::new(spec.dims);
        let n = spec.len() as f64;
        let comps: [Vec<C64>; 6] = std::array::from_fn(|i| {
            let mut v: Vec<C64> = coeffs.iter().map(|x| x[i] * n).collect();
            fft.inverse(&mut v);
            v
        });
        Self::from_components(spec, &comps)
    }
}

/// `ψ = (E, iB)/√2` sitewise.
pub fn from_real_fields(e: &[[f64; 3]], b: &[[f64; 3]], spec: GridSpec) -> Result<FieldGrid> {
    for got in [e.len(), b.len()] {
        if got != spec.len() {
            return Err(Error::ShapeMismatch {
                expected: spec.len(),
                got,
            });
        }
    }
    let s = 1.0 / SQRT_2;
    let data = e
        .iter()
        .zip(b)
        .map(|(e, b)| {
            Vec6::new(
                c(e[0] * s, 0.0),
                c(e[1] * s, 0.0),
                c(e[2] * s, 0.0),
                c(0.0, b[0] * s),
                c(0.0, b[1] * s),
                c(0.0, b[2] * s),
            )
        })
        .collect();
    FieldGrid::from_data(spec, data)
}

/// Box-integrated energy, momentum and Lorentz-scalar density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables {
    pub j0: f64,
    pub j: [f64; 3],
    /// Imaginary parts of the momentum integrals; roundoff for any field
    /// since each χ_i is Hermitian.
    pub j_imag: [f64; 3],
    pub scalar_integral: f64,
}

impl Observables {
    /// Whether any `|Im J_i|` exceeds `1e-10 |Re J_i|`.
    pub fn has_imaginary_residue(&self) -> bool {
        (0..3).any(|i| self.j_imag[i].abs() > 1e-10 * self.j[i].abs())
    }
}

pub fn observables(field: &FieldGrid) -> Observables {
    let dv = field.spec.cell_volume();
    let m = algebra::build_matrix_set();
    let energy: Vec<f64> = field.data.iter().map(|v| v.norm_squared()).collect();
    let scalar: Vec<f64> = field
        .data
        .iter()
        .map(|v| (v.adjoint() * m.beta0 * v)[(0, 0)].re)
        .collect();
    let mut j = [0.0; 3];
    let mut j_imag = [0.0; 3];
    for i in 0..3 {
        let dens: Vec<C64> = field
            .data
            .iter()
            .map(|v| (v.adjoint() * m.chi[i] * v)[(0, 0)])
            .collect();
        let total = pairwise_sum(&dens) * dv;
        j[i] = total.re;
        j_imag[i] = total.im;
    }
    Observables {
        j0: pairwise_sum(&energy) * dv,
        j,
        j_imag,
        scalar_integral: pairwise_sum(&scalar) * dv,
    }
}

fn spectral_vector(fft: &Fft3, field: &[Vec3c]) -> [Vec<C64>; 3] {
    std::array::from_fn(|i| {
        let mut v: Vec<C64> = field.iter().map(|x| x[i]).collect();
        fft.forward(&mut v);
        v
    })
}

fn divergence_max(spec: &GridSpec, fft: &Fft3, field: &[Vec3c]) -> f64 {
    let hat = spectral_vector(fft, field);
    let mut div = vec![c(0.0, 0.0); spec.len()];
    for (idx, d) in div.iter_mut().enumerate() {
        let k = spec.wave_vector(spec.harmonic_at(idx)).k();
        *d = I * (hat[0][idx] * k[0] + hat[1][idx] * k[1] + hat[2][idx] * k[2]);
    }
    fft.inverse(&mut div);
    div.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norms of the spectral divergences of E and B.
pub fn transversality_residual(field: &FieldGrid) -> (f64, f64) {
    let fft = Fft3::new(field.spec.dims);
    (
        divergence_max(&field.spec, &fft, &field.electric()),
        divergence_max(&field.spec, &fft, &field.magnetic()),
    )
}

/// Applies the Hamiltonian `-iβ⁰β·∇` spectrally: each Fourier mode is
/// multiplied by `H(k)`.
pub fn apply_hamiltonian(field: &FieldGrid) -> FieldGrid {
    let m = algebra::build_matrix_set();
    let spec = field.spec;
    let coeffs: Vec<Vec6> = field
        .fourier_coefficients()
        .iter()
        .enumerate()
        .map(|(idx, v)| m.chi_dot(&spec.wave_vector(spec.harmonic_at(idx)).k()) * v)
        .collect();
    FieldGrid::from_fourier_coefficients(spec, &coeffs)
}

/// Exact evolution `ψ̂(k) ← exp(-iH(k) dt·steps) ψ̂(k)` per Fourier mode.
/// Zero-frequency content (the null space of `H(k)`) is left static.
pub fn evolve_spectral(field: &FieldGrid, dt: f64, steps: usize) -> FieldGrid {
    if steps == 0 {
        return field.clone();
    }
    let t = dt * steps as f64;
    let spec = field.spec;
    let coeffs: Vec<Vec6> = field
        .fourier_coefficients()
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            if v.iter().all(|z| *z == c(0.0, 0.0)) {
                return *v;
            }
            let k = spec.wave_vector(spec.harmonic_at(idx));
            algebra::unitary_propagator(&algebra::hamiltonian_symbol(&k), t) * v
        })
        .collect();
    FieldGrid::from_fourier_coefficients(spec, &coeffs)
}

/// Relative tolerance used to decide whether a field carries real E and B.
const PHYSICAL_TOL: f64 = 1e-10;

fn require_physical(field: &FieldGrid) -> Result<()> {
    let dev = field.physicality_deviation();
    if dev > PHYSICAL_TOL * field.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonPhysical(dev));
    }
    Ok(())
}

fn real_blocks(field: &FieldGrid) -> (Vec<Vec3c>, Vec<Vec3c>) {
    let e = field
        .data
        .iter()
        .map(|v| Vec3c::new(v[0], v[1], v[2]).map(|z| c(z.re * SQRT_2, 0.0)))
        .collect();
    let b = field
        .data
        .iter()
        .map(|v| Vec3c::new(v[3], v[4], v[5]).map(|z| c(z.im * SQRT_2, 0.0)))
        .collect();
    (e, b)
}

fn assemble(spec: GridSpec, e: &[Vec<C64>; 3], b: &[Vec<C64>; 3]) -> FieldGrid {
    let s = 1.0 / SQRT_2;
    let data = (0..spec.len())
        .map(|idx| {
            Vec6::new(
                e[0][idx] * s,
                e[1][idx] * s,
                e[2][idx] * s,
                I * b[0][idx] * s,
                I * b[1][idx] * s,
                I * b[2][idx] * s,
            )
        })
        .collect();
    FieldGrid { spec, data }
}

/// Evolves real E and B with the curl equations, one exact rotation per
/// transverse Fourier mode. Longitudinal parts are static. This path never
/// touches `H(k)` or an eigensolver.
pub fn evolve_curl_reference(field: &FieldGrid, dt: f64, steps: usize) -> Result<FieldGrid> {
    require_physical(field)?;
    if steps == 0 {
        return Ok(field.clone());
    }
    let t = dt * steps as f64;
    let spec = field.spec;
    let fft = Fft3::new(spec.dims);
    let (e, b) = real_blocks(field);
    let mut eh = spectral_vector(&fft, &e);
    let mut bh = spectral_vector(&fft, &b);
    for idx in 0..spec.len() {
        let kv = spec.wave_vector(spec.harmonic_at(idx));
        let omega = kv.omega();
        if omega == 0.0 {
            continue;
        }
        let khat = kv.unit().map(|x| c(x, 0.0));
        let ev = Vec3c::new(eh[0][idx], eh[1][idx], eh[2][idx]);
        let bv = Vec3c::new(bh[0][idx], bh[1][idx], bh[2][idx]);
        let e_par = khat * khat.dot(&ev);
        let b_par = khat * khat.dot(&bv);
        // i k̂× squares to the identity on the transverse plane
        let ke = khat.cross(&ev) * I;
        let kb = khat.cross(&bv) * I;
        let (sn, cs) = (omega * t).sin_cos();
        let e_new = e_par + (ev - e_par) * c(cs, 0.0) + kb * c(sn, 0.0);
        let b_new = b_par + (bv - b_par) * c(cs, 0.0) - ke * c(sn, 0.0);
        for i in 0..3 {
            eh[i][idx] = e_new[i];
            bh[i][idx] = b_new[i];
        }
    }
    for v in eh.iter_mut().chain(bh.iter_mut()) {
        fft.inverse(v);
    }
    Ok(assemble(spec, &eh, &bh))
}

/// Spectral curl of a vector field.
fn curl(spec: &GridSpec, fft: &Fft3, field: &[Vec3c]) -> [Vec<C64>; 3] {
    let hat = spectral_vector(fft, field);
    let mut out: [Vec<C64>; 3] = std::array::from_fn(|_| vec![c(0.0, 0.0); spec.len()]);
    for idx in 0..spec.len() {
        let k = spec.wave_vector(spec.harmonic_at(idx)).complex();
        let v = Vec3c::new(hat[0][idx], hat[1][idx], hat[2][idx]);
        let r = k.cross(&v) * I;
        for i in 0..3 {
            out[i][idx] = r[i];
        }
    }
    for v in out.iter_mut() {
        fft.inverse(v);
    }
    out
}

/// Time derivatives `(∂_t E, ∂_t B) = (∇×B, -∇×E)` of a physical field.
pub fn curl_time_derivatives(field: &FieldGrid) -> Result<(Vec<Vec3c>, Vec<Vec3c>)> {
    require_physical(field)?;
    let fft = Fft3::new(field.spec.dims);
    let (e, b) = real_blocks(field);
    let de = curl(&field.spec, &fft, &b);
    let db = curl(&field.spec, &fft, &e);
    let n = field.spec.len();
    Ok((
        (0..n)
            .map(|i| Vec3c::new(de[0][i], de[1][i], de[2][i]))
            .collect(),
        (0..n)
            .map(|i| -Vec3c::new(db[0][i], db[1][i], db[2][i]))
            .collect(),
    ))
}

/// `(τ·∇) v` evaluated spectrally with the τ matrices.
pub fn tau_gradient(spec: &GridSpec, v: &[Vec3c]) -> Vec<Vec3c> {
    let fft = Fft3::new(spec.dims);
    let hat = spectral_vector(&fft, v);
    let mut out: [Vec<C64>; 3] = std::array::from_fn(|_| vec![c(0.0, 0.0); spec.len()]);
    for idx in 0..spec.len() {
        let k = spec.wave_vector(spec.harmonic_at(idx)).complex() * I;
        let r = algebra::tau_dot(&k) * Vec3c::new(hat[0][idx], hat[1][idx], hat[2][idx]);
        for i in 0..3 {
            out[i][idx] = r[i];
        }
    }
    for comp in out.iter_mut() {
        fft.inverse(comp);
    }
    (0..spec.len())
        .map(|i| Vec3c::new(out[0][i], out[1][i], out[2][i]))
        .collect()
}

/// Total angular momentum `J_n = L_n + S_n` about `origin` for n = 1,2,3,
/// with `L = −i x×∇` (spectral ∇, pointwise x). Only meaningful for fields
/// that vanish near the cell boundary, where `x` jumps.
pub fn apply_angular_momentum(field: &FieldGrid, origin: [f64; 3]) -> [FieldGrid; 3] {
    let spec = field.spec;
    let fft = Fft3::new(spec.dims);
    let x: Vec<[f64; 3]> = (0..spec.len())
        .map(|idx| {
            let p = spec.position(spec.coords(idx));
            std::array::from_fn(|i| p[i] - origin[i])
        })
        .collect();
    // grads[i][b] = ∂_b of component i
    let grads: Vec<[Vec<C64>; 3]> = (0..6)
        .map(|i| {
            let mut hat = field.component(i);
            fft.forward(&mut hat);
            std::array::from_fn(|b| {
                let mut d = hat.clone();
                spectral::multiply_by_ik(spec.dims, &mut d, spec.box_len, |k| c(0.0, k[b]));
                fft.inverse(&mut d);
                d
            })
        })
        .collect();
    let m = algebra::build_matrix_set();
    std::array::from_fn(|axis| {
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        let s = m.spin[axis];
        let data = (0..spec.len())
            .map(|idx| {
                let orbital = Vec6::from_fn(|i, _| {
                    // L_n = −i (x_a ∂_b − x_b ∂_a)
                    (grads[i][b][idx] * x[idx][a] - grads[i][a][idx] * x[idx][b]) * c(0.0, -1.0)
                });
                s * field.data[idx] + orbital
            })
            .collect();
        FieldGrid { spec, data }
    })
}

/// Real 3-vector field helper for tests and the CLI.
pub fn real_vector_field<F>(spec: &GridSpec, f: F) -> Vec<[f64; 3]>
where
    F: Fn([f64; 3]) -> Vector3<f64>,
{
    (0..spec.len())
        .map(|idx| {
            let v = f(spec.position(spec.coords(idx)));
            [v[0], v[1], v[2]]
        })
        .collect()
}
