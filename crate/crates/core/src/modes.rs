//! Mode spinors, sparse amplitude sets, and the three plane-wave expansions.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Vector3;
use rand::Rng;

use crate::algebra::{c, Vec3c, Vec6, WaveVector, C64, I};
use crate::error::{Error, Result};
use crate::fieldgrid::{harmonic_wave_vector, FieldGrid, GridSpec};
use crate::polarization::{four_polarizations, polarization_triad, Helicity};
use crate::spectral::{bin_of, Fft3};

/// A lattice harmonic `n ≠ 0` together with a helicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeKey {
    pub n: [i64; 3],
    pub lambda: Helicity,
}

impl ModeKey {
    pub fn new(n: [i64; 3], lambda: Helicity) -> Result<Self> {
        if n == [0, 0, 0] {
            return Err(Error::ZeroHarmonic);
        }
        Ok(Self { n, lambda })
    }

    pub fn wave_vector(&self, box_len: [f64; 3]) -> WaveVector {
        harmonic_wave_vector(self.n, box_len)
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n.map(|x| -x),
            lambda: self.lambda,
        }
    }
}

/// The pair `f(k,λ)`, `g(k,λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSpinor {
    pub f: Vec6,
    pub g: Vec6,
}

pub fn mode_spinor(k: &WaveVector, lambda: Helicity) -> Result<ModeSpinor> {
    let eps = polarization_triad(k)?.get(lambda);
    let l = c(lambda.as_f64(), 0.0);
    let s = c(lambda.norm_factor(), 0.0);
    let join = |u: Vec3c, v: Vec3c| Vec6::new(u[0], u[1], u[2], v[0], v[1], v[2]) * s;
    Ok(ModeSpinor {
        f: join(eps, eps * l),
        g: join(eps * l, eps),
    })
}

/// Photon (`a`) and dual-photon (`b`) amplitudes of one mode.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Amplitude {
    pub a: C64,
    pub b: C64,
    /// Marks a λ=0 entry whose nonzero `a` deliberately models a virtual
    /// admixture rather than a physical state.
    pub virtual_admixture: bool,
}

impl Amplitude {
    pub fn new(a: C64, b: C64) -> Self {
        Self {
            a,
            b,
            virtual_admixture: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == c(0.0, 0.0) && self.b == c(0.0, 0.0)
    }
}

/// Sparse map from modes to amplitudes in a fixed box. Absent modes are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSet {
    box_len: [f64; 3],
    entries: BTreeMap<ModeKey, Amplitude>,
}

impl AmplitudeSet {
    pub fn new(box_len: [f64; 3]) -> Result<Self> {
        if !box_len.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box lengths must be positive, got {box_len:?}"
            )));
        }
        Ok(Self {
            box_len,
            entries: BTreeMap::new(),
        })
    }

    pub fn box_len(&self) -> [f64; 3] {
        self.box_len
    }

    pub fn volume(&self) -> f64 {
        self.box_len.iter().product()
    }

    /// Stores `amp`, removing the entry when both amplitudes vanish.
    pub fn insert(&mut self, key: ModeKey, amp: Amplitude) {
        if amp.is_zero() && !amp.virtual_admixture {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, amp);
        }
    }

    pub fn set_a(&mut self, key: ModeKey, a: C64) {
        let mut amp = self.get(key);
        amp.a = a;
        self.insert(key, amp);
    }

    pub fn set_b(&mut self, key: ModeKey, b: C64) {
        let mut amp = self.get(key);
        amp.b = b;
        self.insert(key, amp);
    }

    pub fn get(&self, key: ModeKey) -> Amplitude {
        self.entries.get(&key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeKey, &Amplitude)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_transverse(&self) -> bool {
        self.entries.keys().all(|k| k.lambda.is_transverse())
    }

    /// λ=0 entries with `a ≠ 0` that are not flagged as virtual admixtures.
    pub fn gupta_bleuler_violations(&self) -> Vec<ModeKey> {
        self.entries
            .iter()
            .filter(|(k, v)| {
                k.lambda == Helicity::Zero && v.a != c(0.0, 0.0) && !v.virtual_admixture
            })
            .map(|(k, _)| *k)
            .collect()
    }

    /// Largest amplitude difference over the union of both key sets.
    pub fn max_abs_diff(&self, other: &AmplitudeSet) -> f64 {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|k| {
                let (x, y) = (self.get(*k), other.get(*k));
                (x.a - y.a).norm().max((x.b - y.b).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.a.norm().max(v.b.norm()))
            .fold(0.0, f64::max)
    }

    /// Random amplitudes on harmonics with `|n_i| ≤ max_harmonic`.
    pub fn random<R: Rng>(
        rng: &mut R,
        box_len: [f64; 3],
        max_harmonic: i64,
        count: usize,
        transverse_only: bool,
    ) -> Result<Self> {
        let mut set = Self::new(box_len)?;
        let mut tries = 0;
        while set.len() < count && tries < 100 * count.max(1) {
            tries += 1;
            let n: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-max_harmonic..=max_harmonic));
            if n == [0, 0, 0] {
                continue;
            }
            let pool: &[Helicity] = if transverse_only {
                &Helicity::TRANSVERSE
            } else {
                &Helicity::ALL
            };
            let lambda = pool[rng.gen_range(0..pool.len())];
            let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let amp = Amplitude {
                a: z(),
                b: z(),
                virtual_admixture: lambda == Helicity::Zero,
            };
            set.insert(ModeKey { n, lambda }, amp);
        }
        Ok(set)
    }
}

/// Which printed expansion to synthesize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `√(ω/V)[a f e^{-ik·x} + b* g e^{ik·x}]`.
    Dual,
    /// `√(ω/2V) f [a e^{-ik·x} + a* e^{ik·x}]`.
    PhotonOnly,
    /// `√(ω/2V) g [b e^{-ik·x} + b* e^{ik·x}]`.
    DualPhotonOnly,
}

/// One term `spinor · exp(-i(ν t − k·x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWave {
    pub spinor: Vec6,
    pub nu: f64,
    pub k: Vector3<f64>,
    /// Harmonic of the spatial factor on the box lattice.
    pub n: [i64; 3],
}

impl PlaneWave {
    pub fn phase(&self, t: f64, x: &Vector3<f64>) -> C64 {
        let theta = self.k.dot(x) - self.nu * t;
        c(theta.cos(), theta.sin())
    }

    pub fn value(&self, t: f64, x: &Vector3<f64>) -> Vec6 {
        self.spinor * self.phase(t, x)
    }

    /// `∂_μ` of the term, μ = 0..4.
    pub fn derivative(&self, mu: usize, t: f64, x: &Vector3<f64>) -> Vec6 {
        let factor = if mu == 0 {
            c(0.0, -self.nu)
        } else {
            c(0.0, self.k[mu - 1])
        };
        self.value(t, x) * factor
    }
}

/// Decomposes an amplitude set into plane-wave terms, sorted by mode.
pub fn plane_waves(amps: &AmplitudeSet, variant: Variant) -> Result<Vec<PlaneWave>> {
    let v = amps.volume();
    let mut out = Vec::with_capacity(2 * amps.len());
    for (key, amp) in amps.iter() {
        let kv = key.wave_vector(amps.box_len);
        let omega = kv.omega();
        let ms = mode_spinor(&kv, key.lambda)?;
        let neg = key.n.map(|x| -x);
        let (spinor, first, second) = match variant {
            Variant::Dual => {
                let s = c((omega / v).sqrt(), 0.0);
                (ms.g, amp.a * s, amp.b.conj() * s)
            }
            Variant::PhotonOnly => {
                let s = c((omega / (2.0 * v)).sqrt(), 0.0);
                (ms.f, amp.a * s, amp.a.conj() * s)
            }
            Variant::DualPhotonOnly => {
                let s = c((omega / (2.0 * v)).sqrt(), 0.0);
                (ms.g, amp.b * s, amp.b.conj() * s)
            }
        };
        let first_spinor = if variant == Variant::Dual { ms.f } else { spinor };
        out.push(PlaneWave {
            spinor: first_spinor * first,
            nu: omega,
            k: kv.k(),
            n: key.n,
        });
        out.push(PlaneWave {
            spinor: spinor * second,
            nu: -omega,
            k: -kv.k(),
            n: neg,
        });
    }
    Ok(out)
}

/// Direct pointwise sum of all plane-wave terms.
pub fn evaluate(waves: &[PlaneWave], t: f64, x: &Vector3<f64>) -> Vec6 {
    waves.iter().fold(Vec6::zeros(), |acc, w| acc + w.value(t, x))
}

fn check_grid(amps_box: [f64; 3], grid: &GridSpec, ns: impl Iterator<Item = [i64; 3]>) -> Result<()> {
    if amps_box != grid.box_len() {
        return Err(Error::BoxMismatch {
            amplitudes: amps_box,
            grid: grid.box_len(),
        });
    }
    for n in ns {
        if !grid.in_band(n) {
            return Err(Error::OutOfBand {
                n,
                dims: grid.dims(),
            });
        }
    }
    Ok(())
}

fn bin_index(grid: &GridSpec, n: [i64; 3]) -> usize {
    let d = grid.dims();
    grid.index(std::array::from_fn(|a| bin_of(n[a], d[a])))
}

/// Samples an expansion on the grid at time `t`.
pub fn synthesize_field(
    amps: &AmplitudeSet,
    grid: &GridSpec,
    t: f64,
    variant: Variant,
) -> Result<FieldGrid> {
    check_grid(amps.box_len, grid, amps.iter().map(|(k, _)| k.n))?;
    let mut coeffs = vec![Vec6::zeros(); grid.len()];
    for w in plane_waves(amps, variant)? {
        let theta = -w.nu * t;
        coeffs[bin_index(grid, w.n)] += w.spinor * c(theta.cos(), theta.sin());
    }
    Ok(FieldGrid::from_fourier_coefficients(*grid, &coeffs))
}

/// Relative threshold below which projected amplitudes are dropped.
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Inverts the `Dual` synthesis at time `t` by projecting every in-band
/// Fourier coefficient onto the `f(k,λ)` and `g(-k,λ)` sectors. Content at
/// `n = 0` or on the Nyquist planes has no mode and is discarded.
pub fn project_amplitudes(field: &FieldGrid, t: f64) -> AmplitudeSet {
    let grid = *field.spec();
    let coeffs = field.fourier_coefficients();
    let v = grid.volume();
    let mut raw = Vec::new();
    for idx in 0..grid.len() {
        let n = grid.harmonic_at(idx);
        if n == [0, 0, 0] || !grid.in_band(n) {
            continue;
        }
        let kv = grid.wave_vector(n);
        let omega = kv.omega();
        let s = (omega / v).sqrt();
        let here = coeffs[idx];
        let there = coeffs[bin_index(&grid, n.map(|x| -x))];
        let (sn, cs) = (omega * t).sin_cos();
        let fwd = c(cs, sn);
        for lambda in Helicity::ALL {
            let ms = mode_spinor(&kv, lambda).expect("nonzero harmonic");
            let a = ms.f.dotc(&here) * fwd / s;
            let b = (ms.g.dotc(&there) * fwd.conj()).conj() / s;
            raw.push((ModeKey { n, lambda }, a, b));
        }
    }
    let max = raw
        .iter()
        .map(|(_, a, b)| a.norm().max(b.norm()))
        .fold(0.0, f64::max);
    let cut = DROP_THRESHOLD * max;
    let mut out = AmplitudeSet::new(grid.box_len()).expect("grid box is valid");
    for (key, a, b) in raw {
        let keep = |z: C64| if z.norm() > cut { z } else { c(0.0, 0.0) };
        let amp = Amplitude::new(keep(a), keep(b));
        if !amp.is_zero() {
            out.insert(key, amp);
        }
    }
    out
}

/// Covariant potential amplitudes `c(k,s)`, s = 0..4.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialAmplitudes {
    box_len: [f64; 3],
    entries: BTreeMap<([i64; 3], u8), C64>,
}

impl PotentialAmplitudes {
    pub fn new(box_len: [f64; 3]) -> Result<Self> {
        AmplitudeSet::new(box_len)?;
        Ok(Self {
            box_len,
            entries: BTreeMap::new(),
        })
    }

    pub fn box_len(&self) -> [f64; 3] {
        self.box_len
    }

    pub fn insert(&mut self, n: [i64; 3], s: u8, value: C64) -> Result<()> {
        if n == [0, 0, 0] {
            return Err(Error::ZeroHarmonic);
        }
        if s > 3 {
            return Err(Error::Format(format!("polarization index {s} outside 0..=3")));
        }
        self.entries.insert((n, s), value);
        Ok(())
    }

    pub fn get(&self, n: [i64; 3], s: u8) -> C64 {
        self.entries.get(&(n, s)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&([i64; 3], u8), &C64)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `a(k,+1) = ic(k,1)`, `a(k,-1) = ic(k,2)`, `a(k,0) = i[c(k,3) − c(k,0)]/√2`.
pub fn amplitudes_from_potential(pot: &PotentialAmplitudes) -> AmplitudeSet {
    let mut out = AmplitudeSet::new(pot.box_len).expect("box validated on construction");
    let mut harmonics: Vec<[i64; 3]> = pot.entries.keys().map(|(n, _)| *n).collect();
    harmonics.dedup();
    for n in harmonics {
        let cs = |s| pot.get(n, s);
        let pairs = [
            (Helicity::Plus, I * cs(1)),
            (Helicity::Minus, I * cs(2)),
            (Helicity::Zero, I * (cs(3) - cs(0)) * FRAC_1_SQRT_2),
        ];
        for (lambda, a) in pairs {
            out.set_a(ModeKey { n, lambda }, a);
        }
    }
    out
}

/// Builds `A^μ` from the covariant expansion, forms `E = -∇A⁰ − ∂_t A` and
/// `B = ∇×A` (time derivatives analytic, gradients spectral), and returns
/// `(E, iB)/√2`.
pub fn potential_fields(pot: &PotentialAmplitudes, grid: &GridSpec, t: f64) -> Result<FieldGrid> {
    check_grid(pot.box_len, grid, pot.entries.keys().map(|(n, _)| *n))?;
    let v = grid.volume();
    let len = grid.len();
    let mut a_hat: [Vec<C64>; 4] = std::array::from_fn(|_| vec![c(0.0, 0.0); len]);
    let mut dt_hat: [Vec<C64>; 4] = std::array::from_fn(|_| vec![c(0.0, 0.0); len]);
    for (&(n, s), &cval) in pot.iter() {
        let kv = grid.wave_vector(n);
        let omega = kv.omega();
        let e = four_polarizations(&kv)?.e[s as usize];
        let norm = 1.0 / (2.0 * omega * v).sqrt();
        let ph = c((omega * t).cos(), -(omega * t).sin());
        let terms = [
            (n, cval * ph * norm, -omega),
            (n.map(|x| -x), cval.conj() * ph.conj() * norm, omega),
        ];
        for (m, coef, dt_factor) in terms {
            let idx = bin_index(grid, m);
            for mu in 0..4 {
                a_hat[mu][idx] += e[mu] * coef;
                dt_hat[mu][idx] += e[mu] * coef * c(0.0, dt_factor);
            }
        }
    }
    let s = FRAC_1_SQRT_2;
    let mut comps: [Vec<C64>; 6] = std::array::from_fn(|_| vec![c(0.0, 0.0); len]);
    for idx in 0..len {
        let k = grid.wave_vector(grid.harmonic_at(idx)).complex();
        let a3 = Vec3c::new(a_hat[1][idx], a_hat[2][idx], a_hat[3][idx]);
        let dta = Vec3c::new(dt_hat[1][idx], dt_hat[2][idx], dt_hat[3][idx]);
        let e = -(k * (I * a_hat[0][idx])) - dta;
        let b = k.cross(&a3) * I;
        for i in 0..3 {
            comps[i][idx] = e[i] * s * len as f64;
            comps[i + 3][idx] = I * b[i] * s * len as f64;
        }
    }
    let fft = Fft3::new(grid.dims());
    for comp in comps.iter_mut() {
        fft.inverse(comp);
    }
    let data = (0..len)
        .map(|i| Vec6::from_fn(|r, _| comps[r][i]))
        .collect();
    FieldGrid::from_data(*grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{hamiltonian_symbol, max_abs};

    fn k() -> WaveVector {
        WaveVector::new([0.3, -1.2, 0.7])
    }

    #[test]
    fn zero_harmonic_rejected() {
        assert!(matches!(ModeKey::new([0, 0, 0], Helicity::Plus), Err(Error::ZeroHarmonic)));
    }

    #[test]
    fn longitudinal_spinor() {
        let m = mode_spinor(&k(), Helicity::Zero).unwrap();
        let eps = k().unit();
        for i in 0..3 {
            assert!((m.f[i] - c(eps[i], 0.0)).norm() < 1e-15);
            assert_eq!(m.f[i + 3], c(0.0, 0.0));
        }
    }

    #[test]
    fn plus_helicity_f_equals_g() {
        let m = mode_spinor(&k(), Helicity::Plus).unwrap();
        assert_eq!(m.f, m.g);
        let minus = mode_spinor(&k(), Helicity::Minus).unwrap();
        assert!(m.f.dotc(&minus.f).norm() < 1e-15);
    }

    #[test]
    fn eigen_structure() {
        let h = hamiltonian_symbol(&k());
        let w = k().omega();
        for l in Helicity::ALL {
            let f = mode_spinor(&k(), l).unwrap().f;
            let g = mode_spinor(&k().neg(), l).unwrap().g;
            let sign = if l.is_transverse() { 1.0 } else { 0.0 };
            assert!(max_abs(&(h * f - f * c(sign * w, 0.0))) < 1e-12 * w);
            assert!(max_abs(&(h * g + g * c(sign * w, 0.0))) < 1e-12 * w);
        }
    }

    #[test]
    fn empty_set_synthesizes_zero() {
        let g = GridSpec::new([4, 4, 4], [1.0; 3]).unwrap();
        let amps = AmplitudeSet::new([1.0; 3]).unwrap();
        for v in [Variant::Dual, Variant::PhotonOnly, Variant::DualPhotonOnly] {
            assert_eq!(synthesize_field(&amps, &g, 0.3, v).unwrap(), FieldGrid::zeros(g));
        }
        assert!(project_amplitudes(&FieldGrid::zeros(g), 0.0).is_empty());
    }

    #[test]
    fn grid_preconditions() {
        let g = GridSpec::new([4, 4, 4], [1.0; 3]).unwrap();
        let mut amps = AmplitudeSet::new([1.0; 3]).unwrap();
        amps.set_a(ModeKey::new([2, 0, 0], Helicity::Plus).unwrap(), c(1.0, 0.0));
        assert!(matches!(
            synthesize_field(&amps, &g, 0.0, Variant::Dual),
            Err(Error::OutOfBand { n: [2, 0, 0], .. })
        ));
        let other = AmplitudeSet::new([2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            synthesize_field(&other, &g, 0.0, Variant::Dual),
            Err(Error::BoxMismatch { .. })
        ));
    }

    #[test]
    fn potential_map() {
        let mut pot = PotentialAmplitudes::new([1.0; 3]).unwrap();
        let n = [1, 0, 0];
        pot.insert(n, 1, c(0.5, 2.0)).unwrap();
        pot.insert(n, 3, c(0.25, 0.0)).unwrap();
        pot.insert(n, 0, c(0.25, 0.0)).unwrap();
        let a = amplitudes_from_potential(&pot);
        assert_eq!(a.get(ModeKey { n, lambda: Helicity::Plus }).a, c(-2.0, 0.5));
        assert_eq!(a.get(ModeKey { n, lambda: Helicity::Zero }).a, c(0.0, 0.0));
        assert_eq!(a.len(), 1);
        assert!(amplitudes_from_potential(&PotentialAmplitudes::new([1.0; 3]).unwrap()).is_empty());
    }
}
