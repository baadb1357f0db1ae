//! Zitterbewegung: the R/T coefficient vectors, the box momentum as a
//! closed-form time series, and extraction of its oscillating part.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::Vector3;

use crate::algebra::{c, tau, Vec3c, WaveVector};
use crate::error::{Error, Result};
use crate::modes::{AmplitudeSet, ModeKey};
use crate::polarization::{polarization_triad, Helicity};

/// Nine `R(λ,λ')` and nine `T(λ,λ')` vectors for one wave vector.
#[derive(Clone, Debug)]
pub struct RTTable {
    pub k: WaveVector,
    pub r: BTreeMap<(Helicity, Helicity), Vec3c>,
    pub t: BTreeMap<(Helicity, Helicity), Vec3c>,
}

impl RTTable {
    pub fn r(&self, l: Helicity, lp: Helicity) -> Vec3c {
        self.r[&(l, lp)]
    }

    pub fn t(&self, l: Helicity, lp: Helicity) -> Vec3c {
        self.t[&(l, lp)]
    }
}

/// `u†τ v` as a 3-vector.
fn tau_sandwich(u: &Vec3c, v: &Vec3c) -> Vec3c {
    let t = tau();
    Vec3c::from_fn(|i, _| u.dotc(&(t[i] * v)))
}

pub fn rt_vectors(k: &WaveVector) -> Result<RTTable> {
    let here = polarization_triad(k)?;
    let there = polarization_triad(&k.neg())?;
    let mut r = BTreeMap::new();
    let mut t = BTreeMap::new();
    for l in Helicity::ALL {
        for lp in Helicity::ALL {
            let norm = l.norm_factor() * lp.norm_factor();
            let (lf, lpf) = (l.as_f64(), lp.as_f64());
            let ev = here.get(l);
            r.insert((l, lp), tau_sandwich(&ev, &here.get(lp)) * c((lf + lpf) * norm, 0.0));
            t.insert((l, lp), tau_sandwich(&ev, &there.get(lp)) * c((1.0 + lf * lpf) * norm, 0.0));
        }
    }
    Ok(RTTable { k: *k, r, t })
}

/// Which closed-form momentum expression to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formalism {
    /// Photon and dual-photon branches.
    Dual,
    /// Photon branch only, traditional coefficients.
    Traditional,
}

/// Momentum samples; `groups[g][i]` is the contribution of term group `g`
/// (constant transverse part, mixed constant part, and the two
/// `e^{±2iωt}` groups) at `times[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSeries {
    pub times: Vec<f64>,
    pub j: Vec<[f64; 3]>,
    pub groups: [Vec<[f64; 3]>; 4],
    pub formalism: Formalism,
}

fn harmonics(amps: &AmplitudeSet) -> BTreeSet<[i64; 3]> {
    amps.iter()
        .flat_map(|(k, _)| [k.n, k.n.map(|x| -x)])
        .collect()
}

fn key(n: [i64; 3], lambda: Helicity) -> ModeKey {
    ModeKey { n, lambda }
}

/// Coefficient of a phase group: `(coeff, sign)` contributes
/// `coeff · e^{sign·2iωt}`.
struct Group {
    index: usize,
    omega: f64,
    coeff: Vec3c,
    sign: f64,
}

fn dual_groups(amps: &AmplitudeSet) -> Result<Vec<Group>> {
    let mut out = Vec::new();
    for n in harmonics(amps) {
        let kv = crate::fieldgrid::harmonic_wave_vector(n, amps.box_len());
        let w = kv.omega();
        let rt = rt_vectors(&kv)?;
        let neg = n.map(|x| -x);
        for l in Helicity::ALL {
            for lp in Helicity::ALL {
                let (x, y) = (amps.get(key(n, l)), amps.get(key(n, lp)));
                let r = rt.r(l, lp) * c(w, 0.0);
                let constant = r * (x.a.conj() * y.a + x.b * y.b.conj());
                out.push(Group {
                    index: if l == lp { 0 } else { 1 },
                    omega: w,
                    coeff: constant,
                    sign: 0.0,
                });
                let z = amps.get(key(neg, lp));
                let t = rt.t(l, lp) * c(w, 0.0);
                let index = if lp == Helicity::Zero && l != Helicity::Zero { 2 } else { 3 };
                let index = if l.is_transverse() && lp.is_transverse() { 2 } else { index };
                out.push(Group {
                    index,
                    omega: w,
                    coeff: t * (x.b * z.a),
                    sign: -1.0,
                });
                out.push(Group {
                    index,
                    omega: w,
                    coeff: t * (x.a.conj() * z.b.conj()),
                    sign: 1.0,
                });
            }
        }
    }
    Ok(out)
}

fn traditional_groups(amps: &AmplitudeSet) -> Result<Vec<Group>> {
    let mut out = Vec::new();
    let s = FRAC_1_SQRT_2;
    for n in harmonics(amps) {
        let kv = crate::fieldgrid::harmonic_wave_vector(n, amps.box_len());
        let w = kv.omega();
        let here = polarization_triad(&kv)?;
        let there = polarization_triad(&kv.neg())?;
        let neg = n.map(|x| -x);
        let a0 = amps.get(key(n, Helicity::Zero)).a;
        let a0_neg = amps.get(key(neg, Helicity::Zero)).a;
        // each printed bracket is a term plus its Hermitian conjugate
        let mut push = |index, coeff: Vec3c, sign: f64| {
            out.push(Group { index, omega: w, coeff, sign });
            out.push(Group {
                index,
                omega: w,
                coeff: coeff.map(|z| z.conj()),
                sign: -sign,
            });
        };
        for l in Helicity::TRANSVERSE {
            let lf = l.as_f64();
            let a = amps.get(key(n, l)).a;
            // k a†a is already Hermitian: push half of it twice
            push(0, kv.complex() * c(0.5 * a.norm_sqr(), 0.0), 0.0);
            push(1, here.get(l) * (c(-w * s, 0.0) * a0.conj() * a), 0.0);
            push(2, here.get(l.flip()) * (c(-lf * w * s / 2.0, 0.0) * a * a0_neg), -1.0);
            let a_neg = amps.get(key(neg, l)).a;
            push(3, there.get(l) * (c(lf * w * s / 2.0, 0.0) * a0 * a_neg), -1.0);
        }
    }
    Ok(out)
}

fn groups(amps: &AmplitudeSet, formalism: Formalism) -> Result<Vec<Group>> {
    match formalism {
        Formalism::Dual => dual_groups(amps),
        Formalism::Traditional => traditional_groups(amps),
    }
}

/// Evaluates the closed-form box momentum at every time.
pub fn momentum_series(
    amps: &AmplitudeSet,
    times: &[f64],
    formalism: Formalism,
) -> Result<MomentumSeries> {
    let gs = groups(amps, formalism)?;
    let mut per_group: [Vec<[f64; 3]>; 4] = std::array::from_fn(|_| Vec::with_capacity(times.len()));
    let mut total = Vec::with_capacity(times.len());
    for &t in times {
        let mut acc = [Vec3c::zeros(); 4];
        for g in &gs {
            let th = g.sign * 2.0 * g.omega * t;
            acc[g.index] += g.coeff * c(th.cos(), th.sin());
        }
        let mut sum = [0.0; 3];
        for (gi, v) in acc.iter().enumerate() {
            let re = [v[0].re, v[1].re, v[2].re];
            for i in 0..3 {
                sum[i] += re[i];
            }
            per_group[gi].push(re);
        }
        total.push(sum);
    }
    Ok(MomentumSeries {
        times: times.to_vec(),
        j: total,
        groups: per_group,
        formalism,
    })
}

/// Summary of the oscillating part of a momentum series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZbSummary {
    pub constant: [f64; 3],
    pub zb_amplitude: [f64; 3],
    /// Angular frequency of the strongest DFT bin; 0 for a constant series.
    pub frequency: f64,
}

/// Minimum number of samples accepted by [`zb_extract`].
pub const MIN_SAMPLES: usize = 64;

pub fn zb_extract(series: &MomentumSeries) -> Result<ZbSummary> {
    let n = series.times.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let dt = series.times[1] - series.times[0];
    let uniform = dt > 0.0
        && series
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs());
    if !uniform {
        return Err(Error::NonUniformSampling);
    }
    let mut constant = [0.0; 3];
    for j in &series.j {
        for i in 0..3 {
            constant[i] += j[i];
        }
    }
    constant = constant.map(|x| x / n as f64);
    let scale = constant.iter().chain(series.j.iter().flatten()).fold(0.0f64, |m, x| m.max(x.abs()));
    let mut amp = [0.0f64; 3];
    for j in &series.j {
        for i in 0..3 {
            amp[i] = amp[i].max((j[i] - constant[i]).abs());
        }
    }
    // roundoff-level wiggles count as no oscillation
    if amp.iter().all(|a| *a <= 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Ok(ZbSummary {
            constant,
            zb_amplitude: [0.0; 3],
            frequency: 0.0,
        });
    }
    let twiddle = crate::spectral::twiddles(n);
    let mut best = (0usize, 0.0f64);
    for m in 1..=n / 2 {
        let mut power = 0.0;
        for i in 0..3 {
            let mut acc = c(0.0, 0.0);
            for (s, j) in series.j.iter().enumerate() {
                acc += twiddle[(m * s) % n].conj() * (j[i] - constant[i]);
            }
            power += acc.norm_sqr();
        }
        if power > best.1 {
            best = (m, power);
        }
    }
    Ok(ZbSummary {
        constant,
        zb_amplitude: amp,
        frequency: TAU * best.0 as f64 / (n as f64 * dt),
    })
}

/// Peak excursion of `∫(J − J̄)/J⁰ dt` along each axis, trapezoid rule.
pub fn displacement_amplitude(series: &MomentumSeries, j0: f64) -> [f64; 3] {
    let mean: Vector3<f64> = series
        .j
        .iter()
        .map(|j| Vector3::from(*j))
        .sum::<Vector3<f64>>()
        / series.j.len() as f64;
    let mut x = Vector3::zeros();
    let mut lo = Vector3::zeros();
    let mut hi = Vector3::zeros();
    for w in 0..series.j.len().saturating_sub(1) {
        let dt = series.times[w + 1] - series.times[w];
        let a = Vector3::from(series.j[w]) - mean;
        let b = Vector3::from(series.j[w + 1]) - mean;
        x += (a + b) * (0.5 * dt / j0);
        lo = lo.inf(&x);
        hi = hi.sup(&x);
    }
    let half = (hi - lo) / 2.0;
    [half[0], half[1], half[2]]
}

/// Uniform samples `t0 + i (t1 − t0)/samples`, `i = 0..samples`.
pub fn uniform_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    let dt = (t1 - t0) / samples as f64;
    (0..samples).map(|i| t0 + dt * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_amplitudes_give_zero_series() {
        let amps = AmplitudeSet::new([1.0; 3]).unwrap();
        let s = momentum_series(&amps, &[0.0, 0.5], Formalism::Dual).unwrap();
        assert_eq!(s.j, vec![[0.0; 3]; 2]);
    }

    #[test]
    fn extraction_guards() {
        let s = MomentumSeries {
            times: (0..10).map(|i| i as f64).collect(),
            j: vec![[0.0; 3]; 10],
            groups: std::array::from_fn(|_| vec![[0.0; 3]; 10]),
            formalism: Formalism::Dual,
        };
        assert!(matches!(zb_extract(&s), Err(Error::TooFewSamples { .. })));
        let mut times = uniform_times(0.0, 1.0, 64);
        times[5] += 1e-3;
        let s = MomentumSeries {
            times,
            j: vec![[1.0; 3]; 64],
            groups: std::array::from_fn(|_| vec![[0.0; 3]; 64]),
            formalism: Formalism::Dual,
        };
        assert!(matches!(zb_extract(&s), Err(Error::NonUniformSampling)));
    }

    #[test]
    fn constant_series() {
        let times = uniform_times(0.0, 1.0, 64);
        let s = MomentumSeries {
            j: vec![[1.0, 2.0, 3.0]; 64],
            groups: std::array::from_fn(|_| vec![[0.0; 3]; 64]),
            times,
            formalism: Formalism::Dual,
        };
        let z = zb_extract(&s).unwrap();
        assert_eq!((z.zb_amplitude, z.frequency), ([0.0; 3], 0.0));
        assert!((z.constant[1] - 2.0).abs() < 1e-15);
    }
}
