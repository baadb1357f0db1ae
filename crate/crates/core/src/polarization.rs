//! Helicity polarization triads ε(k,λ) and the four potential polarizations
//! e^μ(k,s).

use nalgebra::Vector4;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::algebra::{c, Vec3c, WaveVector, C64};
use crate::error::Result;

/// Helicity label λ ∈ {-1, 0, +1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Helicity {
    Minus,
    Zero,
    Plus,
}

impl Helicity {
    pub const ALL: [Helicity; 3] = [Helicity::Plus, Helicity::Minus, Helicity::Zero];
    pub const TRANSVERSE: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn value(self) -> i8 {
        match self {
            Helicity::Minus => -1,
            Helicity::Zero => 0,
            Helicity::Plus => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Helicity::Minus),
            0 => Some(Helicity::Zero),
            1 => Some(Helicity::Plus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Helicity::Minus => Helicity::Plus,
            Helicity::Zero => Helicity::Zero,
            Helicity::Plus => Helicity::Minus,
        }
    }

    pub fn is_transverse(self) -> bool {
        self != Helicity::Zero
    }

    /// `1/sqrt(1+λ²)`.
    pub fn norm_factor(self) -> f64 {
        if self.is_transverse() {
            FRAC_1_SQRT_2
        } else {
            1.0
        }
    }
}

impl std::fmt::Display for Helicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Helicity::Minus => "-1",
            Helicity::Zero => "0",
            Helicity::Plus => "+1",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PolarizationTriad {
    pub k: WaveVector,
    pub eps_plus: Vec3c,
    pub eps_minus: Vec3c,
    pub eps_zero: Vec3c,
}

impl PolarizationTriad {
    pub fn get(&self, lambda: Helicity) -> Vec3c {
        match lambda {
            Helicity::Plus => self.eps_plus,
            Helicity::Minus => self.eps_minus,
            Helicity::Zero => self.eps_zero,
        }
    }
}

/// ε(k,+1) for k away from the negative third axis, rearranged so that the
/// k₁ = k₂ = 0 limit is reached without cancellation.
fn eps_plus_upper(k: [f64; 3], norm: f64) -> Vec3c {
    let [k1, k2, k3] = k;
    let q = c(k1, k2) / (k3 + norm);
    let s = 1.0 / (std::f64::consts::SQRT_2 * norm);
    Vec3c::new(
        (c(norm, 0.0) - q * k1) * s,
        (c(0.0, norm) - q * k2) * s,
        -c(k1, k2) * s,
    )
}

fn eps_plus_lower(k: [f64; 3], norm: f64) -> Vec3c {
    let [k1, k2, k3] = k;
    let s = 1.0 / (std::f64::consts::SQRT_2 * norm);
    if k1 == 0.0 && k2 == 0.0 {
        // Limit approached along the first axis; the raw expression has a
        // direction-dependent phase here.
        return Vec3c::new(c(-FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), c(0.0, 0.0));
    }
    let den = c(k1, -k2);
    Vec3c::new(
        c(k1 * k3, -k2 * norm) / den * s,
        c(k2 * k3, k1 * norm) / den * s,
        -c(k1, k2) * s,
    )
}

pub fn polarization_triad(k: &WaveVector) -> Result<PolarizationTriad> {
    let k = WaveVector::nonzero(k.as_array())?;
    let arr = k.as_array();
    let norm = k.omega();
    let eps_plus = if arr[2] >= 0.0 {
        eps_plus_upper(arr, norm)
    } else {
        eps_plus_lower(arr, norm)
    };
    let eps_zero = k.unit().map(|x| c(x, 0.0));
    Ok(PolarizationTriad {
        k,
        eps_plus,
        eps_minus: eps_plus.map(|z| z.conj()),
        eps_zero,
    })
}

/// Single polarization vector ε(k,λ).
pub fn polarization(k: &WaveVector, lambda: Helicity) -> Result<Vec3c> {
    Ok(polarization_triad(k)?.get(lambda))
}

/// The four polarization 4-vectors e^μ(k,s), s = 0..4.
#[derive(Clone, Debug)]
pub struct FourPolarizations {
    pub e: [Vector4<C64>; 4],
}

pub fn four_polarizations(k: &WaveVector) -> Result<FourPolarizations> {
    let t = polarization_triad(k)?;
    let lift = |v: Vec3c| Vector4::new(c(0.0, 0.0), v[0], v[1], v[2]);
    Ok(FourPolarizations {
        e: [
            Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            lift(t.eps_plus),
            lift(t.eps_minus),
            lift(t.eps_zero),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{max_abs, tau_dot, Mat3};

    fn close(a: &Vec3c, b: &Vec3c, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    fn check_invariants(t: &PolarizationTriad, tol: f64) {
        let khat = t.k.unit().map(|x| c(x, 0.0));
        let helicity_op = tau_dot(&khat);
        let mut completeness = Mat3::zeros();
        for a in Helicity::ALL {
            for b in Helicity::ALL {
                let ip = t.get(a).dotc(&t.get(b));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < tol, "{a} {b} {ip}");
            }
            let e = t.get(a);
            assert!(close(&(helicity_op * e), &(e * c(a.as_f64(), 0.0)), tol));
            completeness += e * e.adjoint();
        }
        assert!(max_abs(&(completeness - Mat3::identity())) < tol);
        assert!(t.eps_zero.iter().all(|z| z.im == 0.0));
        assert!(close(&t.eps_minus, &t.eps_plus.map(|z| z.conj()), 0.0 + 1e-300));
    }

    #[test]
    fn first_axis() {
        let t = polarization_triad(&WaveVector::new([1.0, 0.0, 0.0])).unwrap();
        let s = FRAC_1_SQRT_2;
        let want = Vec3c::new(c(0.0, 0.0), c(0.0, s), c(-s, 0.0));
        assert!(close(&t.eps_plus, &want, 1e-15));
        check_invariants(&t, 1e-14);
    }

    #[test]
    fn positive_pole_matches_limit() {
        let t = polarization_triad(&WaveVector::new([0.0, 0.0, 2.0])).unwrap();
        let s = FRAC_1_SQRT_2;
        let want = Vec3c::new(c(s, 0.0), c(0.0, s), c(0.0, 0.0));
        assert!(close(&t.eps_plus, &want, 1e-15));
        // Oracle: the raw expression evaluated just off the axis, any azimuth.
        for j in 0..8 {
            let phi = j as f64 * 0.7;
            let (k1, k2) = (1e-6 * phi.cos(), 1e-6 * phi.sin());
            let k = [k1, k2, 2.0];
            let norm = (k1 * k1 + k2 * k2 + 4.0_f64).sqrt();
            let raw = eps_plus_lower(k, norm); // the unrearranged expression
            assert!(close(&raw, &want, 1e-6));
        }
        check_invariants(&t, 1e-14);
    }

    #[test]
    fn negative_pole_limit_along_first_axis() {
        let t = polarization_triad(&WaveVector::new([0.0, 0.0, -3.0])).unwrap();
        let near = polarization_triad(&WaveVector::new([1e-9, 0.0, -3.0])).unwrap();
        assert!(close(&t.eps_plus, &near.eps_plus, 1e-9));
        check_invariants(&t, 1e-14);
    }

    #[test]
    fn longitudinal_is_unit_k() {
        let k = WaveVector::new([0.3, -2.0, 1.1]);
        let t = polarization_triad(&k).unwrap();
        assert!(close(&t.eps_zero, &k.unit().map(|x| c(x, 0.0)), 1e-15));
        check_invariants(&t, 1e-14);
    }

    #[test]
    fn zero_rejected() {
        assert!(polarization_triad(&WaveVector::new([0.0; 3])).is_err());
        assert!(four_polarizations(&WaveVector::new([0.0; 3])).is_err());
    }

    #[test]
    fn four_vectors() {
        let k = WaveVector::new([1.0, 2.0, -0.5]);
        let fp = four_polarizations(&k).unwrap();
        let t = polarization_triad(&k).unwrap();
        assert_eq!(fp.e[0], Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        for s in 0..4 {
            let want = if s == 0 { 1.0 } else { 0.0 };
            assert_eq!(fp.e[s][0], c(want, 0.0));
        }
        for (s, v) in [(1, t.eps_plus), (2, t.eps_minus), (3, t.eps_zero)] {
            for i in 0..3 {
                assert_eq!(fp.e[s][i + 1], v[i]);
            }
        }
    }
}
