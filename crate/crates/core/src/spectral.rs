//! Three-dimensional FFTs on the periodic lattice and a fixed-topology
//! pairwise summation.
//!
//! Forward transforms use `exp(-ik·x)` and are unnormalized; the inverse
//! carries the `1/N` factor.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::algebra::{c, C64};

/// Planned transforms for one grid shape. Data is laid out with the last
/// axis fastest: `index = (ix * n1 + iy) * n2 + iz`.
pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        Self {
            dims,
            forward,
            inverse,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn len(&self) -> usize {
        self.dims.iter().product()
    }

    fn transform(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len());
        let [n0, n1, n2] = self.dims;
        let scratch_len = plans.iter().map(|p| p.get_inplace_scratch_len()).max().unwrap_or(0);
        let mut scratch = vec![c(0.0, 0.0); scratch_len];
        // last axis: contiguous rows, one batched call
        plans[2].process_with_scratch(data, &mut scratch);
        // other axes: gather every line into a contiguous batch, transform,
        // scatter back
        let mut batch = vec![c(0.0, 0.0); data.len()];
        for i0 in 0..n0 {
            for i2 in 0..n2 {
                for i1 in 0..n1 {
                    batch[(i0 * n2 + i2) * n1 + i1] = data[(i0 * n1 + i1) * n2 + i2];
                }
            }
        }
        plans[1].process_with_scratch(&mut batch, &mut scratch);
        for i0 in 0..n0 {
            for i2 in 0..n2 {
                for i1 in 0..n1 {
                    data[(i0 * n1 + i1) * n2 + i2] = batch[(i0 * n2 + i2) * n1 + i1];
                }
            }
        }
        for i0 in 0..n0 {
            for r in 0..n1 * n2 {
                batch[r * n0 + i0] = data[i0 * n1 * n2 + r];
            }
        }
        plans[0].process_with_scratch(&mut batch, &mut scratch);
        for i0 in 0..n0 {
            for r in 0..n1 * n2 {
                data[i0 * n1 * n2 + r] = batch[r * n0 + i0];
            }
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// Signed harmonic number of FFT bin `m` on an axis of `n` points.
/// The Nyquist bin maps to `-n/2`.
#[inline]
pub fn signed_harmonic(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// FFT bin holding harmonic `h` on an axis of `n` points.
#[inline]
pub fn bin_of(h: i64, n: usize) -> usize {
    h.rem_euclid(n as i64) as usize
}

/// `exp(2πi m / n)` for `m = 0..n`.
pub fn twiddles(n: usize) -> Vec<C64> {
    (0..n)
        .map(|m| {
            let theta = TAU * m as f64 / n as f64;
            c(theta.cos(), theta.sin())
        })
        .collect()
}

/// Derivative along `axis` of a periodic sampled function, computed in
/// Fourier space. The Nyquist bin is zeroed.
pub fn derivative(fft: &Fft3, data: &[C64], box_len: [f64; 3], axis: usize) -> Vec<C64> {
    let mut spec = data.to_vec();
    fft.forward(&mut spec);
    multiply_by_ik(fft.dims(), &mut spec, box_len, |k| c(0.0, k[axis]));
    fft.inverse(&mut spec);
    spec
}

/// Multiplies every Fourier coefficient by `symbol(k)`; the Nyquist planes
/// are zeroed so that odd-order derivatives stay real for real input.
pub fn multiply_by_ik<F>(dims: [usize; 3], spec: &mut [C64], box_len: [f64; 3], symbol: F)
where
    F: Fn([f64; 3]) -> C64,
{
    let [n0, n1, n2] = dims;
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let idx = (i0 * n1 + i1) * n2 + i2;
                let h = [
                    signed_harmonic(i0, n0),
                    signed_harmonic(i1, n1),
                    signed_harmonic(i2, n2),
                ];
                let nyquist = (0..3).any(|a| 2 * h[a].unsigned_abs() as usize == dims[a]);
                if nyquist {
                    spec[idx] = c(0.0, 0.0);
                    continue;
                }
                let k = [
                    TAU * h[0] as f64 / box_len[0],
                    TAU * h[1] as f64 / box_len[1],
                    TAU * h[2] as f64 / box_len[2],
                ];
                spec[idx] *= symbol(k);
            }
        }
    }
}

/// Pairwise (tree) sum with a topology fixed by the slice length.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dims = [4, 6, 8];
        let fft = Fft3::new(dims);
        let orig: Vec<C64> = (0..192).map(|i| c(i as f64 * 0.1, (i % 7) as f64)).collect();
        let mut d = orig.clone();
        fft.forward(&mut d);
        fft.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_harmonic_lands_in_its_bin() {
        let dims = [8, 8, 8];
        let fft = Fft3::new(dims);
        let h = [1i64, -2, 3];
        let mut d = vec![c(0.0, 0.0); 512];
        for i0 in 0..8 {
            for i1 in 0..8 {
                for i2 in 0..8 {
                    let ph = TAU * (h[0] * i0 as i64 + h[1] * i1 as i64 + h[2] * i2 as i64) as f64 / 8.0;
                    d[(i0 * 8 + i1) * 8 + i2] = c(ph.cos(), ph.sin());
                }
            }
        }
        fft.forward(&mut d);
        let idx = (bin_of(1, 8) * 8 + bin_of(-2, 8)) * 8 + bin_of(3, 8);
        assert!((d[idx] - c(512.0, 0.0)).norm() < 1e-9);
        let total: f64 = d.iter().map(|z| z.norm()).sum();
        assert!((total - 512.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_sine() {
        let dims = [16, 4, 4];
        let fft = Fft3::new(dims);
        let l = 3.0;
        let k = TAU * 2.0 / l;
        let mut d = vec![c(0.0, 0.0); 256];
        for i0 in 0..16 {
            for j in 0..16 {
                d[i0 * 16 + j] = c((k * i0 as f64 * l / 16.0).sin(), 0.0);
            }
        }
        let dd = derivative(&fft, &d, [l, 1.0, 1.0], 0);
        for i0 in 0..16 {
            let want = k * (k * i0 as f64 * l / 16.0).cos();
            assert!((dd[i0 * 16] - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }

    #[test]
    fn harmonic_bins() {
        assert_eq!(signed_harmonic(3, 8), 3);
        assert_eq!(signed_harmonic(4, 8), -4);
        assert_eq!(signed_harmonic(7, 8), -1);
        assert_eq!(bin_of(-1, 8), 7);
    }
}
