use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use photon_wave::algebra::{Vec3c, WaveVector};
use photon_wave::fieldgrid::{harmonic_wave_vector, observables, GridSpec};
use photon_wave::ladder::*;
use photon_wave::modes::*;
use photon_wave::polarization::{polarization, Helicity};
use photon_wave::zb::*;
use photon_wave::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Helicity::{Minus, Plus, Zero};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn near(a: &Vec3c, b: &Vec3c, tol: f64) -> bool {
    (a - b).camax() <= tol
}

const BOX: [f64; 3] = [1.0, 1.3, 0.9];

fn key(n: [i64; 3], l: Helicity) -> ModeKey {
    ModeKey::new(n, l).unwrap()
}

#[test]
fn rt_table_for_random_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let s = FRAC_1_SQRT_2;
    let zero = Vec3c::zeros();
    for _ in 0..200 {
        let k = WaveVector::new([0, 1, 2].map(|_| rng.gen_range(-5.0..5.0)));
        let rt = rt_vectors(&k).unwrap();
        let eta = polarization(&k, Plus).unwrap();
        let eta_neg = polarization(&k.neg(), Plus).unwrap();
        let tol = 1e-12;
        for (l, lp) in [(Plus, Minus), (Minus, Plus), (Zero, Zero)] {
            assert!(near(&rt.r(l, lp), &zero, tol));
        }
        let kw = k.complex() / c(k.omega(), 0.0);
        assert!(near(&rt.r(Plus, Plus), &kw, tol));
        assert!(near(&rt.r(Minus, Minus), &kw, tol));
        let m = -eta * c(s, 0.0);
        assert!(near(&rt.r(Zero, Plus), &m, tol));
        assert!(near(&rt.r(Minus, Zero), &m, tol));
        assert!(near(&rt.r(Plus, Zero).map(|z| z.conj()), &m, tol));
        assert!(near(&rt.r(Zero, Minus).map(|z| z.conj()), &m, tol));
        for (l, lp) in [(Plus, Minus), (Minus, Plus), (Zero, Zero), (Plus, Plus), (Minus, Minus)] {
            assert!(near(&rt.t(l, lp), &zero, tol));
        }
        assert!(near(&rt.t(Minus, Zero), &m, tol));
        assert!(near(&(-rt.t(Plus, Zero).map(|z| z.conj())), &m, tol));
        let p = eta_neg * c(s, 0.0);
        assert!(near(&rt.t(Zero, Plus), &p, tol));
        assert!(near(&(-rt.t(Zero, Minus).map(|z| z.conj())), &p, tol));
    }
    assert!(matches!(rt_vectors(&WaveVector::new([0.0; 3])), Err(Error::ZeroWaveVector(_))));
}

fn random_set(seed: u64, transverse: bool) -> AmplitudeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AmplitudeSet::random(&mut rng, BOX, 3, 8, transverse).unwrap()
}

fn spread(series: &MomentumSeries) -> f64 {
    let first = series.j[0];
    series
        .j
        .iter()
        .flat_map(|j| (0..3).map(move |i| (j[i] - first[i]).abs()))
        .fold(0.0, f64::max)
}

fn scale(series: &MomentumSeries) -> f64 {
    series.j.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn transverse_sets_have_constant_momentum() {
    let times = uniform_times(0.0, 3.0, 97);
    for seed in 0..20 {
        let amps = random_set(seed, true);
        for f in [Formalism::Dual, Formalism::Traditional] {
            let s = momentum_series(&amps, &times, f).unwrap();
            assert!(spread(&s) <= 1e-12 * scale(&s), "{seed} {f:?}");
            let z = zb_extract(&s).unwrap();
            assert_eq!(z.zb_amplitude, [0.0; 3]);
        }
        // the constant is Σ k (|a|² + |b|²)
        let s = momentum_series(&amps, &[0.4], Formalism::Dual).unwrap();
        let mut want = Vector3::zeros();
        for (k, v) in amps.iter() {
            want += k.wave_vector(BOX).k() * (v.a.norm_sqr() + v.b.norm_sqr());
        }
        assert!((Vector3::from(s.j[0]) - want).amax() < 1e-12 * want.amax().max(1.0));
    }
}

/// b(k,+1) = 1 against a(−k,0) = 1.
fn two_mode() -> (AmplitudeSet, WaveVector) {
    let n = [1, 2, 0];
    let mut amps = AmplitudeSet::new(BOX).unwrap();
    amps.set_b(key(n, Plus), c(1.0, 0.0));
    amps.set_a(key(n.map(|x| -x), Zero), c(1.0, 0.0));
    (amps, harmonic_wave_vector(n, BOX))
}

#[test]
fn admixture_oscillates_at_twice_omega() {
    let (amps, k) = two_mode();
    let w = k.omega();
    let period = TAU / (2.0 * w);
    let times = uniform_times(0.0, 8.0 * period, 256);
    let s = momentum_series(&amps, &times, Formalism::Dual).unwrap();
    let z = zb_extract(&s).unwrap();
    let bin = TAU / (8.0 * period);
    assert!((z.frequency - 2.0 * w).abs() <= bin, "{} {}", z.frequency, 2.0 * w);

    // closed form: const + 2 Re[(ω/√2) η(k,−1) e^{−2iωt}]
    let eta = polarization(&k, Minus).unwrap();
    let kv = k.k();
    for (t, j) in times.iter().zip(&s.j) {
        let ph = c(0.0, -2.0 * w * t).exp();
        let osc = (eta * (c(w * FRAC_1_SQRT_2, 0.0) * ph)).map(|z| 2.0 * z.re);
        let want = kv + osc;
        assert!((Vector3::from(*j) - want).amax() < 1e-12 * w);
        // the oscillating part is perpendicular to k
        let dev = Vector3::from(*j) - Vector3::from(z.constant);
        assert!(dev.dot(&kv).abs() <= 1e-12 * w * kv.norm());
    }
}

#[test]
fn traditional_admixture_also_oscillates() {
    let n = [0, 1, 1];
    let mut amps = AmplitudeSet::new(BOX).unwrap();
    amps.set_a(key(n, Plus), c(1.0, 0.0));
    amps.set_a(key(n.map(|x| -x), Zero), c(1.0, 0.0));
    let w = harmonic_wave_vector(n, BOX).omega();
    let period = TAU / (2.0 * w);
    let times = uniform_times(0.0, 8.0 * period, 256);
    let s = momentum_series(&amps, &times, Formalism::Traditional).unwrap();
    let z = zb_extract(&s).unwrap();
    assert!((z.frequency - 2.0 * w).abs() <= TAU / (8.0 * period));
    assert!(z.zb_amplitude.iter().any(|a| *a > 0.1 * w));
}

#[test]
fn series_matches_grid_integral() {
    let grid = GridSpec::new([32, 32, 32], BOX).unwrap();
    for seed in [1, 2] {
        let amps = random_set(seed, false);
        let times: Vec<f64> = (0..10).map(|i| 0.137 * i as f64).collect();
        let s = momentum_series(&amps, &times, Formalism::Dual).unwrap();
        let sc = scale(&s);
        for (t, j) in times.iter().zip(&s.j) {
            let o = observables(&synthesize_field(&amps, &grid, *t, Variant::Dual).unwrap());
            for i in 0..3 {
                assert!((o.j[i] - j[i]).abs() <= 1e-8 * sc, "{seed} t={t} {:?} {:?}", o.j, j);
            }
        }
    }
}

#[test]
fn manufactured_cosine_is_recovered() {
    let w = 3.7;
    let amp = 0.25;
    let u = [0.6, 0.0, 0.8];
    let period = TAU / (2.0 * w);
    let times = uniform_times(0.0, 8.0 * period, 256);
    let j = times
        .iter()
        .map(|t| {
            let osc = amp * (2.0 * w * t).cos();
            [1.0 + osc * u[0], -2.0 + osc * u[1], 0.5 + osc * u[2]]
        })
        .collect::<Vec<_>>();
    let s = MomentumSeries {
        groups: std::array::from_fn(|_| vec![[0.0; 3]; times.len()]),
        times,
        j,
        formalism: Formalism::Dual,
    };
    let z = zb_extract(&s).unwrap();
    assert!((z.frequency - 2.0 * w).abs() <= TAU / (8.0 * period));
    for i in 0..3 {
        assert!((z.zb_amplitude[i] - amp * u[i]).abs() <= 0.01 * amp);
    }
    assert!((z.constant[1] + 2.0).abs() < 1e-12);
}

#[test]
fn displacement_scale() {
    // single 2ω component with |J_osc| = J⁰
    let w = 2.0;
    let j0 = 1.0;
    let times = uniform_times(0.0, 16.0 * TAU / (2.0 * w), 4096);
    let j = times.iter().map(|t| [j0 * (2.0 * w * t).cos(), 0.0, 0.0]).collect();
    let s = MomentumSeries {
        groups: std::array::from_fn(|_| vec![[0.0; 3]; times.len()]),
        times,
        j,
        formalism: Formalism::Dual,
    };
    let d = displacement_amplitude(&s, j0);
    assert!((d[0] - 1.0 / (2.0 * w)).abs() < 1e-3 / (2.0 * w), "{d:?}");
}

#[test]
fn coherent_expectation_minus_vacuum_matches_series() {
    for seed in 0..5 {
        let amps = random_set(seed, false);
        let keys: Vec<ModeKey> = amps
            .iter()
            .flat_map(|(k, _)| Helicity::ALL.into_iter().flat_map(|l| [key(k.n, l), key(k.n.map(|x| -x), l)]))
            .collect();
        let times = [0.0, 0.31, 1.7];
        let s = momentum_series(&amps, &times, Formalism::Dual).unwrap();
        let sc = scale(&s);
        for comp in 1..4 {
            let p = momentum_bilinear(&keys, comp, BOX).unwrap();
            for (t, j) in times.iter().zip(&s.j) {
                let env = Env { box_len: BOX, t: *t };
                let coh = expectation(&p, State::Coherent(&amps), &env).unwrap();
                let vac = expectation(&p, State::Vacuum, &env).unwrap();
                let d = coh - vac;
                assert!((d.re - j[comp - 1]).abs() <= 1e-10 * sc, "{seed} {comp} {d} {}", j[comp - 1]);
                assert!(d.im.abs() <= 1e-10 * sc);
            }
        }
    }
}

#[test]
fn bilinear_contains_the_oscillating_pair_term() {
    let n = [1, 0, 2];
    let neg = n.map(|x| -x);
    let k = harmonic_wave_vector(n, BOX);
    let w = k.omega();
    let eta = polarization(&k, Minus).unwrap();
    for comp in 1..4 {
        let p = momentum_bilinear(&[key(n, Plus), key(neg, Zero)], comp, BOX).unwrap();
        let want_ops = [LadderOp::ad(key(n, Plus)), LadderOp::bd(key(neg, Zero))];
        let hit: Vec<_> = p
            .terms()
            .filter(|(_, m, ops)| *ops == want_ops && m.keys().any(|s| matches!(s, Symbol::Phase(_))))
            .collect();
        assert_eq!(hit.len(), 1);
        let (z, m, _) = hit[0];
        assert_eq!(m.values().copied().collect::<Vec<_>>().len(), 2);
        let env = Env { box_len: BOX, t: 0.0 };
        let value = expectation(&LadderPoly::monomial(z, m.clone(), vec![]), State::Vacuum, &env).unwrap();
        let want = eta[comp - 1] * c(w * FRAC_1_SQRT_2, 0.0);
        assert!((value - want).norm() < 1e-12 * w, "{comp} {value} {want}");
    }
}

#[test]
fn transverse_bilinear_has_no_phases() {
    let modes = [key([1, 1, 0], Plus), key([-1, -1, 0], Minus), key([1, 1, 0], Minus), key([-1, -1, 0], Plus)];
    for comp in 0..4 {
        let p = momentum_bilinear(&modes, comp, BOX).unwrap();
        assert_eq!(p.is_zero(), comp == 3, "k has no z component");
        for (_, m, _) in p.terms() {
            assert!(m.keys().all(|s| matches!(s, Symbol::Omega(_))), "{}", render(&p, Style::Plain));
        }
    }
}
