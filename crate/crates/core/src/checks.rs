//! Named identity checks grouped into suites. Each check reports its worst
//! residual and the tolerance it is held to; the CLI `identities` command
//! and the acceptance tests both run these.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, c, max_abs, Mat3, Mat6, Vec3c, Vec6, WaveVector, I};
use crate::error::{Error, Result};
use crate::fieldgrid::{apply_angular_momentum, apply_hamiltonian, FieldGrid, GridSpec};
use crate::modes::{
    amplitudes_from_potential, mode_spinor, potential_fields, project_amplitudes, synthesize_field,
    AmplitudeSet, PotentialAmplitudes, Variant,
};
use crate::polarization::{four_polarizations, polarization_triad, Helicity};
use crate::zb::rt_vectors;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}.{} residual={:.3e} tol={:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.residual,
            self.tol
        )
    }
}

/// Seed and tolerance overrides (keyed by check name, or `suite.name`).
#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

pub const DEFAULT_SEED: u64 = 20_160_729;

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerances: BTreeMap::new(),
        }
    }
}

impl Options {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn check(&self, suite: &'static str, name: &'static str, residual: f64, tol: f64) -> Check {
        let tol = self
            .tolerances
            .get(&format!("{suite}.{name}"))
            .or_else(|| self.tolerances.get(name))
            .copied()
            .unwrap_or(tol);
        Check {
            suite,
            name,
            residual,
            tol,
        }
    }
}

pub const SUITES: [&str; 5] = ["algebra", "angular", "polarization", "modes", "rt"];

pub fn run_suite(name: &str, opts: &Options) -> Result<Vec<Check>> {
    match name {
        "algebra" => algebra_suite(opts),
        "angular" => Ok(vec![opts.check(
            "angular",
            "hamiltonian_commutes_with_angular_momentum",
            angular_momentum_commutator(opts, 20),
            1e-10,
        )]),
        "polarization" => polarization_suite(opts),
        "modes" => mode_suite(opts),
        "rt" => rt_suite(opts),
        other => Err(Error::Format(format!("unknown suite {other:?}"))),
    }
}

pub fn run_all(opts: &Options) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in SUITES {
        out.extend(run_suite(s, opts)?);
    }
    Ok(out)
}

/// Components uniform in `[-5, 5]`, rejecting `|k| < 1e-3`.
pub fn random_k<R: Rng>(rng: &mut R) -> WaveVector {
    loop {
        let k = WaveVector::new(std::array::from_fn(|_| rng.gen_range(-5.0..5.0)));
        if k.omega() >= 1e-3 {
            return k;
        }
    }
}

fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn eps(l: usize, m: usize, n: usize) -> algebra::C64 {
    c(algebra::levi_civita(l, m, n), 0.0)
}

pub fn algebra_suite(opts: &Options) -> Result<Vec<Check>> {
    const S: &str = "algebra";
    let m = algebra::build_matrix_set();
    let id6 = Mat6::identity();
    let mut out = Vec::new();

    let tau_comm = worst((0..3).flat_map(|l| {
        let m = &m;
        (0..3).map(move |k| {
            let mut rhs = Mat3::zeros();
            for n in 0..3 {
                rhs += m.tau[n] * (I * eps(l, k, n));
            }
            max_abs(&(algebra::commutator(&m.tau[l], &m.tau[k]) - rhs))
        })
    }));
    out.push(opts.check(S, "tau_commutator", tau_comm, 1e-15));
    out.push(opts.check(
        S,
        "beta0_hermitian_involution",
        max_abs(&(m.beta0 - m.beta0.adjoint())).max(max_abs(&(m.beta0 * m.beta0 - id6))),
        1e-15,
    ));
    out.push(opts.check(
        S,
        "beta_anti_hermitian",
        worst(m.beta.iter().map(|b| max_abs(&(b + b.adjoint())))),
        1e-15,
    ));
    out.push(opts.check(
        S,
        "chi_hermitian",
        worst(m.chi.iter().map(|x| max_abs(&(x - x.adjoint())))),
        1e-15,
    ));
    out.push(opts.check(
        S,
        "beta_anticommutator",
        worst(m.beta.iter().map(|b| max_abs(&(m.beta0 * b + b * m.beta0)))),
        1e-15,
    ));
    let ss = m.spin.iter().fold(Mat6::zeros(), |acc, s| acc + s * s);
    out.push(opts.check(S, "spin_squared", max_abs(&(ss - id6 * c(2.0, 0.0))), 1e-15));
    let mut sig: f64 = 0.0;
    for l in 1..4 {
        sig = sig.max(max_abs(&(m.sigma(l, 0) - m.chi[l - 1] * I)));
        sig = sig.max(max_abs(&(m.sigma(0, l) + m.chi[l - 1] * I)));
        for k in 1..4 {
            let mut want = Mat6::zeros();
            for n in 0..3 {
                want += m.spin[n] * eps(l - 1, k - 1, n);
            }
            sig = sig.max(max_abs(&(m.sigma(l, k) - want)));
        }
    }
    out.push(opts.check(S, "sigma_family", sig, 1e-15));

    let mut rng = opts.rng(1);
    let (mut fact, mut herm, mut spec, mut omega) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let k = random_k(&mut rng);
        let w = rng.gen_range(-5.0..5.0);
        fact = fact.max(algebra::factorization_residual(w, &k));
        let h = algebra::hamiltonian_symbol(&k);
        herm = herm.max(max_abs(&(h - h.adjoint())).max(h.trace().norm()));
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let kw = k.omega();
        let want = [-kw, -kw, 0.0, 0.0, kw, kw];
        spec = spec.max(worst(ev.iter().zip(want).map(|(a, b)| (a - b).abs() / kw)));
        let o = algebra::omega_symbol(&k);
        for l in Helicity::ALL {
            let f = mode_spinor(&k, l)?.f;
            let want = if l.is_transverse() { Vec6::zeros() } else { -f * c(kw * kw, 0.0) };
            omega = omega.max(max_abs(&(o * f - want)) / (kw * kw));
        }
    }
    out.push(opts.check(S, "factorization_residual", fact, 1e-13));
    out.push(opts.check(S, "hamiltonian_hermitian_traceless", herm, 1e-13));
    out.push(opts.check(S, "hamiltonian_spectrum", spec, 1e-12));
    out.push(opts.check(S, "omega_symbol_modes", omega, 1e-12));
    Ok(out)
}

/// Worst `‖[Ĥ, J_n]ψ‖ / ‖ψ‖` over `fields` random Gaussian-localized
/// fields and the three axes. The envelope keeps `x·ψ` smooth across the
/// periodic cell, so spectral differentiation stays exact to roundoff.
pub fn angular_momentum_commutator(opts: &Options, fields: usize) -> f64 {
    let spec = GridSpec::new([48, 48, 48], [1.0; 3]).expect("fixed grid is valid");
    let center = [0.5; 3];
    let sigma = 0.055;
    let mut rng = opts.rng(2);
    // draw every field's content up front so threading cannot change it
    let fields: Vec<Vec<([f64; 3], Vec6)>> = (0..fields)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let n: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-1..=1));
                    let k = crate::fieldgrid::harmonic_wave_vector(n, spec.box_len()).as_array();
                    (k, Vec6::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                })
                .collect()
        })
        .collect();
    let one = |waves: &[([f64; 3], Vec6)]| -> f64 {
        let data = (0..spec.len())
            .map(|idx| {
                let p = spec.position(spec.coords(idx));
                let r2: f64 = (0..3).map(|i| (p[i] - center[i]).powi(2)).sum();
                let env = (-r2 / (2.0 * sigma * sigma)).exp();
                waves.iter().fold(Vec6::zeros(), |acc, (k, v)| {
                    let ph = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
                    acc + v * (c(ph.cos(), ph.sin()) * env)
                })
            })
            .collect();
        let psi = FieldGrid::from_data(spec, data).expect("shape matches");
        let norm = psi.max_abs();
        let j_h_psi = apply_angular_momentum(&apply_hamiltonian(&psi), center);
        apply_angular_momentum(&psi, center)
            .iter()
            .zip(&j_h_psi)
            .map(|(j_psi, rhs)| apply_hamiltonian(j_psi).max_abs_diff(rhs) / norm)
            .fold(0.0, f64::max)
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(fields.len().max(1));
    let chunk = fields.len().div_ceil(threads.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = fields
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|w| one(w)).fold(0.0, f64::max)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .fold(0.0, f64::max)
    })
}

pub fn polarization_suite(opts: &Options) -> Result<Vec<Check>> {
    const S: &str = "polarization";
    let mut rng = opts.rng(3);
    let (mut ortho, mut compl, mut hel, mut long, mut conj, mut four) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let k = random_k(&mut rng);
        let t = polarization_triad(&k)?;
        let mut sum = Mat3::zeros();
        let hk = algebra::tau_dot(&k.unit().map(|x| c(x, 0.0)));
        for l in Helicity::ALL {
            let e = t.get(l);
            for lp in Helicity::ALL {
                let want = if l == lp { 1.0 } else { 0.0 };
                ortho = ortho.max((e.dotc(&t.get(lp)) - c(want, 0.0)).norm());
            }
            sum += e * e.adjoint();
            hel = hel.max(max_abs(&(hk * e - e * c(l.as_f64(), 0.0))));
        }
        compl = compl.max(max_abs(&(sum - Mat3::identity())));
        let u = k.unit();
        long = long.max(worst((0..3).map(|i| (t.eps_zero[i] - c(u[i], 0.0)).norm())));
        conj = conj.max(max_abs(&(t.eps_minus - t.eps_plus.map(|z| z.conj()))));
        let fp = four_polarizations(&k)?;
        for (s, e) in fp.e.iter().enumerate() {
            let time = if s == 0 { 1.0 } else { 0.0 };
            four = four.max((e[0] - c(time, 0.0)).norm());
            if s > 0 {
                let want = t.get([Helicity::Plus, Helicity::Minus, Helicity::Zero][s - 1]);
                four = four.max(worst((0..3).map(|i| (e[i + 1] - want[i]).norm())));
            }
        }
    }
    let mut out = vec![
        opts.check(S, "orthonormality", ortho, 1e-12),
        opts.check(S, "completeness", compl, 1e-12),
        opts.check(S, "helicity_eigenvalues", hel, 1e-12),
        opts.check(S, "longitudinal_is_unit_k", long, 1e-12),
        opts.check(S, "minus_is_conjugate_of_plus", conj, 1e-12),
        opts.check(S, "four_polarizations", four, 1e-15),
    ];

    // pole limits: off-axis triads approach the on-axis value linearly in δ
    let pole = |k3: f64, phis: &[f64]| -> Result<f64> {
        let at = polarization_triad(&WaveVector::new([0.0, 0.0, k3]))?;
        let mut r = 0.0f64;
        for &phi in phis {
            for delta in [1e-4, 1e-6] {
                let near = polarization_triad(&WaveVector::new([delta * phi.cos(), delta * phi.sin(), k3]))?;
                let d = Helicity::ALL
                    .iter()
                    .map(|l| max_abs(&(near.get(*l) - at.get(*l))))
                    .fold(0.0, f64::max);
                r = r.max(d / (delta / k3.abs()));
            }
        }
        Ok(r)
    };
    let plus_pole = polarization_triad(&WaveVector::new([0.0, 0.0, 2.0]))?.eps_plus;
    let want = Vec3c::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), c(0.0, 0.0));
    out.push(opts.check(S, "positive_pole_value", max_abs(&(plus_pole - want)), 1e-15));
    // first-order convergence: the deviation divided by δ/|k₃| stays O(1)
    out.push(opts.check(S, "positive_pole_continuity", pole(2.0, &[0.0, 1.0, 2.5, 4.0, 5.5])?, 2.0));
    out.push(opts.check(S, "negative_pole_limit", pole(-1.5, &[0.0])?, 2.0));
    Ok(out)
}

fn random_potential<R: Rng>(rng: &mut R, box_len: [f64; 3], max_harmonic: i64) -> PotentialAmplitudes {
    let mut pot = PotentialAmplitudes::new(box_len).expect("box is valid");
    for _ in 0..6 {
        let n: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-max_harmonic..=max_harmonic));
        if n == [0, 0, 0] {
            continue;
        }
        for s in 0..4u8 {
            pot.insert(n, s, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .expect("nonzero harmonic");
        }
    }
    pot
}

pub fn mode_suite(opts: &Options) -> Result<Vec<Check>> {
    const S: &str = "modes";
    let mut rng = opts.rng(4);
    let (mut ortho, mut cross, mut compl, mut eig) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..500 {
        let k = random_k(&mut rng);
        let l = Helicity::ALL[rng.gen_range(0..3)];
        let lp = Helicity::ALL[rng.gen_range(0..3)];
        let delta = c(if l == lp { 1.0 } else { 0.0 }, 0.0);
        let (p, q) = (mode_spinor(&k, l)?, mode_spinor(&k, lp)?);
        let (pn, qn) = (mode_spinor(&k.neg(), l)?, mode_spinor(&k.neg(), lp)?);
        ortho = ortho.max((p.f.dotc(&q.f) - delta).norm()).max((p.g.dotc(&q.g) - delta).norm());
        cross = cross.max(p.f.dotc(&qn.g).norm()).max(pn.g.dotc(&q.f).norm());
    }
    for _ in 0..100 {
        let k = random_k(&mut rng);
        let h = algebra::hamiltonian_symbol(&k);
        let w = k.omega();
        let mut sum = Mat6::zeros();
        for l in Helicity::ALL {
            let f = mode_spinor(&k, l)?.f;
            let g = mode_spinor(&k.neg(), l)?.g;
            sum += f * f.adjoint() + g * g.adjoint();
            let s = if l.is_transverse() { w } else { 0.0 };
            eig = eig.max(max_abs(&(h * f - f * c(s, 0.0))) / w);
            eig = eig.max(max_abs(&(h * g + g * c(s, 0.0))) / w);
        }
        compl = compl.max(max_abs(&(sum - Mat6::identity())));
    }
    let mut out = vec![
        opts.check(S, "spinor_orthonormality", ortho, 1e-12),
        opts.check(S, "spinor_cross_orthogonality", cross, 1e-12),
        opts.check(S, "spinor_completeness", compl, 1e-12),
        opts.check(S, "eigen_structure", eig, 1e-12),
    ];

    let grid = GridSpec::new([16, 16, 16], [1.0, 1.25, 0.8])?;
    let amps = AmplitudeSet::random(&mut rng, grid.box_len(), 5, 8, false)?;
    let t = 0.37;
    let back = project_amplitudes(&synthesize_field(&amps, &grid, t, Variant::Dual)?, t);
    out.push(opts.check(S, "round_trip_16", back.max_abs_diff(&amps) / amps.max_abs(), 1e-12));

    let mut a_only = AmplitudeSet::new(grid.box_len())?;
    for (k, v) in amps.iter() {
        a_only.set_a(*k, v.a);
    }
    let back = project_amplitudes(&synthesize_field(&a_only, &grid, t, Variant::Dual)?, t);
    let stray_b = back.iter().map(|(_, v)| v.b.norm()).fold(0.0, f64::max);
    out.push(opts.check(S, "a_only_projects_to_no_b", stray_b, 1e-12));

    let pot = random_potential(&mut rng, grid.box_len(), 3);
    let mut route = 0.0f64;
    for t in [0.0, 0.7] {
        let lhs = potential_fields(&pot, &grid, t)?;
        let rhs = synthesize_field(&amplitudes_from_potential(&pot), &grid, t, Variant::PhotonOnly)?;
        route = route.max(lhs.max_abs_diff(&rhs));
    }
    out.push(opts.check(S, "potential_route", route, 1e-10));
    Ok(out)
}

/// Worst deviations of the R and T tables from their closed forms.
pub fn rt_residuals(k: &WaveVector) -> Result<(f64, f64)> {
    use Helicity::{Minus, Plus, Zero};
    let rt = rt_vectors(k)?;
    let eta = polarization_triad(k)?.eps_plus;
    let eta_neg = polarization_triad(&k.neg())?.eps_plus;
    let s = c(FRAC_1_SQRT_2, 0.0);
    let conj = |v: Vec3c| v.map(|z| z.conj());
    let zero = Vec3c::zeros();
    let m = -eta * s;
    let p = eta_neg * s;
    let kw = k.complex() / c(k.omega(), 0.0);
    let r_want = [
        (rt.r(Plus, Minus), zero),
        (rt.r(Minus, Plus), zero),
        (rt.r(Zero, Zero), zero),
        (rt.r(Plus, Plus), kw),
        (rt.r(Minus, Minus), kw),
        (rt.r(Zero, Plus), m),
        (rt.r(Minus, Zero), m),
        (conj(rt.r(Plus, Zero)), m),
        (conj(rt.r(Zero, Minus)), m),
    ];
    let t_want = [
        (rt.t(Plus, Minus), zero),
        (rt.t(Minus, Plus), zero),
        (rt.t(Zero, Zero), zero),
        (rt.t(Plus, Plus), zero),
        (rt.t(Minus, Minus), zero),
        (rt.t(Minus, Zero), m),
        (-conj(rt.t(Plus, Zero)), m),
        (rt.t(Zero, Plus), p),
        (-conj(rt.t(Zero, Minus)), p),
    ];
    let dev = |xs: &[(Vec3c, Vec3c)]| worst(xs.iter().map(|(a, b)| max_abs(&(a - b))));
    Ok((dev(&r_want), dev(&t_want)))
}

pub fn rt_suite(opts: &Options) -> Result<Vec<Check>> {
    const S: &str = "rt";
    let mut rng = opts.rng(5);
    let (mut r, mut t) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (a, b) = rt_residuals(&random_k(&mut rng))?;
        r = r.max(a);
        t = t.max(b);
    }
    // on-axis wave vectors go through the pole convention
    for k in [[0.0, 0.0, 1.3], [0.0, 0.0, -0.7]] {
        let (a, b) = rt_residuals(&WaveVector::new(k))?;
        r = r.max(a);
        t = t.max(b);
    }
    Ok(vec![opts.check(S, "r_table", r, 1e-12), opts.check(S, "t_table", t, 1e-12)])
}
