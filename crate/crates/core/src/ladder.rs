//! Symbolic creation/annihilation polynomials with an indefinite metric for
//! the potential operators.
//!
//! A polynomial is a sum of terms `coefficient · monomial · op₁op₂…`, where
//! the monomial is a product of powers of the frequency symbols `ω_n` and the
//! phases `e^{2iω_n t}`. Everything is kept in a canonical order so that
//! structural equality is term-by-term equality.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use crate::algebra::{self, c, Mat6, C64, I};
use crate::error::{Error, Result};
use crate::fieldgrid::harmonic_wave_vector;
use crate::modes::{mode_spinor, AmplitudeSet, ModeKey};
use crate::polarization::Helicity;

/// Coefficients at or below this magnitude are dropped.
pub const ZERO: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A,
    B,
    C,
}

/// One ladder operator. `label` is the helicity (−1, 0, 1) for the `a`/`b`
/// families and the polarization index `s = 0..=3` for `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub family: Family,
    pub dagger: bool,
    pub n: [i64; 3],
    pub label: i8,
}

impl LadderOp {
    pub fn a(key: ModeKey) -> Self {
        Self::photon(Family::A, false, key)
    }
    pub fn ad(key: ModeKey) -> Self {
        Self::photon(Family::A, true, key)
    }
    pub fn b(key: ModeKey) -> Self {
        Self::photon(Family::B, false, key)
    }
    pub fn bd(key: ModeKey) -> Self {
        Self::photon(Family::B, true, key)
    }
    pub fn c(n: [i64; 3], s: u8) -> Self {
        Self::potential(false, n, s)
    }
    pub fn cd(n: [i64; 3], s: u8) -> Self {
        Self::potential(true, n, s)
    }

    fn photon(family: Family, dagger: bool, key: ModeKey) -> Self {
        Self {
            family,
            dagger,
            n: key.n,
            label: key.lambda.value(),
        }
    }

    fn potential(dagger: bool, n: [i64; 3], s: u8) -> Self {
        assert!(s <= 3, "potential index out of range");
        Self {
            family: Family::C,
            dagger,
            n,
            label: s as i8,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            dagger: !self.dagger,
            ..self
        }
    }

    fn mode_key(&self) -> Option<ModeKey> {
        match self.family {
            Family::C => None,
            _ => Some(ModeKey {
                n: self.n,
                lambda: Helicity::from_value(self.label as i64).expect("valid helicity"),
            }),
        }
    }

    /// Canonical rank: a† < b† < c† < a < b < c.
    fn rank(&self) -> u8 {
        let f = match self.family {
            Family::A => 0,
            Family::B => 1,
            Family::C => 2,
        };
        if self.dagger {
            f
        } else {
            3 + f
        }
    }

    fn sort_key(&self) -> (u8, [i64; 3], i8) {
        (self.rank(), self.n, self.label)
    }
}

impl PartialOrd for LadderOp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LadderOp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// `[x, y]` for two single operators (always a c-number).
fn elementary_commutator(x: &LadderOp, y: &LadderOp) -> f64 {
    if x.family != y.family || x.n != y.n || x.label != y.label || x.dagger == y.dagger {
        return 0.0;
    }
    let value = match x.family {
        Family::A | Family::B => {
            if x.label == 0 {
                0.0
            } else {
                1.0
            }
        }
        // [c_s, c_s'†] = −g_{ss'}
        Family::C => -algebra::metric(x.label as usize),
    };
    if x.dagger {
        -value
    } else {
        value
    }
}

/// Symbols appearing in coefficients: `ω_n` and `e^{2iω_n t}`. Harmonics
/// are stored up to sign since `ω_n = ω_{−n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Omega([i64; 3]),
    Phase([i64; 3]),
}

fn canonical(n: [i64; 3]) -> [i64; 3] {
    let m = n.map(|x| -x);
    if m > n {
        m
    } else {
        n
    }
}

pub type Monomial = BTreeMap<Symbol, i32>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (s, p) in b {
        let e = out.entry(*s).or_insert(0);
        *e += p;
        if *e == 0 {
            out.remove(s);
        }
    }
    out
}

/// Numeric values for the symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Env {
    pub box_len: [f64; 3],
    pub t: f64,
}

impl Env {
    fn value(&self, m: &Monomial) -> C64 {
        m.iter().fold(c(1.0, 0.0), |acc, (s, p)| {
            let v = match *s {
                Symbol::Omega(n) => c(harmonic_wave_vector(n, self.box_len).omega(), 0.0),
                Symbol::Phase(n) => {
                    let th = 2.0 * harmonic_wave_vector(n, self.box_len).omega() * self.t;
                    c(th.cos(), th.sin())
                }
            };
            acc * v.powi(*p)
        })
    }
}

type TermKey = (Vec<LadderOp>, Monomial);

/// A finite sum of operator monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LadderPoly {
    terms: BTreeMap<TermKey, C64>,
}

impl LadderPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(z: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), Monomial::new(), z);
        p
    }

    pub fn op(op: LadderOp) -> Self {
        Self::monomial(c(1.0, 0.0), Monomial::new(), vec![op])
    }

    pub fn monomial(coef: C64, symbols: Monomial, ops: Vec<LadderOp>) -> Self {
        let mut p = Self::zero();
        p.add_term(ops, symbols, coef);
        p
    }

    fn add_term(&mut self, ops: Vec<LadderOp>, symbols: Monomial, coef: C64) {
        let e = self.terms.entry((ops, symbols)).or_insert(c(0.0, 0.0));
        *e += coef;
    }

    fn cleaned(mut self) -> Self {
        self.terms.retain(|_, z| z.norm() > ZERO);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(coefficient, symbols, ops)`.
    pub fn terms(&self) -> impl Iterator<Item = (C64, &Monomial, &[LadderOp])> {
        self.terms.iter().map(|((o, m), z)| (*z, m, o.as_slice()))
    }

    pub fn add(&self, other: &LadderPoly) -> LadderPoly {
        let mut out = self.clone();
        for ((o, m), z) in &other.terms {
            out.add_term(o.clone(), m.clone(), *z);
        }
        out.cleaned()
    }

    pub fn scale(&self, z: C64) -> LadderPoly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= z;
        }
        out.cleaned()
    }

    pub fn sub(&self, other: &LadderPoly) -> LadderPoly {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    /// Operator product (no reordering).
    pub fn mul(&self, other: &LadderPoly) -> LadderPoly {
        let mut out = LadderPoly::zero();
        for ((o1, m1), z1) in &self.terms {
            for ((o2, m2), z2) in &other.terms {
                let mut ops = o1.clone();
                ops.extend_from_slice(o2);
                out.add_term(ops, mono_mul(m1, m2), z1 * z2);
            }
        }
        out.cleaned()
    }

    pub fn adjoint(&self) -> LadderPoly {
        let mut out = LadderPoly::zero();
        for ((o, m), z) in &self.terms {
            let ops = o.iter().rev().map(|x| x.adjoint()).collect();
            let sym = m.iter().map(|(s, p)| match s {
                Symbol::Phase(_) => (*s, -p),
                Symbol::Omega(_) => (*s, *p),
            });
            out.add_term(ops, sym.collect(), z.conj());
        }
        out.cleaned()
    }
}

fn normal_order_ops(ops: &[LadderOp], coef: C64, out: &mut BTreeMap<Vec<LadderOp>, C64>) {
    let pos = ops.windows(2).position(|w| w[0] > w[1]);
    match pos {
        None => *out.entry(ops.to_vec()).or_insert(c(0.0, 0.0)) += coef,
        Some(i) => {
            let mut swapped = ops.to_vec();
            swapped.swap(i, i + 1);
            normal_order_ops(&swapped, coef, out);
            let k = elementary_commutator(&ops[i], &ops[i + 1]);
            if k != 0.0 {
                let mut rest = ops[..i].to_vec();
                rest.extend_from_slice(&ops[i + 2..]);
                normal_order_ops(&rest, coef * k, out);
            }
        }
    }
}

/// Moves every creation operator to the left (canonical order), adding the
/// commutator terms generated along the way. Idempotent.
pub fn normal_order(x: &LadderPoly) -> LadderPoly {
    let mut out = LadderPoly::zero();
    for ((ops, m), z) in &x.terms {
        let mut acc = BTreeMap::new();
        normal_order_ops(ops, *z, &mut acc);
        for (o, v) in acc {
            out.add_term(o, m.clone(), v);
        }
    }
    out.cleaned()
}

/// `[x, y]`, normal ordered.
pub fn commutator(x: &LadderPoly, y: &LadderPoly) -> LadderPoly {
    normal_order(&x.mul(y).sub(&y.mul(x)))
}

/// Rewrites photon operators through the potential operators:
/// `a(k,+1) → i c(k,1)`, `a(k,−1) → i c(k,2)`,
/// `a(k,0) → i[c(k,3) − c(k,0)]/√2`, and adjoints. The dual branch has no
/// such image and is rejected.
pub fn substitute_potential_ops(x: &LadderPoly) -> Result<LadderPoly> {
    let mut out = LadderPoly::zero();
    for ((ops, m), z) in &x.terms {
        let mut acc = LadderPoly::monomial(*z, m.clone(), Vec::new());
        for op in ops {
            let image = match op.family {
                Family::C => LadderPoly::op(*op),
                Family::B => return Err(Error::NoPotentialImage(label(op, &Labels::Explicit))),
                Family::A => {
                    let base = match op.label {
                        1 => LadderPoly::op(LadderOp::c(op.n, 1)).scale(I),
                        -1 => LadderPoly::op(LadderOp::c(op.n, 2)).scale(I),
                        _ => LadderPoly::op(LadderOp::c(op.n, 3))
                            .sub(&LadderPoly::op(LadderOp::c(op.n, 0)))
                            .scale(I * FRAC_1_SQRT_2),
                    };
                    if op.dagger {
                        base.adjoint()
                    } else {
                        base
                    }
                }
            };
            acc = acc.mul(&image);
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// States the expectation value can be taken in.
#[derive(Clone, Copy, Debug)]
pub enum State<'a> {
    Vacuum,
    /// c-number substitution `a → a`, `a† → a*`, likewise `b`.
    Coherent(&'a AmplitudeSet),
}

/// Normal orders `x` and evaluates it in `state`.
pub fn expectation(x: &LadderPoly, state: State<'_>, env: &Env) -> Result<C64> {
    let ordered = normal_order(x);
    let mut total = c(0.0, 0.0);
    for ((ops, m), z) in &ordered.terms {
        let mut v = *z * env.value(m);
        match state {
            State::Vacuum => {
                if !ops.is_empty() {
                    continue;
                }
            }
            State::Coherent(amps) => {
                for op in ops {
                    let key = op
                        .mode_key()
                        .ok_or_else(|| Error::UnsupportedState(label(op, &Labels::Explicit)))?;
                    let amp = amps.get(key);
                    let val = match op.family {
                        Family::A => amp.a,
                        _ => amp.b,
                    };
                    v *= if op.dagger { val.conj() } else { val };
                }
            }
        }
        total += v;
    }
    Ok(total)
}

fn gamma(component: usize) -> Mat6 {
    if component == 0 {
        Mat6::identity()
    } else {
        algebra::build_matrix_set().chi[component - 1]
    }
}

/// Operator form of `J^μ = ∫ψ†β⁰β^μψ` restricted to `modes`, built from the
/// dual expansion. Frequencies and the `e^{±2iωt}` phases stay symbolic; the
/// time enters only through [`Env`] at evaluation.
pub fn momentum_bilinear(modes: &[ModeKey], component: usize, box_len: [f64; 3]) -> Result<LadderPoly> {
    assert!(component < 4, "component must be 0..=3");
    let g = gamma(component);
    let mut modes = modes.to_vec();
    modes.sort();
    modes.dedup();
    let mut out = LadderPoly::zero();
    for m1 in &modes {
        let k1 = m1.wave_vector(box_len);
        let s1 = mode_spinor(&k1, m1.lambda)?;
        let omega = Monomial::from([(Symbol::Omega(canonical(m1.n)), 1)]);
        for m2 in &modes {
            if m2.n == m1.n {
                let s2 = mode_spinor(&k1, m2.lambda)?;
                out.add_term(
                    vec![LadderOp::ad(*m1), LadderOp::a(*m2)],
                    omega.clone(),
                    s1.f.dotc(&(g * s2.f)),
                );
                out.add_term(
                    vec![LadderOp::b(*m1), LadderOp::bd(*m2)],
                    omega.clone(),
                    s1.g.dotc(&(g * s2.g)),
                );
            } else if m2.n == m1.n.map(|x| -x) {
                let s2 = mode_spinor(&k1.neg(), m2.lambda)?;
                let phase = |p: i32| {
                    let mut mono = omega.clone();
                    mono.insert(Symbol::Phase(canonical(m1.n)), p);
                    mono
                };
                out.add_term(
                    vec![LadderOp::b(*m1), LadderOp::a(*m2)],
                    phase(-1),
                    s1.g.dotc(&(g * s2.f)),
                );
                out.add_term(
                    vec![LadderOp::ad(*m1), LadderOp::bd(*m2)],
                    phase(1),
                    s1.f.dotc(&(g * s2.g)),
                );
            }
        }
    }
    Ok(out.cleaned())
}

/// Output flavour of [`render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// ASCII: `ad`, `bd`, `·` between factors.
    Plain,
    /// `a†`, juxtaposition.
    Unicode,
}

enum Labels {
    /// Every operator carries `(k,λ)`; `names` maps harmonics to `k`/`-k`
    /// when a single harmonic class is present.
    Full { single: Option<[i64; 3]> },
    Explicit,
}

fn harmonic_name(n: [i64; 3], single: Option<[i64; 3]>) -> String {
    match single {
        Some(s) if s == n => "k".into(),
        Some(_) => "-k".into(),
        None => format!("({},{},{})", n[0], n[1], n[2]),
    }
}

fn label(op: &LadderOp, labels: &Labels) -> String {
    let single = match labels {
        Labels::Full { single } => *single,
        Labels::Explicit => None,
    };
    let base = match (op.family, op.dagger) {
        (Family::A, false) => "a",
        (Family::A, true) => "ad",
        (Family::B, false) => "b",
        (Family::B, true) => "bd",
        (Family::C, false) => "c",
        (Family::C, true) => "cd",
    };
    let l = match op.family {
        Family::C => op.label.to_string(),
        _ => Helicity::from_value(op.label as i64).expect("valid").to_string(),
    };
    format!("{base}({},{l})", harmonic_name(op.n, single))
}

fn op_text(op: &LadderOp, style: Style, labels: Option<&Labels>) -> String {
    let mut s = match labels {
        Some(l) => label(op, l),
        None => match (op.family, op.dagger) {
            (Family::A, false) => "a".into(),
            (Family::A, true) => "ad".into(),
            (Family::B, false) => "b".into(),
            (Family::B, true) => "bd".into(),
            (Family::C, false) => "c".into(),
            (Family::C, true) => "cd".into(),
        },
    };
    if style == Style::Unicode {
        s = s.replacen("ad", "a†", 1).replacen("bd", "b†", 1).replacen("cd", "c†", 1);
    }
    s
}

fn fmt_real(x: f64) -> String {
    if (x - x.round()).abs() < 1e-12 {
        format!("{}", x.round() as i64)
    } else {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Coefficient text and whether it is a plain negative real.
fn fmt_coef(z: C64) -> (String, bool) {
    let (re, im) = (
        if z.re.abs() < 1e-12 { 0.0 } else { z.re },
        if z.im.abs() < 1e-12 { 0.0 } else { z.im },
    );
    if im == 0.0 {
        (fmt_real(re.abs()), re < 0.0)
    } else if re == 0.0 {
        let body = if (im.abs() - 1.0).abs() < 1e-12 {
            "i".to_string()
        } else {
            format!("{}i", fmt_real(im.abs()))
        };
        (body, im < 0.0)
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        (format!("({}{sign}{}i)", fmt_real(re), fmt_real(im.abs())), false)
    }
}

fn fmt_monomial(m: &Monomial, single: bool) -> Vec<String> {
    m.iter()
        .map(|(s, p)| {
            let tag = |n: &[i64; 3]| {
                if single {
                    String::new()
                } else {
                    format!("[{},{},{}]", n[0], n[1], n[2])
                }
            };
            match s {
                Symbol::Omega(n) => {
                    let base = format!("ω{}", tag(n));
                    if *p == 1 {
                        base
                    } else {
                        format!("{base}^{p}")
                    }
                }
                Symbol::Phase(n) => {
                    let w = format!("ω{}", tag(n));
                    match p {
                        1 => format!("e^{{2i{w}t}}"),
                        -1 => format!("e^{{-2i{w}t}}"),
                        _ => format!("e^{{{}i{w}t}}", 2 * p),
                    }
                }
            }
        })
        .collect()
}

/// Stable text form. A polynomial whose terms share one symbol factor and
/// touch a single mode prints compactly, e.g. `ω·(ad·a + bd·b + 1)`.
pub fn render(x: &LadderPoly, style: Style) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let sep = if style == Style::Plain { "·" } else { "" };
    let mut terms: Vec<(&Vec<LadderOp>, &Monomial, C64)> =
        x.terms.iter().map(|((o, m), z)| (o, m, *z)).collect();
    // operator terms first, constant last
    terms.sort_by(|a, b| (a.0.is_empty(), a.0, a.1).cmp(&(b.0.is_empty(), b.0, b.1)));

    let mut classes: Vec<[i64; 3]> = Vec::new();
    let mut keys: Vec<([i64; 3], i8)> = Vec::new();
    for (ops, m, _) in &terms {
        for op in ops.iter() {
            classes.push(canonical(op.n));
            keys.push((op.n, op.label));
        }
        for s in m.keys() {
            match s {
                Symbol::Omega(n) | Symbol::Phase(n) => classes.push(*n),
            }
        }
    }
    classes.sort();
    classes.dedup();
    keys.sort();
    keys.dedup();
    let single_class = classes.len() <= 1;
    let shared = terms.iter().all(|t| t.1 == terms[0].1) && !terms[0].1.is_empty();

    let mut out = String::new();
    if shared && keys.len() == 1 {
        let prefix = fmt_monomial(terms[0].1, single_class).join(sep);
        let _ = write!(out, "{prefix}{}(", if style == Style::Plain { "·" } else { "" });
        for (i, (ops, _, z)) in terms.iter().enumerate() {
            let (coef, neg) = fmt_coef(*z);
            push_sign(&mut out, i, neg);
            let mut factors = Vec::new();
            if coef != "1" || ops.is_empty() {
                factors.push(coef);
            }
            factors.extend(ops.iter().map(|o| op_text(o, style, None)));
            out.push_str(&factors.join(sep));
        }
        out.push(')');
        return out;
    }

    let single = if single_class {
        keys.first().map(|k| {
            let n = k.0;
            if canonical(n) == n {
                n
            } else {
                n.map(|x| -x)
            }
        })
    } else {
        None
    };
    let labels = Labels::Full { single };
    for (i, (ops, m, z)) in terms.iter().enumerate() {
        let (coef, neg) = fmt_coef(*z);
        push_sign(&mut out, i, neg);
        let mut factors = Vec::new();
        let sym = fmt_monomial(m, single_class);
        if coef != "1" || (ops.is_empty() && sym.is_empty()) {
            factors.push(coef);
        }
        factors.extend(sym);
        factors.extend(ops.iter().map(|o| op_text(o, style, Some(&labels))));
        out.push_str(&factors.join(sep));
    }
    out
}

fn push_sign(out: &mut String, i: usize, neg: bool) {
    match (i, neg) {
        (0, true) => out.push('-'),
        (0, false) => {}
        (_, true) => out.push_str(" - "),
        (_, false) => out.push_str(" + "),
    }
}

/// One line of the commutator-closure derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureLine {
    pub left: LadderOp,
    pub right: LadderOp,
    /// Through the potential operators.
    pub derived: LadderPoly,
    /// Directly from the photon rules.
    pub postulated: LadderPoly,
}

impl ClosureLine {
    pub fn agrees(&self) -> bool {
        self.derived.sub(&self.postulated).is_zero()
    }

    pub fn render(&self, style: Style) -> String {
        let labels = Labels::Full { single: Some(self.left.n) };
        format!(
            "[{}, {}] = {}",
            op_text(&self.left, style, Some(&labels)),
            op_text(&self.right, style, Some(&labels)),
            render(&self.derived, style)
        )
    }
}

/// Derives `[a(k,λ), a†(k,λ')]` for all helicity pairs from the potential
/// commutators and compares with the photon rules.
pub fn closure_derivation(n: [i64; 3]) -> Result<Vec<ClosureLine>> {
    let mut lines = Vec::new();
    for l1 in Helicity::ALL {
        for l2 in Helicity::ALL {
            let left = LadderOp::a(ModeKey::new(n, l1)?);
            let right = LadderOp::ad(ModeKey::new(n, l2)?);
            let (x, y) = (LadderPoly::op(left), LadderPoly::op(right));
            let derived = commutator(&substitute_potential_ops(&x)?, &substitute_potential_ops(&y)?);
            let postulated = commutator(&x, &y);
            lines.push(ClosureLine {
                left,
                right,
                derived,
                postulated,
            });
        }
    }
    Ok(lines)
}
