//! Text and binary formats: amplitude documents, run configs, field
//! snapshots and time-series CSV.
//!
//! An amplitude document is TOML:
//!
//! ```toml
//! box = [1.0, 1.0, 1.0]
//!
//! [[modes]]
//! n = [1, 0, 0]
//! lambda = 1          # -1, 0 or 1
//! a = [0.5, 0.0]      # [re, im], default [0, 0]
//! b = [0.0, 0.0]
//! virtual = false     # optional
//! ```
//!
//! A run config is the same document plus `[grid]`, `[time]` and optional
//! `[tolerances]` tables; instead of inline modes it may name another
//! document with `amplitudes = "path.toml"` (relative to the config).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{c, Vec6};
use crate::error::{Error, Result};
use crate::fieldgrid::{FieldGrid, GridSpec, Observables};
use crate::modes::{Amplitude, AmplitudeSet, ModeKey};
use crate::polarization::Helicity;
use crate::zb::MomentumSeries;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeRecord {
    n: [i64; 3],
    lambda: i64,
    #[serde(default)]
    a: [f64; 2],
    #[serde(default)]
    b: [f64; 2],
    #[serde(default, rename = "virtual", skip_serializing_if = "std::ops::Not::not")]
    virtual_admixture: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeDoc {
    #[serde(rename = "box")]
    box_len: [f64; 3],
    #[serde(default)]
    modes: Vec<ModeRecord>,
}

fn build_set(box_len: [f64; 3], modes: &[ModeRecord]) -> Result<AmplitudeSet> {
    let mut set = AmplitudeSet::new(box_len)?;
    let mut seen = std::collections::BTreeSet::new();
    for m in modes {
        let lambda = Helicity::from_value(m.lambda)
            .ok_or_else(|| Error::Format(format!("lambda must be -1, 0 or 1, got {}", m.lambda)))?;
        let key = ModeKey::new(m.n, lambda)?;
        if !seen.insert(key) {
            return Err(Error::Format(format!("duplicate mode n={:?} lambda={}", m.n, m.lambda)));
        }
        if m.a.iter().chain(&m.b).any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("non-finite amplitude at n={:?}", m.n)));
        }
        set.insert(
            key,
            Amplitude {
                a: c(m.a[0], m.a[1]),
                b: c(m.b[0], m.b[1]),
                virtual_admixture: m.virtual_admixture,
            },
        );
    }
    Ok(set)
}

pub fn parse_amplitudes(text: &str) -> Result<AmplitudeSet> {
    let doc: AmplitudeDoc = toml::from_str(text).map_err(format_err)?;
    build_set(doc.box_len, &doc.modes)
}

/// Serializes in mode-key order, so equal sets give identical text.
pub fn amplitudes_to_toml(set: &AmplitudeSet) -> String {
    let doc = AmplitudeDoc {
        box_len: set.box_len(),
        modes: set
            .iter()
            .map(|(k, v)| ModeRecord {
                n: k.n,
                lambda: k.lambda.value() as i64,
                a: [v.a.re, v.a.im],
                b: [v.b.re, v.b.im],
                virtual_admixture: v.virtual_admixture,
            })
            .collect(),
    };
    toml::to_string(&doc).expect("amplitude documents always serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl TimeSpec {
    pub fn times(&self) -> Vec<f64> {
        crate::zb::uniform_times(self.t0, self.t1, self.samples)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    dims: [usize; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(rename = "box")]
    box_len: Option<[f64; 3]>,
    #[serde(default)]
    modes: Vec<ModeRecord>,
    amplitudes: Option<PathBuf>,
    grid: GridSection,
    time: TimeSpec,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    output: BTreeMap<String, PathBuf>,
}

/// Everything a CLI run needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub amplitudes: AmplitudeSet,
    pub time: TimeSpec,
    pub tolerances: BTreeMap<String, f64>,
    pub output: BTreeMap<String, PathBuf>,
}

impl RunConfig {
    /// Named tolerance, falling back to `default`.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

/// Parses a config; relative `amplitudes` and `[output]` paths resolve
/// against `base`.
pub fn parse_run_config(text: &str, base: &Path) -> Result<RunConfig> {
    let doc: ConfigDoc = toml::from_str(text).map_err(format_err)?;
    let amplitudes = match (&doc.amplitudes, doc.box_len) {
        (Some(_), Some(_)) => return Err(Error::Format("give either `amplitudes` or inline `box`/`modes`, not both".into())),
        (Some(p), None) => {
            if !doc.modes.is_empty() {
                return Err(Error::Format("inline modes need an inline `box`".into()));
            }
            let path = base.join(p);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Format(format!("cannot read amplitudes {}: {e}", path.display())))?;
            parse_amplitudes(&text)?
        }
        (None, Some(b)) => build_set(b, &doc.modes)?,
        (None, None) => return Err(Error::Format("missing `box` (or an `amplitudes` reference)".into())),
    };
    if doc.time.samples < 2 {
        return Err(Error::Format(format!("time.samples must be at least 2, got {}", doc.time.samples)));
    }
    if !(doc.time.t0.is_finite() && doc.time.t1.is_finite() && doc.time.t1 > doc.time.t0) {
        return Err(Error::Format("time.t1 must exceed time.t0".into()));
    }
    if let Some((name, v)) = doc.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Format(format!("tolerance {name} must be positive, got {v}")));
    }
    Ok(RunConfig {
        grid: GridSpec::new(doc.grid.dims, amplitudes.box_len())?,
        amplitudes,
        time: doc.time,
        tolerances: doc.tolerances,
        output: doc.output.into_iter().map(|(k, p)| (k, base.join(p))).collect(),
    })
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read config {}: {e}", path.display())))?;
    parse_run_config(&text, path.parent().unwrap_or(Path::new(".")))
}

/// `ix,iy,iz,re0,im0,…,re5,im5`, one row per site in storage order.
pub fn write_field_csv<W: Write>(field: &FieldGrid, mut w: W) -> Result<()> {
    write!(w, "ix,iy,iz")?;
    for i in 0..6 {
        write!(w, ",re{i},im{i}")?;
    }
    writeln!(w)?;
    let spec = field.spec();
    for (idx, v) in field.data().iter().enumerate() {
        let [x, y, z] = spec.coords(idx);
        write!(w, "{x},{y},{z}")?;
        for z in v.iter() {
            write!(w, ",{:e},{:e}", z.re, z.im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub const FIELD_MAGIC: &[u8; 8] = b"PHWFGRD1";
pub const FIELD_HEADER_LEN: usize = 48;

/// Little-endian: magic, three `u32` dims, a reserved `u32`, three `f64`
/// box lengths, then twelve `f64` (re, im interleaved) per site.
pub fn write_field_binary<W: Write>(field: &FieldGrid, mut w: W) -> Result<()> {
    let spec = field.spec();
    let mut header = Vec::with_capacity(FIELD_HEADER_LEN);
    header.extend_from_slice(FIELD_MAGIC);
    for d in spec.dims() {
        let d = u32::try_from(d).map_err(|_| Error::Format("grid too large for the binary header".into()))?;
        header.extend_from_slice(&d.to_le_bytes());
    }
    header.extend_from_slice(&0u32.to_le_bytes());
    for l in spec.box_len() {
        header.extend_from_slice(&l.to_le_bytes());
    }
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(field.data().len() * 96);
    for v in field.data() {
        for z in v.iter() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field_binary<R: Read>(mut r: R) -> Result<FieldGrid> {
    let mut header = [0u8; FIELD_HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated field header".into()))?;
    if &header[..8] != FIELD_MAGIC {
        return Err(Error::Format("bad field magic".into()));
    }
    let u = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap()) as usize;
    let f = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let spec = GridSpec::new([u(8), u(12), u(16)], [f(24), f(32), f(40)])?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != spec.len() * 96 {
        return Err(Error::ShapeMismatch {
            expected: spec.len() * 96,
            got: body.len(),
        });
    }
    let data = body
        .chunks_exact(96)
        .map(|site| {
            Vec6::from_fn(|i, _| {
                let re = f64::from_le_bytes(site[16 * i..16 * i + 8].try_into().unwrap());
                let im = f64::from_le_bytes(site[16 * i + 8..16 * i + 16].try_into().unwrap());
                c(re, im)
            })
        })
        .collect();
    FieldGrid::from_data(spec, data)
}

/// `t,J0,Jx,Jy,Jz,scalar`.
pub fn write_observables_csv<W: Write>(rows: &[(f64, Observables)], mut w: W) -> Result<()> {
    writeln!(w, "t,J0,Jx,Jy,Jz,scalar")?;
    for (t, o) in rows {
        writeln!(
            w,
            "{t:e},{:e},{:e},{:e},{:e},{:e}",
            o.j0, o.j[0], o.j[1], o.j[2], o.scalar_integral
        )?;
    }
    Ok(())
}

/// Names of the four term groups of a [`MomentumSeries`].
pub const GROUP_NAMES: [&str; 4] = ["diag", "mixed", "osc_l0", "osc_0l"];

/// `t,Jx,Jy,Jz`, plus `<group>_x,<group>_y,<group>_z` per term group when
/// `breakdown` is set.
pub fn write_series_csv<W: Write>(series: &MomentumSeries, breakdown: bool, mut w: W) -> Result<()> {
    write!(w, "t,Jx,Jy,Jz")?;
    if breakdown {
        for g in GROUP_NAMES {
            write!(w, ",{g}_x,{g}_y,{g}_z")?;
        }
    }
    writeln!(w)?;
    for (i, (t, j)) in series.times.iter().zip(&series.j).enumerate() {
        write!(w, "{t:e},{:e},{:e},{:e}", j[0], j[1], j[2])?;
        if breakdown {
            for g in &series.groups {
                write!(w, ",{:e},{:e},{:e}", g[i][0], g[i][1], g[i][2])?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let set = parse_amplitudes("box = [1.0, 2.0, 3.0]\n").unwrap();
        assert!(set.is_empty());
        assert_eq!(set.box_len(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            "box = [1.0, 1.0]",
            "box = [1.0, 1.0, 1.0]\n[[modes]]\nn = [1,0,0]\nlambda = 2\n",
            "box = [1.0, 1.0, 1.0]\n[[modes]]\nn = [0,0,0]\nlambda = 1\n",
            "box = [1.0, 1.0, 1.0]\n[[modes]]\nn = [1,0,0]\nlambda = 1\ncolour = 3\n",
            "box = [1.0, 1.0, 1.0]\n[[modes]]\nn = [1,0,0]\nlambda = 1\n[[modes]]\nn = [1,0,0]\nlambda = 1\n",
            "box = [-1.0, 1.0, 1.0]",
        ] {
            assert!(parse_amplitudes(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn header_is_48_bytes() {
        let spec = GridSpec::new([4, 6, 4], [1.0, 1.0, 1.0]).unwrap();
        let mut out = Vec::new();
        write_field_binary(&FieldGrid::zeros(spec), &mut out).unwrap();
        assert_eq!(out.len(), FIELD_HEADER_LEN + 96 * 96);
        assert_eq!(&out[..8], FIELD_MAGIC);
        assert_eq!(u32::from_le_bytes(out[12..16].try_into().unwrap()), 6);
    }
}
