//! Binary snapshots of a Wigner function or a wavefunction.
//!
//! Layout:
//!
//! ```text
//! bytes 0..8     magic "NONSEPSN"
//! bytes 8..12    format version, u32 little-endian
//! bytes 12..16   header length H, u32 little-endian
//! bytes 16..16+H JSON header (SnapshotHeader)
//! rest           payload, row-major f64 in the declared byte order:
//!                W(x_i, p_j) for a Wigner field, (re, im) pairs of ψ(x_i)
//!                for a wavefunction
//! ```

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{AxisGrid, LineGrid, PhaseGrid, Representation, C64};
use crate::states::{WaveFunction, WignerState};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"NONSEPSN";
pub const SNAPSHOT_FORMAT: u32 = 1;
const PREAMBLE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisMeta {
    pub n: usize,
    pub min: f64,
    pub step: f64,
}

impl From<AxisGrid> for AxisMeta {
    fn from(a: AxisGrid) -> Self {
        AxisMeta {
            n: a.n,
            min: a.min,
            step: a.step,
        }
    }
}

impl AxisMeta {
    pub fn to_axis(self) -> Result<AxisGrid> {
        AxisGrid::new(self.n, self.min, self.step)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: u32,
    pub code_version: String,
    /// `"little"` or `"big"`.
    pub endianness: String,
    /// `"wigner_xp"` or `"wavefunction"`.
    pub field: String,
    pub shape: Vec<usize>,
    pub x: AxisMeta,
    /// Momentum axis of a Wigner field.
    pub p: Option<AxisMeta>,
    /// Bopp axis of a Wigner field, needed to rebuild its grid.
    pub theta: Option<AxisMeta>,
    pub hbar: f64,
    pub time: f64,
    pub scheme: String,
    /// Free-form description of how the field was produced.
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Wigner(Array2<f64>),
    Wave(Array1<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: FieldData,
}

fn base_header(field: &str, shape: Vec<usize>, x: AxisGrid, hbar: f64, time: f64, scheme: &str, provenance: &str) -> SnapshotHeader {
    SnapshotHeader {
        format: SNAPSHOT_FORMAT,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        endianness: "little".into(),
        field: field.into(),
        shape,
        x: x.into(),
        p: None,
        theta: None,
        hbar,
        time,
        scheme: scheme.into(),
        provenance: provenance.into(),
    }
}

impl Snapshot {
    pub fn from_wigner(state: &WignerState, time: f64, scheme: &str, provenance: &str) -> Result<Self> {
        let w = state.density_xp()?;
        let g = &state.grid;
        let mut header = base_header("wigner_xp", vec![g.x.n, g.p.n], g.x, g.hbar, time, scheme, provenance);
        header.p = Some(g.p.into());
        header.theta = Some(g.theta.into());
        Ok(Snapshot {
            header,
            data: FieldData::Wigner(w),
        })
    }

    pub fn from_wavefunction(psi: &WaveFunction, time: f64, scheme: &str, provenance: &str) -> Result<Self> {
        let pos = psi.in_rep(Representation::Position)?;
        let header = base_header("wavefunction", vec![pos.grid.x.n], pos.grid.x, pos.grid.hbar, time, scheme, provenance);
        Ok(Snapshot {
            header,
            data: FieldData::Wave(pos.data),
        })
    }

    pub fn wigner_xp(&self) -> Option<&Array2<f64>> {
        match &self.data {
            FieldData::Wigner(w) => Some(w),
            FieldData::Wave(_) => None,
        }
    }

    /// Rebuilds the phase-space state (in `(x, θ)`).
    pub fn to_wigner_state(&self) -> Result<WignerState> {
        let w = self
            .wigner_xp()
            .ok_or_else(|| Error::InvalidParameter("snapshot holds a wavefunction".into()))?;
        let theta = self
            .header
            .theta
            .ok_or_else(|| Error::InvalidParameter("snapshot lacks the theta axis".into()))?;
        let grid = PhaseGrid::new(self.header.x.to_axis()?, theta.to_axis()?, self.header.hbar)?;
        let data = w.mapv(|v| C64::new(v, 0.0));
        let mut state = WignerState::new(grid, data, Representation::XP)?;
        state.to_rep(Representation::XTheta)?;
        Ok(state)
    }

    pub fn to_wavefunction(&self) -> Result<WaveFunction> {
        match &self.data {
            FieldData::Wave(d) => {
                let grid = LineGrid::new(self.header.x.to_axis()?, self.header.hbar)?;
                WaveFunction::new(grid, d.clone(), Representation::Position)
            }
            FieldData::Wigner(_) => Err(Error::InvalidParameter("snapshot holds a Wigner field".into())),
        }
    }
}

pub fn encode_snapshot(snap: &Snapshot) -> Result<Vec<u8>> {
    let mut header = snap.header.clone();
    header.endianness = "little".into();
    header.format = SNAPSHOT_FORMAT;
    let json = serde_json::to_vec(&header)
        .map_err(|e| Error::InvalidParameter(format!("snapshot header: {e}")))?;
    let values: Vec<f64> = match &snap.data {
        FieldData::Wigner(w) => w.iter().copied().collect(),
        FieldData::Wave(d) => d.iter().flat_map(|c| [c.re, c.im]).collect(),
    };
    let mut out = Vec::with_capacity(PREAMBLE + json.len() + 8 * values.len());
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_FORMAT.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses snapshot bytes; `path` only labels errors.
pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let len = bytes.len() as u64;
    let truncated = |start: usize, end: usize| Error::TruncatedSnapshot {
        path: path.to_path_buf(),
        start: start as u64,
        end: end as u64,
        len,
    };
    let corrupt = |message: String| Error::Snapshot {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < PREAMBLE {
        if bytes.len() >= 8 && &bytes[..8] != SNAPSHOT_MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        return Err(truncated(bytes.len(), PREAMBLE));
    }
    if &bytes[..8] != SNAPSHOT_MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let format = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if format != SNAPSHOT_FORMAT {
        return Err(corrupt(format!("unsupported format version {format}")));
    }
    let hlen = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    let hend = PREAMBLE + hlen;
    if bytes.len() < hend {
        return Err(truncated(bytes.len(), hend));
    }
    let header: SnapshotHeader = serde_json::from_slice(&bytes[PREAMBLE..hend])
        .map_err(|e| corrupt(format!("header: {e}")))?;
    let big = match header.endianness.as_str() {
        "little" => false,
        "big" => true,
        other => return Err(corrupt(format!("unknown endianness '{other}'"))),
    };
    let (count, per) = match (header.field.as_str(), header.shape.as_slice()) {
        ("wigner_xp", [a, b]) => (a * b, 1),
        ("wavefunction", [a]) => (*a, 2),
        (f, s) => return Err(corrupt(format!("field '{f}' with shape {s:?}"))),
    };
    let pend = hend + 8 * per * count;
    if bytes.len() < pend {
        return Err(truncated(bytes.len(), pend));
    }
    if bytes.len() > pend {
        return Err(corrupt(format!("{} trailing bytes after payload", bytes.len() - pend)));
    }
    let values: Vec<f64> = bytes[hend..pend]
        .chunks_exact(8)
        .map(|c| {
            let arr: [u8; 8] = c.try_into().expect("8 bytes");
            if big {
                f64::from_be_bytes(arr)
            } else {
                f64::from_le_bytes(arr)
            }
        })
        .collect();
    let data = if per == 1 {
        let shape = (header.shape[0], header.shape[1]);
        FieldData::Wigner(Array2::from_shape_vec(shape, values).map_err(|e| corrupt(e.to_string()))?)
    } else {
        FieldData::Wave(values.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
    };
    Ok(Snapshot { header, data })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let bytes = encode_snapshot(snap)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(format!("writing snapshot {}", path.display()), e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(format!("reading snapshot {}", path.display()), e))?;
    decode_snapshot(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use crate::states::{coherent_wavefunction, coherent_wigner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_snapshot(seed: u64) -> Snapshot {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = make_phase_grid(16, 8, 10.0, 12.0, 1.0).unwrap();
        let w = Array2::from_shape_fn((16, 8), |_| rng.gen::<f64>() - 0.5);
        let mut header = base_header("wigner_xp", vec![16, 8], g.x, 1.0, 0.25, "u9", "test");
        header.p = Some(g.p.into());
        header.theta = Some(g.theta.into());
        Snapshot {
            header,
            data: FieldData::Wigner(w),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for seed in 0..4 {
            let snap = random_snapshot(seed);
            let path = dir.path().join(format!("s{seed}.bin"));
            write_snapshot(&path, &snap).unwrap();
            let back = read_snapshot(&path).unwrap();
            assert_eq!(back, snap);
            assert_eq!(encode_snapshot(&back).unwrap(), std::fs::read(&path).unwrap());
        }
    }

    #[test]
    fn wavefunction_round_trip() {
        let line = LineGrid::centered(32, 16.0, 1.0).unwrap();
        let psi = coherent_wavefunction(&line, 1.0, 0.5).unwrap();
        let snap = Snapshot::from_wavefunction(&psi, 0.0, "u9", "test").unwrap();
        let back = decode_snapshot(&encode_snapshot(&snap).unwrap(), Path::new("mem")).unwrap();
        assert_eq!(back.to_wavefunction().unwrap().data, psi.data);
    }

    #[test]
    fn wigner_state_survives() {
        let g = make_phase_grid(32, 32, 16.0, 16.0, 1.0).unwrap();
        let w = coherent_wigner(&g, 1.0, -1.0).unwrap();
        let snap = Snapshot::from_wigner(&w, 1.5, "u7", "test").unwrap();
        let back = snap.to_wigner_state().unwrap();
        let d = (&back.data - &w.data).mapv(|v| v.norm()).fold(0.0f64, |m: f64, v| m.max(*v));
        assert!(d < 1e-14);
        assert_eq!(snap.header.time, 1.5);
    }

    #[test]
    fn declared_big_endian_is_honored() {
        let snap = random_snapshot(9);
        let mut header = snap.header.clone();
        header.endianness = "big".into();
        let json = serde_json::to_vec(&header).unwrap();
        let mut bytes = Vec::new();
        bytes.extend_from_slice(SNAPSHOT_MAGIC);
        bytes.extend_from_slice(&SNAPSHOT_FORMAT.to_le_bytes());
        bytes.extend_from_slice(&(json.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&json);
        for v in snap.wigner_xp().unwrap().iter() {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        let back = decode_snapshot(&bytes, Path::new("be")).unwrap();
        assert_eq!(back.data, snap.data);
    }

    #[test]
    fn truncation_names_missing_range() {
        let bytes = encode_snapshot(&random_snapshot(1)).unwrap();
        let full = bytes.len() as u64;
        let cut = &bytes[..bytes.len() - 5];
        match decode_snapshot(cut, Path::new("cut")) {
            Err(Error::TruncatedSnapshot { start, end, len, .. }) => {
                assert_eq!((start, end, len), (full - 5, full, full - 5));
            }
            other => panic!("{other:?}"),
        }
        match decode_snapshot(&bytes[..20], Path::new("cut")) {
            Err(Error::TruncatedSnapshot { start: 20, end, .. }) => assert!(end > 20 && end < full),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            decode_snapshot(&bytes[..10], Path::new("cut")),
            Err(Error::TruncatedSnapshot { start: 10, end: 16, .. })
        ));
    }

    #[test]
    fn corruption_is_reported() {
        let mut bytes = encode_snapshot(&random_snapshot(2)).unwrap();
        bytes[0] = b'X';
        assert!(matches!(decode_snapshot(&bytes, Path::new("c")), Err(Error::Snapshot { .. })));
        let mut bytes = encode_snapshot(&random_snapshot(2)).unwrap();
        bytes.push(0);
        assert!(matches!(decode_snapshot(&bytes, Path::new("c")), Err(Error::Snapshot { .. })));
        let mut bytes = encode_snapshot(&random_snapshot(2)).unwrap();
        bytes[17] = b'!';
        assert!(matches!(decode_snapshot(&bytes, Path::new("c")), Err(Error::Snapshot { .. })));
    }
}
