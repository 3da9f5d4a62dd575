use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::RunRecord;
use crate::spectral::{DomainGeometry, SpectralField};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"FTHNSNAP";
pub const SNAPSHOT_VERSION: u32 = 1;

pub const RUN_CSV_COLUMNS: [&str; 8] = [
    "t",
    "mass",
    "energy_hs",
    "entropy",
    "dissipation",
    "support_radius",
    "min_u",
    "max_u",
];

/// First line of every CSV file.
pub fn metadata_line(config_hash: &str, seed: u64) -> String {
    format!("# fracthin config_hash={config_hash} seed={seed}")
}

/// `{:.16e}` with `nan`, `inf` and `-inf` for non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn run_csv(record: &RunRecord, config_hash: &str, seed: u64) -> String {
    let mut out = metadata_line(config_hash, seed);
    out.push('\n');
    out.push_str(&RUN_CSV_COLUMNS.join(","));
    out.push('\n');
    for i in 0..record.len() {
        let row = [
            record.times[i],
            record.mass[i],
            record.energy[i],
            record.entropy[i],
            record.dissipation[i],
            record.support_radius[i],
            record.min_u[i],
            record.max_u[i],
        ];
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numeric(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

/// Snapshot file contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub geometry: DomainGeometry,
    pub t: f64,
    pub coefficients: Vec<f64>,
}

pub fn encode_snapshot(u: &SpectralField, t: f64) -> Vec<u8> {
    let g = u.basis().geometry();
    let flat = u.to_flat();
    let mut buf = Vec::with_capacity(32 + 16 * g.dimension() + 8 * flat.len());
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dimension() as u32).to_le_bytes());
    for axis in 0..g.dimension() {
        buf.extend_from_slice(&g.edge_lengths()[axis].to_le_bytes());
        buf.extend_from_slice(&(g.modes()[axis] as u32).to_le_bytes());
        buf.extend_from_slice(&(g.points()[axis] as u32).to_le_bytes());
    }
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&(flat.len() as u64).to_le_bytes());
    for c in flat {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const K: usize>(&mut self) -> std::result::Result<[u8; K], String> {
        let end = self.pos + K;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice of length K"))
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        self.take::<8>().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> std::result::Result<Snapshot, String> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<8>()? != SNAPSHOT_MAGIC {
        return Err("bad magic".into());
    }
    let version = r.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let d = r.u32()? as usize;
    if d == 0 || d > 3 {
        return Err(format!("bad dimension {d}"));
    }
    let (mut lengths, mut modes, mut points) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..d {
        lengths.push(r.f64()?);
        modes.push(r.u32()? as usize);
        points.push(r.u32()? as usize);
    }
    let geometry = DomainGeometry::new(lengths, modes, points).map_err(|e| e.to_string())?;
    let t = r.f64()?;
    let count = r.u64()? as usize;
    if count != geometry.coefficient_count() {
        return Err(format!(
            "coefficient count {count} does not match geometry ({})",
            geometry.coefficient_count()
        ));
    }
    let mut coefficients = Vec::with_capacity(count);
    for _ in 0..count {
        coefficients.push(r.f64()?);
    }
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    Ok(Snapshot {
        geometry,
        t,
        coefficients,
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        message,
    })
}

/// Metadata written next to each snapshot.
#[derive(Clone, Debug, Serialize)]
pub struct SnapshotSidecar<'a> {
    pub index: usize,
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub config_hash: &'a str,
}

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snap_{index:04}.bin"))
}

/// Writes `snapshots/snap_NNNN.bin` and `snap_NNNN.json` for every sample
/// kept in the record.
pub fn write_snapshots(dir: &Path, record: &RunRecord, config_hash: &str) -> Result<()> {
    let dir = dir.join("snapshots");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (i, u) in record.snapshots.iter().enumerate() {
        let path = snapshot_path(&dir, i);
        fs::write(&path, encode_snapshot(u, record.times[i])).map_err(|e| Error::io(&path, e))?;
        let side = SnapshotSidecar {
            index: i,
            t: record.times[i],
            mass: record.mass[i],
            energy: record.energy[i],
            entropy: record.entropy[i],
            min_u: record.min_u[i],
            max_u: record.max_u[i],
            config_hash,
        };
        write_json(&path.with_extension("json"), &side)?;
    }
    Ok(())
}

/// CSV of named columns with the metadata line on top.
pub fn table_csv(config_hash: &str, seed: u64, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = metadata_line(config_hash, seed);
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{build_basis, random_field};

    #[test]
    fn snapshot_round_trip() {
        let g = DomainGeometry::new(vec![1.0, 2.0], vec![6, 4], vec![10, 6]).unwrap();
        let basis = build_basis(g.clone());
        let u = random_field(&basis, &mut ChaCha8Rng::seed_from_u64(1), 1.0);
        let bytes = encode_snapshot(&u, 0.125);
        assert_eq!(&bytes[..8], b"FTHNSNAP");
        assert_eq!(bytes.len(), 8 + 4 + 4 + 2 * 16 + 8 + 8 + 8 * 24);
        let snap = decode_snapshot(&bytes).unwrap();
        assert_eq!(snap.geometry, g);
        assert_eq!(snap.t, 0.125);
        assert_eq!(snap.coefficients, u.to_flat());
    }

    #[test]
    fn corrupted_snapshots_are_rejected() {
        let basis = build_basis(DomainGeometry::interval(1.0, 4).unwrap());
        let bytes = encode_snapshot(&SpectralField::constant(basis, 1.0), 0.0);
        assert!(decode_snapshot(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_snapshot(&bad).is_err());
        let mut long = bytes;
        long.push(0);
        assert!(decode_snapshot(&long).is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(-f64::INFINITY), "-inf");
    }
}
