//! Plane I/O: textual PGM input and raw little-endian f64 planes with a JSON
//! sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use uwu_core::Plane;

/// Largest accepted height or width.
pub const MAX_DIM: usize = 8192;

pub const RAW_DTYPE: &str = "f64le";

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn check_dims(height: usize, width: usize) -> Result<()> {
    ensure!(
        height > 0 && width > 0,
        "image has a zero dimension ({height}x{width})"
    );
    ensure!(
        height <= MAX_DIM && width <= MAX_DIM,
        "image {height}x{width} exceeds the {MAX_DIM}x{MAX_DIM} limit"
    );
    Ok(())
}

/// Parses a textual (`P2`) portable graymap; samples are mapped to `[0, 1]`
/// by dividing by maxval.
pub fn parse_pgm(text: &str) -> Result<Plane> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let magic = tokens.next().context("empty image file")?;
    ensure!(
        magic == "P2",
        "unsupported image format {magic:?}: expected textual PGM (P2)"
    );
    let mut header = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .with_context(|| format!("PGM header is missing {what}"))?;
        tok.parse()
            .with_context(|| format!("PGM {what} {tok:?} is not a nonnegative integer"))
    };
    let width = header("width")?;
    let height = header("height")?;
    let maxval = header("maxval")?;
    check_dims(height, width)?;
    ensure!(
        (1..=65535).contains(&maxval),
        "PGM maxval {maxval} out of range"
    );

    let mut data = Vec::with_capacity(height * width);
    for tok in tokens {
        let v: usize = tok
            .parse()
            .with_context(|| format!("PGM sample {tok:?} is not a nonnegative integer"))?;
        ensure!(v <= maxval, "PGM sample {v} exceeds maxval {maxval}");
        data.push(v as f64 / maxval as f64);
    }
    ensure!(
        data.len() == height * width,
        "PGM has {} samples, expected {}",
        data.len(),
        height * width
    );
    Ok(Plane::new(height, width, data)?)
}

pub fn format_pgm(p: &Plane) -> String {
    let mut s = format!("P2\n{} {}\n255\n", p.width(), p.height());
    for r in 0..p.height() {
        let row: Vec<String> = p
            .row(r)
            .iter()
            .map(|v| ((v.clamp(0.0, 1.0) * 255.0).round() as u8).to_string())
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Dimensions of a raw plane file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub height: usize,
    pub width: usize,
    pub dtype: String,
}

pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut s = raw.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn plane_to_bytes(p: &Plane) -> Vec<u8> {
    p.data().iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn plane_from_bytes(bytes: &[u8], height: usize, width: usize) -> Result<Plane> {
    check_dims(height, width)?;
    ensure!(
        bytes.len() == 8 * height * width,
        "raw plane has {} bytes, expected {} for {height}x{width}",
        bytes.len(),
        8 * height * width
    );
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(Plane::new(height, width, data)?)
}

pub fn read_raw(path: &Path, height: usize, width: usize) -> Result<Plane> {
    check_dims(height, width)?;
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    plane_from_bytes(&bytes, height, width).with_context(|| format!("in {}", path.display()))
}

/// Writes `path` and its `path.json` sidecar.
pub fn write_raw_with_sidecar(path: &Path, p: &Plane) -> Result<()> {
    write_atomic(path, &plane_to_bytes(p))?;
    let sidecar = RawSidecar {
        height: p.height(),
        width: p.width(),
        dtype: RAW_DTYPE.into(),
    };
    let mut json = serde_json::to_string_pretty(&sidecar)?;
    json.push('\n');
    write_atomic(&sidecar_path(path), json.as_bytes())
}

pub fn read_raw_with_sidecar(path: &Path) -> Result<Plane> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side)
        .with_context(|| format!("cannot read dimension sidecar {}", side.display()))?;
    let meta: RawSidecar = serde_json::from_str(&text)
        .with_context(|| format!("malformed sidecar {}", side.display()))?;
    if meta.dtype != RAW_DTYPE {
        bail!(
            "unsupported sample type {:?} in {}",
            meta.dtype,
            side.display()
        );
    }
    read_raw(path, meta.height, meta.width)
}

/// `.pgm` files are read as graymaps; anything else as a raw plane with a
/// sidecar.
pub fn read_plane(path: &Path) -> Result<Plane> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let len = fs::metadata(path)
            .with_context(|| format!("cannot read {}", path.display()))?
            .len();
        // Generous bound: six bytes per sample at the dimension limit.
        ensure!(
            len <= 6 * (MAX_DIM * MAX_DIM) as u64 + 1024,
            "{} is too large",
            path.display()
        );
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        parse_pgm(&text).with_context(|| format!("in {}", path.display()))
    } else {
        read_raw_with_sidecar(path)
    }
}
