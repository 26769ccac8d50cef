//! Binary level cache.
//!
//! Layout, all integers little-endian: magic `MCGT`, version `u32`, level `n`
//! as `u32`, carrier size `l` as `u64`, `m_n` as a `u64` byte count followed by
//! its bytes, then for each generator in lex order of its code the `l` images
//! as `u64`.

use super::paper::{PaperLevel, PaperTower};
use super::perm::Perm;
use crate::Nat;
use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"MCGT";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt cache file {path}: {reason}")]
    Corrupt { path: String, reason: String },
}

pub fn level_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("paper-level-{n}.mcgt"))
}

pub fn write_level(dir: &Path, level: &PaperLevel) -> Result<PathBuf, CacheError> {
    fs::create_dir_all(dir)?;
    let path = level_path(dir, level.n());
    let mut out = BufWriter::new(fs::File::create(&path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(level.n() as u32).to_le_bytes())?;
    out.write_all(&(level.l() as u64).to_le_bytes())?;
    let m = level.m().to_bytes_le();
    out.write_all(&(m.len() as u64).to_le_bytes())?;
    out.write_all(&m)?;
    for g in level.generators() {
        for &i in g.images() {
            out.write_all(&(i as u64).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(path)
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_level(path: &Path) -> Result<PaperLevel, CacheError> {
    let corrupt = |reason: String| CacheError::Corrupt { path: path.display().to_string(), reason };
    let mut r = BufReader::new(fs::File::open(path)?);
    let body = (|| -> io::Result<(u32, u32, u64, Vec<u8>)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic"));
        }
        let version = read_u32(&mut r)?;
        let n = read_u32(&mut r)?;
        let l = read_u64(&mut r)?;
        let mlen = read_u64(&mut r)?;
        if mlen > 1 << 24 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "m_n too long"));
        }
        let mut m = vec![0u8; mlen as usize];
        r.read_exact(&mut m)?;
        Ok((version, n, l, m))
    })();
    let (version, n, l, m) = body.map_err(|e| corrupt(format!("header: {e}")))?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let n = n as usize;
    if n > super::paper::PAPER_LEVEL_CAP {
        return Err(corrupt(format!("level {n} beyond cap")));
    }
    let expected_l = if n == 0 { 2 } else { crate::words::w_count(n).expect("small level") };
    if l != expected_l {
        return Err(corrupt(format!("carrier size {l}, expected {expected_l}")));
    }
    let gen_count = if n == 0 { 0 } else { 1usize << n };
    let mut gens = Vec::with_capacity(gen_count);
    let mut buf = vec![0u8; l as usize * 8];
    for k in 0..gen_count {
        r.read_exact(&mut buf).map_err(|e| corrupt(format!("generator {k}: {e}")))?;
        let images: Vec<u32> = buf
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .map(|v| u32::try_from(v).unwrap_or(u32::MAX))
            .collect();
        gens.push(Perm::from_images(images).map_err(|e| corrupt(format!("generator {k}: {e}")))?);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(corrupt(format!("{} trailing bytes", rest.len())));
    }
    PaperLevel::from_generators(n, Nat::from_bytes_le(&m), gens).map_err(|e| corrupt(e.to_string()))
}

pub fn save_tower(dir: &Path, t: &PaperTower) -> Result<Vec<PathBuf>, CacheError> {
    t.levels().iter().map(|lv| write_level(dir, lv)).collect()
}

/// Loads levels `0..=max_level`; `Ok(None)` if some level file is missing.
pub fn load_tower(dir: &Path, max_level: usize) -> Result<Option<PaperTower>, CacheError> {
    let mut levels = Vec::new();
    for n in 0..=max_level {
        let p = level_path(dir, n);
        if !p.exists() {
            return Ok(None);
        }
        levels.push(read_level(&p)?);
    }
    PaperTower::from_levels(levels)
        .map(Some)
        .map_err(|e| CacheError::Corrupt { path: dir.display().to_string(), reason: e.to_string() })
}
