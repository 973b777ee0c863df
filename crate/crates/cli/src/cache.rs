//! On-disk cache of bracket grids under `TAILFORGE_CACHE_DIR`.
//!
//! One file per key `<sha256>.grid`: a JSON header line, then one
//! `x,log_lower,log_upper` line per lattice point in base-10 text.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tailforge::convolve::BracketGrid;
use tailforge::spec::DistSpec;

use crate::export::{fmt_f64, json_f64, write_file};

pub const ENV: &str = "TAILFORGE_CACHE_DIR";
const SCHEMA: &str = "tailforge.bracket-cache/1";

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn key_value(spec: &DistSpec, n: usize, cap: Option<f64>, x_max: f64, h: f64) -> Value {
    json!({
        "spec": spec.to_value(),
        "n": n,
        "cap": cap.map(json_f64),
        "x_max": json_f64(x_max),
        "h": json_f64(h),
    })
}

pub fn key_hash(spec: &DistSpec, n: usize, cap: Option<f64>, x_max: f64, h: f64) -> String {
    let text = serde_json::to_string(&key_value(spec, n, cap, x_max, h)).expect("json");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn write_grid(dir: &Path, hash: &str, key: Value, g: &BracketGrid) -> Result<PathBuf> {
    let header = json!({"schema": SCHEMA, "hash": hash, "key": key});
    let mut text = serde_json::to_string(&header).expect("json");
    text.push('\n');
    for i in 0..g.grid.len() {
        text.push_str(&format!("{},{},{}\n", fmt_f64(g.grid[i]), fmt_f64(g.lower[i]), fmt_f64(g.upper[i])));
    }
    let path = dir.join(format!("{hash}.grid"));
    write_file(&path, &text)?;
    Ok(path)
}

pub fn read_grid(path: &Path, hash: &str, n: usize, cap: Option<f64>, h: f64) -> Result<BracketGrid> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap_or("")).context("cache header")?;
    if header["schema"] != SCHEMA || header["hash"] != hash {
        bail!("cache file {} does not match its key", path.display());
    }
    let (mut grid, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new());
    for line in lines {
        let f: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("bad cache line {line:?}"))?;
        if f.len() != 3 {
            bail!("bad cache line {line:?}");
        }
        grid.push(f[0]);
        lower.push(f[1]);
        upper.push(f[2]);
    }
    Ok(BracketGrid {
        grid,
        lower,
        upper,
        n,
        h,
        cap,
    })
}

/// Loads the grid from the cache or computes and stores it.
pub fn cached_grid(
    spec: &DistSpec,
    n: usize,
    cap: Option<f64>,
    x_max: f64,
    h: f64,
    compute: impl FnOnce() -> tailforge::Result<BracketGrid>,
) -> Result<BracketGrid> {
    let Some(dir) = cache_dir() else {
        return Ok(compute()?);
    };
    let hash = key_hash(spec, n, cap, x_max, h);
    let path = dir.join(format!("{hash}.grid"));
    if path.is_file() {
        if let Ok(g) = read_grid(&path, &hash, n, cap, h) {
            return Ok(g);
        }
    }
    let g = compute()?;
    write_grid(&dir, &hash, key_value(spec, n, cap, x_max, h), &g)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tailforge::convolve::convn_tail_grid;

    #[test]
    fn write_then_read_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let spec = DistSpec::parse_inline("exponential").unwrap();
        let d = spec.build().unwrap();
        let g = convn_tail_grid(&d, 2, 3.0, 0.01).unwrap();
        let hash = key_hash(&spec, 2, None, 3.0, 0.01);
        let p = write_grid(dir.path(), &hash, key_value(&spec, 2, None, 3.0, 0.01), &g).unwrap();
        assert_eq!(read_grid(&p, &hash, 2, None, 0.01).unwrap(), g);
        assert!(read_grid(&p, "other", 2, None, 0.01).is_err());
        assert_ne!(hash, key_hash(&spec, 3, None, 3.0, 0.01));
    }
}
