//! Grid strings: `a,b,c`, `geom:lo:hi:n`, `lin:lo:hi:n` or `pow2:m0:m1`.

use anyhow::{bail, Context, Result};

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let num = |v: &str| -> Result<f64> { v.trim().parse::<f64>().with_context(|| format!("bad number {v:?} in grid {s:?}")) };
    let count = |v: &str| -> Result<usize> { v.trim().parse::<usize>().with_context(|| format!("bad count {v:?} in grid {s:?}")) };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        ["geom", lo, hi, n] => {
            let (lo, hi, n) = (num(lo)?, num(hi)?, count(n)?);
            if !(lo > 0.0 && hi >= lo && n >= 1) {
                bail!("geometric grid needs 0 < lo <= hi and n >= 1");
            }
            if n == 1 {
                vec![lo]
            } else {
                let r = (hi / lo).ln() / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n).map(|i| lo * (r * i as f64).exp()).collect();
                v[n - 1] = hi;
                v
            }
        }
        ["lin", lo, hi, n] => {
            let (lo, hi, n) = (num(lo)?, num(hi)?, count(n)?);
            if !(hi >= lo && n >= 1) {
                bail!("linear grid needs lo <= hi and n >= 1");
            }
            if n == 1 {
                vec![lo]
            } else {
                let step = (hi - lo) / (n - 1) as f64;
                (0..n).map(|i| lo + step * i as f64).collect()
            }
        }
        ["pow2", m0, m1] => {
            let (m0, m1): (i32, i32) = (
                m0.trim().parse().context("bad exponent in pow2 grid")?,
                m1.trim().parse().context("bad exponent in pow2 grid")?,
            );
            if m1 < m0 {
                bail!("pow2 grid needs m0 <= m1");
            }
            (m0..=m1).map(|m| 2f64.powi(m)).collect()
        }
        [list] => list.split(',').filter(|p| !p.trim().is_empty()).map(num).collect::<Result<_>>()?,
        _ => bail!("unrecognised grid {s:?}; use a,b,c or geom:lo:hi:n or lin:lo:hi:n or pow2:m0:m1"),
    };
    if grid.is_empty() {
        bail!("empty grid {s:?}");
    }
    Ok(grid)
}
