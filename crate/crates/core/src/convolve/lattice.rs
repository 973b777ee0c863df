use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::logmath::log1mexp;

/// Effort limits for lattice convolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub cell_limit: usize,
    pub max_fold: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            cell_limit: 200_000,
            max_fold: 8,
        }
    }
}

/// Log-tail bounds of `F̄*ⁿ` (or of the restricted sum) on `x_i = i·h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketGrid {
    pub grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n: usize,
    pub h: f64,
    /// Components are restricted to `[0, cap]` when set.
    pub cap: Option<f64>,
}

impl BracketGrid {
    /// Linear-scale bounds on `P(S > x)` for any `x` inside the grid range,
    /// snapping outward to the neighbouring lattice points.
    pub fn bracket_at(&self, x: f64) -> Result<(f64, f64)> {
        let last = *self.grid.last().unwrap_or(&0.0);
        if !(x >= 0.0) || x > last {
            return Err(Error::OutOfRange { x, limit: last });
        }
        let r = x / self.h;
        let near = r.round();
        let (lo_i, hi_i) = if (r - near).abs() <= 1e-9 * near.max(1.0) {
            (near as usize, near as usize)
        } else {
            (r.floor() as usize, r.ceil() as usize)
        };
        let hi_i = hi_i.min(self.grid.len() - 1);
        Ok((self.lower[hi_i].exp(), self.upper[lo_i].exp()))
    }
}

/// Brackets for `P(X_1 + ... + X_n > x)` on the lattice of step `h` up to `x_max`.
pub fn convn_tail_grid(d: &Distribution, n: usize, x_max: f64, h: f64) -> Result<BracketGrid> {
    lattice_tail(d, n, None, x_max, h, &LatticeConfig::default())
}

/// Brackets for `P(X_i <= cap for all i, X_1 + ... + X_n > x)`.
pub fn trunc_convn_tail_grid(d: &Distribution, n: usize, cap: f64, x_max: f64, h: f64) -> Result<BracketGrid> {
    lattice_tail(d, n, Some(cap), x_max, h, &LatticeConfig::default())
}

/// Lattice convolution with explicit limits. `cap = None` means no restriction.
pub fn lattice_tail(
    d: &Distribution,
    n: usize,
    cap: Option<f64>,
    x_max: f64,
    h: f64,
    cfg: &LatticeConfig,
) -> Result<BracketGrid> {
    if n < 1 || n > cfg.max_fold {
        return Err(Error::InvalidParameter(format!(
            "fold count {n} outside 1..={}",
            cfg.max_fold
        )));
    }
    if !(h > 0.0) || !(x_max >= 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidParameter("need h > 0 and finite x_max >= 0".into()));
    }
    if let Some(c) = cap {
        if !(c >= 0.0) {
            return Err(Error::InvalidParameter("cap must be >= 0".into()));
        }
    }
    let cells = (x_max / h).ceil() as usize;
    if cells > cfg.cell_limit {
        return Err(Error::CellLimit {
            cells,
            limit: cfg.cell_limit,
        });
    }
    let m = cells;
    let reach = (m + 1) as f64 * h;
    let limit = d.truncation_hi();
    if reach > limit {
        return Err(Error::OutOfRange { x: reach, limit });
    }
    let cap = cap.filter(|c| c.is_finite());
    let cap_eff = cap.map(|c| c.min(limit));

    let tail = |x: f64| d.tail().log_tail_unchecked(x);
    let tail_left = |x: f64| d.tail().log_tail_left_unchecked(x);
    // F̄(a) - F̄(b) for log values la >= lb
    let diff = |la: f64, lb: f64| {
        if la == f64::NEG_INFINITY || lb >= la {
            0.0
        } else {
            (la + log1mexp(lb - la)).exp()
        }
    };
    let l_cap = cap_eff.map(tail).unwrap_or(f64::NEG_INFINITY);
    let mass = match cap_eff {
        None => 1.0,
        Some(_) => -l_cap.exp_m1(),
    };

    let xs: Vec<f64> = (0..=m + 1).map(|i| i as f64 * h).collect();
    let lt: Vec<f64> = xs.iter().map(|&x| tail(x)).collect();
    let ltl: Vec<f64> = xs.iter().map(|&x| tail_left(x)).collect();
    let c = cap_eff.unwrap_or(f64::INFINITY);

    // floor lattice: X_L = h floor(X/h)
    let p_lo: Vec<f64> = (0..=m)
        .map(|i| {
            if c < xs[i] {
                0.0
            } else if c < xs[i + 1] {
                diff(ltl[i], l_cap)
            } else {
                diff(ltl[i], ltl[i + 1])
            }
        })
        .collect();
    let tau_lo: Vec<f64> = (0..=m)
        .map(|k| {
            if xs[k + 1] <= c {
                diff(ltl[k + 1], l_cap)
            } else {
                0.0
            }
        })
        .collect();
    // ceiling lattice: X_U = h ceil(X/h)
    let p_hi: Vec<f64> = (0..=m)
        .map(|i| {
            if i == 0 {
                diff(0.0, lt[0])
            } else if xs[i - 1] >= c {
                0.0
            } else {
                diff(lt[i - 1], if xs[i] <= c { lt[i] } else { l_cap })
            }
        })
        .collect();
    let tau_hi: Vec<f64> = (0..=m)
        .map(|k| if xs[k] < c { diff(lt[k], l_cap) } else { 0.0 })
        .collect();

    let t_lo = fold(&p_lo, &tau_lo, mass, n);
    let t_hi = fold(&p_hi, &tau_hi, mass, n);

    let mut lower: Vec<f64> = t_lo.iter().map(|v| v.ln()).collect();
    let mut upper: Vec<f64> = t_hi.iter().map(|v| v.ln()).collect();
    if let Some(c) = cap_eff {
        let bound = n as f64 * c;
        for i in 0..=m {
            if xs[i] >= bound {
                upper[i] = f64::NEG_INFINITY;
                lower[i] = f64::NEG_INFINITY;
            }
        }
    }
    for i in 1..=m {
        lower[i] = lower[i].min(lower[i - 1]);
        upper[i] = upper[i].min(upper[i - 1]);
    }
    for i in 0..=m {
        lower[i] = lower[i].min(upper[i]);
    }
    Ok(BracketGrid {
        grid: xs[..=m].to_vec(),
        lower,
        upper,
        n,
        h,
        cap,
    })
}

/// `T_k(i) = mass·T_{k-1}(i) + Σ_{j<=i} q_{k-1}(j) τ(i-j)` with `q` the
/// lattice pmf of the partial sum.
fn fold(p: &[f64], tau: &[f64], mass: f64, n: usize) -> Vec<f64> {
    let len = p.len();
    let mut t = tau.to_vec();
    let mut q = p.to_vec();
    for k in 2..=n {
        let t_prev = t;
        let q_ref = &q;
        t = (0..len)
            .into_par_iter()
            .map(|i| {
                let mut s = 0.0;
                for j in 0..=i {
                    s += q_ref[j] * tau[i - j];
                }
                mass * t_prev[i] + s
            })
            .collect();
        if k < n {
            q = (0..len)
                .into_par_iter()
                .map(|i| {
                    let mut s = 0.0;
                    for j in 0..=i {
                        s += q_ref[j] * p[i - j];
                    }
                    s
                })
                .collect();
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    #[test]
    fn gamma3_inside_bracket() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let g = convn_tail_grid(&d, 3, 2.0, 1e-3).unwrap();
        let (lo, hi) = g.bracket_at(2.0).unwrap();
        let want = 5.0 * (-2f64).exp();
        assert!(lo <= want && want <= hi, "{lo} {want} {hi}");
        assert!(hi - lo < 1e-3);
    }

    #[test]
    fn truncated_support_bound() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let g = trunc_convn_tail_grid(&d, 2, 1.0, 3.0, 0.01).unwrap();
        let (lo, hi) = g.bracket_at(2.5).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));
        let (lo, hi) = g.bracket_at(1.5).unwrap();
        // P(X, Y <= 1, X + Y > 1.5) = e^{-2} - e^{-1.5}/2
        let want = (-2f64).exp() - 0.5 * (-1.5f64).exp();
        assert!(lo <= want && want <= hi, "{lo} {want} {hi}");
    }

    #[test]
    fn cell_limit_guard() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let cfg = LatticeConfig {
            cell_limit: 100,
            max_fold: 8,
        };
        assert!(matches!(
            lattice_tail(&d, 2, None, 10.0, 0.01, &cfg),
            Err(Error::CellLimit { .. })
        ));
    }

    #[test]
    fn atoms_on_lattice_are_exact() {
        let d = builtin(&BuiltinSpec::DyadicPareto).unwrap();
        let g = convn_tail_grid(&d, 2, 20.0, 0.5).unwrap();
        let (lo, hi) = g.bracket_at(5.0).unwrap();
        assert!((hi - lo).abs() < 1e-15, "{lo} {hi}");
    }
}
