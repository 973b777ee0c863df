//! Tail functionals and the ratio series that stand in for the limsup/liminf
//! in the class definitions.

mod classify;
mod trend;

pub use classify::{classify, default_xgrid, log_exp_moment, ClassEntry, ClassName, ClassReport, ClassifyConfig, Verdict};
pub use trend::{classify_trend, DiagSeries, Trend, TrendRules};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolve::{
    convn_tail_grid, log_conv2_ratio, log_cross_ratio, trunc_convn_tail_grid,
};
use crate::dist::{fkz_sequence, Distribution, Landmarks};
use crate::error::{Error, Result};
use crate::logmath::log1mexp;
use crate::quad::QuadConfig;

/// `T(x; K) = 2∫_0^K F̄(x-y)F̄(y)dy / ∫_0^x F̄(x-y)F̄(y)dy`.
pub fn t_ratio(d: &Distribution, x: f64, k: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(k > 0.0 && k <= 0.5 * x) {
        return Err(Error::Precondition(format!("t_ratio needs 0 < K <= x/2, got K = {k}, x = {x}")));
    }
    if k == 0.5 * x {
        return Ok(1.0);
    }
    let num = log_cross_ratio(d, 0.0, k, x, cfg)?;
    let den = log_cross_ratio(d, 0.0, 0.5 * x, x, cfg)?;
    Ok((num - den).exp().min(1.0))
}

/// `B(x; K) = 2∫_{[0,K]} F̄(x-y) F(dy) / F̄*²(x)`, the probability that the
/// smaller of two summands is at most `K` given their sum exceeds `x`.
pub fn b2_cond(d: &Distribution, x: f64, k: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(k > 0.0 && x > 2.0 * k) {
        return Err(Error::Precondition(format!("b2_cond needs x > 2K > 0, got K = {k}, x = {x}")));
    }
    let num = crate::convolve::log_stieltjes_low(d, k, x, cfg)?;
    let den = log_conv2_ratio(d, x, cfg)?;
    Ok((2f64.ln() + num - den).exp().clamp(0.0, 1.0))
}

/// Interval enclosing `P(X_{n,1} > x - K | S_n > x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpBracket {
    pub lower: f64,
    pub upper: f64,
}

impl JumpBracket {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `P(max_i X_i > x - K | S_n > x)` from lattice brackets of
/// `P(all X_i <= x - K, S_n > x)` and `P(S_n > x)` with step `h`.
pub fn jump_cond(d: &Distribution, n: usize, x: f64, k: f64, h: f64) -> Result<JumpBracket> {
    if n < 2 {
        return Err(Error::InvalidParameter("jump_cond needs n >= 2".into()));
    }
    if k >= x {
        return Ok(JumpBracket {
            lower: 1.0,
            upper: 1.0,
        });
    }
    let den = convn_tail_grid(d, n, x, h)?.bracket_at(x)?;
    let num = trunc_convn_tail_grid(d, n, x - k, x, h)?.bracket_at(x)?;
    if den.0 <= 0.0 {
        return Err(Error::Inconclusive(format!(
            "lower bound of P(S_{n} > {x}) is 0 at step {h}"
        )));
    }
    let lower = (1.0 - num.1 / den.0).clamp(0.0, 1.0);
    let upper = (1.0 - num.0 / den.1).clamp(0.0, 1.0);
    Ok(JumpBracket { lower, upper })
}

/// Brackets of the single-big-jump probability over `x` and `K` grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpProfile {
    pub n: usize,
    pub k_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// `brackets[i][j]` is for `x_grid[i]`, `k_grid[j]`.
    pub brackets: Vec<Vec<JumpBracket>>,
}

/// Evaluates [`jump_cond`] on a grid, with `cells` lattice cells up to each `x`.
pub fn jump_profile(d: &Distribution, n: usize, x_grid: &[f64], k_grid: &[f64], cells: usize) -> Result<JumpProfile> {
    let brackets = x_grid
        .par_iter()
        .map(|&x| {
            k_grid
                .iter()
                .map(|&k| jump_cond(d, n, x, k, x / cells as f64))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JumpProfile {
        n,
        k_grid: k_grid.to_vec(),
        x_grid: x_grid.to_vec(),
        brackets,
    })
}

/// Which ratio a diagnostic series evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagKind {
    /// `F̄(x - t) / F̄(x)`
    Ol { t: f64 },
    /// `F̄(x/2) / F̄(x)`
    D,
    /// `e^{γt} F̄(x + t) / F̄(x)`
    Lgamma { gamma: f64, t: f64 },
    /// `F̄*²(x) / F̄(x)`
    Os,
    /// `∫_0^x F̄(x-y)F̄(y)dy / F̄(x)`
    OsStar,
}

impl DiagKind {
    pub fn name(&self) -> String {
        match self {
            DiagKind::Ol { t } => format!("ol(t={t})"),
            DiagKind::D => "d".into(),
            DiagKind::Lgamma { gamma, t } => format!("lgamma(gamma={gamma}, t={t})"),
            DiagKind::Os => "os".into(),
            DiagKind::OsStar => "osstar".into(),
        }
    }
}

/// `ln` of the diagnostic ratio at one point.
pub fn log_ratio(d: &Distribution, kind: DiagKind, x: f64, cfg: &QuadConfig) -> Result<f64> {
    match kind {
        DiagKind::Ol { t } => d.log_shift(x, t),
        DiagKind::D => d.log_shift(x, 0.5 * x),
        DiagKind::Lgamma { gamma, t } => Ok(gamma * t - d.log_shift(x + t, t)?),
        DiagKind::Os => log_conv2_ratio(d, x, cfg),
        DiagKind::OsStar => Ok(2f64.ln() + log_cross_ratio(d, 0.0, 0.5 * x, x, cfg)?),
    }
}

pub fn ratio_diagnostic(d: &Distribution, kind: DiagKind, xgrid: &[f64]) -> Result<DiagSeries> {
    ratio_diagnostic_with(d, kind, xgrid, &QuadConfig::default(), &TrendRules::default())
}

pub fn ratio_diagnostic_with(
    d: &Distribution,
    kind: DiagKind,
    xgrid: &[f64],
    cfg: &QuadConfig,
    rules: &TrendRules,
) -> Result<DiagSeries> {
    match kind {
        DiagKind::Ol { t } | DiagKind::Lgamma { t, .. } if xgrid.iter().any(|&x| x < t) => {
            return Err(Error::Precondition(format!("grid points must be >= t = {t}")));
        }
        _ => {}
    }
    let logs = xgrid
        .par_iter()
        .map(|&x| log_ratio(d, kind, x, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut s = DiagSeries::from_logs(kind.name(), xgrid.to_vec(), logs, rules);
    s.windows = xu_windows(d, xgrid, 1.0);
    Ok(s)
}

/// For each `t`, the largest `F̄(x - t)/F̄(x)` over `x` in `xgrid` with `x >= t`.
pub fn weak_equiv_diag(d: &Distribution, tgrid: &[f64], xgrid: &[f64]) -> Result<DiagSeries> {
    weak_equiv_diag_with(d, tgrid, xgrid, &TrendRules::default())
}

pub fn weak_equiv_diag_with(d: &Distribution, tgrid: &[f64], xgrid: &[f64], rules: &TrendRules) -> Result<DiagSeries> {
    let logs = tgrid
        .iter()
        .map(|&t| {
            let mut best = f64::NEG_INFINITY;
            for &x in xgrid.iter().filter(|&&x| x >= t) {
                best = best.max(d.log_shift(x, t)?);
            }
            if best == f64::NEG_INFINITY {
                return Err(Error::Precondition(format!("no grid point x >= t = {t}")));
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagSeries::from_logs("weak_equiv", tgrid.to_vec(), logs, rules))
}

/// `ln((a_{n+1}²/2 - a_n²) e^{-a_n})`.
pub fn log_exam300_lower_bound(n: usize) -> Result<f64> {
    let a = fkz_sequence();
    if n < 1 || n + 1 >= a.len() {
        return Err(Error::Truncated(format!(
            "exam300 bound needs 1 <= n <= {}",
            a.len() - 2
        )));
    }
    let (an, an1) = (a[n], a[n + 1]);
    // a_{n+1}²/2 (1 - 2 a_n²/a_{n+1}²)
    let ratio = 2.0 * (an / an1) * (an / an1);
    Ok(2.0 * an1.ln() - 2f64.ln() + log1mexp(ratio.ln()) - an)
}

/// `(a_{n+1}²/2 - a_n²) e^{-a_n}`.
pub fn exam300_lower_bound(n: usize) -> Result<f64> {
    log_exam300_lower_bound(n).map(f64::exp)
}

/// Window index 1..=5 of `x` relative to its node `x_n` for the piecewise
/// construction: `[x_n, x_n+K)`, `[x_n+K, 1.5x_n)`, `[1.5x_n, 2x_n)`,
/// `[2x_n, 2x_n+K)`, `[2x_n+K, x_{n+1})`.
pub fn xu_window(nodes: &[f64], x: f64, k: f64) -> Option<u8> {
    let i = nodes.partition_point(|&v| v <= x);
    if i == 0 || i >= nodes.len() {
        return None;
    }
    let xn = nodes[i - 1];
    Some(if x < xn + k {
        1
    } else if x < 1.5 * xn {
        2
    } else if x < 2.0 * xn {
        3
    } else if x < 2.0 * xn + k {
        4
    } else {
        5
    })
}

fn xu_windows(d: &Distribution, xgrid: &[f64], k: f64) -> Option<Vec<Option<u8>>> {
    match d.landmarks() {
        Landmarks::Xu { nodes, .. } => Some(xgrid.iter().map(|&x| xu_window(nodes, x, k)).collect()),
        _ => None,
    }
}

/// Points inside each of the five windows for the first `max_nodes` nodes,
/// with their window index.
pub fn xu_window_grid(d: &Distribution, k: f64, max_nodes: usize) -> Result<Vec<(f64, u8)>> {
    let Landmarks::Xu { nodes, .. } = d.landmarks() else {
        return Err(Error::Precondition("distribution has no piecewise nodes".into()));
    };
    let mut out = Vec::new();
    for w in nodes.windows(2).take(max_nodes) {
        let (xn, next) = (w[0], w[1]);
        out.push((xn + 0.5 * k, 1));
        out.push((0.5 * (xn + k + 1.5 * xn), 2));
        out.push((1.75 * xn, 3));
        out.push((2.0 * xn + 0.5 * k, 4));
        out.push(((2.0 * xn + k) * ((next / (2.0 * xn + k)).sqrt()), 5));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn t_ratio_exponential_closed_form() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        assert!((t_ratio(&d, 10.0, 2.0, &cfg()).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(t_ratio(&d, 10.0, 5.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn b2_exponential_closed_form() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        for &(x, k) in &[(9.0, 1.0), (19.0, 2.0), (99.0, 5.0)] {
            let v = b2_cond(&d, x, k, &cfg()).unwrap();
            assert!((v - 2.0 * k / (1.0 + x)).abs() < 1e-9, "{x} {k} {v}");
        }
    }

    #[test]
    fn jump_exponential_oracle() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        // 1 - (6e^{-9} + e^{-16}) / (10 e^{-9})
        let want = 1.0 - (0.6 + 0.1 * (-7f64).exp());
        let b = jump_cond(&d, 2, 9.0, 1.0, 9.0 / 4096.0).unwrap();
        assert!(b.lower <= want && want <= b.upper, "{b:?} {want}");
        assert!(b.width() < 0.01);
        let sure = jump_cond(&d, 3, 4.0, 5.0, 0.1).unwrap();
        assert_eq!((sure.lower, sure.upper), (1.0, 1.0));
    }

    #[test]
    fn exam300_values() {
        let v1 = exam300_lower_bound(1).unwrap();
        let e = std::f64::consts::E;
        assert!((v1 - (e * e / 2.0 - 1.0) / e).abs() < 1e-14);
        let v: Vec<f64> = (2..=4).map(|n| exam300_lower_bound(n).unwrap()).collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
        assert!(v[2] > 1e10);
        assert!(exam300_lower_bound(5).is_err());
    }

    #[test]
    fn d_ratio_pareto_and_dyadic() {
        let p = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        let grid: Vec<f64> = (0..30).map(|i| 10f64.powf(i as f64 / 6.0)).collect();
        let s = ratio_diagnostic(&p, DiagKind::D, &grid).unwrap();
        assert!(s.values.iter().all(|&v| v <= 8.0));
        assert!(s.trend.converges_to(8.0, 0.02), "{:?}", s.trend);
        let dy = builtin(&BuiltinSpec::DyadicPareto).unwrap();
        let grid: Vec<f64> = (1..=20).map(|m| 2f64.powi(m)).collect();
        let s = ratio_diagnostic(&dy, DiagKind::D, &grid).unwrap();
        assert!(s.values.iter().all(|&v| (v - 4.0).abs() < 1e-12), "{:?}", s.values);
    }

    #[test]
    fn xu_ol_ratio() {
        let d = builtin(&BuiltinSpec::XuPiecewise {
            alpha: 5.5,
            x1: 4096.0,
            m: 1,
        })
        .unwrap();
        let Landmarks::Xu { nodes, .. } = d.landmarks().clone() else {
            panic!()
        };
        for t in [1.0, 3.0] {
            let grid: Vec<f64> = nodes[..nodes.len() - 1]
                .iter()
                .map(|x| 2.0 * x)
                .filter(|&x| x < 2f64.powi(53))
                .collect();
            assert!(grid.len() >= 5);
            let s = ratio_diagnostic(&d, DiagKind::Ol { t }, &grid).unwrap();
            for (x2, v) in grid.iter().zip(&s.values) {
                let xn = x2 / 2.0;
                let want = 1.0 + t - t / xn;
                assert!((v / want - 1.0).abs() < 1e-12, "x={x2} {v} {want}");
            }
            assert!(s.windows.as_ref().unwrap().iter().all(|w| *w == Some(4)));
        }
    }
}
