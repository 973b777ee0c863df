//! Adaptive Gauss–Kronrod quadrature for nonnegative integrands given in log form.
//!
//! The integrand is supplied as `y -> ln g(y)`. Every panel is evaluated with its
//! own scale (the largest log value at its nodes), so integrals whose magnitude
//! is far below the floating-point range are still resolved to full relative
//! precision. Panels are refined globally, worst error first, in the style of
//! QUADPACK's QAGP; forced breakpoints are never straddled by a panel.
//!
//! An unbounded upper limit is handled by the map `y = p + (1 - t)/t`,
//! `t in (0, 1]`, on the last piece.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmath::log_sum_exp;

/// Tolerance and effort limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    /// Bisections allowed on top of the initial breakpoint panels.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-9,
            max_subdivisions: 4000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..QuadConfig::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol > 0".into()));
        }
        Ok(())
    }
}

/// Result of a log-domain integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuad {
    /// `ln` of the integral; `-inf` for a zero integral.
    pub log_value: f64,
    /// `ln` of the absolute error estimate.
    pub log_abs_err: f64,
    pub evaluations: usize,
}

impl LogQuad {
    pub const ZERO: LogQuad = LogQuad {
        log_value: f64::NEG_INFINITY,
        log_abs_err: f64::NEG_INFINITY,
        evaluations: 0,
    };

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// Estimated relative error (0 for a zero integral with zero error).
    pub fn rel_err(&self) -> f64 {
        if self.log_abs_err == f64::NEG_INFINITY {
            0.0
        } else {
            (self.log_abs_err - self.log_value).exp()
        }
    }
}

// 7-point Gauss / 15-point Kronrod (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the odd-indexed Kronrod nodes, then the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `y = origin + (1 - t) / t`
    Inverted { origin: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    map: Map,
    log_value: f64,
    log_err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_err.total_cmp(&other.log_err)
    }
}

fn eval_mapped<F: Fn(f64) -> f64>(lf: &F, map: Map, t: f64) -> f64 {
    match map {
        Map::Identity => lf(t),
        Map::Inverted { origin } => {
            let y = origin + (1.0 - t) / t;
            if y.is_infinite() {
                f64::NEG_INFINITY
            } else {
                lf(y) - 2.0 * t.ln()
            }
        }
    }
}

fn gk15<F: Fn(f64) -> f64>(lf: &F, lo: f64, hi: f64, map: Map) -> Result<Panel> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut logs = [0.0f64; 15];
    logs[7] = eval_mapped(lf, map, centre);
    for j in 0..7 {
        let dx = half * XGK[j];
        logs[j] = eval_mapped(lf, map, centre - dx);
        logs[14 - j] = eval_mapped(lf, map, centre + dx);
    }
    if let Some(bad) = logs.iter().position(|v| v.is_nan()) {
        return Err(Error::Precondition(format!(
            "integrand is NaN near {}",
            if bad == 7 { centre } else { lo }
        )));
    }
    let scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return Ok(Panel {
            lo,
            hi,
            map,
            log_value: f64::NEG_INFINITY,
            log_err: f64::NEG_INFINITY,
        });
    }
    if scale == f64::INFINITY {
        return Err(Error::Divergent(format!(
            "integrand is infinite on [{lo}, {hi}]"
        )));
    }
    let v: Vec<f64> = logs.iter().map(|&l| (l - scale).exp()).collect();
    let mut kronrod = WGK[7] * v[7];
    let mut gauss = WG[3] * v[7];
    for j in 0..7 {
        let pair = v[j] + v[14 - j];
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (v[7] - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((v[j] - mean).abs() + (v[14 - j] - mean).abs());
    }
    let resabs = kronrod; // integrand is nonnegative
    let kronrod = kronrod * half;
    let resasc = resasc * half;
    let resabs = resabs * half;
    let mut err = (kronrod - gauss * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * f64::min(1.0, (200.0 * err / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel {
        lo,
        hi,
        map,
        log_value: scale + kronrod.ln(),
        log_err: scale + err.ln(),
    })
}

fn too_narrow(p: &Panel) -> bool {
    let w = p.hi - p.lo;
    let m = 0.5 * (p.lo + p.hi);
    w <= 8.0 * f64::EPSILON * p.lo.abs().max(p.hi.abs()) || m <= p.lo || m >= p.hi
}

/// Integrates `exp(lf(y))` over `[a, b]`, splitting first at every `breaks`
/// point strictly inside the interval. `b` may be `+inf`.
pub fn integrate_log<F: Fn(f64) -> f64>(
    lf: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<LogQuad> {
    cfg.validate()?;
    if !(a <= b) || a.is_infinite() {
        return Err(Error::Precondition(format!("bad integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(LogQuad::ZERO);
    }
    let mut pts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0usize;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let panel = if hi.is_infinite() {
            gk15(&lf, 0.0, 1.0, Map::Inverted { origin: lo })?
        } else {
            gk15(&lf, lo, hi, Map::Identity)?
        };
        evaluations += 15;
        if panel.log_err == f64::NEG_INFINITY {
            settled.push(panel);
        } else {
            heap.push(panel);
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, settled: &[Panel]| {
        let vals: Vec<f64> = heap
            .iter()
            .chain(settled.iter())
            .map(|p| p.log_value)
            .collect();
        let errs: Vec<f64> = heap.iter().chain(settled.iter()).map(|p| p.log_err).collect();
        (log_sum_exp(&vals), log_sum_exp(&errs))
    };

    let log_tol = cfg.rel_tol.ln();
    let mut subdivisions = 0usize;
    loop {
        let (lv, le) = totals(&heap, &settled);
        if lv == f64::NEG_INFINITY && le == f64::NEG_INFINITY {
            return Ok(LogQuad {
                log_value: lv,
                log_abs_err: le,
                evaluations,
            });
        }
        if le <= log_tol + lv {
            return Ok(LogQuad {
                log_value: lv,
                log_abs_err: le,
                evaluations,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::Tolerance {
                    achieved: (le - lv).exp(),
                    requested: cfg.rel_tol,
                })
            }
        };
        if too_narrow(&worst) {
            settled.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            let (lv, le) = totals(&heap, &settled);
            return Err(Error::Tolerance {
                achieved: (le - lv).exp(),
                requested: cfg.rel_tol,
            });
        }
        subdivisions += 1;
        let mid = 0.5 * (worst.lo + worst.hi);
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let p = gk15(&lf, lo, hi, worst.map)?;
            evaluations += 15;
            if p.log_err == f64::NEG_INFINITY {
                settled.push(p);
            } else {
                heap.push(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::with_rel_tol(1e-12)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_log(|y: f64| (3.0 * y * y).ln(), 0.0, 2.0, &[], &cfg()).unwrap();
        assert!((r.value() - 8.0).abs() < 1e-13);
    }

    #[test]
    fn tiny_magnitudes_keep_relative_precision() {
        // ∫_0^1 e^{-2000 - y} dy = e^{-2000}(1 - e^{-1})
        let r = integrate_log(|y: f64| -2000.0 - y, 0.0, 1.0, &[], &cfg()).unwrap();
        let expect = -2000.0 + (1.0 - (-1.0f64).exp()).ln();
        assert!((r.log_value - expect).abs() < 1e-12);
    }

    #[test]
    fn unbounded_interval() {
        // ∫_0^∞ (1+y)^{-3} dy = 1/2
        let r = integrate_log(|y: f64| -3.0 * y.ln_1p(), 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert!((r.value() - 0.5).abs() < 1e-12);
        let r = integrate_log(|y: f64| -y, 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert!((r.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_make_steps_exact() {
        let step = |y: f64| if y < 1.0 { 0.0 } else { (0.25f64).ln() };
        let r = integrate_log(step, 0.0, 3.0, &[1.0], &cfg()).unwrap();
        assert!((r.value() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 y^{-1/2} dy = 2
        let r = integrate_log(|y: f64| -0.5 * y.ln(), 0.0, 1.0, &[], &QuadConfig::default()).unwrap();
        assert!((r.value() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn zero_integrand_and_empty_interval() {
        let r = integrate_log(|_| f64::NEG_INFINITY, 0.0, 1.0, &[], &cfg()).unwrap();
        assert_eq!(r.log_value, f64::NEG_INFINITY);
        let r = integrate_log(|y: f64| y, 2.0, 2.0, &[], &cfg()).unwrap();
        assert_eq!(r.value(), 0.0);
    }

    #[test]
    fn subdivision_cap_reports_achieved_error() {
        let tight = QuadConfig {
            rel_tol: 1e-14,
            max_subdivisions: 2,
        };
        match integrate_log(|y: f64| -0.5 * y.ln(), 0.0, 1.0, &[], &tight) {
            Err(Error::Tolerance { achieved, requested }) => {
                assert!(achieved > requested);
            }
            other => panic!("expected tolerance error, got {other:?}"),
        }
    }
}
