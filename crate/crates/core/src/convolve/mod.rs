//! Two-fold convolution tails by Stieltjes quadrature and n-fold tails by
//! bracketed lattice convolution.
//!
//! Integrals are computed relative to `F̄(x)`: every integrand is written with
//! the exact shift `ln F̄(x - y) - ln F̄(x)`, and the range is folded onto
//! `[0, x/2]` so that `x - y` is never a small difference of large numbers.

mod lattice;

pub use lattice::{convn_tail_grid, trunc_convn_tail_grid, BracketGrid, LatticeConfig};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::logmath::log_sum_exp;
use crate::quad::{integrate_log, LogQuad, QuadConfig};
use crate::transform::{gamma_transform, TransformSpec};

fn check_x(d: &Distribution, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Precondition(format!("x = {x} must be >= 0")));
    }
    if x > d.truncation_hi() {
        return Err(Error::OutOfRange {
            x,
            limit: d.truncation_hi(),
        });
    }
    Ok(())
}

/// Breakpoints of `y ↦ F̄(y)` and `y ↦ F̄(x - y)` inside `(a, b)`.
fn both_breaks(d: &Distribution, x: f64, a: f64, b: f64) -> Vec<f64> {
    let mut v = d.breakpoints_in(a, b);
    v.extend(d.breakpoints_in(x - b, x - a).into_iter().map(|p| x - p));
    v.retain(|&p| p > a && p < b);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `ln (F̄(x-y) f(y) / F̄(x))`.
fn log_cross_density(d: &Distribution, x: f64, y: f64) -> f64 {
    let c = d.tail();
    let h = c.hazard(y);
    if h <= 0.0 {
        f64::NEG_INFINITY
    } else {
        c.log_cross_term(x, y) + h.ln()
    }
}

/// `ln (∫_a^b F̄(x-y) F̄(y) dy / F̄(x))` for `0 <= a <= b <= x/2`.
fn half_cross(d: &Distribution, a: f64, b: f64, x: f64, cfg: &QuadConfig) -> Result<LogQuad> {
    let c = d.tail();
    let breaks = both_breaks(d, x, a, b);
    integrate_log(|y| c.log_cross_term(x, y), a, b, &breaks, cfg)
}

/// `ln (∫_A^B F̄(x-y) F̄(y) dy / F̄(x))`.
pub fn log_cross_ratio(d: &Distribution, a: f64, b: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    check_x(d, x)?;
    if !(0.0 <= a && a <= b && b <= x) {
        return Err(Error::Precondition(format!(
            "cross integral needs 0 <= A <= B <= x, got [{a}, {b}] at x = {x}"
        )));
    }
    let h = 0.5 * x;
    let mut parts = Vec::with_capacity(2);
    if a < h {
        parts.push(half_cross(d, a, b.min(h), x, cfg)?.log_value);
    }
    if b > h {
        // y ↦ x - y maps [max(A, x/2), B] onto [x - B, x - max(A, x/2)]
        parts.push(half_cross(d, x - b, x - a.max(h), x, cfg)?.log_value);
    }
    Ok(log_sum_exp(&parts))
}

/// `∫_A^B F̄(x-y) F̄(y) dy`.
pub fn cross_integral(d: &Distribution, a: f64, b: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let r = log_cross_ratio(d, a, b, x, cfg)?;
    Ok((r + d.log_tail(x)?).exp())
}

/// `ln (∫_{[0,K]} F̄(x-y) F(dy) / F̄(x))` for `K <= x/2`: the a.c. part
/// against the density plus the atoms in `[0, K]`.
pub(crate) fn log_stieltjes_low(d: &Distribution, k: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let c = d.tail();
    let breaks = both_breaks(d, x, 0.0, k);
    let ac = integrate_log(|y| log_cross_density(d, x, y), 0.0, k, &breaks, cfg)?;
    let mut parts = vec![ac.log_value];
    for a in d.atoms_in(0.0, k) {
        parts.push(a.log_mass + c.log_shift(x, a.location));
    }
    Ok(log_sum_exp(&parts))
}

/// `ln (F̄*²(x) / F̄(x))`.
pub fn log_conv2_ratio(d: &Distribution, x: f64, cfg: &QuadConfig) -> Result<f64> {
    check_x(d, x)?;
    let c = d.tail();
    let h = 0.5 * x;
    let breaks = both_breaks(d, x, 0.0, h);
    // y in [0, x/2]: F̄(x-y) f(y)
    let low = integrate_log(|y| log_cross_density(d, x, y), 0.0, h, &breaks, cfg)?;
    // y = x - z, z in [0, x/2]: F̄(z) f(x-z) = F̄(z) hazard(x-z) F̄(x-z)
    let high = integrate_log(
        |z| {
            let hz = c.hazard(x - z);
            if hz <= 0.0 {
                f64::NEG_INFINITY
            } else {
                c.log_cross_term(x, z) + hz.ln()
            }
        },
        0.0,
        h,
        &breaks,
        cfg,
    )?;
    let mut parts = vec![0.0, low.log_value, high.log_value];
    for a in d.atoms_in(0.0, x) {
        parts.push(a.log_mass + c.log_shift(x, a.location));
    }
    Ok(log_sum_exp(&parts))
}

/// `F̄*²(x) = F̄(x) + ∫_{[0,x]} F̄(x-y) F(dy)`.
pub fn conv2_tail(d: &Distribution, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let r = log_conv2_ratio(d, x, cfg)?;
    Ok((r + d.log_tail(x)?).exp())
}

/// Relative gap between `Ḡ*²(x)` computed directly on the tilted distribution
/// and through `(F̄*²(x) + 2γ ∫_{x/2}^x F̄(x-y)F̄(y)dy) e^{-γx}`.
pub fn g_conv2_identity_residual(d: &Distribution, gamma: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let g = gamma_transform(d, TransformSpec::new(gamma)?)?;
    let direct = g.log_tail(x)? + log_conv2_ratio(&g, x, cfg)?;
    let via = d.log_tail(x)?
        + log_sum_exp(&[
            log_conv2_ratio(d, x, cfg)?,
            (2.0 * gamma).ln() + log_cross_ratio(d, 0.5 * x, x, x, cfg)?,
        ])
        - gamma * x;
    Ok((via - direct).exp_m1().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn exponential_cross_and_conv() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let v = cross_integral(&d, 0.0, 2.0, 2.0, &cfg()).unwrap();
        assert!((v / (2.0 * (-2f64).exp()) - 1.0).abs() < 1e-12);
        for &x in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let v = conv2_tail(&d, x, &cfg()).unwrap();
            let want = (1.0 + x) * (-x).exp();
            assert!((v / want - 1.0).abs() < 1e-10, "x={x}");
        }
        assert_eq!(cross_integral(&d, 1.0, 1.0, 3.0, &cfg()).unwrap(), 0.0);
        assert!((conv2_tail(&d, 0.0, &cfg()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetry_of_cross_integral() {
        let d = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        for &x in &[1.0, 7.5, 300.0] {
            let full = cross_integral(&d, 0.0, x, x, &cfg()).unwrap();
            let half = cross_integral(&d, 0.0, x / 2.0, x, &cfg()).unwrap();
            assert!((full / (2.0 * half) - 1.0).abs() < 1e-12);
            let a = cross_integral(&d, 0.3 * x, 0.9 * x, x, &cfg()).unwrap();
            let b = cross_integral(&d, 0.1 * x, 0.7 * x, x, &cfg()).unwrap();
            assert!((a / b - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dyadic_conv_matches_atom_sum() {
        let d = builtin(&BuiltinSpec::DyadicPareto).unwrap();
        let x = 5.0;
        let mut want = d.tail_value(x).unwrap();
        for a in d.atoms_in(0.0, x) {
            want += a.mass() * d.tail_value(x - a.location).unwrap();
        }
        let v = conv2_tail(&d, x, &cfg()).unwrap();
        assert!((v / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_residuals() {
        let p = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        for &x in &[0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            let r = g_conv2_identity_residual(&p, 0.5, x, &cfg()).unwrap();
            assert!(r <= 1e-6, "x={x} r={r}");
        }
        let e = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        assert!(g_conv2_identity_residual(&e, 1.0, 2.0, &cfg()).unwrap() <= 1e-6);
    }
}
