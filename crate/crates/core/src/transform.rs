//! The tilt `Ḡ(x) = F̄(x) e^{-γx}`.

use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, Segment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub gamma: f64,
}

impl TransformSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be > 0".into()));
        }
        Ok(TransformSpec { gamma })
    }
}

/// Adds `γ` to every segment's tilt. Atoms are rescaled by `e^{-γ·location}`
/// as a consequence of the rebuilt curve.
pub fn gamma_transform(d: &Distribution, spec: TransformSpec) -> Result<Distribution> {
    let g = TransformSpec::new(spec.gamma)?.gamma;
    let env = d.tail().envelope().map(|e| e.tilted(g));
    let curve = d.tail().map_segments(
        |s| Segment {
            tilt: s.tilt + g,
            ..*s
        },
        env,
    )?;
    Ok(d.rebuild(curve, format!("G[{}; gamma={g}]", d.label())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeReport {
    pub pass: bool,
    pub max_abs_diff: f64,
    /// First grid point where the two routes differ by more than the tolerance.
    pub failing_x: Option<f64>,
}

pub const COMPOSE_TOL: f64 = 1e-12;

/// Compares `G_{γ2}(G_{γ1}(d))` with `G_{γ1+γ2}(d)` on `grid`.
pub fn tilt_compose_check(d: &Distribution, g1: f64, g2: f64, grid: &[f64]) -> Result<ComposeReport> {
    let twice = gamma_transform(&gamma_transform(d, TransformSpec::new(g1)?)?, TransformSpec::new(g2)?)?;
    let once = gamma_transform(d, TransformSpec::new(g1 + g2)?)?;
    compare_log_tails(&twice, &once, grid)
}

pub(crate) fn compare_log_tails(a: &Distribution, b: &Distribution, grid: &[f64]) -> Result<ComposeReport> {
    let mut max_abs_diff = 0.0f64;
    let mut failing_x = None;
    for &x in grid {
        let (la, lb) = (a.log_tail(x)?, b.log_tail(x)?);
        let diff = if la == lb { 0.0 } else { (la - lb).abs() };
        let scale = 1.0 + la.abs().max(lb.abs());
        if diff > COMPOSE_TOL * scale && failing_x.is_none() {
            failing_x = Some(x);
        }
        max_abs_diff = max_abs_diff.max(diff);
    }
    Ok(ComposeReport {
        pass: failing_x.is_none(),
        max_abs_diff,
        failing_x,
    })
}

/// Variant of [`tilt_compose_check`] with `F̄` on one segment of the composed
/// route multiplied by `e^{log_bump}` (`log_bump < 0` keeps the curve valid),
/// used as a negative control.
pub fn tilt_compose_check_perturbed(
    d: &Distribution,
    g1: f64,
    g2: f64,
    grid: &[f64],
    segment: usize,
    log_bump: f64,
) -> Result<ComposeReport> {
    use crate::dist::TailCurve;
    let twice = gamma_transform(&gamma_transform(d, TransformSpec::new(g1)?)?, TransformSpec::new(g2)?)?;
    let segs: Vec<Segment> = twice
        .tail()
        .segments()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i == segment {
                bump(s, log_bump)
            } else {
                *s
            }
        })
        .collect();
    let curve = TailCurve::new(segs, twice.tail().envelope().copied())?;
    let bumped = Distribution::from_curve(curve, "perturbed");
    let once = gamma_transform(d, TransformSpec::new(g1 + g2)?)?;
    compare_log_tails(&bumped, &once, grid)
}

fn bump(s: &Segment, log_bump: f64) -> Segment {
    use crate::dist::SegmentForm::*;
    let shift = log_bump / s.power;
    let form = match s.form {
        Constant { log_value } => Constant {
            log_value: log_value + shift,
        },
        Affine {
            log_scale,
            at_hi,
            slope,
        } => Affine {
            log_scale: log_scale + shift,
            at_hi,
            slope,
        },
        Power {
            log_coef,
            shift: sh,
            exponent,
        } => Power {
            log_coef: log_coef + shift,
            shift: sh,
            exponent,
        },
        ExpAffine { offset, rate } => ExpAffine {
            offset: offset - shift,
            rate,
        },
        StretchedExp { .. } => s.form,
    };
    Segment { form, ..*s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    #[test]
    fn tilt_values() {
        let e = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let g = gamma_transform(&e, TransformSpec::new(1.0).unwrap()).unwrap();
        assert!((g.log_tail(2.0).unwrap() + 4.0).abs() < 1e-15);
        let p = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        let g = gamma_transform(&p, TransformSpec::new(0.5).unwrap()).unwrap();
        assert_eq!(g.log_tail(0.0).unwrap(), 0.0);
        assert!(TransformSpec::new(0.0).is_err());
    }

    #[test]
    fn atoms_rescaled() {
        let d = builtin(&BuiltinSpec::DyadicPareto).unwrap();
        let g = gamma_transform(&d, TransformSpec::new(0.25).unwrap()).unwrap();
        let a = g.atoms_in(4.0, 4.0)[0];
        // F̄(4⁻) - F̄(4) = (1/4 - 1/16) e^{-1}
        assert!((a.mass() - 0.1875 * (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn composition() {
        let p = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.7).collect();
        assert!(tilt_compose_check(&p, 0.3, 0.7, &grid).unwrap().pass);
        let r = tilt_compose_check_perturbed(&p, 0.3, 0.7, &grid, 0, -1e-6).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failing_x, Some(0.0));
    }
}
