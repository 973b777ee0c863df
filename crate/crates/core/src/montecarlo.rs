//! Rejection-sampling estimates of `P(X_{n,1} > x - K | S_n > x)` and a
//! harness comparing them with the lattice brackets.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{uniform_open01, Distribution};
use crate::error::{Error, Result};
use crate::functionals::{jump_cond, JumpBracket};

/// Draws per chunk; chunk `c` of scenario `s` uses stream `(s << 32) | c`.
pub const CHUNK: usize = 65_536;
const PILOT_CHUNK: u64 = 0xFFFF_FFFF;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub accepted: u64,
    pub total: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Smallest pilot acceptance rate of `S_n > x` that is simulated.
    pub acceptance_floor: f64,
    pub pilot: usize,
    /// Stream index, so scenarios never share random numbers.
    pub stream: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            acceptance_floor: 1e-4,
            pilot: 100_000,
            stream: 0,
        }
    }
}

fn rng_for(seed: u64, stream: u32, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(stream) << 32) | chunk);
    rng
}

/// `(accepted, hits)` over `draws` tuples from one substream.
fn run_chunk(d: &Distribution, n: usize, x: f64, k: f64, draws: usize, mut rng: ChaCha8Rng) -> Result<(u64, u64)> {
    let (mut acc, mut hit) = (0u64, 0u64);
    for _ in 0..draws {
        let (mut s, mut mx) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let v = crate::dist::sample::log_quantile(d, uniform_open01(&mut rng).ln())?;
            s += v;
            mx = mx.max(v);
        }
        if s > x {
            acc += 1;
            if mx > x - k {
                hit += 1;
            }
        }
    }
    Ok((acc, hit))
}

pub fn mc_jump_cond(d: &Distribution, n: usize, x: f64, k: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    mc_jump_cond_with(d, n, x, k, samples, seed, &McConfig::default())
}

/// Estimates `P(X_{n,1} > x - K | S_n > x)` from `samples` tuples.
pub fn mc_jump_cond_with(
    d: &Distribution,
    n: usize,
    x: f64,
    k: f64,
    samples: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(x >= 0.0) || !(k >= 0.0) {
        return Err(Error::Precondition("need x >= 0 and K >= 0".into()));
    }
    let pilot = cfg.pilot.max(1);
    let (pa, _) = run_chunk(d, n, x, k, pilot, rng_for(seed, cfg.stream, PILOT_CHUNK))?;
    let acceptance = pa as f64 / pilot as f64;
    if acceptance < cfg.acceptance_floor {
        return Err(Error::LowAcceptance {
            acceptance,
            floor: cfg.acceptance_floor,
        });
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let draws = CHUNK.min(samples - c * CHUNK);
            run_chunk(d, n, x, k, draws, rng_for(seed, cfg.stream, c as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let (accepted, hits) = parts.iter().fold((0, 0), |(a, h), &(pa, ph)| (a + pa, h + ph));
    if accepted == 0 {
        return Err(Error::Inconclusive("no tuple satisfied S_n > x".into()));
    }
    let p = hits as f64 / accepted as f64;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / accepted as f64).sqrt(),
        accepted,
        total: samples as u64,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub x: f64,
    pub k: f64,
    /// Lattice step of the bracket, `x/2048` when absent.
    #[serde(default)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub index: usize,
    pub scenario: Scenario,
    pub mc: Option<McEstimate>,
    pub bracket: Option<JumpBracket>,
    pub z: Option<f64>,
    pub flagged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn flagged(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.flagged).map(|r| r.index).collect()
    }

    /// Fraction of rows with a z-score and `|z| <= limit`, among rows with a z-score.
    pub fn coverage(&self, limit: f64) -> f64 {
        let zs: Vec<f64> = self.rows.iter().filter_map(|r| r.z).collect();
        if zs.is_empty() {
            return 1.0;
        }
        zs.iter().filter(|z| z.abs() <= limit).count() as f64 / zs.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub flag_z: f64,
    pub mc: McConfig,
    /// Adds `bias` to the estimate of row `index`; harness self-test only.
    #[serde(default)]
    pub inject: Option<(usize, f64)>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            flag_z: 4.0,
            mc: McConfig::default(),
            inject: None,
        }
    }
}

/// `(estimate - centre) / SE`; with `SE = 0` it is 0 inside the bracket and
/// infinite outside.
pub fn z_score(mc: &McEstimate, b: &JumpBracket) -> f64 {
    let diff = mc.estimate - b.center();
    if mc.std_error > 0.0 {
        diff / mc.std_error
    } else if mc.estimate >= b.lower && mc.estimate <= b.upper {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

pub fn mc_vs_quadrature(d: &Distribution, scenarios: &[Scenario], samples: usize, seed: u64) -> Comparison {
    mc_vs_quadrature_with(d, scenarios, samples, seed, &CompareConfig::default())
}

/// Runs every scenario on its own stream; per-scenario errors are recorded.
pub fn mc_vs_quadrature_with(
    d: &Distribution,
    scenarios: &[Scenario],
    samples: usize,
    seed: u64,
    cfg: &CompareConfig,
) -> Comparison {
    let rows = scenarios
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mc_cfg = McConfig {
                stream: i as u32,
                ..cfg.mc
            };
            let h = s.h.unwrap_or(s.x / 2048.0);
            let mc = mc_jump_cond_with(d, s.n, s.x, s.k, samples, seed, &mc_cfg).map(|mut e| {
                if let Some((j, bias)) = cfg.inject {
                    if j == i {
                        e.estimate += bias;
                    }
                }
                e
            });
            let br = jump_cond(d, s.n, s.x, s.k, h);
            let error = match (&mc, &br) {
                (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
                _ => None,
            };
            let z = match (&mc, &br) {
                (Ok(m), Ok(b)) => Some(z_score(m, b)),
                _ => None,
            };
            ComparisonRow {
                index: i,
                scenario: *s,
                mc: mc.ok(),
                bracket: br.ok(),
                z,
                flagged: z.is_some_and(|z| z.abs() > cfg.flag_z),
                error,
            }
        })
        .collect();
    Comparison { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    #[test]
    fn sure_event_and_determinism() {
        let d = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        let a = mc_jump_cond(&d, 2, 3.0, 3.0, 20_000, 11).unwrap();
        assert_eq!(a.estimate, 1.0);
        let b = mc_jump_cond(&d, 3, 5.0, 1.0, 70_000, 11).unwrap();
        let c = mc_jump_cond(&d, 3, 5.0, 1.0, 70_000, 11).unwrap();
        assert_eq!(b, c);
        assert!(b.accepted <= b.total);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        // P(both <= 4, S > 5) = 2e^{-5} + e^{-8}, P(S > 5) = 6e^{-5}
        let want = 1.0 - (2.0 + (-3f64).exp()) / 6.0;
        let e = mc_jump_cond(&d, 2, 5.0, 1.0, 1_000_000, 3).unwrap();
        assert!((e.estimate - want).abs() <= 3.0 * e.std_error, "{e:?} {want}");
    }

    #[test]
    fn low_acceptance() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        assert!(matches!(
            mc_jump_cond(&d, 2, 40.0, 1.0, 1000, 1),
            Err(Error::LowAcceptance { .. })
        ));
    }

    #[test]
    fn harness_flags_injected_bias() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        assert!(mc_vs_quadrature(&d, &[], 1000, 1).rows.is_empty());
        let sc: Vec<Scenario> = (0..3)
            .map(|i| Scenario {
                n: 2,
                x: 4.0 + i as f64,
                k: 1.0,
                h: None,
            })
            .collect();
        let cfg = CompareConfig {
            inject: Some((1, 0.05)),
            ..Default::default()
        };
        let c = mc_vs_quadrature_with(&d, &sc, 100_000, 5, &cfg);
        assert_eq!(c.flagged(), vec![1]);
    }
}
