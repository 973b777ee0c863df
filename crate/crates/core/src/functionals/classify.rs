use serde::{Deserialize, Serialize};

use super::{b2_cond, jump_cond, ratio_diagnostic_with, DiagKind, DiagSeries, Trend, TrendRules};
use crate::dist::{log_weighted_integral, Distribution, Landmarks};
use crate::error::Result;
use crate::logmath::log_add;
use crate::quad::QuadConfig;

pub const DISCLAIMER: &str = "numerical evidence, not proof";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassName {
    L,
    D,
    S,
    #[serde(rename = "L(gamma)")]
    LGamma,
    #[serde(rename = "S(gamma)")]
    SGamma,
    OS,
    #[serde(rename = "OS*")]
    OSStar,
    OL,
    J,
}

impl ClassName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassName::L => "L",
            ClassName::D => "D",
            ClassName::S => "S",
            ClassName::LGamma => "L(gamma)",
            ClassName::SGamma => "S(gamma)",
            ClassName::OS => "OS",
            ClassName::OSStar => "OS*",
            ClassName::OL => "OL",
            ClassName::J => "J",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub class: ClassName,
    pub verdict: Verdict,
    pub evidence: Vec<DiagSeries>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub disclaimer: String,
    pub label: String,
    pub entries: Vec<ClassEntry>,
}

impl ClassReport {
    pub fn entry(&self, class: ClassName) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.class == class)
    }

    pub fn verdict(&self, class: ClassName) -> Option<Verdict> {
        self.entry(class).map(|e| e.verdict)
    }
}

/// Grids and thresholds of [`classify`].
///
/// Verdicts, with `band` taken from `rules`:
/// - L: for if `OL(t)` converges to 1; against if it converges elsewhere,
///   diverges or oscillates.
/// - OL, D, OS: for unless the series diverges; against if it diverges;
///   an increasing series is inconclusive.
/// - OS*: as OS, and against whenever the mean is infinite.
/// - S: for if OS converges to 2; against if it converges elsewhere,
///   diverges or oscillates.
/// - L(γ): for if some γ of the scan (plus the rate implied by the OL limit)
///   makes `Lγ` converge to 1; against if every γ gives a settled answer
///   other than 1.
/// - S(γ): needs L(γ) for the same γ and `M = ∫e^{γy}F(dy) < ∞`; for if OS
///   converges to `2M`, against otherwise.
/// - J: `b = min` of `B(x; K_max)` over the last quarter of the grid; for if
///   `b >= j_for`, against if `b < j_against`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    /// `None` builds [`default_xgrid`].
    #[serde(default)]
    pub xgrid: Option<Vec<f64>>,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub t: f64,
    pub gammas: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub j_for: f64,
    pub j_against: f64,
    /// Also bracket `P(X_{n,1} > x - K | S_n > x)` for `n = 2, 3`.
    pub escalate_jump: bool,
    pub jump_x: f64,
    pub jump_cells: usize,
    pub rules: TrendRules,
    pub quad: QuadConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            xgrid: None,
            x_min: 8.0,
            x_max: 1e4,
            points: 24,
            t: 1.0,
            gammas: vec![0.25, 0.5, 1.0, 2.0],
            k_grid: (0..7).map(|i| f64::from(1u32 << i)).collect(),
            j_for: 0.9,
            j_against: 0.5,
            escalate_jump: false,
            jump_x: 40.0,
            jump_cells: 2048,
            rules: TrendRules::default(),
            quad: QuadConfig::default(),
        }
    }
}

/// Geometric grid on `[x_min, x_max]`, augmented for piecewise constructions
/// with each breakpoint `b`, the point `b - t/2`, and the window boundaries
/// around the nodes of the piecewise construction. Points stay at most
/// `truncation/2 - t` so every diagnostic is defined.
pub fn default_xgrid(d: &Distribution, cfg: &ClassifyConfig) -> Vec<f64> {
    let hi = cfg.x_max.min(0.5 * d.truncation_hi() - cfg.t);
    let lo = cfg.x_min.max(cfg.t);
    if !(hi > lo) {
        return vec![lo];
    }
    let n = cfg.points.max(2);
    let r = (hi / lo).ln() / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo * (r * i as f64).exp()).collect();
    v[n - 1] = hi;
    let bps = d.breakpoints_in(lo, hi);
    if bps.len() <= 4 * n {
        for b in bps {
            v.push(b);
            v.push(b - 0.5 * cfg.t);
        }
    }
    if let Landmarks::Xu { nodes, .. } = d.landmarks() {
        for &xn in nodes {
            v.extend([xn + cfg.t, 1.5 * xn, 2.0 * xn, 2.0 * xn + cfg.t]);
        }
    }
    v.retain(|&x| x >= lo && x <= hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn bounded_verdict(s: &DiagSeries) -> Verdict {
    match s.trend {
        Trend::Diverging => Verdict::EvidenceAgainst,
        Trend::Increasing => Verdict::Inconclusive,
        _ => Verdict::EvidenceFor,
    }
}

fn limit_verdict(s: &DiagSeries, target: f64, band: f64) -> Verdict {
    match s.trend {
        t if t.converges_to(target, band) => Verdict::EvidenceFor,
        Trend::Converging { .. } | Trend::Diverging | Trend::Oscillating => Verdict::EvidenceAgainst,
        _ => Verdict::Inconclusive,
    }
}

fn failed(class: ClassName, e: impl std::fmt::Display) -> ClassEntry {
    ClassEntry {
        class,
        verdict: Verdict::Inconclusive,
        evidence: Vec::new(),
        note: format!("diagnostic failed: {e}"),
    }
}

fn entry(class: ClassName, verdict: Verdict, evidence: Vec<DiagSeries>, note: impl Into<String>) -> ClassEntry {
    ClassEntry {
        class,
        verdict,
        evidence,
        note: note.into(),
    }
}

/// Runs every class diagnostic on `d`. Failures of individual diagnostics
/// yield inconclusive entries rather than errors.
pub fn classify(d: &Distribution, cfg: &ClassifyConfig) -> ClassReport {
    let grid = cfg.xgrid.clone().unwrap_or_else(|| default_xgrid(d, cfg));
    let band = cfg.rules.band;
    let diag = |kind| ratio_diagnostic_with(d, kind, &grid, &cfg.quad, &cfg.rules);
    let mut entries = Vec::new();

    let ol = diag(DiagKind::Ol { t: cfg.t });
    match &ol {
        Ok(s) => {
            entries.push(entry(ClassName::L, limit_verdict(s, 1.0, band), vec![s.clone()], "OL(t) -> 1"));
            entries.push(entry(ClassName::OL, bounded_verdict(s), vec![s.clone()], "OL(t) bounded"));
        }
        Err(e) => {
            entries.push(failed(ClassName::L, e));
            entries.push(failed(ClassName::OL, e));
        }
    }

    entries.push(match diag(DiagKind::D) {
        Ok(s) => entry(ClassName::D, bounded_verdict(&s), vec![s], "F(x/2)/F(x) bounded"),
        Err(e) => failed(ClassName::D, e),
    });

    let os = diag(DiagKind::Os);
    match &os {
        Ok(s) => {
            entries.push(entry(ClassName::S, limit_verdict(s, 2.0, band), vec![s.clone()], "OS ratio -> 2"));
            entries.push(entry(ClassName::OS, bounded_verdict(s), vec![s.clone()], "OS ratio bounded"));
        }
        Err(e) => {
            entries.push(failed(ClassName::S, e));
            entries.push(failed(ClassName::OS, e));
        }
    }

    entries.push(if d.mean().is_none() {
        entry(ClassName::OSStar, Verdict::EvidenceAgainst, vec![], "infinite mean")
    } else {
        match diag(DiagKind::OsStar) {
            Ok(s) => entry(ClassName::OSStar, bounded_verdict(&s), vec![s], "cross-integral ratio bounded"),
            Err(e) => failed(ClassName::OSStar, e),
        }
    });

    let (lg, lg_gamma) = lgamma_entry(d, cfg, &grid, ol.as_ref().ok());
    entries.push(lg.clone());
    entries.push(sgamma_entry(d, cfg, &lg, lg_gamma, os.as_ref().ok()));
    entries.push(j_entry(d, cfg, &grid));

    ClassReport {
        disclaimer: DISCLAIMER.into(),
        label: d.label().into(),
        entries,
    }
}

fn lgamma_entry(
    d: &Distribution,
    cfg: &ClassifyConfig,
    grid: &[f64],
    ol: Option<&DiagSeries>,
) -> (ClassEntry, Option<f64>) {
    let band = cfg.rules.band;
    let mut gammas = cfg.gammas.clone();
    if let Some(Trend::Converging { limit }) = ol.map(|s| s.trend) {
        let g = limit.ln() / cfg.t;
        if g > band / cfg.t && !gammas.iter().any(|&h| (h - g).abs() <= 1e-9 * g) {
            gammas.push(g);
        }
    }
    let mut evidence = Vec::new();
    let mut hit = None;
    let mut settled = true;
    for &gamma in &gammas {
        let kind = DiagKind::Lgamma { gamma, t: cfg.t };
        match ratio_diagnostic_with(d, kind, grid, &cfg.quad, &cfg.rules) {
            Ok(s) => {
                match limit_verdict(&s, 1.0, band) {
                    Verdict::EvidenceFor if hit.is_none() => hit = Some(gamma),
                    Verdict::Inconclusive => settled = false,
                    _ => {}
                }
                evidence.push(s);
            }
            Err(e) => return (failed(ClassName::LGamma, e), None),
        }
    }
    let (verdict, note) = match hit {
        Some(g) => (Verdict::EvidenceFor, format!("gamma = {g}")),
        None if settled => (Verdict::EvidenceAgainst, format!("no gamma in {gammas:?}")),
        None => (Verdict::Inconclusive, "some scan series unsettled".to_string()),
    };
    (entry(ClassName::LGamma, verdict, evidence, note), hit)
}

/// `ln ∫e^{γy}F(dy) = ln(1 + γ∫e^{γy}F̄(y)dy)`.
pub fn log_exp_moment(d: &Distribution, gamma: f64) -> Result<f64> {
    let i = log_weighted_integral(d, 0, gamma, 0.0, f64::INFINITY)?;
    Ok(log_add(0.0, gamma.ln() + i))
}

fn sgamma_entry(
    d: &Distribution,
    cfg: &ClassifyConfig,
    lg: &ClassEntry,
    gamma: Option<f64>,
    os: Option<&DiagSeries>,
) -> ClassEntry {
    let Some(gamma) = gamma else {
        let v = match lg.verdict {
            Verdict::EvidenceAgainst => Verdict::EvidenceAgainst,
            _ => Verdict::Inconclusive,
        };
        return entry(ClassName::SGamma, v, vec![], "requires L(gamma)");
    };
    let Some(os) = os else {
        return entry(ClassName::SGamma, Verdict::Inconclusive, vec![], "OS series unavailable");
    };
    match log_exp_moment(d, gamma) {
        Ok(lm) => {
            let target = 2.0 * lm.exp();
            let v = limit_verdict(os, target, cfg.rules.band);
            entry(ClassName::SGamma, v, vec![os.clone()], format!("gamma = {gamma}, 2M = {target}"))
        }
        Err(e) => entry(
            ClassName::SGamma,
            Verdict::EvidenceAgainst,
            vec![os.clone()],
            format!("gamma = {gamma}, exponential moment: {e}"),
        ),
    }
}

fn j_entry(d: &Distribution, cfg: &ClassifyConfig, grid: &[f64]) -> ClassEntry {
    let Some(&k_max) = cfg.k_grid.iter().max_by(|a, b| a.total_cmp(b)) else {
        return entry(ClassName::J, Verdict::Inconclusive, vec![], "empty K grid");
    };
    let xs: Vec<f64> = grid.iter().copied().filter(|&x| x > 2.0 * k_max).collect();
    if xs.is_empty() {
        return entry(ClassName::J, Verdict::Inconclusive, vec![], "no grid point above 2 K_max");
    }
    let tail = &xs[xs.len() - xs.len().div_ceil(4)..];
    let over_x: Result<Vec<f64>> = tail.iter().map(|&x| b2_cond(d, x, k_max, &cfg.quad)).collect();
    let x_last = xs[xs.len() - 1];
    let over_k: Result<Vec<f64>> = cfg.k_grid.iter().map(|&k| b2_cond(d, x_last, k, &cfg.quad)).collect();
    let (over_x, over_k) = match (over_x, over_k) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return failed(ClassName::J, e),
    };
    let logs = |v: &[f64]| v.iter().map(|p| p.ln()).collect::<Vec<_>>();
    let mut evidence = vec![
        DiagSeries::from_logs(format!("b2(K={k_max})"), tail.to_vec(), logs(&over_x), &cfg.rules),
        DiagSeries::from_logs(format!("b2(x={x_last})"), cfg.k_grid.clone(), logs(&over_k), &cfg.rules),
    ];
    let b = over_x.iter().copied().fold(f64::INFINITY, f64::min);
    let mut note = format!("min B(x; {k_max}) over last quarter = {b}");
    if cfg.escalate_jump {
        for n in [2usize, 3] {
            let x = cfg.jump_x;
            let ks: Vec<f64> = cfg.k_grid.iter().copied().filter(|&k| k < x).collect();
            let r: Result<Vec<f64>> = ks
                .iter()
                .map(|&k| jump_cond(d, n, x, k, x / cfg.jump_cells as f64).map(|b| b.lower))
                .collect();
            match r {
                Ok(v) => evidence.push(DiagSeries::from_logs(
                    format!("jump_lower(n={n}, x={x})"),
                    ks,
                    logs(&v),
                    &cfg.rules,
                )),
                Err(e) => note.push_str(&format!("; jump n={n}: {e}")),
            }
        }
    }
    let verdict = if b >= cfg.j_for {
        Verdict::EvidenceFor
    } else if b < cfg.j_against {
        Verdict::EvidenceAgainst
    } else {
        Verdict::Inconclusive
    };
    entry(ClassName::J, verdict, evidence, note)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{builtin, BuiltinSpec};

    fn verdicts(r: &ClassReport) -> Vec<(&'static str, Verdict)> {
        r.entries.iter().map(|e| (e.class.as_str(), e.verdict)).collect()
    }

    #[test]
    fn pareto_profile() {
        let d = builtin(&BuiltinSpec::Pareto { alpha: 3.0 }).unwrap();
        let r = classify(&d, &ClassifyConfig::default());
        assert_eq!(r.disclaimer, DISCLAIMER);
        use ClassName::*;
        for c in [L, D, S, OS, OSStar, J] {
            assert_eq!(r.verdict(c), Some(Verdict::EvidenceFor), "{c:?} {:?}", verdicts(&r));
        }
        assert_eq!(r.verdict(LGamma), Some(Verdict::EvidenceAgainst), "{:?}", verdicts(&r));
    }

    #[test]
    fn exponential_profile() {
        let d = builtin(&BuiltinSpec::Exponential { lambda: 1.0 }).unwrap();
        let r = classify(&d, &ClassifyConfig::default());
        use ClassName::*;
        assert_eq!(r.verdict(J), Some(Verdict::EvidenceAgainst), "{:?}", verdicts(&r));
        assert_eq!(r.verdict(L), Some(Verdict::EvidenceAgainst));
        assert_eq!(r.verdict(D), Some(Verdict::EvidenceAgainst));
        assert_eq!(r.verdict(OL), Some(Verdict::EvidenceFor));
        assert_eq!(r.verdict(LGamma), Some(Verdict::EvidenceFor));
        assert_eq!(r.verdict(SGamma), Some(Verdict::EvidenceAgainst));
    }

    #[test]
    fn dyadic_profile() {
        let d = builtin(&BuiltinSpec::DyadicPareto).unwrap();
        let r = classify(&d, &ClassifyConfig::default());
        use ClassName::*;
        for c in [D, OS, OSStar, J] {
            assert_eq!(r.verdict(c), Some(Verdict::EvidenceFor), "{c:?} {:?}", verdicts(&r));
        }
        for c in [L, S] {
            assert_eq!(r.verdict(c), Some(Verdict::EvidenceAgainst), "{c:?} {:?}", verdicts(&r));
        }
    }
}
