use serde::{Deserialize, Serialize};

/// Qualitative behaviour of a ratio series, standing in for a limsup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trend", rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Oscillating,
    Converging { limit: f64 },
    Diverging,
}

impl Trend {
    pub fn name(&self) -> &'static str {
        match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Oscillating => "oscillating",
            Trend::Converging { .. } => "converging",
            Trend::Diverging => "diverging",
        }
    }

    pub fn converges_to(&self, target: f64, band: f64) -> bool {
        matches!(*self, Trend::Converging { limit } if (limit / target - 1.0).abs() <= band)
    }
}

/// Thresholds of the trend classifier.
///
/// Rules, applied in order to the log-values `v_i` of a series over its
/// parameter grid `p_i`:
/// 1. converging to the last value if every point of the last quarter (at
///    least two points) lies within a factor `1 + band` of it;
/// 2. diverging if the last quarter sets a new maximum (by more than the
///    band), the least-squares slope of `v` against `ln p` over the last half
///    is positive, and either the last value exceeds
///    `diverge_factor` times the first or that slope is at least
///    `growth_exponent`;
/// 3. oscillating if successive differences change sign more often than
///    `oscillation_fraction` of the steps;
/// 4. otherwise increasing or decreasing by the sign of the last-half slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRules {
    pub band: f64,
    pub diverge_factor: f64,
    pub growth_exponent: f64,
    pub oscillation_fraction: f64,
}

impl Default for TrendRules {
    fn default() -> Self {
        TrendRules {
            band: 0.02,
            diverge_factor: 10.0,
            growth_exponent: 0.5,
            oscillation_fraction: 0.25,
        }
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Classifies log-values over a positive parameter grid.
pub fn classify_trend(param: &[f64], log_values: &[f64], rules: &TrendRules) -> Trend {
    let n = log_values.len();
    if n == 0 {
        return Trend::Converging { limit: f64::NAN };
    }
    let last = log_values[n - 1];
    if n == 1 {
        return Trend::Converging { limit: last.exp() };
    }
    let q = (n.div_ceil(4)).max(2).min(n);
    let band = rules.band.ln_1p();
    if log_values[n - q..].iter().all(|&v| (v - last).abs() <= band) {
        return Trend::Converging { limit: last.exp() };
    }
    let half = &log_values[n / 2..];
    let lp: Vec<f64> = param[n / 2..].iter().map(|p| p.ln()).collect();
    let slope = ls_slope(&lp, half);
    let grew = last - log_values[0] > rules.diverge_factor.ln();
    let max_of = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let new_high = max_of(&log_values[n - q..]) > max_of(&log_values[..n - q]) + band;
    if new_high && slope > 0.0 && (grew || slope >= rules.growth_exponent) {
        return Trend::Diverging;
    }
    let diffs: Vec<f64> = log_values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > 1e-12)
        .collect();
    let changes = diffs.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    if changes as f64 > rules.oscillation_fraction * (n - 1) as f64 {
        return Trend::Oscillating;
    }
    if slope > 0.0 {
        Trend::Increasing
    } else if slope < 0.0 {
        Trend::Decreasing
    } else {
        Trend::Converging { limit: last.exp() }
    }
}

/// A ratio series over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagSeries {
    pub name: String,
    pub param: Vec<f64>,
    /// Ratio values, saturated at `f64::MAX`.
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
    pub trend: Trend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<Option<u8>>>,
}

impl DiagSeries {
    pub fn from_logs(name: impl Into<String>, param: Vec<f64>, log_values: Vec<f64>, rules: &TrendRules) -> Self {
        let values = log_values.iter().map(|&v| crate::logmath::exp_saturating(v)).collect();
        let trend = classify_trend(&param, &log_values, rules);
        DiagSeries {
            name: name.into(),
            param,
            values,
            log_values,
            trend,
            windows: None,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
