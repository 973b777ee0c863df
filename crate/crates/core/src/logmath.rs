//! Log-domain helpers.
//!
//! Tail values in this crate routinely sit far below `f64::MIN_POSITIVE`, so
//! sums and differences are carried out on natural logarithms.

/// `ln(e^a + e^b)` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum_i e^{x_i})`; empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m.is_nan() {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `ln(e^a - e^b)` for `a >= b`; returns `-inf` when equal.
pub fn log_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + log1mexp(b - a)
}

/// `ln(1 - e^x)` for `x <= 0`, accurate on both ends (Mächler's split).
pub fn log1mexp(x: f64) -> f64 {
    if x >= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `e^x` saturated to the finite range.
pub fn exp_saturating(x: f64) -> f64 {
    let v = x.exp();
    if v.is_infinite() {
        f64::MAX
    } else {
        v
    }
}
