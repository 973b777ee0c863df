use proptest::prelude::*;
use tailforge::convolve::{convn_tail_grid, log_conv2_ratio};
use tailforge::dist::quantile_from_tail;
use tailforge::functionals::{b2_cond, jump_cond, log_ratio, t_ratio, DiagKind};
use tailforge::transform::{gamma_transform, tilt_compose_check, TransformSpec};
use tailforge::{builtin, BuiltinSpec, Distribution, QuadConfig};

fn catalogue() -> Vec<Distribution> {
    [
        BuiltinSpec::Pareto { alpha: 3.0 },
        BuiltinSpec::Exponential { lambda: 1.0 },
        BuiltinSpec::WeibullHeavy { beta: 0.5 },
        BuiltinSpec::DyadicPareto,
        BuiltinSpec::XuPiecewise {
            alpha: 5.5,
            x1: 4096.0,
            m: 1,
        },
    ]
    .iter()
    .map(|s| builtin(s).unwrap())
    .collect()
}

fn tilt(d: &Distribution, g: f64) -> Distribution {
    gamma_transform(d, TransformSpec::new(g).unwrap()).unwrap()
}

fn q() -> QuadConfig {
    QuadConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tails_are_monotone_probabilities(i in 0usize..5, a in 0.0f64..1e5, b in 0.0f64..1e5) {
        let d = &catalogue()[i];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (la, lb) = (d.log_tail(lo).unwrap(), d.log_tail(hi).unwrap());
        prop_assert!(la <= 0.0 && lb <= la);
    }

    #[test]
    fn tilt_dominates_and_transfers_ratios(i in 0usize..5, gamma in 0.05f64..3.0, x in 0.0f64..500.0, t in 0.01f64..20.0) {
        let d = &catalogue()[i];
        let g = tilt(d, gamma);
        prop_assert!(g.log_tail(x).unwrap() <= d.log_tail(x).unwrap());
        if x > t {
            let a = g.log_shift(x, t).unwrap();
            let b = gamma * t + d.log_shift(x, t).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn tilts_compose(i in 0usize..5, g1 in 0.01f64..2.0, g2 in 0.01f64..2.0) {
        let grid: Vec<f64> = (0..50).map(|k| 1.7 * k as f64).collect();
        prop_assert!(tilt_compose_check(&catalogue()[i], g1, g2, &grid).unwrap().pass);
    }

    #[test]
    fn quantile_inverts_tail(i in 0usize..4, lu in -30.0f64..0.0) {
        let d = &catalogue()[i];
        let u = lu.exp();
        let v = quantile_from_tail(d, u).unwrap();
        prop_assert!(d.tail_value(v).unwrap() <= u * (1.0 + 1e-12));
    }

    #[test]
    fn t_ratio_and_b2_are_monotone_fractions(i in 0usize..4, x in 20.0f64..2000.0, k1 in 0.5f64..5.0, dk in 0.0f64..4.0) {
        let d = &catalogue()[i];
        let k2 = k1 + dk;
        let (t1, t2) = (t_ratio(d, x, k1, &q()).unwrap(), t_ratio(d, x, k2, &q()).unwrap());
        prop_assert!(t1 > 0.0 && t1 <= 1.0 && t2 <= 1.0);
        prop_assert!(t2 >= t1 * (1.0 - 1e-9));
        let (b1, b2) = (b2_cond(d, x, k1, &q()).unwrap(), b2_cond(d, x, k2, &q()).unwrap());
        prop_assert!((0.0..=1.0).contains(&b1) && (0.0..=1.0).contains(&b2));
        prop_assert!(b2 >= b1 * (1.0 - 1e-9) - 1e-15);
    }

    #[test]
    fn os_of_tilt_splits(i in 0usize..4, gamma in 0.1f64..2.0, x in 1.0f64..300.0) {
        // OS_G = OS_F + γ OS*_F
        let d = &catalogue()[i];
        let g = tilt(d, gamma);
        let lhs = log_conv2_ratio(&g, x, &q()).unwrap().exp();
        let rhs = log_conv2_ratio(d, x, &q()).unwrap().exp()
            + gamma * log_ratio(d, DiagKind::OsStar, x, &q()).unwrap().exp();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-7, "{} vs {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn brackets_are_ordered(i in 0usize..4, n in 2usize..4, x_max in 2.0f64..30.0) {
        let d = &catalogue()[i];
        let g = convn_tail_grid(d, n, x_max, x_max / 512.0).unwrap();
        for j in 0..g.grid.len() {
            prop_assert!(g.lower[j] <= g.upper[j]);
            if j > 0 {
                prop_assert!(g.lower[j] <= g.lower[j - 1] && g.upper[j] <= g.upper[j - 1]);
            }
        }
        let b = jump_cond(d, n, x_max, 1.0, x_max / 512.0).unwrap();
        prop_assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0);
    }
}
