//! Principal branch of the Lambert W function on `[0, ∞)`.

/// `W(x)` with `W e^W = x`, for `x ≥ 0`. Returns NaN for negative or NaN
/// input.
pub fn lambert_w(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    if x > 1e200 {
        return lambert_w_exp(x.ln());
    }
    if x < 1e-8 {
        // W(x) = x − x² + 1.5x³ − …; the cubic truncation is exact in double precision here
        return x * (1.0 - x * (1.0 - 1.5 * x));
    }
    let mut w = if x < 3.0 {
        x.ln_1p() * (1.0 - x.ln_1p() / (2.0 + x.ln_1p()))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs() {
            return next;
        }
        w = next;
    }
    w
}

/// `W(e^l)`, usable when `e^l` overflows. Newton on `w + ln w = l`.
pub fn lambert_w_exp(l: f64) -> f64 {
    if l.is_nan() {
        return f64::NAN;
    }
    if l < 460.0 {
        return lambert_w(l.exp());
    }
    let l2 = l.ln();
    let mut w = l - l2 + l2 / l;
    for _ in 0..64 {
        let h = w + w.ln() - l;
        let next = w - h / (1.0 + 1.0 / w);
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs() {
            return next;
        }
        w = next;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(lambert_w(0.0), 0.0);
        assert!((lambert_w(std::f64::consts::E) - 1.0).abs() <= 1e-15);
        assert!((lambert_w(1.0) - 0.567_143_290_409_783_8).abs() <= 1e-15);
        assert!(lambert_w(-1.0).is_nan());
    }

    #[test]
    fn defining_identity_on_log_grid() {
        for i in 0..=400 {
            let x = 10f64.powf(-300.0 + 1.5 * i as f64);
            let w = lambert_w(x);
            let lhs = if x > 1e200 { w + w.ln() - x.ln() } else { (w * w.exp() - x) / x };
            assert!(lhs.abs() <= 1e-13, "x = {x:e}: {lhs:e}");
        }
    }

    #[test]
    fn exp_form_matches_direct() {
        for l in [-5.0, 0.0, 3.0, 100.0, 459.0] {
            let a = lambert_w_exp(l);
            let b = lambert_w(f64::exp(l));
            assert!((a - b).abs() <= 1e-14 * b.max(1e-300));
        }
        // far beyond the f64 range
        let w = lambert_w_exp(1e4);
        assert!((w + w.ln() - 1e4).abs() < 1e-10);
    }
}
