//! Small numerical building blocks shared by the modules: compensated
//! summation, panel-wise adaptive Simpson quadrature and a bracketing
//! minimizer for unimodal functions of a positive scale parameter.

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Compensated total; an infinite or NaN running sum is returned as is.
    pub fn value(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.comp
        } else {
            self.sum
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Result of a quadrature: value, accumulated error estimate and the number
/// of interval subdivisions spent.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// Default cap on the total number of Simpson subdivisions over all panels.
pub const DEFAULT_SUBDIVISION_BUDGET: usize = 20_000_000;

const MAX_DEPTH: u32 = 60;

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson on `[a, b]` for an integrand that is smooth on the open
/// interval. Uses an explicit stack, and charges every split to `budget`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, budget: &mut usize) -> Option<QuadOutcome> {
    if b <= a {
        return Some(QuadOutcome { value: 0.0, abs_error: 0.0, subdivisions: 0 });
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let mut stack = vec![Segment { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb), tol, depth: 0 }];
    let mut total = KahanSum::new();
    let mut err = 0.0;
    let mut splits = 0usize;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(seg.a, m, seg.fa, flm, seg.fm);
        let right = simpson(m, seg.b, seg.fm, frm, seg.fb);
        let delta = left + right - seg.whole;
        // collapsed interval: nothing more can be resolved in floating point
        let collapsed = !(seg.a < lm && lm < m && m < rm && rm < seg.b);
        if delta.abs() <= 15.0 * seg.tol || collapsed || seg.depth >= MAX_DEPTH {
            total.add(left + right + delta / 15.0);
            err += (delta / 15.0).abs();
            continue;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        splits += 1;
        let half = 0.5 * seg.tol;
        stack.push(Segment {
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol: half,
            depth: seg.depth + 1,
        });
        stack.push(Segment {
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol: half,
            depth: seg.depth + 1,
        });
    }
    Some(QuadOutcome { value: total.value(), abs_error: err, subdivisions: splits })
}

/// Integrates over consecutive panels `[knots[j], knots[j+1]]`. The integrand
/// receives the panel index so that piecewise-defined functions (step counts,
/// kinks at jump locations) are evaluated on a single smooth branch. The
/// absolute tolerance is shared among panels proportionally to their length.
pub fn panel_quadrature<F: Fn(usize, f64) -> f64>(knots: &[f64], f: F, tol: f64, budget: usize) -> Result<QuadOutcome> {
    if knots.len() < 2 {
        return Ok(QuadOutcome { value: 0.0, abs_error: 0.0, subdivisions: 0 });
    }
    let span = knots[knots.len() - 1] - knots[0];
    let mut remaining = budget;
    let mut total = KahanSum::new();
    let mut err = 0.0;
    let mut splits = 0;
    for (j, w) in knots.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let share = tol * (b - a) / span;
        let g = |u: f64| f(j, u);
        match adaptive_simpson(&g, a, b, share, &mut remaining) {
            Some(out) => {
                total.add(out.value);
                err += out.abs_error;
                splits += out.subdivisions;
            }
            None => {
                return Err(Error::QuadratureNonConvergence { tol, budget, estimate: total.value() });
            }
        }
    }
    Ok(QuadOutcome { value: total.value(), abs_error: err, subdivisions: splits })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a function of `x > 0` that is unimodal (e.g. convex) on
/// `(0, upper]`. The minimum is first bracketed by a geometric scan downward
/// from `upper` (ratio `10^(1/8)`) which stops as soon as the value rises,
/// then refined by golden-section search on `ln x`.
///
/// Returns `(argmin, min)`. `floor` bounds the scan from below.
pub fn minimize_unimodal<F>(f: F, upper: f64, floor: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = 10f64.powf(0.125);
    let mut xs = vec![upper];
    let mut fs = vec![f(upper)?];
    loop {
        let x = xs[xs.len() - 1] / ratio;
        if x < floor {
            let n = xs.len();
            return Ok((xs[n - 1], fs[n - 1]));
        }
        let v = f(x)?;
        xs.push(x);
        fs.push(v);
        let n = xs.len();
        if v > fs[n - 2] {
            break;
        }
    }
    let n = xs.len();
    // minimum lies in [xs[n-1], xs[n-3]] (or [xs[1], xs[0]] boundary case)
    let lo = xs[n - 1].ln();
    let hi = if n >= 3 { xs[n - 3].ln() } else { xs[0].ln() };
    golden_section(|t| f(t.exp()), lo, hi).map(|(t, v)| (t.exp(), v))
}

fn golden_section<F>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_keeps_infinity() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        acc.add(f64::INFINITY);
        acc.add(2.0);
        assert_eq!(acc.value(), f64::INFINITY);
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn simpson_integrates_power_law() {
        let mut budget = 100_000;
        let f = |u: f64| u.powi(-3);
        let out = adaptive_simpson(&f, 0.01, 1.0, 1e-10, &mut budget).unwrap();
        let exact = 0.5 * (1e4 - 1.0);
        assert!((out.value - exact).abs() < 1e-8, "{} vs {}", out.value, exact);
    }

    #[test]
    fn panel_quadrature_respects_budget() {
        let knots = [1e-6, 1.0];
        let r = panel_quadrature(&knots, |_, u| u.powi(-3), 1e-14, 3);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn minimizer_finds_parabola_vertex() {
        let (x, v) = minimize_unimodal(|x| Ok((x - 0.3).powi(2) + 2.0), 5.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn minimizer_boundary_at_floor() {
        // monotone increasing: minimum pushed to the scan floor
        let (x, _) = minimize_unimodal(Ok, 1.0, 1e-3).unwrap();
        assert!(x < 2e-3);
    }
}
