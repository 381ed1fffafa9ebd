//! One-dimensional convex minimization along a fiber `x + t·u`.

const INV_PHI2: f64 = 0.381_966_011_250_105_1;

#[derive(Clone, Copy, Debug)]
pub struct FiberMin {
    /// Smallest value seen.
    pub value: f64,
    /// Where it was seen.
    pub argmin: f64,
}

/// Minimizes a convex `f` whose minimizer is known to lie in
/// `[-half_width, half_width]`.
///
/// With a `threshold`, the search stops as soon as the comparison of the
/// minimum against it is settled: either some value is `<= threshold`, or a
/// convexity lower bound over the remaining bracket exceeds it. The returned
/// value is then `<= threshold` exactly when the true minimum is.
pub fn minimize(mut f: impl FnMut(f64) -> f64, half_width: f64, threshold: Option<f64>) -> FiberMin {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return FiberMin { value: f(0.0), argmin: 0.0 };
    }
    let (mut a, mut b) = (-half_width, half_width);
    let mut x1 = a + INV_PHI2 * (b - a);
    let mut x2 = b - INV_PHI2 * (b - a);
    let (mut fa, mut fb, mut f1, mut f2) = (f(a), f(b), f(x1), f(x2));
    let tol = 1e-11 * half_width;
    loop {
        let (value, argmin) = [(fa, a), (f1, x1), (f2, x2), (fb, b)]
            .into_iter()
            .fold((f64::INFINITY, 0.0), |acc, p| if p.0 < acc.0 { p } else { acc });
        if let Some(thr) = threshold {
            if value <= thr {
                return FiberMin { value, argmin };
            }
            let lb = lower_bound(a, fa, x1, f1, x2, f2, b, fb);
            if lb > thr + 1e-12 * thr.abs().max(1.0) {
                return FiberMin { value, argmin };
            }
        }
        if b - a <= tol {
            return FiberMin { value, argmin };
        }
        if f1 <= f2 {
            b = x2;
            fb = f2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_PHI2 * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            fa = f1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_PHI2 * (b - a);
            f2 = f(x2);
        }
    }
}

/// Minimizes a differentiable convex `f` given as `t -> (f(t), f'(t))`,
/// with the minimizer in `[-half_width, half_width]`.
///
/// Each step evaluates where the tangents at the bracket ends cross, which
/// also gives a lower bound for the minimum; bisection is used when that
/// point hugs an end. The threshold semantics match [`minimize`].
pub fn minimize_smooth(mut fdf: impl FnMut(f64) -> (f64, f64), half_width: f64, threshold: Option<f64>) -> FiberMin {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return FiberMin { value: fdf(0.0).0, argmin: 0.0 };
    }
    let (mut a, mut b) = (-half_width, half_width);
    let ((mut fa, mut da), (mut fb, mut db)) = (fdf(a), fdf(b));
    let mut best = if fa <= fb { FiberMin { value: fa, argmin: a } } else { FiberMin { value: fb, argmin: b } };
    if da >= 0.0 || db <= 0.0 {
        // minimizer at an end (only possible through rounding)
        return best;
    }
    let tol = 1e-13 * half_width;
    let mut bisect_next = false;
    for _ in 0..200 {
        let tc = (fb - fa + da * a - db * b) / (da - db);
        let lb = fa + da * (tc - a);
        if let Some(thr) = threshold {
            if best.value <= thr || lb > thr + 1e-12 * thr.abs().max(1.0) {
                return best;
            }
        }
        if b - a <= tol || best.value - lb <= 1e-15 * best.value.abs() {
            return best;
        }
        let w = b - a;
        let t = if bisect_next || !(tc > a + 0.01 * w && tc < b - 0.01 * w) { 0.5 * (a + b) } else { tc };
        let (ft, dt) = fdf(t);
        if ft < best.value {
            best = FiberMin { value: ft, argmin: t };
        }
        if dt > 0.0 {
            b = t;
            fb = ft;
            db = dt;
        } else if dt < 0.0 {
            a = t;
            fa = ft;
            da = dt;
        } else {
            return best;
        }
        // force a bisection when the bracket shrinks slowly
        bisect_next = (b - a) > 0.5 * w && !bisect_next;
    }
    best
}

/// Lower bound of a convex function on `[a, b]` from four samples.
#[allow(clippy::too_many_arguments)]
fn lower_bound(a: f64, fa: f64, x1: f64, f1: f64, x2: f64, f2: f64, b: f64, fb: f64) -> f64 {
    let s = (f2 - f1) / (x2 - x1);
    let left = f1.min(f1 + s * (a - x1));
    let right = f2.min(f2 + s * (b - x2));
    let s1 = (f1 - fa) / (x1 - a);
    let s2 = (fb - f2) / (b - x2);
    let l1 = |t: f64| f1 + s1 * (t - x1);
    let l2 = |t: f64| f2 + s2 * (t - x2);
    let mut mid = l1(x1).max(l2(x1)).min(l1(x2).max(l2(x2)));
    if s1 != s2 {
        let t = (f2 - f1 + s1 * x1 - s2 * x2) / (s1 - s2);
        if t > x1 && t < x2 {
            mid = mid.min(l1(t));
        }
    }
    left.min(right).min(mid)
}
