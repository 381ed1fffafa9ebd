//! Limited-memory BFGS with Armijo backtracking.
//!
//! Steps are invariant under rescaling of `f` and equivariant under
//! rescaling of `x`, which keeps capacity estimates exactly covariant under
//! dilations of the body.

use std::collections::VecDeque;

const MEMORY: usize = 10;
/// The stall test looks back this many steps.
const WINDOW: usize = 100;

#[derive(Clone, Debug)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Stopped by the stall test or because no descent step exists, rather
    /// than by the iteration budget.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f`, given as `f(x, grad) -> value` filling `grad`. Infinite
/// values act as a barrier. Stops once the value improved by less than the
/// fraction `stall_tol` over the last `WINDOW` steps.
pub fn minimize(
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    x0: Vec<f64>,
    max_iter: usize,
    stall_tol: f64,
) -> LbfgsOutcome {
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut values = VecDeque::with_capacity(WINDOW + 1);
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    if !fx.is_finite() {
        return LbfgsOutcome { x, value: fx, iterations: 0, converged: false };
    }
    for it in 0..max_iter {
        values.push_back(fx);
        if values.len() > WINDOW {
            let old = values.pop_front().unwrap();
            if old - fx <= stall_tol * fx.abs() {
                return LbfgsOutcome { x, value: fx, iterations: it, converged: true };
            }
        }
        let gnorm = dot(&g, &g).sqrt();
        if gnorm == 0.0 {
            return LbfgsOutcome { x, value: fx, iterations: it, converged: true };
        }
        let mut d = direction(&g, &hist);
        let mut slope = dot(&g, &d);
        if hist.is_empty() || !(slope < 0.0) {
            hist.clear();
            // first step moves x by 1% of its size
            let xnorm = dot(&x, &x).sqrt().max(f64::MIN_POSITIVE);
            d = g.iter().map(|v| -v * 0.01 * xnorm / gnorm).collect();
            slope = dot(&g, &d);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            for i in 0..n {
                xn[i] = x[i] + t * d[i];
            }
            let fnew = f(&xn, &mut gn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * t * slope {
                accepted = true;
                let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
                let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    if hist.len() == MEMORY {
                        hist.pop_front();
                    }
                    hist.push_back((s, y, 1.0 / sy));
                }
                std::mem::swap(&mut x, &mut xn);
                std::mem::swap(&mut g, &mut gn);
                fx = fnew;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if hist.is_empty() {
                return LbfgsOutcome { x, value: fx, iterations: it, converged: true };
            }
            hist.clear();
        }
    }
    LbfgsOutcome { x, value: fx, iterations: max_iter, converged: false }
}

/// Two-loop recursion for `−H g`.
fn direction(g: &[f64], hist: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(hist.len());
    for (s, y, rho) in hist.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = hist.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let out = minimize(f, vec![-1.2, 1.0], 10_000, 1e-12);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4, "{out:?}");
    }
}
