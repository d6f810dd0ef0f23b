//! Small one-dimensional numerical kernels: log grids, golden-section search and
//! a bracketing root finder.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// Golden-section minimisation of `f` over `[a, b]` (in log coordinates when
/// `a > 0`), stopping at relative bracket width `rel_width`. Returns the best
/// point seen, including the end points.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_width: f64) -> (f64, f64) {
    debug_assert!(a <= b);
    let use_log = a > 0.0;
    let (to, from): (fn(f64) -> f64, fn(f64) -> f64) = if use_log {
        (f64::ln, f64::exp)
    } else {
        (|x| x, |x| x)
    };
    let (mut lo, mut hi) = (to(a), to(b));
    let mut best = (a, f(a));
    let fb = f(b);
    if fb < best.1 {
        best = (b, fb);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(from(x1));
    let mut f2 = f(from(x2));
    for _ in 0..300 {
        let width = from(hi) - from(lo);
        if width <= rel_width * from(hi).abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(from(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(from(x2));
        }
    }
    for (x, fx) in [(from(x1), f1), (from(x2), f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Minimum of `f` over `[lo, hi]`: an `n`-point log grid followed by golden-section
/// refinement inside the two cells adjacent to the grid argmin.
///
/// Infinite values are allowed and mark infeasible points. Returns `(NaN, inf)`
/// when every grid point is infinite.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    n: usize,
    rel_width: f64,
) -> (f64, f64) {
    let grid = log_grid(lo, hi, n);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut best_i = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best_i.map_or(true, |j: usize| *v < values[j]) {
            best_i = Some(i);
        }
    }
    let Some(i) = best_i.filter(|&i| values[i].is_finite()) else {
        return (f64::NAN, f64::INFINITY);
    };
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(n - 1)];
    let (x, fx) = golden_min(&mut f, a, b, rel_width);
    if fx < values[i] {
        (x, fx)
    } else {
        (grid[i], values[i])
    }
}

/// Brent's bracketing root finder for `f` on `[a, b]` with `f(a)`, `f(b)` of
/// opposite sign. Stops when `done(fx)` holds or the bracket collapses.
pub fn brent_root<F, D>(mut f: F, mut a: f64, mut b: f64, done: D) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    D: Fn(f64) -> bool,
{
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if done(fa) {
        return Ok(a);
    }
    if done(fb) {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::precision("root is not bracketed"));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if done(fb) || m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::precision("root finder did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(1e-6, 1.0, 256);
        assert_eq!(g.len(), 256);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[255], 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn golden_finds_interior_minimum() {
        let (x, fx) = golden_min(|x| (x.ln() - 0.3).powi(2), 0.1, 10.0, 1e-9);
        assert!((x - 0.3f64.exp()).abs() < 1e-6);
        assert!(fx < 1e-12);
        let (x, _) = golden_min(|x| (x - 0.25) * (x - 0.25), -1.0, 1.0, 1e-10);
        assert!((x - 0.25).abs() < 1e-6);
    }

    #[test]
    fn golden_reports_boundary_minimum() {
        let (x, _) = golden_min(|x| x, 2.0, 5.0, 1e-8);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn grid_handles_infeasible_points() {
        let (x, fx) = grid_then_golden(
            |t| if t > 0.5 { f64::INFINITY } else { (t - 0.2).powi(2) },
            1e-6,
            1.0,
            256,
            1e-8,
        );
        assert!((x - 0.2).abs() < 1e-5, "{x}");
        assert!(fx < 1e-9);
        let (x, fx) = grid_then_golden(|_| f64::INFINITY, 1e-3, 1.0, 16, 1e-6);
        assert!(x.is_nan() && fx.is_infinite());
    }

    #[test]
    fn brent_solves_cubic() {
        let r = brent_root(|x| Ok(x * x * x - 2.0), 0.0, 2.0, |fx| fx.abs() < 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
        assert!(brent_root(|x| Ok(x * x + 1.0), -1.0, 1.0, |_| false).is_err());
    }
}
