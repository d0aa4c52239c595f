//! Bracketing, bisection and golden-section search on scalar functions.

/// Inverse golden ratio squared and its complement.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection for a root of `f` on `[a, b]`; requires a sign change.
/// Returns the midpoint of the final bracket.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa * fb <= 0.0, "bisect: no sign change on bracket");
    while (b - a).abs() > xtol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Scan `n` uniform subintervals of `[a, b]` and bisect every sign change of
/// `f`. Returns all roots found, in increasing order.
pub fn scan_roots(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, n: usize, xtol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev * fx < 0.0 {
            roots.push(bisect(f, x_prev, x, xtol));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    roots
}

/// Golden-section maximization of `f` on `[a, b]` after an `n_grid`-point
/// bracketing scan. Returns `(argmax, max)`.
pub fn grid_golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, n_grid: usize, xtol: f64) -> (f64, f64) {
    debug_assert!(b > a);
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let xs: Vec<f64> = (0..=n_grid)
        .map(|i| a + (b - a) * i as f64 / n_grid as f64)
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = xs[best_i.saturating_sub(1)];
    let hi = xs[(best_i + 1).min(n_grid)];
    golden_max(f, lo, hi, xtol)
}

/// Golden-section maximization on a unimodal bracket `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > xtol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-13);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_cos_max() {
        let (x, v) = grid_golden_max(|x| x.cos(), -2.0, 2.0, 64, 1e-11);
        // cos is flat to machine precision within ~1e-8 of the max.
        assert!(x.abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scan_finds_all_sine_roots() {
        let roots = scan_roots(|x| x.sin(), 0.5, 9.0, 200, 1e-12);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - std::f64::consts::PI).abs() < 1e-10);
        assert!((roots[1] - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }
}
