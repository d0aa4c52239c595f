//! Clamped cubic spline interpolation with first and second derivatives.

/// C^2 cubic spline through `(x_i, y_i)` with prescribed endpoint slopes.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Build a clamped spline: `s'(x_0) = d0`, `s'(x_n) = dn`.
    /// Knots must be strictly increasing.
    pub fn clamped(x: Vec<f64>, y: Vec<f64>, d0: f64, dn: f64) -> Self {
        let n = x.len();
        assert!(n >= 2, "spline needs at least two knots");
        assert_eq!(n, y.len());
        // Tridiagonal system for the knot second derivatives.
        let mut a = vec![0.0; n]; // sub-diagonal
        let mut b = vec![0.0; n]; // diagonal
        let mut c = vec![0.0; n]; // super-diagonal
        let mut d = vec![0.0; n]; // rhs
        let h = |i: usize| x[i + 1] - x[i];
        b[0] = 2.0 * h(0);
        c[0] = h(0);
        d[0] = 6.0 * ((y[1] - y[0]) / h(0) - d0);
        for i in 1..n - 1 {
            a[i] = h(i - 1);
            b[i] = 2.0 * (h(i - 1) + h(i));
            c[i] = h(i);
            d[i] = 6.0 * ((y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1));
        }
        a[n - 1] = h(n - 2);
        b[n - 1] = 2.0 * h(n - 2);
        d[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / h(n - 2));
        // Thomas algorithm.
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        Self { x, y, m }
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0;
        }
        if t >= self.x[n - 1] {
            return n - 2;
        }
        match self.x.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(n - 2),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    pub fn x_last(&self) -> f64 {
        *self.x.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_sine_and_derivatives() {
        let n = 512;
        let xs: Vec<f64> = (0..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::clamped(xs, ys, 1.0, -1.0);
        for i in 0..200 {
            let t = 0.05 + (std::f64::consts::PI - 0.1) * i as f64 / 199.0;
            assert!((s.eval(t) - t.sin()).abs() < 1e-9);
            assert!((s.deriv(t) - t.cos()).abs() < 1e-6);
            assert!((s.deriv2(t) + t.sin()).abs() < 1e-4);
        }
    }
}
