//! Natural cubic spline on a uniform table.

use crate::error::{Result, SusyError};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicTable {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicTable {
    /// `y[i]` is the sampled value at `x_lo + i h`, `h = (x_hi - x_lo)/(len - 1)`.
    pub fn new(x_lo: f64, x_hi: f64, y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        if n < 4 {
            return Err(SusyError::Parameter(format!(
                "table needs at least 4 samples, got {n}"
            )));
        }
        if !(x_hi > x_lo) || y.iter().any(|v| !v.is_finite()) {
            return Err(SusyError::Parameter(
                "table samples must be finite on an increasing interval".into(),
            ));
        }
        let h = (x_hi - x_lo) / (n - 1) as f64;
        // Thomas algorithm for the interior moments, natural ends.
        let k = n - 2;
        let mut diag = vec![4.0; k];
        let mut rhs: Vec<f64> = (1..n - 1)
            .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h))
            .collect();
        for i in 1..k {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        for i in (0..k).rev() {
            let next = if i + 1 < k { m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - next) / diag[i];
        }
        Ok(Self { x0: x_lo, h, y, m })
    }

    pub fn x_lo(&self) -> f64 {
        self.x0
    }

    pub fn x_hi(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.y
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.y.len() - 2;
        let i = (((x - self.x0) / self.h).floor().max(0.0) as usize).min(last);
        (i, x - (self.x0 + i as f64 * self.h))
    }

    /// Value, first and second derivative of the interpolant.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (i, t) = self.locate(x);
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let s = h - t;
        let value = m0 * s.powi(3) / (6.0 * h)
            + m1 * t.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * s
            + (y1 / h - m1 * h / 6.0) * t;
        let slope = -m0 * s * s / (2.0 * h) + m1 * t * t / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0);
        let curvature = (m0 * s + m1 * t) / h;
        (value, slope, curvature)
    }
}
