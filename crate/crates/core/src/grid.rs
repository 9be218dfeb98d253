//! Uniform one-dimensional grids and the trapezoid rules used on them.

use crate::error::{Result, SusyError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(SusyError::Parameter(format!(
                "grid bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        if n < 3 {
            return Err(SusyError::Parameter(format!("grid needs n >= 3 points, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let t = ((x - self.lo) / self.spacing()).round();
        t.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Same endpoints, roughly half the points (`(n + 1) / 2`), i.e. doubled spacing for odd `n`.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.lo, self.hi, self.n.div_ceil(2))
    }

    /// Same spacing, bounds pushed out by `margin` on each side.
    pub fn extended(&self, margin: f64) -> Result<Self> {
        let h = self.spacing();
        let extra = (margin / h).ceil() as usize;
        Self::new(
            self.lo - extra as f64 * h,
            self.hi + extra as f64 * h,
            self.n + 2 * extra,
        )
    }
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Running trapezoid integral from the first node; `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out.truncate(values.len());
    out
}

/// L2 norm with the trapezoid rule.
pub fn l2_norm(values: &[f64], h: f64) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    trapezoid(&sq, h).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn points_are_uniform_and_hit_both_ends() {
        let g = Grid::new(-8.0, 8.0, 2001).unwrap();
        assert_eq!(g.point(0), -8.0);
        assert_eq!(g.point(2000), 8.0);
        assert_eq!(g.point(1000), 0.0);
        let pts: Vec<f64> = g.points().collect();
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.nearest(0.003), 1000);
        assert_eq!(g.nearest(-100.0), 0);
    }

    #[test]
    fn coarsened_and_extended_grids() {
        let g = Grid::new(-1.0, 1.0, 21).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!(c.len(), 11);
        assert!((c.spacing() - 2.0 * g.spacing()).abs() < 1e-15);
        let e = g.extended(0.25).unwrap();
        assert!((e.spacing() - g.spacing()).abs() < 1e-15);
        assert!(e.lo() <= -1.25 + 1e-12 && e.hi() >= 1.25 - 1e-12);
    }

    #[test]
    fn trapezoid_integrates_quadratics_to_second_order() {
        let g = Grid::new(0.0, 1.0, 1001).unwrap();
        let v: Vec<f64> = g.points().map(|x| x * x).collect();
        assert!((trapezoid(&v, g.spacing()) - 1.0 / 3.0).abs() < 1e-6);
        let c = cumulative_trapezoid(&v, g.spacing());
        assert_eq!(c.len(), v.len());
        assert!((c[500] - 0.125 / 3.0).abs() < 1e-6);
    }
}
