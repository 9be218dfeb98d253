//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, eigenvectors by
//! inverse iteration.

use crate::error::{Result, SusyError};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(SusyError::Parameter(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(Self { diagonal, off_diagonal })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            if q.abs() < tiny {
                q = -tiny;
            }
            let e = self.off_diagonal[i - 1];
            q = self.diagonal[i] - x - e * e / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.len();
        if k == 0 || k > n {
            return Err(SusyError::Parameter(format!(
                "requested {k} eigenvalues of a {n}x{n} matrix"
            )));
        }
        let (glo, ghi) = self.gershgorin();
        let pad = f64::EPSILON * glo.abs().max(ghi.abs()) + f64::MIN_POSITIVE;
        let (glo, ghi) = (glo - pad, ghi + pad);
        const MAX_ITER: usize = 400;
        let mut values = Vec::with_capacity(k);
        let mut lo_hint = glo;
        for idx in 0..k {
            let mut lo = lo_hint;
            let mut hi = ghi;
            let mut iters = 0;
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs())
                {
                    break;
                }
                if self.count_below(mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iters += 1;
                if iters > MAX_ITER {
                    return Err(SusyError::NonConvergence {
                        iterations: iters,
                        partial: values,
                    });
                }
            }
            let ev = 0.5 * (lo + hi);
            values.push(ev);
            lo_hint = lo;
        }
        Ok(values)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solve `(T - shift) x = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm_bound().max(1.0);
        let mut d: Vec<f64> = self.diagonal.iter().map(|v| v - shift).collect();
        let mut du: Vec<f64> = self.off_diagonal.clone();
        let mut dl: Vec<f64> = self.off_diagonal.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                dl[i] = m;
                d[i + 1] -= m * du[i];
                x[i + 1] -= m * x[i];
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let t = d[i + 1];
                d[i + 1] = du[i] - m * t;
                du[i] = t;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        x
    }

    /// Unit eigenvectors for the given eigenvalues, with residual check
    /// `||T v - E v|| <= 1e-10 ||T||`.
    pub fn eigenvectors(&self, eigenvalues: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        let norm = self.norm_bound().max(f64::MIN_POSITIVE);
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
        for (j, &ev) in eigenvalues.iter().enumerate() {
            let shift = ev + 4.0 * f64::EPSILON * norm;
            // deterministic, non-symmetric start
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64).collect();
            let mut ok = false;
            for _ in 0..8 {
                let mut w = self.shifted_solve(shift, &v);
                for (k, prev) in vecs.iter().enumerate() {
                    if (eigenvalues[k] - ev).abs() < 1e-6 * norm {
                        let dot: f64 = w.iter().zip(prev).map(|(a, b)| a * b).sum();
                        w.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
                    }
                }
                let nrm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
                if !nrm.is_finite() || nrm == 0.0 {
                    break;
                }
                w.iter_mut().for_each(|a| *a /= nrm);
                v = w;
                let tv = self.apply(&v);
                let res = tv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - ev * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if res <= 1e-10 * norm {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(SusyError::NonConvergence {
                    iterations: 8,
                    partial: eigenvalues[..j].to_vec(),
                });
            }
            // fix the sign so the first significant component is positive
            if let Some(first) = v.iter().find(|a| a.abs() > 1e-8) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|a| *a = -*a);
                }
            }
            vecs.push(v);
        }
        Ok(vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(t: &SymTridiagonal) -> DMatrix<f64> {
        let n = t.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.diagonal[i]
            } else if i + 1 == j {
                t.off_diagonal[i]
            } else if j + 1 == i {
                t.off_diagonal[j]
            } else {
                0.0
            }
        })
    }

    fn sample(n: usize) -> SymTridiagonal {
        let d = (0..n).map(|i| ((i * 37 % 13) as f64) - 4.0).collect();
        let e = (0..n - 1).map(|i| 0.5 + ((i * 11 % 7) as f64) * 0.3).collect();
        SymTridiagonal::new(d, e).unwrap()
    }

    #[test]
    fn matches_dense_symmetric_eigensolver() {
        let t = sample(40);
        let mut reference: Vec<f64> = dense(&t).symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let ours = t.lowest_eigenvalues(40).unwrap();
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn full_spectrum_trace_identity() {
        let t = sample(60);
        let all = t.lowest_eigenvalues(60).unwrap();
        let sum: f64 = all.iter().sum();
        assert!((sum - t.trace()).abs() <= 1e-8 * t.trace().abs().max(1.0));
    }

    #[test]
    fn eigenvectors_have_small_residuals() {
        let t = sample(50);
        let ev = t.lowest_eigenvalues(6).unwrap();
        let vs = t.eigenvectors(&ev).unwrap();
        for (e, v) in ev.iter().zip(&vs) {
            let tv = t.apply(v);
            let res: f64 = tv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * t.norm_bound());
        }
        for i in 0..vs.len() {
            for j in 0..i {
                let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn bad_requests() {
        let t = sample(5);
        assert!(t.lowest_eigenvalues(0).is_err());
        assert!(t.lowest_eigenvalues(6).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }
}
