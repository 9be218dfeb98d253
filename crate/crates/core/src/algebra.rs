//! Deformed spectrum generating algebras `[J₃, J±] = ±J±`, `[J₊, J₋] = ξ(J₃)`.
//!
//! With `ξ(h) = g(h) − g(h−1)` the lowest-weight unitary representation has
//! `a(h_min + n)² = g(h_min − 1) − g(h_min + n − 1)` and Casimir `C₂ = J₋J₊ + g(J₃)`.
//! Scaling models (`ξ = −r₁ Q^{−h}`) give the geometric self-similar spectra.

use nalgebra::DMatrix;

use crate::error::{Result, SusyError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgebraModel {
    /// `ξ(h) = c₀ + c₁ h`; `c₁ = 0` is the undeformed oscillator-like case.
    Translational { c0: f64, c1: f64 },
    /// `ξ(h) = −r₁ Q^{−h}`, `0 < Q < 1`.
    Scaling { r1: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedAlgebra {
    pub model: AlgebraModel,
    pub h_min: f64,
}

impl DeformedAlgebra {
    pub fn new(model: AlgebraModel, h_min: f64) -> Result<Self> {
        if !h_min.is_finite() {
            return Err(SusyError::Parameter(format!("h_min must be finite, got {h_min}")));
        }
        match model {
            AlgebraModel::Translational { c0, c1 } => {
                if !(c0.is_finite() && c1.is_finite()) {
                    return Err(SusyError::Parameter("xi coefficients must be finite".into()));
                }
            }
            AlgebraModel::Scaling { r1, q } => {
                if !r1.is_finite() {
                    return Err(SusyError::Parameter(format!("r1 must be finite, got {r1}")));
                }
                if !(q > 0.0 && q < 1.0) {
                    return Err(SusyError::Parameter(format!("Q must lie in (0, 1), got {q}")));
                }
            }
        }
        Ok(Self { model, h_min })
    }

    pub fn scaling(r1: f64, q: f64, h_min: f64) -> Result<Self> {
        Self::new(AlgebraModel::Scaling { r1, q }, h_min)
    }

    pub fn translational(c0: f64, c1: f64, h_min: f64) -> Result<Self> {
        Self::new(AlgebraModel::Translational { c0, c1 }, h_min)
    }

    pub fn xi(&self, h: f64) -> f64 {
        match self.model {
            AlgebraModel::Translational { c0, c1 } => c0 + c1 * h,
            AlgebraModel::Scaling { r1, q } => -r1 * q.powf(-h),
        }
    }

    /// `g` with `ξ(h) = g(h) − g(h−1)`. Scaling: `−r₁/(1−Q) Q^{−h}`; translational:
    /// the quadratic antidifference with `g(h_min − 1) = 0`.
    pub fn telescope_g(&self, h: f64) -> f64 {
        match self.model {
            AlgebraModel::Translational { c0, c1 } => {
                let u = h - self.h_min + 1.0;
                c0 * u + 0.5 * c1 * u * (h + self.h_min)
            }
            AlgebraModel::Scaling { r1, q } => -r1 / (1.0 - q) * q.powf(-h),
        }
    }

    /// `a(h_min + n)²`.
    pub fn ladder_sq(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self.model {
            AlgebraModel::Scaling { r1, q } => {
                let h = self.h_min + n as f64;
                r1 * (q.powi(n as i32) - 1.0) / (q - 1.0) * q.powf(1.0 - h)
            }
            AlgebraModel::Translational { .. } => {
                let h = self.h_min + n as f64;
                self.telescope_g(self.h_min - 1.0) - self.telescope_g(h - 1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRep {
    pub dim: usize,
    pub j3: Vec<f64>,
    pub a_sq: Vec<f64>,
    /// `a(h) = √(a(h)²) ≥ 0`.
    pub a: Vec<f64>,
}

impl LadderRep {
    pub fn j_minus(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| if j == i + 1 { self.a[j] } else { 0.0 })
    }

    pub fn j_plus(&self) -> DMatrix<f64> {
        self.j_minus().transpose()
    }

    pub fn j3_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.j3.clone()))
    }
}

/// Ladder coefficients for `h = h_min … h_min + n_max`.
pub fn ladder_coefficients(alg: &DeformedAlgebra, n_max: usize) -> Result<LadderRep> {
    if n_max < 1 {
        return Err(SusyError::Parameter("n_max must be at least 1".into()));
    }
    let dim = n_max + 1;
    let j3: Vec<f64> = (0..dim).map(|n| alg.h_min + n as f64).collect();
    let a_sq: Vec<f64> = (0..dim).map(|n| alg.ladder_sq(n)).collect();
    if let Some((n, &v)) = a_sq.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(SusyError::NonUnitary { h: j3[n], a_sq: v });
    }
    let a = a_sq.iter().map(|v| v.sqrt()).collect();
    Ok(LadderRep { dim, j3, a_sq, a })
}

/// Residuals of the defining relations, each relative to the size of the entries involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraCheck {
    /// `[J₊,J₋] − ξ(J₃)` and `[J₃,J±] ∓ J±` on rows untouched by the truncation.
    pub res_comm: f64,
    /// Deviation of `J₋J₊ + g(J₃)` from a multiple of the identity on interior rows.
    pub res_casimir: f64,
    /// The same two quantities on the truncation row.
    pub edge_comm: f64,
    pub edge_casimir: f64,
    /// Interior Casimir value (`g(h_min − 1)` for an exact representation).
    pub casimir: f64,
}

pub fn verify_algebra(rep: &LadderRep, alg: &DeformedAlgebra) -> Result<AlgebraCheck> {
    let d = rep.dim;
    if d < 3 {
        return Err(SusyError::Parameter(format!("verification needs dim >= 3, got {d}")));
    }
    let (jm, jp, j3) = (rep.j_minus(), rep.j_plus(), rep.j3_matrix());
    let comm = &jp * &jm - &jm * &jp;
    let raise = &j3 * &jp - &jp * &j3 - &jp;
    let lower = &j3 * &jm - &jm * &j3 + &jm;
    let gdiag: Vec<f64> = rep.j3.iter().map(|&h| alg.telescope_g(h)).collect();
    let cas = &jm * &jp + DMatrix::from_diagonal(&nalgebra::DVector::from_vec(gdiag.clone()));

    // magnitude of the entries feeding row i
    let scale = |i: usize| {
        let next = if i + 1 < d { rep.a_sq[i + 1] } else { 0.0 };
        1f64.max(rep.a_sq[i]).max(next).max(alg.xi(rep.j3[i]).abs()).max(gdiag[i].abs())
    };
    let casimir = cas[(0, 0)];
    let mut res = [0.0f64; 4];
    for i in 0..d {
        let edge = i + 1 == d;
        let s = scale(i);
        let mut rc = 0.0f64;
        let mut rk = 0.0f64;
        for j in 0..d {
            let target = if i == j { alg.xi(rep.j3[i]) } else { 0.0 };
            rc = rc.max((comm[(i, j)] - target).abs() / s);
            let cas_target = if i == j { casimir } else { 0.0 };
            rk = rk.max((cas[(i, j)] - cas_target).abs() / s);
        }
        // the J₃ commutators are diagonal-safe, so every row counts as interior
        let ladder = (0..d)
            .map(|j| raise[(i, j)].abs().max(lower[(i, j)].abs()) / s)
            .fold(0.0, f64::max);
        res[0] = res[0].max(ladder);
        if edge {
            res[2] = res[2].max(rc);
            res[3] = res[3].max(rk);
        } else {
            res[0] = res[0].max(rc);
            res[1] = res[1].max(rk);
        }
    }
    Ok(AlgebraCheck {
        res_comm: res[0],
        res_casimir: res[1],
        edge_comm: res[2],
        edge_casimir: res[3],
        casimir,
    })
}

fn scaling_params(alg: &DeformedAlgebra) -> Result<(f64, f64)> {
    match alg.model {
        AlgebraModel::Scaling { r1, q } if r1 > 0.0 => Ok((r1, q)),
        AlgebraModel::Scaling { r1, .. } => {
            Err(SusyError::Parameter(format!("self-similar spectrum needs r1 > 0, got {r1}")))
        }
        AlgebraModel::Translational { .. } => Err(SusyError::Parameter(
            "self-similar spectra exist only for scaling models".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarLevel {
    pub n: usize,
    pub energy: f64,
    /// `−Σ_{m<n} ξ(h − 1 − m)`, the same energy from the ladder increments.
    pub telescoped: f64,
}

/// `E_n(h) = r₁ Q^{1−h} (Qⁿ − 1)/(Q − 1)` for `n = 0 … n_max`.
pub fn selfsimilar_spectrum(alg: &DeformedAlgebra, h: f64, n_max: usize) -> Result<Vec<SelfSimilarLevel>> {
    let (r1, q) = scaling_params(alg)?;
    let alpha = q.powf(1.0 - h);
    let mut telescoped = 0.0;
    Ok((0..=n_max)
        .map(|n| {
            if n > 0 {
                telescoped -= alg.xi(h - n as f64);
            }
            SelfSimilarLevel {
                n,
                energy: r1 * alpha * (q.powi(n as i32) - 1.0) / (q - 1.0),
                telescoped,
            }
        })
        .collect())
}

/// `r₁ Q^{1−h}/(1 − Q)`, the accumulation point of the self-similar spectrum.
pub fn selfsimilar_bound(alg: &DeformedAlgebra, h: f64) -> Result<f64> {
    let (r1, q) = scaling_params(alg)?;
    Ok(r1 * q.powf(1.0 - h) / (1.0 - q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedSelfSimilarLevel {
    pub n1: usize,
    pub n2: usize,
    pub energy: f64,
}

/// All `E_{q,n₁}(h_q) − E_{p,n₂}(h_p)` for `n₁, n₂ ≤ n_max`, sorted by value.
pub fn extended_selfsimilar_spectrum(
    alg_q: &DeformedAlgebra,
    alg_p: &DeformedAlgebra,
    h_q: f64,
    h_p: f64,
    n_max: usize,
) -> Result<Vec<ExtendedSelfSimilarLevel>> {
    let eq = selfsimilar_spectrum(alg_q, h_q, n_max)?;
    let ep = selfsimilar_spectrum(alg_p, h_p, n_max)?;
    let mut out: Vec<ExtendedSelfSimilarLevel> = eq
        .iter()
        .flat_map(|a| {
            ep.iter().map(move |b| ExtendedSelfSimilarLevel {
                n1: a.n,
                n2: b.n,
                energy: a.energy - b.energy,
            })
        })
        .collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.n1.cmp(&b.n1)).then(a.n2.cmp(&b.n2)));
    Ok(out)
}
