//! Euclidean instantons `dq/dτ = −W(q)` and the tunneling matrix elements built on them.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Result, SusyError};
use crate::groundstate::{Breaking, FlaggedValue, PhaseFlag, SectorBreaking, SYMMETRIC_THRESHOLD};
use crate::ode::{self, OdeError, OdeOptions};
use crate::potentials::{vacuum_action, vacuum_pair, SuperPotential, VacuumPair};

/// `|W(q_c)|` required at both ends of the τ window.
pub const ASYMPTOTE_TOLERANCE: f64 = 1e-8;
const ODE_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct InstantonResult {
    pub tau: Vec<f64>,
    pub q_c: Vec<f64>,
    /// `W(q_c(τ))`.
    pub w_c: Vec<f64>,
    /// `∫ W(q_c)² dτ` along the computed trajectory.
    pub action: f64,
    /// `ΔW = ∫_{q₊}^{q₋} W dq` by quadrature.
    pub delta_w: f64,
    pub w_prime_plus: f64,
    /// `q₊ − q₋`.
    pub delta_q: f64,
    pub tau0: f64,
    pub me_charge: Complex64,
    pub me_fermion: f64,
}

impl InstantonResult {
    /// `½|me_charge|²`, the sector breaking energy carried by the instanton.
    pub fn eps(&self) -> f64 {
        0.5 * self.me_charge.norm_sqr()
    }
}

fn map_ode(e: OdeError) -> SusyError {
    match e {
        OdeError::StepUnderflow { t, h } => SusyError::Stiffness { t, h },
        OdeError::TooManySteps { t } => SusyError::Stiffness { t, h: 0.0 },
        OdeError::Rejected { t, .. } => SusyError::Span { residual: t },
    }
}

/// Instanton on `n` uniform times spanning `[−tau_span/2, tau_span/2]`, centred so that
/// `q_c(0)` is the midpoint of the vacua.
pub fn instanton_trajectory(w: &SuperPotential, tau_span: f64, n: usize) -> Result<InstantonResult> {
    instanton_trajectory_at(w, tau_span, n, 0.0)
}

/// As [`instanton_trajectory`] with the collective coordinate `τ₀` (the midpoint time).
pub fn instanton_trajectory_at(
    w: &SuperPotential,
    tau_span: f64,
    n: usize,
    tau0: f64,
) -> Result<InstantonResult> {
    if !(tau_span > 0.0 && tau_span.is_finite()) || n < 2 {
        return Err(SusyError::Parameter(format!(
            "need tau_span > 0 and n >= 2, got {tau_span} and {n}"
        )));
    }
    let half = 0.5 * tau_span;
    if !(tau0.abs() < half) {
        return Err(SusyError::Parameter(format!("tau0 = {tau0} outside the window")));
    }
    let vacua = vacuum_pair(w, "q")?;
    let mid = 0.5 * (vacua.plus.location + vacua.minus.location);
    let tau: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { half } else { -half + tau_span * i as f64 / (n - 1) as f64 })
        .collect();

    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let v = w.eval_unchecked(y[0]).0;
        dy[0] = -v;
        dy[1] = v * v;
    };
    let inside = |_t: f64, y: &[f64]| w.contains(y[0]);
    let opts = OdeOptions { rtol: ODE_TOL, atol: 1e-15, max_steps: 10_000_000 };

    let split = tau.partition_point(|&t| t < tau0);
    let mut fwd_samples: Vec<f64> = tau[split..].to_vec();
    let mut bwd_samples: Vec<f64> = tau[..split].iter().rev().copied().collect();
    // the window ends are always integrated to, even when a side has no samples
    if fwd_samples.last() != Some(&half) {
        fwd_samples.push(half);
    }
    if bwd_samples.last() != Some(&-half) {
        bwd_samples.push(-half);
    }
    let y0 = [mid, 0.0];
    let fwd = ode::integrate(rhs, tau0, &y0, half, &fwd_samples, opts, inside).map_err(map_ode)?;
    let bwd = ode::integrate(rhs, tau0, &y0, -half, &bwd_samples, opts, inside).map_err(map_ode)?;

    let mut q_c: Vec<f64> = bwd[..split].iter().rev().map(|y| y[0]).collect();
    q_c.extend(fwd[..n - split].iter().map(|y| y[0]));
    let end_hi = fwd.last().expect("forward end");
    let end_lo = bwd.last().expect("backward end");
    let residual = w.eval_unchecked(end_hi[0]).0.abs().max(w.eval_unchecked(end_lo[0]).0.abs());
    if !(residual < ASYMPTOTE_TOLERANCE) {
        return Err(SusyError::Span { residual });
    }
    let action = end_hi[1] - end_lo[1];
    let me = instanton_matrix_elements_with(w, &vacua)?;
    Ok(InstantonResult {
        w_c: q_c.iter().map(|&q| w.eval_unchecked(q).0).collect(),
        tau,
        q_c,
        action,
        delta_w: me.delta_w,
        w_prime_plus: vacua.plus.slope,
        delta_q: vacua.separation(),
        tau0,
        me_charge: me.charge,
        me_fermion: me.fermion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElements {
    /// `i √(W'(q₊)/π) e^{−ΔW}`
    pub charge: Complex64,
    /// `√(W'(q₊)/π) e^{−ΔW} Δq`
    pub fermion: f64,
    pub delta_w: f64,
    pub w_prime_plus: f64,
    pub delta_q: f64,
}

impl MatrixElements {
    /// `½|charge|² = (W'(q₊)/2π) e^{−2ΔW}`.
    pub fn eps(&self) -> f64 {
        0.5 * self.charge.norm_sqr()
    }
}

fn instanton_matrix_elements_with(w: &SuperPotential, vacua: &VacuumPair) -> Result<MatrixElements> {
    let delta_w = vacuum_action(w, vacua)?;
    if delta_w < 0.0 {
        return Err(SusyError::Orientation { delta: delta_w });
    }
    let amp = (vacua.plus.slope / PI).sqrt() * (-delta_w).exp();
    Ok(MatrixElements {
        charge: Complex64::new(0.0, amp),
        fermion: amp * vacua.separation(),
        delta_w,
        w_prime_plus: vacua.plus.slope,
        delta_q: vacua.separation(),
    })
}

/// Closed-form one-instanton matrix elements of the charge and of the fermion operator.
pub fn instanton_matrix_elements(w: &SuperPotential) -> Result<MatrixElements> {
    instanton_matrix_elements_with(w, &vacuum_pair(w, "q")?)
}

/// Composite element
/// `2i√ε [(ε_q/ε)√ε_q √(W'(q₊)/π) Δq − (ε_p/ε)√ε_p √(V'(p₊)/π) Δp]`
/// with the sector energies taken from the instanton matrix elements.
pub fn breaking_product(w: &SuperPotential, v: Option<&SuperPotential>) -> Result<FlaggedValue> {
    let mq = instanton_matrix_elements(w)?;
    let mp = v.map(instanton_matrix_elements).transpose()?;
    let (eq, ep) = (mq.eps(), mp.map_or(0.0, |m| m.eps()));
    let eps = eq - ep;
    let symmetric = eps.abs() <= SYMMETRIC_THRESHOLD || eps.abs() <= 4.0 * f64::EPSILON * eq.max(ep);
    if symmetric {
        return Ok(FlaggedValue { value: Complex64::new(0.0, 0.0), flag: PhaseFlag::Symmetric });
    }
    let term = |m: &MatrixElements, e: f64| e / eps * e.sqrt() * (m.w_prime_plus / PI).sqrt() * m.delta_q;
    let bracket = term(&mq, eq) - mp.as_ref().map_or(0.0, |m| term(m, ep));
    let (root, flag) = if eps > 0.0 {
        (Complex64::new(eps.sqrt(), 0.0), PhaseFlag::Broken)
    } else {
        (Complex64::new(0.0, (-eps).sqrt()), PhaseFlag::NegativeEnergy)
    };
    Ok(FlaggedValue { value: Complex64::new(0.0, 2.0) * root * bracket, flag })
}

/// Sector breaking data rebuilt from the instanton quantities, for comparison with the
/// groundstate route.
pub fn instanton_breaking(w: &SuperPotential, v: Option<&SuperPotential>) -> Result<Breaking> {
    let sector = |w: &SuperPotential, name: &'static str| -> Result<SectorBreaking> {
        let vacua = vacuum_pair(w, name)?;
        let m = instanton_matrix_elements_with(w, &vacua)?;
        Ok(SectorBreaking { vacua, delta: m.delta_w, energy: m.eps() })
    };
    Ok(Breaking { q: sector(w, "q")?, p: v.map(|v| sector(v, "p")).transpose()? })
}
