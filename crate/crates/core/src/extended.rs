//! Classical extended phase space dynamics.
//!
//! `H_ext = H_q − H_p` with `H_q = ½π_q² + ½W(q)² + C_q + W'(q) N` and the analogous
//! `H_p`. Each sector evolves under its own Hamiltonian (`q̇ = π_q`, `ṗ = π_p`). The
//! grading `N` is nilpotent, so all coordinates are [`NilpotentScalar`]s: bodies follow
//! the ordinary flow and souls carry the exact first-order response to `N`. Fermion
//! phases `Φ = ∫ W' dτ` are accumulated alongside.

use num_complex::Complex64;

use crate::error::{Result, SusyError};
use crate::nilpotent::NilpotentScalar;
use crate::ode::{self, OdeError, OdeOptions};
use crate::potentials::SuperPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Q,
    P,
}

#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    pub w: SuperPotential,
    /// `None` suppresses the p-sector potential (`V ≡ 0`).
    pub v: Option<SuperPotential>,
    pub central_q: f64,
    pub central_p: f64,
}

impl ExtendedSystem {
    pub fn new(w: SuperPotential, v: Option<SuperPotential>) -> Self {
        Self { w, v, central_q: 0.0, central_p: 0.0 }
    }

    pub fn with_central_charges(mut self, c_q: f64, c_p: f64) -> Self {
        self.central_q = c_q;
        self.central_p = c_p;
        self
    }

    /// `(V, V', V'')` at `p`, zero when the sector is suppressed.
    fn v_eval(&self, p: f64) -> (f64, f64, f64) {
        self.v.as_ref().map_or((0.0, 0.0, 0.0), |v| v.eval_unchecked(p))
    }

    fn check_state(&self, s: &PhaseState) -> Result<()> {
        self.w.check(s.q.body)?;
        if let Some(v) = &self.v {
            v.check(s.p.body)?;
        }
        Ok(())
    }

    /// `F(q) = ½W² + C_q`.
    pub fn bosonic_q(&self, q: f64) -> f64 {
        let w = self.w.eval_unchecked(q).0;
        0.5 * w * w + self.central_q
    }

    /// `G(p) = ½V² + C_p`.
    pub fn bosonic_p(&self, p: f64) -> f64 {
        let v = self.v_eval(p).0;
        0.5 * v * v + self.central_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub q: NilpotentScalar,
    pub p: NilpotentScalar,
    pub pi_q: NilpotentScalar,
    pub pi_p: NilpotentScalar,
    pub phi_q: f64,
    pub phi_p: f64,
    pub t: f64,
}

pub const TRAJECTORY_COLUMNS: [&str; 13] = [
    "t", "q_body", "q_soul", "p_body", "p_soul", "pi_q_body", "pi_q_soul", "pi_p_body",
    "pi_p_soul", "phi_q", "phi_p", "H_body", "H_soul",
];

impl PhaseState {
    /// Body-only state with zero phases at `t = 0`.
    pub fn new(q: f64, pi_q: f64, p: f64, pi_p: f64) -> Self {
        Self {
            q: q.into(),
            p: p.into(),
            pi_q: pi_q.into(),
            pi_p: pi_p.into(),
            ..Default::default()
        }
    }

    pub fn with_q_soul(mut self, soul: f64) -> Self {
        self.q.soul = soul;
        self
    }

    pub fn with_pi_q_soul(mut self, soul: f64) -> Self {
        self.pi_q.soul = soul;
        self
    }

    pub fn with_p_soul(mut self, soul: f64) -> Self {
        self.p.soul = soul;
        self
    }

    /// Momenta (bodies and souls) reversed, phases and time kept.
    pub fn reversed(&self) -> Self {
        Self { pi_q: -self.pi_q, pi_p: -self.pi_p, ..*self }
    }

    fn to_vec(self) -> Vec<f64> {
        vec![
            self.q.body, self.q.soul, self.pi_q.body, self.pi_q.soul, self.p.body, self.p.soul,
            self.pi_p.body, self.pi_p.soul, self.phi_q, self.phi_p,
        ]
    }

    fn from_slice(t: f64, y: &[f64]) -> Self {
        Self {
            q: NilpotentScalar::new(y[0], y[1]),
            pi_q: NilpotentScalar::new(y[2], y[3]),
            p: NilpotentScalar::new(y[4], y[5]),
            pi_p: NilpotentScalar::new(y[6], y[7]),
            phi_q: y[8],
            phi_p: y[9],
            t,
        }
    }

    /// One CSV row in [`TRAJECTORY_COLUMNS`] order.
    pub fn row(&self, h: NilpotentScalar) -> [f64; 13] {
        [
            self.t, self.q.body, self.q.soul, self.p.body, self.p.soul, self.pi_q.body,
            self.pi_q.soul, self.pi_p.body, self.pi_p.soul, self.phi_q, self.phi_p, h.body, h.soul,
        ]
    }
}

fn sector_hamiltonian(
    x: NilpotentScalar,
    pi: NilpotentScalar,
    (w, w1, w2): (f64, f64, f64),
    central: f64,
) -> NilpotentScalar {
    let wx = x.lift(w, w1);
    let coupling = x.lift(w1, w2) * NilpotentScalar::N;
    (pi * pi).scale(0.5) + (wx * wx).scale(0.5) + NilpotentScalar::real(central) + coupling
}

/// `H_q`, `H_p` separately.
pub fn sector_hamiltonians(
    sys: &ExtendedSystem,
    s: &PhaseState,
) -> Result<(NilpotentScalar, NilpotentScalar)> {
    sys.check_state(s)?;
    let hq = sector_hamiltonian(s.q, s.pi_q, sys.w.eval_unchecked(s.q.body), sys.central_q);
    let hp = sector_hamiltonian(s.p, s.pi_p, sys.v_eval(s.p.body), sys.central_p);
    Ok((hq, hp))
}

/// `H_ext = H_q − H_p` in nilpotent arithmetic.
pub fn extended_hamiltonian(sys: &ExtendedSystem, s: &PhaseState) -> Result<NilpotentScalar> {
    sector_hamiltonians(sys, s).map(|(hq, hp)| hq - hp)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<PhaseState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&PhaseState> {
        self.states.last()
    }

    pub fn hamiltonians(&self, sys: &ExtendedSystem) -> Result<Vec<NilpotentScalar>> {
        self.states.iter().map(|s| extended_hamiltonian(sys, s)).collect()
    }

    /// `(sup |ΔH_body|, sup |ΔH_soul|)` relative to the first sample.
    pub fn hamiltonian_drift(&self, sys: &ExtendedSystem) -> Result<(f64, f64)> {
        let hs = self.hamiltonians(sys)?;
        let h0 = hs.first().copied().unwrap_or_default();
        Ok(hs.iter().fold((0.0f64, 0.0f64), |acc, h| {
            (acc.0.max((h.body - h0.body).abs()), acc.1.max((h.soul - h0.soul).abs()))
        }))
    }
}

/// Uniform sample times `t0, …, t_end` (`n + 1` points).
pub fn uniform_times(t0: f64, t_end: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| if i == n { t_end } else { t0 + (t_end - t0) * i as f64 / n as f64 })
        .collect()
}

fn sector_rhs((w, w1, w2): (f64, f64, f64), x_soul: f64) -> (f64, f64) {
    // π̇ = −∂ₓ[½W² + W' N] lifted to nilpotent arithmetic
    let body = -w * w1;
    let soul = -(w1 * w1 + w * w2) * x_soul - w2;
    (body, soul)
}

/// Integrate the extended equations of motion from `s0` to `t_end` with adaptive
/// Dormand–Prince steps at tolerance `tol`, sampling at `sample_times`.
pub fn integrate_classical(
    sys: &ExtendedSystem,
    s0: &PhaseState,
    t_end: f64,
    tol: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(SusyError::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    sys.check_state(s0)?;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let wq = sys.w.eval_unchecked(y[0]);
        let (fq_b, fq_s) = sector_rhs(wq, y[1]);
        let vp = sys.v_eval(y[4]);
        let (fp_b, fp_s) = sector_rhs(vp, y[5]);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = fq_b;
        dy[3] = fq_s;
        dy[4] = y[6];
        dy[5] = y[7];
        dy[6] = fp_b;
        dy[7] = fp_s;
        dy[8] = wq.1;
        dy[9] = vp.1;
    };
    let inside = |_t: f64, y: &[f64]| {
        sys.w.contains(y[0]) && sys.v.as_ref().is_none_or(|v| v.contains(y[4]))
    };
    let ys = ode::integrate(
        rhs,
        s0.t,
        &s0.to_vec(),
        t_end,
        sample_times,
        OdeOptions::with_tol(tol),
        inside,
    )
    .map_err(|e| match e {
        OdeError::StepUnderflow { t, h } => SusyError::Stiffness { t, h },
        OdeError::TooManySteps { t } => SusyError::Stiffness { t, h: 0.0 },
        OdeError::Rejected { t, t_last, last } => SusyError::DomainExit {
            t,
            last: Box::new(PhaseState::from_slice(t_last, &last)),
        },
    })?;
    Ok(Trajectory {
        states: sample_times.iter().zip(ys).map(|(&t, y)| PhaseState::from_slice(t, &y)).collect(),
    })
}

/// `I(t) = (π + i W) e^{−iΦ}` along a trajectory; constant for the exact flow.
pub fn charge_phase_witness(
    sys: &ExtendedSystem,
    traj: &Trajectory,
    sector: Sector,
) -> Result<Vec<Complex64>> {
    if sys.central_q != 0.0 || sys.central_p != 0.0 {
        return Err(SusyError::Precondition(
            "charge witness requires vanishing central charges".into(),
        ));
    }
    traj.states
        .iter()
        .map(|s| {
            let (pi, w, phi) = match sector {
                Sector::Q => (s.pi_q.body, sys.w.value(s.q.body)?, s.phi_q),
                Sector::P => (
                    s.pi_p.body,
                    match &sys.v {
                        Some(v) => v.value(s.p.body)?,
                        None => 0.0,
                    },
                    s.phi_p,
                ),
            };
            Ok(Complex64::new(pi, w) * Complex64::from_polar(1.0, -phi))
        })
        .collect()
}

/// `sup_t |I(t) − I(0)|`.
pub fn witness_drift(witness: &[Complex64]) -> f64 {
    let Some(first) = witness.first() else {
        return 0.0;
    };
    witness.iter().map(|z| (z - first).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const D: (f64, f64) = (-8.0, 8.0);

    fn linear() -> ExtendedSystem {
        ExtendedSystem::new(SuperPotential::linear(1.0, D).unwrap(), None)
    }

    fn double_well() -> ExtendedSystem {
        ExtendedSystem::new(SuperPotential::double_well(1.0, 1.0, D).unwrap(), None)
    }

    #[test]
    fn hamiltonian_examples() {
        let h = extended_hamiltonian(&linear(), &PhaseState::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(h, NilpotentScalar::new(0.5, 1.0));

        let w = SuperPotential::double_well(1.0, 1.0, D).unwrap();
        let sym = ExtendedSystem::new(w.clone(), Some(w));
        let s = PhaseState::new(0.4, 0.3, 0.4, 0.3).with_q_soul(0.2).with_p_soul(0.2);
        assert_eq!(extended_hamiltonian(&sym, &s).unwrap(), NilpotentScalar::ZERO);

        let h = extended_hamiltonian(&double_well(), &PhaseState::new(0.0, 2.0, 0.0, 0.0)).unwrap();
        assert_eq!(h, NilpotentScalar::new(2.5, 0.0));
    }

    #[test]
    fn central_charges_shift_the_body() {
        let sys = linear().with_central_charges(0.25, 0.0);
        let h = extended_hamiltonian(&sys, &PhaseState::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(h.body, 0.75);
        assert_eq!(sys.bosonic_q(2.0), 2.25);
    }

    #[test]
    fn state_outside_domain() {
        let r = extended_hamiltonian(&linear(), &PhaseState::new(9.0, 0.0, 0.0, 0.0));
        assert!(matches!(r, Err(SusyError::Domain { .. })));
    }

    #[test]
    fn harmonic_quarter_period() {
        let sys = linear();
        let traj = integrate_classical(
            &sys,
            &PhaseState::new(1.0, 0.0, 0.0, 0.0),
            FRAC_PI_2,
            1e-10,
            &uniform_times(0.0, FRAC_PI_2, 20),
        )
        .unwrap();
        let end = traj.last().unwrap();
        assert!(end.q.body.abs() < 1e-8);
        assert!((end.pi_q.body + 1.0).abs() < 1e-8);
        let (db, ds) = traj.hamiltonian_drift(&sys).unwrap();
        assert!(db < 1e-8 && ds < 1e-8);
    }

    #[test]
    fn harmonic_witness_is_i() {
        let sys = linear();
        let traj = integrate_classical(
            &sys,
            &PhaseState::new(1.0, 0.0, 0.0, 0.0),
            20.0,
            1e-11,
            &uniform_times(0.0, 20.0, 200),
        )
        .unwrap();
        let wit = charge_phase_witness(&sys, &traj, Sector::Q).unwrap();
        for (z, s) in wit.iter().zip(&traj.states) {
            assert!((z - Complex64::i()).norm() < 1e-8);
            let hq = sector_hamiltonians(&sys, s).unwrap().0;
            assert!((z.norm_sqr() - 2.0 * hq.body).abs() < 1e-12);
        }
    }

    #[test]
    fn double_well_witness_inside_one_well() {
        let sys = double_well();
        let traj = integrate_classical(
            &sys,
            &PhaseState::new(1.2, 0.0, 0.0, 0.0),
            50.0,
            1e-10,
            &uniform_times(0.0, 50.0, 500),
        )
        .unwrap();
        assert!(traj.states.iter().all(|s| s.q.body > 0.0));
        let wit = charge_phase_witness(&sys, &traj, Sector::Q).unwrap();
        assert!(witness_drift(&wit) < 1e-6);
    }

    #[test]
    fn soul_is_the_exact_first_order_response() {
        // oracle: central differences of body-only trajectories of
        // H_δ = ½π² + ½W² + δ W', started from q0 + δ q_soul, integrated with fixed-step RK4
        let sys = double_well();
        let t_end = 3.0;
        let s0 = PhaseState::new(0.0, 1.0, 0.0, 0.0).with_q_soul(1.0);
        let traj = integrate_classical(&sys, &s0, t_end, 1e-12, &[t_end]).unwrap();
        let end = traj.last().unwrap();

        let body_only = |delta: f64| {
            let force = |q: f64| -(q * q - 1.0) * 2.0 * q - delta * 2.0;
            let (mut q, mut p) = (delta, 1.0);
            let steps = 30_000;
            let h = t_end / steps as f64;
            for _ in 0..steps {
                let (k1q, k1p) = (p, force(q));
                let (k2q, k2p) = (p + 0.5 * h * k1p, force(q + 0.5 * h * k1q));
                let (k3q, k3p) = (p + 0.5 * h * k2p, force(q + 0.5 * h * k2q));
                let (k4q, k4p) = (p + h * k3p, force(q + h * k3q));
                q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
                p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            }
            (q, p)
        };
        let delta = 1e-5;
        let (qp, pp) = body_only(delta);
        let (qm, pm) = body_only(-delta);
        let (q0, p0) = body_only(0.0);
        assert!((end.q.body - q0).abs() < 1e-9);
        assert!((end.pi_q.body - p0).abs() < 1e-9);
        let fd_q = (qp - qm) / (2.0 * delta);
        let fd_p = (pp - pm) / (2.0 * delta);
        assert!((end.q.soul - fd_q).abs() < 1e-5 * (1.0 + fd_q.abs()), "{} vs {fd_q}", end.q.soul);
        assert!((end.pi_q.soul - fd_p).abs() < 1e-5 * (1.0 + fd_p.abs()));
    }

    #[test]
    fn time_reversal_returns_home() {
        let w = SuperPotential::double_well(1.0, 1.0, D).unwrap();
        let v = SuperPotential::double_well(1.0, 1.2, D).unwrap();
        let sys = ExtendedSystem::new(w, Some(v));
        let tol = 1e-10;
        let s0 = PhaseState::new(0.3, 0.8, -0.5, 0.2).with_q_soul(0.5).with_p_soul(-0.3);
        let fwd = integrate_classical(&sys, &s0, 10.0, tol, &[10.0]).unwrap();
        let mut back_start = fwd.last().unwrap().reversed();
        back_start.t = 0.0;
        let back = integrate_classical(&sys, &back_start, 10.0, tol, &[10.0]).unwrap();
        let end = back.last().unwrap().reversed();
        for (a, b) in [(end.q, s0.q), (end.p, s0.p), (end.pi_q, s0.pi_q), (end.pi_p, s0.pi_p)] {
            assert!((a.body - b.body).abs() < 1e3 * tol);
            assert!((a.soul - b.soul).abs() < 1e3 * tol);
        }
    }

    #[test]
    fn leaving_the_domain_is_reported() {
        let sys = ExtendedSystem::new(SuperPotential::linear(1.0, (-1.0, 1.0)).unwrap(), None);
        let r = integrate_classical(&sys, &PhaseState::new(0.0, 5.0, 0.0, 0.0), 2.0, 1e-10, &[2.0]);
        match r {
            Err(SusyError::DomainExit { last, .. }) => assert!(last.q.body <= 1.0),
            other => panic!("expected domain exit, got {other:?}"),
        }
    }

    #[test]
    fn bad_tolerance() {
        let r = integrate_classical(&linear(), &PhaseState::new(0.0, 1.0, 0.0, 0.0), 1.0, 0.0, &[]);
        assert!(matches!(r, Err(SusyError::Parameter(_))));
    }
}
