//! Shape invariance: `U_partner(a₀) = U_zero(a₁) + R(a₀)` with `a₁ = f(a₀)`.
//!
//! `U_zero` is the partner carrying the normalizable zero mode (`W² − W'` when
//! `e^{−∫W}` decays at both ends). Spectra follow from partial sums of remainders,
//! `E_n = ½ Σ_{k<n} R(a_k)`, the ½ being the one in `H = ½(π² + U)`.

use crate::error::{Result, SusyError};
use crate::grid::Grid;
use crate::potentials::{PartnerSign, SuperPotential};

/// Relative residual below which a remainder counts as constant.
pub const INVARIANCE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterMap {
    /// `a₁ = a₀ + k`
    Translational { k: f64 },
    /// `a₁ = Q a₀`, `Q = e^k`
    Scaling { q: f64 },
}

impl ParameterMap {
    pub fn apply(&self, a: f64) -> f64 {
        match *self {
            ParameterMap::Translational { k } => a + k,
            ParameterMap::Scaling { q } => q * a,
        }
    }

    /// `f^{(n)}(a)` by repeated application, so that chains compose exactly.
    pub fn iterate(&self, a: f64, n: usize) -> f64 {
        (0..n).fold(a, |acc, _| self.apply(acc))
    }

    pub fn class(&self) -> &'static str {
        match self {
            ParameterMap::Translational { .. } => "translational",
            ParameterMap::Scaling { .. } => "scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `W = a x`
    Harmonic,
    /// `W = a (x − c)`
    ShiftedOscillator { shift: f64 },
    /// `W = a − B e^{−x}`
    Morse { b: f64 },
    /// `W = a tanh(B x)`
    PoschlTeller { b: f64 },
    /// A fixed superpotential under the identity map; generally not shape invariant.
    Frozen(SuperPotential),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeInvariantFamily {
    pub name: &'static str,
    pub kind: FamilyKind,
    pub map: ParameterMap,
    pub domain: (f64, f64),
}

impl ShapeInvariantFamily {
    pub fn harmonic(domain: (f64, f64)) -> Self {
        Self {
            name: "harmonic",
            kind: FamilyKind::Harmonic,
            map: ParameterMap::Translational { k: 0.0 },
            domain,
        }
    }

    pub fn shifted_oscillator(shift: f64, domain: (f64, f64)) -> Self {
        Self {
            name: "shifted_oscillator",
            kind: FamilyKind::ShiftedOscillator { shift },
            map: ParameterMap::Translational { k: 0.0 },
            domain,
        }
    }

    pub fn morse(b: f64, domain: (f64, f64)) -> Self {
        Self {
            name: "morse",
            kind: FamilyKind::Morse { b },
            map: ParameterMap::Translational { k: -1.0 },
            domain,
        }
    }

    pub fn poschl_teller(b: f64, domain: (f64, f64)) -> Self {
        Self {
            name: "poschl_teller",
            kind: FamilyKind::PoschlTeller { b },
            map: ParameterMap::Translational { k: -b },
            domain,
        }
    }

    pub fn frozen(w: SuperPotential) -> Self {
        let domain = w.domain();
        Self {
            name: "frozen",
            kind: FamilyKind::Frozen(w),
            map: ParameterMap::Translational { k: 0.0 },
            domain,
        }
    }

    /// Is `a` inside the family's parameter range?
    pub fn admits(&self, a: f64) -> bool {
        match self.kind {
            FamilyKind::Frozen(_) => true,
            _ => a.is_finite() && a > 0.0,
        }
    }

    pub fn potential(&self, a: f64) -> Result<SuperPotential> {
        if !self.admits(a) {
            return Err(SusyError::Parameter(format!(
                "parameter {a} outside the range of the {} family",
                self.name
            )));
        }
        match &self.kind {
            FamilyKind::Harmonic => SuperPotential::linear(a, self.domain),
            FamilyKind::ShiftedOscillator { shift } => {
                SuperPotential::shifted_oscillator(a, *shift, self.domain)
            }
            FamilyKind::Morse { b } => SuperPotential::morse(a, *b, self.domain),
            FamilyKind::PoschlTeller { b } => SuperPotential::poschl_teller(a, *b, self.domain),
            FamilyKind::Frozen(w) => Ok(w.clone()),
        }
    }

    /// Closed-form remainder, where one exists.
    pub fn remainder(&self, a: f64) -> Option<f64> {
        let a1 = self.map.apply(a);
        match self.kind {
            FamilyKind::Harmonic | FamilyKind::ShiftedOscillator { .. } => Some(2.0 * a),
            FamilyKind::Morse { .. } | FamilyKind::PoschlTeller { .. } => Some(a * a - a1 * a1),
            FamilyKind::Frozen(_) => None,
        }
    }
}

fn zero_label(w: &SuperPotential) -> PartnerSign {
    w.zero_mode_sign().unwrap_or(PartnerSign::Plus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderCheck {
    pub a0: f64,
    pub a1: f64,
    /// Grid mean of `U_partner(a₀) − U_zero(a₁)`.
    pub r_est: f64,
    /// Largest deviation from that mean.
    pub residual: f64,
}

impl RemainderCheck {
    pub fn is_invariant(&self) -> bool {
        self.residual < INVARIANCE_TOLERANCE * (1.0 + self.r_est.abs())
    }
}

/// Estimate `R(a₀)` on `grid` and measure how far the difference is from constant.
pub fn remainder_check(fam: &ShapeInvariantFamily, a0: f64, grid: &Grid) -> Result<RemainderCheck> {
    let w0 = fam.potential(a0)?;
    let a1 = fam.map.apply(a0);
    let w1 = fam.potential(a1)?;
    for w in [&w0, &w1] {
        w.check(grid.lo())?;
        w.check(grid.hi())?;
    }
    let zero = zero_label(&w0);
    let diff: Vec<f64> = grid
        .points()
        .map(|x| w0.partner_unchecked(x, zero.flip()) - w1.partner_unchecked(x, zero_label(&w1)))
        .collect();
    let r_est = diff.iter().sum::<f64>() / diff.len() as f64;
    let residual = diff.iter().map(|d| (d - r_est).abs()).fold(0.0, f64::max);
    Ok(RemainderCheck { a0, a1, r_est, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainLevel {
    pub n: usize,
    /// Chain parameter `a_n` whose zero mode is this level.
    pub a: f64,
    pub energy: f64,
    /// `R(a_n)` measured on the grid (`NaN` for the last level, whose step is not taken).
    pub remainder: f64,
}

#[derive(Debug, Clone)]
pub struct RemainderSpectrum {
    pub family: &'static str,
    pub levels: Vec<ChainLevel>,
    /// Set when the chain ran out of bound states before `n_max`.
    pub truncation: Option<String>,
}

impl RemainderSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

fn has_bound_zero_mode(fam: &ShapeInvariantFamily, a: f64) -> bool {
    fam.admits(a) && fam.potential(a).is_ok_and(|w| w.zero_mode_sign().is_some())
}

/// `E_0 = 0`, `E_n = ½ Σ_{k<n} R(a_k)` for `n ≤ n_max`, stopping early when the chain
/// leaves the family's parameter range.
pub fn spectrum_from_remainders(
    fam: &ShapeInvariantFamily,
    a0: f64,
    n_max: usize,
    grid: &Grid,
) -> Result<RemainderSpectrum> {
    if !has_bound_zero_mode(fam, a0) {
        return Err(SusyError::Precondition(format!(
            "{} family at a = {a0} has no normalizable zero mode",
            fam.name
        )));
    }
    let mut levels = vec![ChainLevel { n: 0, a: a0, energy: 0.0, remainder: f64::NAN }];
    let mut truncation = None;
    for n in 1..=n_max {
        let prev = levels[n - 1];
        let next_a = fam.map.apply(prev.a);
        if !has_bound_zero_mode(fam, next_a) {
            truncation = Some(format!(
                "chain leaves the parameter range at a = {next_a}: {n} bound levels"
            ));
            break;
        }
        let check = remainder_check(fam, prev.a, grid)?;
        if !check.is_invariant() {
            return Err(SusyError::NotShapeInvariant { a: prev.a, residual: check.residual });
        }
        levels[n - 1].remainder = check.r_est;
        levels.push(ChainLevel {
            n,
            a: next_a,
            energy: prev.energy + 0.5 * check.r_est,
            remainder: f64::NAN,
        });
    }
    Ok(RemainderSpectrum { family: fam.name, levels, truncation })
}

/// `max_x |W_{n+1}² + W'_{n+1} − W_n² + W'_n + μ_n|` (signs exactly as in the recurrence).
pub fn riccati_residual(w_n: &SuperPotential, w_n1: &SuperPotential, mu_n: f64, grid: &Grid) -> Result<f64> {
    for w in [w_n, w_n1] {
        w.check(grid.lo())?;
        w.check(grid.hi())?;
    }
    Ok(grid
        .points()
        .map(|x| {
            let (a, da, _) = w_n.eval_unchecked(x);
            let (b, db, _) = w_n1.eval_unchecked(x);
            (b * b + db - a * a + da + mu_n).abs()
        })
        .fold(0.0, f64::max))
}

/// Residual of one chain step `a_n → a_{n+1}` with `μ_n = R(a_n)`. The recurrence pairs
/// `W² + W'` with the zero-mode partner, so `W` is reflected when the zero mode sits in
/// `W² − W'`.
pub fn chain_step_residual(fam: &ShapeInvariantFamily, a_n: f64, grid: &Grid) -> Result<f64> {
    let w0 = fam.potential(a_n)?;
    let w1 = fam.potential(fam.map.apply(a_n))?;
    let mu = remainder_check(fam, a_n, grid)?.r_est;
    let orient = |w: SuperPotential| match zero_label(&w) {
        PartnerSign::Plus => w.negated(),
        PartnerSign::Minus => w,
    };
    riccati_residual(&orient(w0), &orient(w1), mu, grid)
}
