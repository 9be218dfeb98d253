//! Iterative groundstate construction and the measures of supersymmetry breaking.
//!
//! The extended groundstate is a two-component product `χ₁ = ψ₁φ₁`, `χ₂ = ψ₂φ₂`.
//! Starting from δ-spikes at the vacua, each sector is improved with the coupled
//! first-order map
//!
//! ```text
//! ψ₁(q) ← e^{−S(q)} ∫_{lo}^{q} e^{S} ψ₂,    ψ₂(q) ← e^{S(q)} ∫_{q}^{hi} e^{−S} ψ₁,
//! ```
//!
//! with `S = ∫₀^q W`. The first sweep gives the θ-cutoff exponentials, the second the
//! integral-dressed states. Everything is carried as log-amplitudes because the
//! factors `e^{±S}` overflow on ordinary domains.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SusyError};
use crate::extended::ExtendedSystem;
use crate::grid::{cumulative_trapezoid, l2_norm, Grid};
use crate::potentials::{vacuum_action, vacuum_pair, SuperPotential, VacuumPair};

/// Fermion number labels of the components `χ₁`, `χ₂`.
pub const FERMION_LABELS: [f64; 2] = [0.5, -0.5];

/// `|ε|` below which the phase is treated as symmetric.
pub const SYMMETRIC_THRESHOLD: f64 = 1e-300;

/// The pair `(ψ₁, ψ₂)` of one sector on its grid, unit L² norm per component.
#[derive(Debug, Clone)]
pub struct SectorState {
    pub grid: Grid,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
    log1: Vec<f64>,
    log2: Vec<f64>,
}

impl SectorState {
    /// Build from nonnegative samples (normalized here).
    pub fn from_components(grid: Grid, psi1: Vec<f64>, psi2: Vec<f64>) -> Result<Self> {
        if psi1.len() != grid.len() || psi2.len() != grid.len() {
            return Err(SusyError::Parameter("component length differs from grid".into()));
        }
        if psi1.iter().chain(&psi2).any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(SusyError::Parameter("components must be finite and nonnegative".into()));
        }
        let log = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
        Self::from_logs(grid, log(&psi1), log(&psi2), "q")
    }

    fn from_logs(grid: Grid, log1: Vec<f64>, log2: Vec<f64>, sector: &'static str) -> Result<Self> {
        let h = grid.spacing();
        let normalize = |mut logs: Vec<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
            let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !peak.is_finite() {
                return Err(SusyError::Scaling(sector));
            }
            let mut vals: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
            let norm = l2_norm(&vals, h);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(SusyError::Scaling(sector));
            }
            vals.iter_mut().for_each(|v| *v /= norm);
            let shift = peak + norm.ln();
            logs.iter_mut().for_each(|l| *l -= shift);
            Ok((vals, logs))
        };
        let (psi1, log1) = normalize(log1)?;
        let (psi2, log2) = normalize(log2)?;
        Ok(Self { grid, psi1, psi2, log1, log2 })
    }

    /// `max(‖Δψ₁‖, ‖Δψ₂‖)` on a shared grid.
    pub fn distance(&self, other: &SectorState) -> Result<f64> {
        if self.grid != other.grid {
            return Err(SusyError::Parameter("states live on different grids".into()));
        }
        let h = self.grid.spacing();
        let d = |a: &[f64], b: &[f64]| {
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            l2_norm(&diff, h)
        };
        Ok(d(&self.psi1, &other.psi1).max(d(&self.psi2, &other.psi2)))
    }
}

/// Separable two-component state; `p` is `None` when the p-sector is suppressed.
#[derive(Debug, Clone)]
pub struct ProductState {
    pub q: SectorState,
    pub p: Option<SectorState>,
    pub iterations: usize,
}

impl ProductState {
    /// `χ₁` (`component = 0`) or `χ₂` (`component = 1`) on the full product grid.
    pub fn materialize(&self, component: usize) -> Result<DMatrix<f64>> {
        let pick = |s: &SectorState| match component {
            0 => Ok(s.psi1.clone()),
            1 => Ok(s.psi2.clone()),
            _ => Err(SusyError::Parameter(format!("component must be 0 or 1, got {component}"))),
        };
        let a = pick(&self.q)?;
        let b = match &self.p {
            Some(p) => pick(p)?,
            None => vec![1.0],
        };
        Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]))
    }

    /// Largest sector distance to another state on the same grids.
    pub fn distance(&self, other: &ProductState) -> Result<f64> {
        let dq = self.q.distance(&other.q)?;
        let dp = match (&self.p, &other.p) {
            (Some(a), Some(b)) => a.distance(b)?,
            (None, None) => 0.0,
            _ => return Err(SusyError::Parameter("p-sector present in only one state".into())),
        };
        Ok(dq.max(dp))
    }
}

/// `S(x) = ∫₀^x W` at the grid nodes (trapezoid), zero at the origin when it is inside.
pub fn action_profile(w: &SuperPotential, grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let ws: Vec<f64> = grid.points().map(|x| w.eval_unchecked(x).0).collect();
    let mut s = cumulative_trapezoid(&ws, h);
    let offset = if grid.lo() <= 0.0 && 0.0 <= grid.hi() {
        let t = (-grid.lo() / h).min((grid.len() - 1) as f64);
        let i = (t.floor() as usize).min(grid.len() - 2);
        let frac = t - i as f64;
        s[i] + frac * (s[i + 1] - s[i])
    } else {
        0.0
    };
    s.iter_mut().for_each(|v| *v -= offset);
    s
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

/// `ln ∫_{x₀}^{x_i} e^{L}` by the trapezoid rule.
fn log_cumulative(logs: &[f64], h: f64) -> Vec<f64> {
    let ln_half_h = (0.5 * h).ln();
    let mut out = vec![f64::NEG_INFINITY; logs.len()];
    for i in 1..logs.len() {
        let seg = ln_half_h + log_add(logs[i - 1], logs[i]);
        out[i] = log_add(out[i - 1], seg);
    }
    out
}

fn check_grid(w: &SuperPotential, grid: &Grid) -> Result<()> {
    w.check(grid.lo())?;
    w.check(grid.hi())
}

/// First iterate from δ-spikes at the vacua: `θ(x − x₋)e^{−S}` and `θ(x₊ − x)e^{S}`.
pub fn first_iterate(
    w: &SuperPotential,
    grid: &Grid,
    vacua: &VacuumPair,
    sector: &'static str,
) -> Result<SectorState> {
    check_grid(w, grid)?;
    let s = action_profile(w, grid);
    let i_minus = grid.nearest(vacua.minus.location);
    let i_plus = grid.nearest(vacua.plus.location);
    let log1 = s
        .iter()
        .enumerate()
        .map(|(i, v)| if i >= i_minus { -v } else { f64::NEG_INFINITY })
        .collect();
    let log2 = s
        .iter()
        .enumerate()
        .map(|(i, v)| if i <= i_plus { *v } else { f64::NEG_INFINITY })
        .collect();
    SectorState::from_logs(*grid, log1, log2, sector)
}

/// One sweep of the coupled first-order map (both components from the old pair).
pub fn refine_sector(w: &SuperPotential, state: &SectorState, sector: &'static str) -> Result<SectorState> {
    let grid = state.grid;
    check_grid(w, &grid)?;
    let h = grid.spacing();
    let s = action_profile(w, &grid);

    let fwd: Vec<f64> = s.iter().zip(&state.log2).map(|(a, b)| a + b).collect();
    let c1 = log_cumulative(&fwd, h);
    let log1 = s.iter().zip(&c1).map(|(a, c)| c - a).collect();

    let mut back: Vec<f64> = s.iter().zip(&state.log1).map(|(a, b)| b - a).collect();
    back.reverse();
    let mut c2 = log_cumulative(&back, h);
    c2.reverse();
    let log2 = s.iter().zip(&c2).map(|(a, c)| a + c).collect();

    SectorState::from_logs(grid, log1, log2, sector)
}

fn sector_iterate(
    w: &SuperPotential,
    grid: &Grid,
    iterations: usize,
    sector: &'static str,
) -> Result<SectorState> {
    let vacua = vacuum_pair(w, sector)?;
    let action = vacuum_action(w, &vacua)?;
    if action < 1.0 {
        log::warn!("{sector}-sector vacua are poorly separated (action {action:.3e} < 1)");
    }
    let mut state = first_iterate(w, grid, &vacua, sector)?;
    for _ in 1..iterations {
        state = refine_sector(w, &state, sector)?;
    }
    Ok(state)
}

/// Iterate the groundstate `iterations` (≥ 1) times from δ-function trials.
///
/// `gp` is ignored when the p-sector is suppressed.
pub fn iterate_groundstate(
    sys: &ExtendedSystem,
    gq: &Grid,
    gp: &Grid,
    iterations: usize,
) -> Result<ProductState> {
    if iterations == 0 {
        return Err(SusyError::Parameter("at least one iteration is required".into()));
    }
    let q = sector_iterate(&sys.w, gq, iterations, "q")?;
    let p = sys.v.as_ref().map(|v| sector_iterate(v, gp, iterations, "p")).transpose()?;
    Ok(ProductState { q, p, iterations })
}

/// Apply one more sweep to every sector.
pub fn refine(sys: &ExtendedSystem, state: &ProductState) -> Result<ProductState> {
    let q = refine_sector(&sys.w, &state.q, "q")?;
    let p = match (&sys.v, &state.p) {
        (Some(v), Some(p)) => Some(refine_sector(v, p, "p")?),
        (None, None) => None,
        _ => return Err(SusyError::Precondition("p-sector of state and system disagree".into())),
    };
    Ok(ProductState { q, p, iterations: state.iterations + 1 })
}

fn ln_half_normalization(w: &SuperPotential, grid: &Grid, sector: &'static str) -> Result<f64> {
    let vacua = vacuum_pair(w, sector)?;
    let s = action_profile(w, grid);
    let start = grid.nearest(vacua.minus.location);
    let logs: Vec<f64> = s[start..].iter().map(|v| -2.0 * v).collect();
    Ok(*log_cumulative(&logs, grid.spacing()).last().unwrap_or(&f64::NEG_INFINITY))
}

/// `ln N'` with `N' = (∫_{q₋} e^{−2S_q} · ∫_{p₋} e^{−2S_p})^{3/2}`, reported for reference
/// only; states are normalized numerically.
pub fn normalization_reference_ln(sys: &ExtendedSystem, gq: &Grid, gp: &Grid) -> Result<f64> {
    let mut total = ln_half_normalization(&sys.w, gq, "q")?;
    if let Some(v) = &sys.v {
        total += ln_half_normalization(v, gp, "p")?;
    }
    Ok(1.5 * total)
}

fn sector_log_derivative_energy(w: &SuperPotential, s: &SectorState) -> Result<f64> {
    if w.parity().is_none() {
        return Err(SusyError::Precondition(
            "log-derivative energy needs a superpotential of definite parity".into(),
        ));
    }
    let grid = &s.grid;
    w.check(0.0)?;
    let k = grid.nearest(0.0);
    if k < 2 || k + 2 >= grid.len() {
        return Err(SusyError::Precondition("origin too close to the grid edge".into()));
    }
    let psi = &s.psi1;
    if psi[k].abs() < 1e-12 {
        return Err(SusyError::DegenerateNode { value: psi[k] });
    }
    let h = grid.spacing();
    let slope = (psi[k - 2] - 8.0 * psi[k - 1] + 8.0 * psi[k + 1] - psi[k + 2]) / (12.0 * h);
    let root = w.eval_unchecked(grid.point(k)).0 + slope / psi[k];
    Ok(0.5 * root * root)
}

/// `(ε_q, ε_p)` from `√(2ε) = W(0) + ψ₁'(0)/ψ₁(0)` (and its p analogue).
pub fn energy_log_derivative(state: &ProductState, sys: &ExtendedSystem) -> Result<(f64, f64)> {
    let eq = sector_log_derivative_energy(&sys.w, &state.q)?;
    let ep = match (&sys.v, &state.p) {
        (Some(v), Some(p)) => sector_log_derivative_energy(v, p)?,
        (None, None) => 0.0,
        _ => return Err(SusyError::Precondition("p-sector of state and system disagree".into())),
    };
    Ok((eq, ep))
}

/// Semiclassical data of one double-well sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBreaking {
    pub vacua: VacuumPair,
    /// `ΔW = ∫_{x₊}^{x₋} W`.
    pub delta: f64,
    /// `(W'(x₊)/2π) e^{−2ΔW}`.
    pub energy: f64,
}

impl SectorBreaking {
    pub fn slope_plus(&self) -> f64 {
        self.vacua.plus.slope
    }

    pub fn separation(&self) -> f64 {
        self.vacua.separation()
    }
}

pub fn sector_breaking(w: &SuperPotential, sector: &'static str) -> Result<SectorBreaking> {
    let vacua = vacuum_pair(w, sector)?;
    let delta = vacuum_action(w, &vacua)?;
    if delta < 0.0 {
        return Err(SusyError::Orientation { delta });
    }
    let energy = vacua.plus.slope / (2.0 * std::f64::consts::PI) * (-2.0 * delta).exp();
    Ok(SectorBreaking { vacua, delta, energy })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breaking {
    pub q: SectorBreaking,
    pub p: Option<SectorBreaking>,
}

impl Breaking {
    pub fn eps_q(&self) -> f64 {
        self.q.energy
    }

    pub fn eps_p(&self) -> f64 {
        self.p.map_or(0.0, |p| p.energy)
    }

    /// `ε = ε_q − ε_p`.
    pub fn eps(&self) -> f64 {
        self.eps_q() - self.eps_p()
    }

    pub fn is_symmetric(&self) -> bool {
        let eps = self.eps();
        eps.abs() <= SYMMETRIC_THRESHOLD
            || eps.abs() <= 4.0 * f64::EPSILON * self.eps_q().abs().max(self.eps_p().abs())
    }
}

/// Semiclassical breaking energy of both sectors (`ħ = 1`).
pub fn breaking_energy_semiclassical(sys: &ExtendedSystem) -> Result<Breaking> {
    let q = sector_breaking(&sys.w, "q")?;
    let p = sys.v.as_ref().map(|v| sector_breaking(v, "p")).transpose()?;
    Ok(Breaking { q, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseFlag {
    Broken,
    /// `ε = 0`: the expression is singular and 0 is returned.
    Symmetric,
    /// `ε < 0`: `√ε` is taken as `i√|ε|`.
    NegativeEnergy,
}

impl PhaseFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseFlag::Broken => "broken",
            PhaseFlag::Symmetric => "symmetric",
            PhaseFlag::NegativeEnergy => "negative_energy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlaggedValue {
    pub value: Complex64,
    pub flag: PhaseFlag,
}

fn sqrt_eps(eps: f64) -> (Complex64, PhaseFlag) {
    if eps > 0.0 {
        (Complex64::new(eps.sqrt(), 0.0), PhaseFlag::Broken)
    } else {
        (Complex64::new(0.0, (-eps).sqrt()), PhaseFlag::NegativeEnergy)
    }
}

fn flagged(b: &Breaking, f: impl FnOnce(Complex64) -> Complex64) -> FlaggedValue {
    if b.is_symmetric() {
        return FlaggedValue { value: Complex64::new(0.0, 0.0), flag: PhaseFlag::Symmetric };
    }
    let (root, flag) = sqrt_eps(b.eps());
    FlaggedValue { value: f(root), flag }
}

/// Auxiliary field expectation
/// `⟨F⟩ = −2√ε [(ε_q/ε)√(W'(q₊)/π) e^{−2ΔW} Δq − (ε_p/ε)√(V'(p₊)/π) e^{−2ΔV} Δp]`.
pub fn auxiliary_expectation(sys: &ExtendedSystem) -> Result<FlaggedValue> {
    let b = breaking_energy_semiclassical(sys)?;
    let eps = b.eps();
    let term = |s: &SectorBreaking| {
        s.energy / eps
            * (s.slope_plus() / std::f64::consts::PI).sqrt()
            * (-2.0 * s.delta).exp()
            * s.separation()
    };
    let bracket = term(&b.q) - b.p.as_ref().map_or(0.0, term);
    Ok(flagged(&b, |root| root * (-2.0 * bracket)))
}

/// Composite matrix element assembled from the groundstate matrix elements:
/// `2i√ε [(ε_q/ε)√ε_q √(|W'(q₋)|/π) Δq − (ε_p/ε)√ε_p √(|V'(p₋)|/π) Δp]`.
pub fn composite_matrix_element(sys: &ExtendedSystem) -> Result<FlaggedValue> {
    let b = breaking_energy_semiclassical(sys)?;
    let eps = b.eps();
    let term = |s: &SectorBreaking| {
        s.energy / eps
            * s.energy.sqrt()
            * (s.vacua.minus.slope.abs() / std::f64::consts::PI).sqrt()
            * s.separation()
    };
    let bracket = term(&b.q) - b.p.as_ref().map_or(0.0, term);
    Ok(flagged(&b, |root| Complex64::new(0.0, 2.0) * root * bracket))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dw(lambda: f64, a: f64) -> SuperPotential {
        SuperPotential::double_well(lambda, a, (-8.0, 8.0)).unwrap()
    }

    fn grid() -> Grid {
        Grid::new(-8.0, 8.0, 4001).unwrap()
    }

    fn q_only(w: SuperPotential) -> ExtendedSystem {
        ExtendedSystem::new(w, None)
    }

    #[test]
    fn first_iterate_ratio() {
        let g = Grid::new(-4.0, 4.0, 801).unwrap();
        let st = iterate_groundstate(&q_only(dw(1.0, 1.0).with_domain((-4.0, 4.0)).unwrap()), &g, &g, 1)
            .unwrap();
        let (i0, i1) = (g.nearest(0.0), g.nearest(1.0));
        let ratio = st.q.psi1[i0] / st.q.psi1[i1];
        assert!((ratio - (-2.0f64 / 3.0).exp()).abs() < 1e-5, "{ratio}");
        assert_eq!(st.q.psi1[g.nearest(-1.0) - 1], 0.0);
        assert_eq!(st.q.psi2[g.nearest(1.0) + 1], 0.0);
    }

    #[test]
    fn components_are_normalized() {
        let g = grid();
        let w = dw(1.0, 1.0);
        let sys = ExtendedSystem::new(w.clone(), Some(dw(1.0, 1.2)));
        for it in 1..=3 {
            let st = iterate_groundstate(&sys, &g, &g, it).unwrap();
            for s in [&st.q, st.p.as_ref().unwrap()] {
                assert!((l2_norm(&s.psi1, g.spacing()) - 1.0).abs() < 1e-10);
                assert!((l2_norm(&s.psi2, g.spacing()) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn materialized_product_has_rank_one() {
        let g = Grid::new(-5.0, 5.0, 61).unwrap();
        let w = dw(1.0, 1.0).with_domain((-5.0, 5.0)).unwrap();
        let sys = ExtendedSystem::new(w.clone(), Some(w));
        let st = iterate_groundstate(&sys, &g, &g, 2).unwrap();
        for c in 0..2 {
            let m = st.materialize(c).unwrap();
            let sv = m.singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert!(s[1] < 1e-12 * s[0]);
        }
    }

    #[test]
    fn second_iterate_matches_integral_dressed_closed_form() {
        // ψ₁ ∝ e^{−S(q)} ∫_{max(−q, q₋)}^{∞} e^{−2S}, ψ₂ ∝ e^{S(q)} ∫_{−∞}^{min(−q, q₊)} e^{2S}
        let g = grid();
        let w = dw(1.0, 1.0);
        let st = iterate_groundstate(&q_only(w.clone()), &g, &g, 2).unwrap();
        let s = |q: f64| q * q * q / 3.0 - q;
        let tail = |lo: f64| crate::quadrature::integrate(|x| (-2.0 * s(x)).exp(), lo, 8.0, 1e-12).unwrap();
        let head = |hi: f64| crate::quadrature::integrate(|x| (2.0 * s(x)).exp(), -8.0, hi, 1e-12).unwrap();
        let psi1: Vec<f64> = g.points().map(|q| (-s(q)).exp() * tail((-q).max(-1.0))).collect();
        let psi2: Vec<f64> = g.points().map(|q| s(q).exp() * head((-q).min(1.0))).collect();
        let h = g.spacing();
        let (n1, n2) = (l2_norm(&psi1, h), l2_norm(&psi2, h));
        let e1 = psi1.iter().zip(&st.q.psi1).map(|(a, b)| (a / n1 - b).abs()).fold(0.0, f64::max);
        let e2 = psi2.iter().zip(&st.q.psi2).map(|(a, b)| (a / n2 - b).abs()).fold(0.0, f64::max);
        assert!(e1 < 1e-4 && e2 < 1e-4, "{e1} {e2}");
    }

    #[test]
    fn parity_pairing_for_even_double_well() {
        let g = grid();
        let st = iterate_groundstate(&q_only(dw(1.0, 1.0)), &g, &g, 2).unwrap();
        let n = g.len();
        let worst = (0..n).map(|i| (st.q.psi1[n - 1 - i] - st.q.psi2[i]).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn third_sweep_barely_moves_a_separated_well() {
        let g = grid();
        let sys = q_only(dw(1.0, 2.0));
        let two = iterate_groundstate(&sys, &g, &g, 2).unwrap();
        let three = refine(&sys, &two).unwrap();
        assert!(two.distance(&three).unwrap() < 0.05);
    }

    #[test]
    fn iteration_distances_decrease() {
        let g = grid();
        let sys = q_only(dw(1.0, 1.5));
        let mut prev = iterate_groundstate(&sys, &g, &g, 1).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let next = refine(&sys, &prev).unwrap();
            let d = prev.distance(&next).unwrap();
            assert!(d < last, "{d} !< {last}");
            last = d;
            prev = next;
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = grid();
        assert!(matches!(
            iterate_groundstate(&q_only(dw(1.0, 1.0)), &g, &g, 0),
            Err(SusyError::Parameter(_))
        ));
    }

    #[test]
    fn single_vacuum_is_a_shape_error() {
        let g = grid();
        let w = SuperPotential::linear(1.0, (-8.0, 8.0)).unwrap();
        assert!(matches!(
            iterate_groundstate(&q_only(w), &g, &g, 1),
            Err(SusyError::Shape { sector: "q", found: 1 })
        ));
    }

    #[test]
    fn log_derivative_vanishes_for_exact_oscillator_groundstate() {
        let g = grid();
        let w = SuperPotential::linear(1.0, (-8.0, 8.0)).unwrap();
        let gauss: Vec<f64> = g.points().map(|q| (-0.5 * q * q).exp()).collect();
        let st = ProductState {
            q: SectorState::from_components(g, gauss.clone(), gauss).unwrap(),
            p: None,
            iterations: 0,
        };
        let (eq, ep) = energy_log_derivative(&st, &q_only(w)).unwrap();
        assert!(eq < 1e-20 && ep == 0.0);
    }

    #[test]
    fn log_derivative_of_second_iterate_reproduces_semiclassics() {
        let g = grid();
        let sys = q_only(dw(1.0, 1.0));
        let st = iterate_groundstate(&sys, &g, &g, 2).unwrap();
        let (eq, _) = energy_log_derivative(&st, &sys).unwrap();
        // exact value of the second iterate: 1 / (2 I(0)²), I(0) = ∫₀^∞ e^{−2S}
        let i0 = crate::quadrature::integrate(|x| (-2.0 * (x * x * x / 3.0 - x)).exp(), 0.0, 8.0, 1e-13)
            .unwrap();
        assert!((eq - 0.5 / (i0 * i0)).abs() < 1e-5 * eq, "{eq} vs {}", 0.5 / (i0 * i0));
        let semi = breaking_energy_semiclassical(&sys).unwrap().eps();
        assert!((eq / semi - 1.0).abs() < 0.2, "{eq} vs {semi}");
    }

    #[test]
    fn identical_sectors_have_equal_log_derivative_energies() {
        let g = grid();
        let w = dw(1.0, 1.0);
        let sys = ExtendedSystem::new(w.clone(), Some(w));
        let st = iterate_groundstate(&sys, &g, &g, 2).unwrap();
        let (eq, ep) = energy_log_derivative(&st, &sys).unwrap();
        assert_eq!(eq, ep);
    }

    #[test]
    fn log_derivative_requires_parity() {
        let g = grid();
        let w = SuperPotential::tabulate(|x| (x - 1.0) * (x + 2.0), -8.0, 8.0, 801).unwrap();
        let sys = q_only(w);
        let st = iterate_groundstate(&sys, &g, &g, 1).unwrap();
        assert!(matches!(energy_log_derivative(&st, &sys), Err(SusyError::Precondition(_))));
    }

    #[test]
    fn vanishing_origin_amplitude_is_degenerate() {
        let g = grid();
        let w = SuperPotential::linear(1.0, (-8.0, 8.0)).unwrap();
        let psi: Vec<f64> = g.points().map(|q| (-(q - 6.0) * (q - 6.0)).exp()).collect();
        let st = ProductState {
            q: SectorState::from_components(g, psi.clone(), psi).unwrap(),
            p: None,
            iterations: 0,
        };
        assert!(matches!(
            energy_log_derivative(&st, &q_only(w)),
            Err(SusyError::DegenerateNode { .. })
        ));
    }

    #[test]
    fn semiclassical_examples() {
        let b = breaking_energy_semiclassical(&q_only(dw(1.0, 1.0))).unwrap();
        let expected = 2.0 / (2.0 * PI) * (-8.0f64 / 3.0).exp();
        assert!((b.eps() - expected).abs() < 1e-10 * expected);
        assert!((b.eps() - 2.212e-2).abs() < 1e-5);

        let w = dw(1.0, 1.0);
        let same = breaking_energy_semiclassical(&ExtendedSystem::new(w.clone(), Some(w))).unwrap();
        assert_eq!(same.eps(), 0.0);

        let two = breaking_energy_semiclassical(&ExtendedSystem::new(dw(1.0, 1.0), Some(dw(1.0, 1.2))))
            .unwrap();
        let ep = 2.4 / (2.0 * PI) * (-2.0f64 * (4.0 * 1.728 / 3.0)).exp();
        assert!((two.eps_p() - ep).abs() < 1e-10 * ep);
        assert_eq!(two.eps(), two.eps_q() - two.eps_p());
    }

    #[test]
    fn auxiliary_examples() {
        let w = dw(1.0, 1.0);
        let sym = auxiliary_expectation(&ExtendedSystem::new(w.clone(), Some(w.clone()))).unwrap();
        assert_eq!(sym.flag, PhaseFlag::Symmetric);
        assert_eq!(sym.value, Complex64::new(0.0, 0.0));

        let f = auxiliary_expectation(&q_only(w.clone())).unwrap();
        let eq = breaking_energy_semiclassical(&q_only(w.clone())).unwrap().eps();
        let expected = -2.0 * eq.sqrt() * (2.0 / PI).sqrt() * (-8.0f64 / 3.0).exp() * 2.0;
        assert_eq!(f.flag, PhaseFlag::Broken);
        assert!((f.value.re - expected).abs() < 1e-9 * expected.abs() && f.value.im == 0.0);

        // mirrored well: Δq flips, so ⟨F⟩ flips and |⟨F⟩| is unchanged
        let m = auxiliary_expectation(&q_only(w.negated())).unwrap();
        assert!((m.value.re + f.value.re).abs() < 1e-9 * f.value.re.abs());
    }

    #[test]
    fn negative_energy_is_flagged_complex() {
        let f = auxiliary_expectation(&ExtendedSystem::new(dw(1.0, 1.2), Some(dw(1.0, 1.0)))).unwrap();
        assert_eq!(f.flag, PhaseFlag::NegativeEnergy);
        assert_eq!(f.value.re, 0.0);
        assert!(f.value.im != 0.0);
    }

    #[test]
    fn composite_element_without_p_sector() {
        let w = dw(1.0, 1.0);
        let c = composite_matrix_element(&q_only(w.clone())).unwrap();
        let eq = breaking_energy_semiclassical(&q_only(w)).unwrap().eps();
        let expected = 2.0 * eq * (2.0 / PI).sqrt() * 2.0;
        assert!(c.value.re.abs() < 1e-300 && (c.value.im - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn normalization_reference_is_finite() {
        let g = grid();
        let ln = normalization_reference_ln(&q_only(dw(1.0, 1.0)), &g, &g).unwrap();
        let direct = crate::quadrature::integrate(|x| (-2.0 * (x * x * x / 3.0 - x)).exp(), -1.0, 8.0, 1e-12)
            .unwrap();
        assert!((ln - 1.5 * direct.ln()).abs() < 1e-4);
    }
}
