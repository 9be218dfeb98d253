//! Superpotentials `W(x)`, their partner potentials `W^2 ∓ W'`, classical vacua and
//! the superpotential action between vacua.

use std::fmt;

use crate::error::{Result, SusyError};
use crate::quadrature;
use crate::spline::CubicTable;

/// Absolute tolerance on `|W|` at a located vacuum.
pub const ROOT_TOLERANCE: f64 = 1e-10;
/// Vacua closer than this are reported as a degenerate (double) zero.
pub const DEGENERATE_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `W = ω x`
    Linear { omega: f64 },
    /// `W = ω (x − c)`
    ShiftedOscillator { omega: f64, shift: f64 },
    /// `W = λ (x² − a²)`
    DoubleWell { lambda: f64, a: f64 },
    /// `W = A − B e^{−x}`
    Morse { a: f64, b: f64 },
    /// `W = A tanh(B x)`
    PoschlTeller { a: f64, b: f64 },
    /// Natural cubic spline through uniform samples.
    Table(CubicTable),
}

/// A superpotential restricted to a closed interval, optionally multiplied by an
/// overall constant (used for mirrored wells, `W → −W`).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperPotential {
    family: Family,
    lo: f64,
    hi: f64,
    scale: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SusyError::Parameter(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl SuperPotential {
    pub fn new(family: Family, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SusyError::Parameter(format!("invalid domain [{lo}, {hi}]")));
        }
        match &family {
            Family::Linear { omega } => positive("omega", *omega)?,
            Family::ShiftedOscillator { omega, shift } => {
                positive("omega", *omega)?;
                if !shift.is_finite() {
                    return Err(SusyError::Parameter(format!("shift must be finite, got {shift}")));
                }
            }
            Family::DoubleWell { lambda, a } => {
                positive("lambda", *lambda)?;
                positive("a", *a)?;
            }
            Family::Morse { a, b } | Family::PoschlTeller { a, b } => {
                positive("A", *a)?;
                positive("B", *b)?;
            }
            Family::Table(t) => {
                let eps = 1e-9 * (t.x_hi() - t.x_lo());
                if lo < t.x_lo() - eps || hi > t.x_hi() + eps {
                    return Err(SusyError::Parameter(format!(
                        "domain [{lo}, {hi}] exceeds table range [{}, {}]",
                        t.x_lo(),
                        t.x_hi()
                    )));
                }
            }
        }
        Ok(Self { family, lo, hi, scale: 1.0 })
    }

    pub fn linear(omega: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Family::Linear { omega }, domain)
    }

    pub fn shifted_oscillator(omega: f64, shift: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Family::ShiftedOscillator { omega, shift }, domain)
    }

    pub fn double_well(lambda: f64, a: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Family::DoubleWell { lambda, a }, domain)
    }

    pub fn morse(a: f64, b: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Family::Morse { a, b }, domain)
    }

    pub fn poschl_teller(a: f64, b: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Family::PoschlTeller { a, b }, domain)
    }

    /// Spline through `samples` taken uniformly on `[x_lo, x_hi]`; the domain is the table range.
    pub fn table(x_lo: f64, x_hi: f64, samples: Vec<f64>) -> Result<Self> {
        let t = CubicTable::new(x_lo, x_hi, samples)?;
        Self::new(Family::Table(t), (x_lo, x_hi))
    }

    /// Tabulate `f` on `n` uniform points and interpolate.
    pub fn tabulate<F: Fn(f64) -> f64>(f: F, x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        let h = (x_hi - x_lo) / (n.max(2) - 1) as f64;
        Self::table(x_lo, x_hi, (0..n).map(|i| f(x_lo + i as f64 * h)).collect())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same family restricted to (or extended to) a new interval.
    pub fn with_domain(&self, domain: (f64, f64)) -> Result<Self> {
        let mut w = Self::new(self.family.clone(), domain)?;
        w.scale = self.scale;
        Ok(w)
    }

    /// `−W`.
    pub fn negated(&self) -> Self {
        Self { scale: -self.scale, ..self.clone() }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(SusyError::Domain { x, lo: self.lo, hi: self.hi })
        }
    }

    /// `(W, W', W'')` at `x` without a domain check.
    pub fn eval_unchecked(&self, x: f64) -> (f64, f64, f64) {
        let (w, d1, d2) = match &self.family {
            Family::Linear { omega } => (omega * x, *omega, 0.0),
            Family::ShiftedOscillator { omega, shift } => (omega * (x - shift), *omega, 0.0),
            Family::DoubleWell { lambda, a } => (lambda * (x * x - a * a), 2.0 * lambda * x, 2.0 * lambda),
            Family::Morse { a, b } => {
                let e = b * (-x).exp();
                (a - e, e, -e)
            }
            Family::PoschlTeller { a, b } => {
                let t = (b * x).tanh();
                let sech2 = 1.0 - t * t;
                (a * t, a * b * sech2, -2.0 * a * b * b * sech2 * t)
            }
            Family::Table(t) => t.eval(x),
        };
        (self.scale * w, self.scale * d1, self.scale * d2)
    }

    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64)> {
        self.check(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.0)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.1)
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.2)
    }

    /// Partner potential without a domain check.
    pub fn partner_unchecked(&self, x: f64, sign: PartnerSign) -> f64 {
        let (w, d1, _) = self.eval_unchecked(x);
        match sign {
            PartnerSign::Plus => w * w - d1,
            PartnerSign::Minus => w * w + d1,
        }
    }

    /// Does `W` change sign on `[lo, hi]`-separated neighbourhoods the way a normalizable
    /// zero mode requires? Returns the partner label carrying the zero mode, if any.
    ///
    /// `e^{−∫W}` decays at both ends when `W(lo) < 0 < W(hi)`: the zero mode then sits in
    /// `W² − W'` ([`PartnerSign::Plus`]). The mirrored situation puts it in `W² + W'`.
    pub fn zero_mode_sign(&self) -> Option<PartnerSign> {
        let wl = self.eval_unchecked(self.lo).0;
        let wh = self.eval_unchecked(self.hi).0;
        if wl < 0.0 && wh > 0.0 {
            Some(PartnerSign::Plus)
        } else if wl > 0.0 && wh < 0.0 {
            Some(PartnerSign::Minus)
        } else {
            None
        }
    }

    /// Is `W` odd (`Some(true)`), even (`Some(false)`) or neither about the origin,
    /// judged on the largest symmetric sub-interval of the domain.
    pub fn parity(&self) -> Option<Parity> {
        let half = self.hi.min(-self.lo);
        if half <= 0.0 {
            return None;
        }
        let probes = 64;
        let mut odd = true;
        let mut even = true;
        let mut scale = 0.0f64;
        for k in 1..=probes {
            let x = half * k as f64 / probes as f64;
            let (wp, wm) = (self.eval_unchecked(x).0, self.eval_unchecked(-x).0);
            scale = scale.max(wp.abs()).max(wm.abs());
            odd &= (wp + wm).abs() <= 1e-9 * (1.0 + wp.abs());
            even &= (wp - wm).abs() <= 1e-9 * (1.0 + wp.abs());
        }
        if scale == 0.0 {
            return Some(Parity::Odd);
        }
        match (odd, even) {
            (true, _) => Some(Parity::Odd),
            (false, true) => Some(Parity::Even),
            _ => None,
        }
    }

    /// Human-readable description used in output metadata.
    pub fn descriptor(&self) -> String {
        let sign = if self.scale == 1.0 { String::new() } else { format!("{}*", self.scale) };
        let body = match &self.family {
            Family::Linear { omega } => format!("linear(omega={omega})"),
            Family::ShiftedOscillator { omega, shift } => {
                format!("shifted_oscillator(omega={omega}, shift={shift})")
            }
            Family::DoubleWell { lambda, a } => format!("double_well(lambda={lambda}, a={a})"),
            Family::Morse { a, b } => format!("morse(A={a}, B={b})"),
            Family::PoschlTeller { a, b } => format!("poschl_teller(A={a}, B={b})"),
            Family::Table(t) => format!("table({} samples)", t.samples().len()),
        };
        format!("{sign}{body} on [{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for SuperPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Label of a partner potential: `Plus` is `W² − W'`, `Minus` is `W² + W'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartnerSign {
    Plus,
    Minus,
}

impl PartnerSign {
    pub fn flip(self) -> Self {
        match self {
            PartnerSign::Plus => PartnerSign::Minus,
            PartnerSign::Minus => PartnerSign::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PartnerSign::Plus => "+",
            PartnerSign::Minus => "-",
        }
    }
}

/// `U_± = W² ∓ W'` at `x`.
pub fn eval_partner(w: &SuperPotential, x: f64, sign: PartnerSign) -> Result<f64> {
    w.check(x)?;
    Ok(w.partner_unchecked(x, sign))
}

/// Both partner potentials of one superpotential.
#[derive(Debug, Clone)]
pub struct PartnerPair<'a> {
    w: &'a SuperPotential,
}

impl<'a> PartnerPair<'a> {
    pub fn new(w: &'a SuperPotential) -> Self {
        Self { w }
    }

    pub fn u_plus(&self, x: f64) -> Result<f64> {
        eval_partner(self.w, x, PartnerSign::Plus)
    }

    pub fn u_minus(&self, x: f64) -> Result<f64> {
        eval_partner(self.w, x, PartnerSign::Minus)
    }
}

/// A simple zero of the superpotential (a classical vacuum of `W²/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vacuum {
    pub location: f64,
    pub slope: f64,
}

/// The two vacua of a double-well superpotential: `plus` has `W' > 0`, `minus` has `W' < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumPair {
    pub plus: Vacuum,
    pub minus: Vacuum,
}

impl VacuumPair {
    /// `q₊ − q₋`.
    pub fn separation(&self) -> f64 {
        self.plus.location - self.minus.location
    }
}

fn refine_root(w: &SuperPotential, mut a: f64, mut b: f64) -> f64 {
    let mut fa = w.eval_unchecked(a).0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = w.eval_unchecked(m).0;
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let (fa, fb) = (w.eval_unchecked(a).0, w.eval_unchecked(b).0);
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// All simple zeros of `W` in its domain, ascending.
pub fn find_vacua(w: &SuperPotential) -> Result<Vec<Vacuum>> {
    let (lo, hi) = w.domain();
    let n = match w.family() {
        Family::Table(t) => (4 * t.samples().len()).max(20_001),
        _ => 20_001,
    };
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * h }).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| w.eval_unchecked(x).0).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        if fs[i] == 0.0 {
            let left = if i > 0 { fs[i - 1] } else { f64::NAN };
            let right = if i + 1 < n { fs[i + 1] } else { f64::NAN };
            if left.is_nan() || right.is_nan() {
                // zero exactly at the domain edge: report it, slope decides simplicity
                roots.push(xs[i]);
            } else if left * right < 0.0 {
                roots.push(xs[i]);
            } else {
                return Err(SusyError::DegenerateRoot { x: xs[i], separation: 0.0 });
            }
        } else if i + 1 < n && fs[i + 1] != 0.0 && fs[i] * fs[i + 1] < 0.0 {
            roots.push(refine_root(w, xs[i], xs[i + 1]));
        }
    }

    let mut vacua = Vec::with_capacity(roots.len());
    for r in roots {
        let (value, slope, _) = w.eval_unchecked(r);
        let tol = ROOT_TOLERANCE.max(8.0 * f64::EPSILON * slope.abs() * (1.0 + r.abs()));
        if value.abs() >= tol {
            return Err(SusyError::DegenerateRoot { x: r, separation: value.abs() });
        }
        if slope.abs() < 1e-8 {
            return Err(SusyError::DegenerateRoot { x: r, separation: 0.0 });
        }
        if let Some(prev) = vacua.last() {
            let prev: &Vacuum = prev;
            if r - prev.location < DEGENERATE_SEPARATION {
                return Err(SusyError::DegenerateRoot { x: r, separation: r - prev.location });
            }
        }
        vacua.push(Vacuum { location: r, slope });
    }
    Ok(vacua)
}

/// Exactly two simple vacua, labelled by the sign of `W'`.
pub fn vacuum_pair(w: &SuperPotential, sector: &'static str) -> Result<VacuumPair> {
    let v = find_vacua(w)?;
    if v.len() != 2 {
        return Err(SusyError::Shape { sector, found: v.len() });
    }
    let (plus, minus) = if v[0].slope > 0.0 { (v[0], v[1]) } else { (v[1], v[0]) };
    if plus.slope <= 0.0 || minus.slope >= 0.0 {
        return Err(SusyError::Shape { sector, found: v.len() });
    }
    Ok(VacuumPair { plus, minus })
}

/// `∫_{from}^{to} W(x) dx` by adaptive quadrature (relative tolerance 1e-10 or better).
pub fn superpotential_action(w: &SuperPotential, x_from: f64, x_to: f64) -> Result<f64> {
    w.check(x_from)?;
    w.check(x_to)?;
    quadrature::integrate(|x| w.eval_unchecked(x).0, x_from, x_to, 1e-12)
}

/// `ΔW = ∫_{q₊}^{q₋} W dq` for a double well.
pub fn vacuum_action(w: &SuperPotential, vacua: &VacuumPair) -> Result<f64> {
    superpotential_action(w, vacua.plus.location, vacua.minus.location)
}
