//! Finite-difference partner Hamiltonians `½(−∂² + U_±)` and their low spectra.
//!
//! The 3-point Laplacian with Dirichlet walls one step beyond the grid ends gives a
//! symmetric tridiagonal matrix; eigenvalues come from Sturm bisection and eigenvectors
//! from inverse iteration. The extended operator is never built: its levels are the
//! differences of the two sector spectra.

use crate::error::{Result, SusyError};
use crate::extended::Sector;
use crate::grid::Grid;
use crate::potentials::{Family, PartnerSign, SuperPotential};
use crate::tridiag::SymTridiagonal;

/// Threshold on `h²·max|U''|` above which a grid counts as under-resolved.
pub const RESOLUTION_LIMIT: f64 = 0.1;
/// Ground-energy shift that ends domain extension.
pub const DOMAIN_TOLERANCE: f64 = 1e-8;
pub const MAX_EXTENSIONS: usize = 8;

#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub grid: Grid,
    pub potential: SuperPotential,
    pub sign: PartnerSign,
    pub sector: Sector,
    /// `h²·max|U''|` estimated by second differences.
    pub resolution: f64,
    matrix: SymTridiagonal,
}

impl DiscretizedOperator {
    pub fn diagonal(&self) -> &[f64] {
        &self.matrix.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.matrix.off_diagonal
    }

    pub fn matrix(&self) -> &SymTridiagonal {
        &self.matrix
    }

    pub fn is_under_resolved(&self) -> bool {
        self.resolution > RESOLUTION_LIMIT
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }
}

/// Build `½(−∂² + U_sign)` on `grid`.
pub fn discretize(w: &SuperPotential, grid: &Grid, sign: PartnerSign) -> Result<DiscretizedOperator> {
    w.check(grid.lo())?;
    w.check(grid.hi())?;
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let u: Vec<f64> = grid.points().map(|x| w.partner_unchecked(x, sign)).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(SusyError::Parameter("partner potential is not finite on the grid".into()));
    }
    let resolution = u
        .windows(3)
        .map(|t| (t[0] - 2.0 * t[1] + t[2]).abs())
        .fold(0.0, f64::max);
    if resolution > RESOLUTION_LIMIT {
        log::warn!("grid too coarse for {w}: h^2 max|U''| = {resolution:.3e}");
    }
    let diagonal = u.iter().map(|v| inv_h2 + 0.5 * v).collect();
    let off_diagonal = vec![-0.5 * inv_h2; grid.len() - 1];
    Ok(DiscretizedOperator {
        grid: *grid,
        potential: w.clone(),
        sign,
        sector: Sector::Q,
        resolution,
        matrix: SymTridiagonal::new(diagonal, off_diagonal)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub n: usize,
    pub energy: f64,
    /// `|E(n points) − E((n+1)/2 points)|`; infinite when the coarse grid is too small.
    pub convergence_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub levels: Vec<Level>,
    pub grid: Grid,
    pub descriptor: String,
    pub sign: PartnerSign,
    pub sector: Sector,
    /// Number of domain extensions performed (0 for a fixed grid).
    pub extensions: usize,
    pub domain_converged: bool,
    pub under_resolved: bool,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn energy(&self, n: usize) -> Option<f64> {
        self.levels.get(n).map(|l| l.energy)
    }

    pub fn max_convergence_estimate(&self) -> f64 {
        self.levels.iter().map(|l| l.convergence_estimate).fold(0.0, f64::max)
    }
}

/// The `k` lowest levels with a grid-halving convergence estimate per level.
pub fn eigen_lowest(op: &DiscretizedOperator, k: usize) -> Result<SpectrumResult> {
    let energies = op.matrix.lowest_eigenvalues(k)?;
    let coarse_grid = op.grid.coarsened()?;
    let coarse = discretize(&op.potential, &coarse_grid, op.sign)?;
    let kc = k.min(coarse_grid.len());
    let coarse_energies = coarse.matrix.lowest_eigenvalues(kc)?;
    let levels = energies
        .iter()
        .enumerate()
        .map(|(n, &energy)| Level {
            n,
            energy,
            convergence_estimate: coarse_energies
                .get(n)
                .map_or(f64::INFINITY, |c| (energy - c).abs()),
        })
        .collect();
    Ok(SpectrumResult {
        levels,
        grid: op.grid,
        descriptor: op.potential.descriptor(),
        sign: op.sign,
        sector: op.sector,
        extensions: 0,
        domain_converged: false,
        under_resolved: op.is_under_resolved(),
    })
}

/// Lowest levels together with unit eigenvectors.
pub fn eigen_lowest_with_vectors(
    op: &DiscretizedOperator,
    k: usize,
) -> Result<(SpectrumResult, Vec<Vec<f64>>)> {
    let spec = eigen_lowest(op, k)?;
    let vecs = op.matrix.eigenvectors(&spec.energies())?;
    Ok((spec, vecs))
}

/// Like [`eigen_lowest`], pushing the Dirichlet walls outward (same spacing) until the
/// ground energy moves by less than [`DOMAIN_TOLERANCE`]. Tabulated superpotentials
/// cannot be extended and are solved on the given grid.
pub fn eigen_lowest_converged(
    w: &SuperPotential,
    grid: &Grid,
    sign: PartnerSign,
    k: usize,
) -> Result<SpectrumResult> {
    let mut grid = *grid;
    let mut w = w.with_domain((grid.lo(), grid.hi())).unwrap_or_else(|_| w.clone());
    let mut spec = eigen_lowest(&discretize(&w, &grid, sign)?, k)?;
    if matches!(w.family(), Family::Table(_)) {
        return Ok(spec);
    }
    for ext in 1..=MAX_EXTENSIONS {
        let wider = grid.extended(0.25 * (grid.hi() - grid.lo()))?;
        let wider_w = w.with_domain((wider.lo(), wider.hi()))?;
        let next = eigen_lowest(&discretize(&wider_w, &wider, sign)?, k)?;
        let shift = (next.levels[0].energy - spec.levels[0].energy).abs();
        grid = wider;
        w = wider_w;
        spec = SpectrumResult { extensions: ext, ..next };
        if shift < DOMAIN_TOLERANCE {
            spec.domain_converged = true;
            return Ok(spec);
        }
    }
    log::warn!("ground energy still moving after {MAX_EXTENSIONS} domain extensions");
    Ok(spec)
}

/// One extended level `ε = ε_{q,n₁} − ε_{p,n₂}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedLevel {
    pub n1: usize,
    pub n2: usize,
    pub energy: f64,
}

/// All `ε_{q,n₁} − ε_{p,n₂}` with `n₁, n₂ < n_pairs`, sorted by `|ε|` (ties by index).
pub fn extended_levels(
    w_spec: &SpectrumResult,
    v_spec: &SpectrumResult,
    n_pairs: usize,
) -> Vec<ExtendedLevel> {
    let nq = n_pairs.min(w_spec.levels.len());
    let np = n_pairs.min(v_spec.levels.len());
    let mut out: Vec<ExtendedLevel> = (0..nq)
        .flat_map(|n1| {
            (0..np).map(move |n2| ExtendedLevel {
                n1,
                n2,
                energy: w_spec.levels[n1].energy - v_spec.levels[n2].energy,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        a.energy
            .abs()
            .total_cmp(&b.energy.abs())
            .then(a.n1.cmp(&b.n1))
            .then(a.n2.cmp(&b.n2))
    });
    out
}
