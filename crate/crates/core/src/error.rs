use thiserror::Error;

use crate::extended::PhaseState;

pub type Result<T> = std::result::Result<T, SusyError>;

#[derive(Debug, Clone, Error)]
pub enum SusyError {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate root near x = {x}: roots closer than {separation:e}")]
    DegenerateRoot { x: f64, separation: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}")]
    Quadrature { achieved: f64 },

    #[error("{sector}: expected exactly two simple vacua, found {found}")]
    Shape { sector: &'static str, found: usize },

    #[error("vacua mislabeled: superpotential action {delta:e} is negative")]
    Orientation { delta: f64 },

    #[error("normalization overflow in the {0} sector; shrink the domain")]
    Scaling(&'static str),

    #[error("wavefunction vanishes at the origin (|psi(0)| = {value:e})")]
    DegenerateNode { value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("step size underflow at t = {t} (h = {h:e}); system is stiff")]
    Stiffness { t: f64, h: f64 },

    #[error("trajectory left the domain at t = {t}")]
    DomainExit { t: f64, last: Box<PhaseState> },

    #[error("instanton did not reach its asymptotes (|W| = {residual:e} at the ends); increase tau_span")]
    Span { residual: f64 },

    #[error("eigensolver did not converge after {iterations} iterations ({} eigenvalues found)", partial.len())]
    NonConvergence { iterations: usize, partial: Vec<f64> },

    #[error("non-unitary representation: a(h)^2 = {a_sq:e} < 0 at h = {h}")]
    NonUnitary { h: f64, a_sq: f64 },

    #[error("not shape invariant at a = {a}: residual {residual:e}")]
    NotShapeInvariant { a: f64, residual: f64 },
}

impl SusyError {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SusyError::Quadrature { .. }
                | SusyError::Scaling(_)
                | SusyError::Stiffness { .. }
                | SusyError::DomainExit { .. }
                | SusyError::Span { .. }
                | SusyError::NonConvergence { .. }
                | SusyError::DegenerateNode { .. }
        )
    }
}
