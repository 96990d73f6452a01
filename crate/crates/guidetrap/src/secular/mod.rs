//! The full discretized secular problem: p-grids, operator blocks, the fixed point for σ,
//! the nested orthogonality solve, boundary traces and the reconstructed mode field.

mod field;
mod kernels;
mod pgrid;
mod solve;
mod system;
mod traces;

pub use field::{reconstruct_mode, FieldGrid, FieldSamples};
pub use kernels::Kernels;
pub use pgrid::{build_pgrid, embedded_real_pole, wavenumber, GridRoute, PGrid};
pub use solve::{embedded_orthogonality, solve_discrete_sigma, solve_embedded, OrthogonalityProbe, SpectralResult};
pub use system::{assemble_system, DiscretizedSystem, SecularValue};
pub use traces::{boundary_traces, default_trace_grid, ModeSpectrum, ModeTraces};

use serde::{Deserialize, Serialize};

/// Which spectral family is being solved for: below Λ₁ or embedded in [Λ₁, Λ₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    Discrete,
    Embedded,
}

/// Discretization and iteration controls. Lengths are in units of the half-width b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub n_nodes: usize,
    /// Gauss–Legendre nodes per real-axis panel.
    pub panel_nodes: usize,
    /// Nodes on each quarter of the arc lifted over the origin.
    pub bump_nodes: usize,
    /// Nodes on each semicircular indentation at ±p₁.
    pub indent_nodes: usize,
    /// Upper bound on tail panel length.
    pub tail_panel: f64,
    /// Tail truncation: the integrand is below e^(−decay_cutoff) at the end of the grid.
    pub decay_cutoff: f64,
    /// Relative tolerance of the σ iteration and the orthogonality residual.
    pub tol: f64,
    pub max_iter: usize,
    pub route: GridRoute,
    /// Multiplier on every p-panel rule (grid-refinement studies use 2).
    pub refine: usize,
    /// Radius of the indentations at ±p₁; `None` uses min(0.1, p₁/10).
    pub indent_radius: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            n_nodes: 128,
            panel_nodes: 16,
            bump_nodes: 24,
            indent_nodes: 24,
            tail_panel: 3.0,
            decay_cutoff: 38.0,
            tol: 1e-10,
            max_iter: 200,
            route: GridRoute::Lifted,
            refine: 1,
            indent_radius: None,
        }
    }
}

impl SolveOptions {
    /// Every grid doubled: θ nodes and every p-panel rule.
    pub fn doubled(&self) -> Self {
        SolveOptions { n_nodes: self.n_nodes * 2, refine: self.refine * 2, ..self.clone() }
    }
}
