use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// The output tail leaks past the left edge of the grid.
    #[error(
        "grid too short on the left: {tail_mass:.3e} of the norm lies beyond x = {edge}; \
         extend the grid by at least {required_extension:.3} (to x_min = {suggested_x_min:.3})"
    )]
    InsufficientExtent {
        edge: f64,
        tail_mass: f64,
        required_extension: f64,
        suggested_x_min: f64,
    },

    #[error("transform window [{start}, {end}] is not inside the grid [{grid_start}, {grid_end}]")]
    WindowOutsideGrid {
        start: f64,
        end: f64,
        grid_start: f64,
        grid_end: f64,
    },

    #[error("transform window edge {edge} does not fall on a cell boundary (dx = {dx})")]
    WindowMisaligned { edge: f64, dx: f64 },

    #[error("two-photon amplitude is not exchange symmetric (max |psi(i,j) - psi(j,i)| = {max_deviation:.3e})")]
    NotExchangeSymmetric { max_deviation: f64 },

    /// The atom at r = 0 must sit on a cell boundary of the propagation grid.
    #[error(
        "atom position r = 0 is not on a cell boundary of the grid starting at {r_min} (dx = {dx})"
    )]
    AtomOffBoundary { r_min: f64, dx: f64 },

    #[error(
        "initial field has norm {mass:.3e} at r >= 0; it must start entirely on the incoming side"
    )]
    SupportOverlapsAtom { mass: f64 },

    #[error(
        "initial excitation amplitude must be zero for this evolution (|psi_E|^2 = {mass:.3e})"
    )]
    InitialExcitation { mass: f64 },

    #[error("amplitude {lost:.3e} left the grid at t = {t}; enlarge r_max")]
    PulseExitedGrid { t: f64, lost: f64 },

    #[error("cannot evolve backwards: t_end = {t_end} < t = {t}")]
    BackwardsInTime { t: f64, t_end: f64 },

    #[error("residual atomic excitation {residual:.3e} exceeds tolerance {tolerance:.1e}; evolve longer before extracting")]
    ResidualExcitation { residual: f64, tolerance: f64 },

    #[error("coherent amplitude too large for two-photon truncation: |alpha|^2 = {alpha_sqr} (limit {limit})")]
    AmplitudeTooLarge { alpha_sqr: f64, limit: f64 },

    #[error(
        "one-photon residual {residual:.3e} after displacement exceeds bound {bound:.3e}; \
         the coherent part is not |-alpha> in the reference mode"
    )]
    ModeMismatch { residual: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
