use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid lattice size: {0}")]
    InvalidSize(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("total Sz = {twice_sz}/2 is unreachable with {num_sites} sites of spin {spin}")]
    InvalidSector {
        num_sites: usize,
        spin: &'static str,
        twice_sz: i32,
    },
    #[error("{num_sites} sites do not fit the 64-bit configuration encoding")]
    TooManySites { num_sites: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("model {model} needs spin {expected} sites, basis has spin {found}")]
    ModelMismatch {
        model: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("basis has {basis} sites but the lattice has {lattice}")]
    SiteCountMismatch { basis: usize, lattice: usize },
    #[error("vector length {found} does not match matrix dimension {expected}")]
    Dimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("Lanczos did not converge: best residual {best_residual:.3e} > tol {tol:.3e}")]
    Convergence { best_residual: f64, tol: f64 },
    #[error("dense diagonalization limited to dimension {limit}, got {dimension}")]
    TooLarge { dimension: usize, limit: usize },
    #[error("requested zero eigenpairs")]
    NoLevelsRequested,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("site pair ({0}, {1}) is not a pair of distinct in-range sites")]
    InvalidPair(usize, usize),
    #[error("state length {found} does not match basis dimension {expected}")]
    StateLength { expected: usize, found: usize },
    #[error("entry ({row}, {col}) = {value:.3e} violates the X pattern (tol {tol:.1e})")]
    PatternViolation {
        row: usize,
        col: usize,
        value: f64,
        tol: f64,
    },
    #[error("matrix has eigenvalue {0:.3e} and is not a density matrix")]
    NotADensityMatrix(f64),
    #[error("operation requires two qubits (local dimension 2), got local dimension {0}")]
    UnsupportedDimension(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BetheError {
    #[error("Bethe solver supports -1 < delta <= 1, got {0}")]
    UnsupportedRegime(f64),
    #[error("chain length must be even and >= 4, got {0}")]
    InvalidSize(usize),
    #[error("Newton iteration failed at delta = {delta}: residual {residual:.3e}")]
    Convergence { delta: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("grid needs at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("x grid is not uniform")]
    NonUniformGrid,
    #[error("extremum lies on the grid edge at x = {0}")]
    EdgeExtremum(f64),
    #[error("insufficient data: need at least 3 sizes, got {0}")]
    InsufficientData(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Crate-wide error for operations that chain several stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Bethe(#[from] BetheError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("no acceptance criterion {0}; valid ids are 1 to 10")]
    UnknownCriterion(u8),
    #[error("sweep point failed: {0}")]
    SweepPoint(String),
}

impl Error {
    /// True for numerical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigen(EigenError::Convergence { .. })
                | Error::Bethe(BetheError::Convergence { .. })
                | Error::SweepPoint(_)
        )
    }
}
