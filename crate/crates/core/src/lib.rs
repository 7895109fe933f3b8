//! Exact diagonalization of periodic spin-1/2 and spin-1 lattices with
//! two-site entanglement measures.
//!
//! The pipeline is lattice -> Sz sector basis -> sparse Hamiltonian ->
//! Lanczos ground state -> two-site reduced density matrix -> entropy and
//! concurrence. The [`bethe`] module supplies independent finite-size oracles
//! for the spin-1/2 chain and [`analysis`] turns parameter sweeps into
//! extremum positions and finite-size extrapolations.

pub mod analysis;
pub mod bethe;
pub mod checks;
pub mod eigensolver;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod lattice;

pub use analysis::{
    derivative_minimum_scaling, extrapolate, finite_difference, locate_extremum, sweep, FitForm,
    Grid, ScalingFit, SweepRow, SweepSpec, SweepTable,
};
pub use eigensolver::{
    degeneracy_count, dense_lowest, ground_state_scan, lanczos_lowest, EigenResult,
    GroundStateReport, SectorSet, SolverOptions,
};
pub use entanglement::{
    bond_correlators, concurrence, entropy_closed_form, two_site_rdm, von_neumann_entropy,
    xform_extract, BondCorrelators, TwoSiteRdm, XFormElements,
};
pub use error::Error;
pub use hamiltonian::{assemble, Family, Model, SparseHamiltonian};
pub use hilbert::{Spin, SpinBasis};
pub use lattice::{Geometry, Lattice};
