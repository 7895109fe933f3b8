//! Lowest eigenpairs of sector Hamiltonians.
//!
//! [`lanczos_lowest`] is the workhorse: a restarted Lanczos iteration with full
//! reorthogonalization, run once per requested level against the previously
//! converged ("locked") vectors. Locking is what lets a single-vector Krylov
//! method resolve exactly degenerate levels inside one sector.
//!
//! [`dense_lowest`] is the full-diagonalization oracle for small sectors and
//! [`ground_state_scan`] combines per-sector solves into the global ground
//! state, its degeneracy, and a representative vector.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EigenError;
use crate::hamiltonian::{assemble, Model, SparseHamiltonian};
use crate::hilbert::{Spin, SpinBasis};
use crate::lattice::Lattice;

pub const DENSE_LIMIT: usize = 4000;

const PRIMARY_SEED: u64 = 0x5eed_0001_1a2b_3c4d;
const FALLBACK_SEED: u64 = 0x5eed_0002_9e37_79b9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Residual tolerance `||H v - E v||`.
    pub tol: f64,
    /// Absolute energy window for counting degenerate levels.
    pub tol_deg: f64,
    /// Krylov vectors kept per restart cycle.
    pub max_krylov: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            tol_deg: 1e-8,
            max_krylov: 100,
            max_restarts: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

fn start_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Classical Gram-Schmidt against `basis` and `locked`, repeated once when the
/// first pass removes most of the norm.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], locked: &[Vec<f64>]) {
    for _pass in 0..2 {
        let before = norm(w);
        let coeffs: Vec<f64> = locked.iter().chain(basis).map(|q| dot(q, w)).collect();
        for (q, c) in locked.iter().chain(basis).zip(&coeffs) {
            axpy(-c, q, w);
        }
        if norm(w) > 0.7 * before {
            break;
        }
    }
}

fn residual_norm(h: &SparseHamiltonian, x: &[f64], energy: f64) -> f64 {
    let mut hx = vec![0.0; x.len()];
    h.apply_into(x, &mut hx);
    axpy(-energy, x, &mut hx);
    norm(&hx)
}

/// Lowest eigenpair of the tridiagonal matrix `(alphas, betas)`.
fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let idx = (0..m)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("nonempty tridiagonal");
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).iter().copied().collect())
}

/// One Lanczos cycle from the unit vector `v0`; returns the lowest Ritz vector.
fn lanczos_cycle(
    h: &SparseHamiltonian,
    locked: &[Vec<f64>],
    v0: &[f64],
    opts: &SolverOptions,
) -> Vec<f64> {
    let dim = h.dimension();
    let available = dim - locked.len();
    let max_steps = opts.max_krylov.min(available).max(1);

    let mut basis: Vec<Vec<f64>> = vec![v0.to_vec()];
    let mut alphas = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut w = vec![0.0; dim];
    let mut ritz = vec![1.0];

    for j in 0..max_steps {
        h.apply_into(&basis[j], &mut w);
        let alpha = dot(&basis[j], &w);
        axpy(-alpha, &basis[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, &basis, locked);
        let beta = norm(&w);
        alphas.push(alpha);

        let scale_ref = alphas.iter().fold(1.0f64, |m, a| m.max(a.abs()));
        let breakdown = beta <= 1e-12 * scale_ref;
        let last = j + 1 == max_steps;
        if breakdown || last || j % 4 == 3 {
            let (_, y) = tridiagonal_lowest(&alphas, &betas);
            let estimate = beta * y[j].abs();
            ritz = y;
            if breakdown || last || estimate <= 0.1 * opts.tol {
                break;
            }
        }
        scale(&mut w, 1.0 / beta);
        basis.push(w.clone());
        betas.push(beta);
    }

    let mut x = vec![0.0; dim];
    for (q, c) in basis.iter().zip(&ritz) {
        axpy(*c, q, &mut x);
    }
    // Re-project: the Ritz vector must stay clear of the locked space.
    orthogonalize(&mut x, &[], locked);
    let n = norm(&x);
    scale(&mut x, 1.0 / n);
    x
}

/// Lowest eigenpair of `h` restricted to the complement of `locked`, or `None`
/// when that complement is empty.
fn lowest_in_complement(
    h: &SparseHamiltonian,
    locked: &[Vec<f64>],
    seed: u64,
    opts: &SolverOptions,
) -> Option<EigenResult> {
    let dim = h.dimension();
    if locked.len() >= dim {
        return None;
    }
    let mut v = start_vector(dim, seed);
    let n0 = norm(&v);
    orthogonalize(&mut v, &[], locked);
    let n = norm(&v);
    if n <= 1e-8 * n0 {
        return None;
    }
    scale(&mut v, 1.0 / n);

    let mut best: Option<EigenResult> = None;
    for _cycle in 0..=opts.max_restarts {
        let x = lanczos_cycle(h, locked, &v, opts);
        let mut hx = vec![0.0; dim];
        h.apply_into(&x, &mut hx);
        let energy = dot(&x, &hx);
        axpy(-energy, &x, &mut hx);
        let res = norm(&hx);
        let candidate = EigenResult {
            energy,
            vector: x,
            residual_norm: res,
            converged: res <= opts.tol,
        };
        if candidate.converged {
            return Some(candidate);
        }
        let stagnated = best
            .as_ref()
            .is_some_and(|b| res > 0.9 * b.residual_norm);
        if best.as_ref().is_none_or(|b| res < b.residual_norm) {
            v = candidate.vector.clone();
            best = Some(candidate);
        }
        if stagnated {
            break;
        }
    }
    best
}

fn next_level(
    h: &SparseHamiltonian,
    locked: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<Option<EigenResult>, EigenError> {
    let mut best_residual = f64::INFINITY;
    // New start vector for every level.
    let level = locked.len() as u64;
    for seed in [PRIMARY_SEED, FALLBACK_SEED] {
        let seed = seed.wrapping_add(level.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        match lowest_in_complement(h, locked, seed, opts) {
            None => return Ok(None),
            Some(r) if r.converged => return Ok(Some(r)),
            Some(r) => best_residual = best_residual.min(r.residual_norm),
        }
    }
    Err(EigenError::Convergence {
        best_residual,
        tol: opts.tol,
    })
}

/// Extend `found` (converged, orthonormal eigenpairs of `h`) to `k` levels.
pub fn lanczos_extend(
    h: &SparseHamiltonian,
    found: &mut Vec<EigenResult>,
    k: usize,
    opts: &SolverOptions,
) -> Result<(), EigenError> {
    let mut locked: Vec<Vec<f64>> = found.iter().map(|r| r.vector.clone()).collect();
    while found.len() < k {
        match next_level(h, &locked, opts)? {
            Some(r) => {
                locked.push(r.vector.clone());
                found.push(r);
            }
            None => break,
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(())
}

/// The `k` lowest eigenpairs (fewer if the sector is smaller), energies
/// nondecreasing.
pub fn lanczos_lowest(
    h: &SparseHamiltonian,
    k: usize,
    opts: &SolverOptions,
) -> Result<Vec<EigenResult>, EigenError> {
    if k == 0 {
        return Err(EigenError::NoLevelsRequested);
    }
    let mut found = Vec::with_capacity(k);
    lanczos_extend(h, &mut found, k, opts)?;
    Ok(found)
}

/// Full diagonalization; only for sectors up to [`DENSE_LIMIT`] states.
pub fn dense_lowest(h: &SparseHamiltonian, k: usize) -> Result<Vec<EigenResult>, EigenError> {
    if k == 0 {
        return Err(EigenError::NoLevelsRequested);
    }
    if h.dimension() > DENSE_LIMIT {
        return Err(EigenError::TooLarge {
            dimension: h.dimension(),
            limit: DENSE_LIMIT,
        });
    }
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dimension()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| {
            let vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let energy = eig.eigenvalues[i];
            let residual_norm = residual_norm(h, &vector, energy);
            EigenResult {
                energy,
                vector,
                residual_norm,
                converged: true,
            }
        })
        .collect())
}

/// Sizes of clusters of sorted `energies` whose consecutive gaps are `<= tol`.
pub fn degeneracy_count(energies: &[f64], tol: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, e) in energies.iter().enumerate() {
        if i > 0 && e - energies[i - 1] <= tol {
            *out.last_mut().expect("cluster started") += 1;
        } else {
            out.push(1);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct GroundStateReport {
    /// `2 Sz` (nonnegative sectors only) to the lowest energies computed there.
    pub per_sector_energies: BTreeMap<i32, Vec<f64>>,
    pub ground_energy: f64,
    /// `2 Sz` of the representative's sector.
    pub ground_twice_sz: i32,
    /// Number of states, over all sectors including negative Sz, within
    /// `tol_deg` of the ground energy.
    pub degeneracy: usize,
    /// Lowest state of the highest-Sz sector that attains the ground energy.
    pub representative: EigenResult,
    pub representative_basis: SpinBasis,
    pub degenerate_flag: bool,
}

impl GroundStateReport {
    pub fn ground_sz(&self) -> f64 {
        self.ground_twice_sz as f64 / 2.0
    }
}

/// The nonnegative-Sz sector bases of one lattice, built once and reused
/// across parameter sweeps.
#[derive(Clone, Debug)]
pub struct SectorSet {
    lattice: Lattice,
    bases: Vec<SpinBasis>,
}

impl SectorSet {
    pub fn new(lattice: &Lattice, spin: Spin) -> Result<Self, EigenError> {
        let bases = spin
            .nonnegative_sectors(lattice.num_sites())
            .into_iter()
            .map(|t| SpinBasis::new(lattice.num_sites(), spin, t))
            .collect::<Result<_, _>>()?;
        Ok(SectorSet {
            lattice: lattice.clone(),
            bases,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn bases(&self) -> &[SpinBasis] {
        &self.bases
    }

    pub fn scan(&self, model: &Model, opts: &SolverOptions) -> Result<GroundStateReport, EigenError> {
        let mut lowest: Vec<Vec<EigenResult>> = Vec::with_capacity(self.bases.len());
        for basis in &self.bases {
            let h = assemble(model, &self.lattice, basis)?;
            lowest.push(lanczos_lowest(&h, 1, opts)?);
        }
        let ground_energy = lowest
            .iter()
            .map(|r| r[0].energy)
            .fold(f64::INFINITY, f64::min);
        let window = ground_energy + opts.tol_deg;

        // Only sectors touching the ground level need more than one state.
        for (basis, levels) in self.bases.iter().zip(lowest.iter_mut()) {
            if levels[0].energy > window {
                continue;
            }
            let h = assemble(model, &self.lattice, basis)?;
            while levels.last().is_some_and(|r| r.energy <= window) && levels.len() < basis.dimension() {
                let want = levels.len() + 1;
                lanczos_extend(&h, levels, want, opts)?;
                if levels.len() < want {
                    break;
                }
            }
        }

        let mut degeneracy = 0;
        let mut rep_index = 0;
        for (idx, (basis, levels)) in self.bases.iter().zip(&lowest).enumerate() {
            let count = levels.iter().filter(|r| r.energy <= window).count();
            if count > 0 {
                rep_index = idx;
            }
            degeneracy += if basis.twice_sz() > 0 { 2 * count } else { count };
        }

        let per_sector_energies = self
            .bases
            .iter()
            .zip(&lowest)
            .map(|(b, levels)| (b.twice_sz(), levels.iter().map(|r| r.energy).collect()))
            .collect();
        let representative = lowest[rep_index][0].clone();
        let representative_basis = self.bases[rep_index].clone();
        Ok(GroundStateReport {
            per_sector_energies,
            ground_energy,
            ground_twice_sz: representative_basis.twice_sz(),
            degeneracy,
            representative,
            representative_basis,
            degenerate_flag: degeneracy > 1,
        })
    }

    /// The `k` lowest levels over every sector, negative Sz included via
    /// spin-flip mirroring, as `(energy, 2 Sz)` sorted by energy.
    pub fn lowest_levels(
        &self,
        model: &Model,
        k: usize,
        opts: &SolverOptions,
    ) -> Result<Vec<(f64, i32)>, EigenError> {
        let mut levels = Vec::new();
        for basis in &self.bases {
            let h = assemble(model, &self.lattice, basis)?;
            let t = basis.twice_sz();
            for r in lanczos_lowest(&h, k, opts)? {
                levels.push((r.energy, t));
                if t > 0 {
                    levels.push((r.energy, -t));
                }
            }
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        levels.truncate(k);
        Ok(levels)
    }
}

/// Scan every Sz sector of `model` on `lattice` for the global ground state.
pub fn ground_state_scan(
    model: &Model,
    lattice: &Lattice,
    opts: &SolverOptions,
) -> Result<GroundStateReport, EigenError> {
    SectorSet::new(lattice, model.spin())?.scan(model, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sector_h(model: &Model, n: usize, twice_sz: i32) -> SparseHamiltonian {
        let l = Lattice::chain(n).unwrap();
        let b = SpinBasis::new(n, model.spin(), twice_sz).unwrap();
        assemble(model, &l, &b).unwrap()
    }

    #[test]
    fn two_site_singlet() {
        let h = sector_h(&Model::XxzHalf { delta: 1.0 }, 2, 0);
        let r = lanczos_lowest(&h, 1, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(r[0].energy, -0.75, epsilon = 1e-12);
        let both = lanczos_lowest(&h, 5, &SolverOptions::default()).unwrap();
        assert_eq!(both.len(), 2);
    }

    #[test]
    fn dense_on_pauli_x() {
        // [[0,1],[1,0]] is the N = 2 XX model in the Sz = 0 sector, times 2.
        let h = sector_h(&Model::XxzHalf { delta: 0.0 }, 2, 0);
        assert_abs_diff_eq!(h.entry(0, 1), 0.5);
        let r = dense_lowest(&h, 2).unwrap();
        assert_abs_diff_eq!(2.0 * r[0].energy, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(2.0 * r[1].energy, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn dense_refuses_large() {
        let h = sector_h(&Model::XxzHalf { delta: 1.0 }, 16, 0);
        assert!(matches!(dense_lowest(&h, 1), Err(EigenError::TooLarge { .. })));
    }

    #[test]
    fn lanczos_matches_dense_ten_sites() {
        let h = sector_h(&Model::XxzHalf { delta: 1.0 }, 10, 0);
        let opts = SolverOptions::default();
        let l = lanczos_lowest(&h, 4, &opts).unwrap();
        let d = dense_lowest(&h, 4).unwrap();
        for (a, b) in l.iter().zip(&d) {
            assert_abs_diff_eq!(a.energy, b.energy, epsilon = 1e-10);
            assert!(a.energy >= b.energy - 1e-12);
            assert!(a.residual_norm <= opts.tol);
            assert_abs_diff_eq!(norm(&a.vector), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lanczos_is_bitwise_reproducible() {
        let h = sector_h(&Model::XxzOne { delta: 1.3, beta: 0.0 }, 8, 0);
        let opts = SolverOptions::default();
        let a = lanczos_lowest(&h, 2, &opts).unwrap();
        let b = lanczos_lowest(&h, 2, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degeneracy_clusters() {
        assert_eq!(degeneracy_count(&[-1.0, -1.0 + 1e-12, 0.0], 1e-9), vec![2, 1]);
        assert_eq!(degeneracy_count(&[0.0], 1e-9), vec![1]);
        assert!(degeneracy_count(&[], 1e-9).is_empty());
    }

    #[test]
    fn blbq_su3_point_has_eightfold_first_excited_level() {
        let l = Lattice::chain(6).unwrap();
        let sectors = SectorSet::new(&l, Spin::One).unwrap();
        let opts = SolverOptions::default();
        let levels = sectors
            .lowest_levels(&Model::Blbq { theta: 1.5 * PI }, 12, &opts)
            .unwrap();
        let energies: Vec<f64> = levels.iter().map(|l| l.0).collect();
        let mult = degeneracy_count(&energies, opts.tol_deg);
        assert_eq!(&mult[..2], &[1, 8]);
    }

    #[test]
    fn ferromagnetic_xxz_is_doubly_degenerate() {
        let l = Lattice::chain(8).unwrap();
        let r = ground_state_scan(&Model::XxzHalf { delta: -2.0 }, &l, &SolverOptions::default()).unwrap();
        assert_eq!(r.degeneracy, 2);
        assert_eq!(r.ground_twice_sz, 8);
        assert_abs_diff_eq!(r.ground_energy, 8.0 * -2.0 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn isotropic_ferromagnet_has_full_multiplet() {
        // At delta = -1 the sublattice rotation maps the chain onto the
        // ferromagnetic Heisenberg model, ground multiplet S = N/2.
        let l = Lattice::chain(8).unwrap();
        let r = ground_state_scan(&Model::XxzHalf { delta: -1.0 }, &l, &SolverOptions::default()).unwrap();
        assert_eq!(r.degeneracy, 9);
        assert_eq!(r.ground_twice_sz, 8);
        assert!(r.degenerate_flag);
    }

    #[test]
    fn antiferromagnet_scan_against_dense_sectors() {
        let l = Lattice::chain(8).unwrap();
        let model = Model::XxzHalf { delta: 0.5 };
        let r = ground_state_scan(&model, &l, &SolverOptions::default()).unwrap();
        let mut oracle = Vec::new();
        for t in Spin::Half.all_sectors(8) {
            oracle.extend(dense_lowest(&sector_h(&model, 8, t), 300).unwrap().into_iter().map(|x| x.energy));
        }
        oracle.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(r.ground_energy, oracle[0], epsilon = 1e-10);
        assert_eq!(r.degeneracy, 1);
        assert_eq!(r.ground_sz(), 0.0);
        assert!(oracle[1] - oracle[0] > 1e-3);
    }

    #[test]
    fn blbq_ferromagnetic_region_flags_degeneracy() {
        let l = Lattice::chain(6).unwrap();
        let r = ground_state_scan(&Model::Blbq { theta: PI }, &l, &SolverOptions::default()).unwrap();
        assert!(r.degenerate_flag);
        assert_eq!(r.degeneracy, 13);
        assert_eq!(r.ground_twice_sz, 12);
    }

    #[test]
    fn degenerate_eigenspaces_are_fully_resolved() {
        // Pure biquadratic L=6 chain: dense counts 48 states at the bottom of 2Sz=2.
        let l = Lattice::chain(6).unwrap();
        let model = Model::Blbq { theta: PI / 2.0 };
        let h = assemble(&model, &l, &SpinBasis::new(6, Spin::One, 2).unwrap()).unwrap();
        let dense: Vec<f64> = dense_lowest(&h, 60).unwrap().iter().map(|r| r.energy).collect();
        let lanczos: Vec<f64> = lanczos_lowest(&h, 60, &SolverOptions::default())
            .unwrap()
            .iter()
            .map(|r| r.energy)
            .collect();
        assert_eq!(degeneracy_count(&dense, 1e-8)[0], 48);
        for (a, b) in dense.iter().zip(&lanczos) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }
}
