//! Two-site reduced density matrices and the measures built on them.
//!
//! RDM basis order is the tensor order (site `i` slow, site `j` fast) over
//! local Sz descending: `|up up>, |up dn>, |dn up>, |dn dn>` for spin-1/2 and
//! `+1, 0, -1` per site for spin-1.
//!
//! For a spin-1/2 state with definite total Sz the RDM has the X shape
//!
//! ```text
//! u+  0   0   0
//! 0   w1  z   0
//! 0   z   w2  0
//! 0   0   0   u-
//! ```
//!
//! with `u± = 1/4 ± <Sz_i + Sz_j>/2 + <Sz_i Sz_j>`, `w1 + w2 = 1/2 - 2 <Sz_i Sz_j>` and
//! `z = <Sx_i Sx_j> + <Sy_i Sy_j>`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::EntanglementError;
use crate::hilbert::SpinBasis;

pub const DEFAULT_TOL_PATTERN: f64 = 1e-8;

/// Eigenvalues below this are treated as round-off and clamped to zero.
const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoSiteRdm {
    pub local_dim: usize,
    pub matrix: DMatrix<f64>,
    pub site_pair: (usize, usize),
}

impl TwoSiteRdm {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Trace, symmetry and spectrum checks of a valid two-site density matrix.
    pub fn validate(&self) -> Result<(), String> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(format!("trace {tr}"));
        }
        let asym = self.max_asymmetry();
        if asym > 1e-12 {
            return Err(format!("asymmetry {asym:e}"));
        }
        let e = self.eigenvalues();
        if e[0] < -1e-10 || e[e.len() - 1] > 1.0 + 1e-10 {
            return Err(format!("eigenvalues outside [0, 1]: {:?}", (e[0], e[e.len() - 1])));
        }
        Ok(())
    }
}

/// RDM index of local codes `(a, b)`: local Sz descending.
#[inline]
fn rdm_index(d: usize, a: usize, b: usize) -> usize {
    (d - 1 - a) * d + (d - 1 - b)
}

fn check_inputs(state: &[f64], basis: &SpinBasis, i: usize, j: usize) -> Result<(), EntanglementError> {
    let n = basis.num_sites();
    if i == j || i >= n || j >= n {
        return Err(EntanglementError::InvalidPair(i, j));
    }
    if state.len() != basis.dimension() {
        return Err(EntanglementError::StateLength {
            expected: basis.dimension(),
            found: state.len(),
        });
    }
    Ok(())
}

/// Partial trace of `|state><state|` over every site except `i` and `j`.
pub fn two_site_rdm(
    state: &[f64],
    basis: &SpinBasis,
    i: usize,
    j: usize,
) -> Result<TwoSiteRdm, EntanglementError> {
    check_inputs(state, basis, i, j)?;
    let spin = basis.spin();
    let d = spin.local_dim();
    let mut rho = DMatrix::zeros(d * d, d * d);

    for (&config, &amp) in basis.states().iter().zip(state) {
        if amp == 0.0 {
            continue;
        }
        let a = basis.code(config, i);
        let b = basis.code(config, j);
        let pair_m = spin.twice_m(a) + spin.twice_m(b);
        for a2 in 0..d {
            for b2 in 0..d {
                if spin.twice_m(a2) + spin.twice_m(b2) != pair_m {
                    continue;
                }
                let other = basis.with_code(basis.with_code(config, i, a2), j, b2);
                if let Some(k) = basis.state_index(other) {
                    rho[(rdm_index(d, a, b), rdm_index(d, a2, b2))] += amp * state[k];
                }
            }
        }
    }
    Ok(TwoSiteRdm {
        local_dim: d,
        matrix: rho,
        site_pair: (i, j),
    })
}

/// The nonzero entries of an X-shaped spin-1/2 RDM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XFormElements {
    pub u_plus: f64,
    pub u_minus: f64,
    pub w1: f64,
    pub w2: f64,
    pub z: f64,
}

impl XFormElements {
    /// Elements implied by bond correlators.
    pub fn from_correlators(c: &BondCorrelators) -> Self {
        let mz = 0.5 * (c.mz_i + c.mz_j);
        let dz = 0.5 * (c.mz_i - c.mz_j);
        XFormElements {
            u_plus: 0.25 + mz + c.czz,
            u_minus: 0.25 - mz + c.czz,
            w1: 0.25 + dz - c.czz,
            w2: 0.25 - dz - c.czz,
            z: c.cxx + c.cyy,
        }
    }

    /// Eigenvalues `(lambda+, lambda-)` of the central `[[w1, z], [z, w2]]`
    /// block; `w1 ± |z|` when `w1 = w2`.
    pub fn central_eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.w1 + self.w2);
        let half_gap = 0.5 * (self.w1 - self.w2);
        let r = half_gap.hypot(self.z);
        (mean + r, mean - r)
    }

    pub fn to_rdm(&self) -> TwoSiteRdm {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = self.u_plus;
        m[(1, 1)] = self.w1;
        m[(2, 2)] = self.w2;
        m[(1, 2)] = self.z;
        m[(2, 1)] = self.z;
        m[(3, 3)] = self.u_minus;
        TwoSiteRdm {
            local_dim: 2,
            matrix: m,
            site_pair: (0, 1),
        }
    }
}

/// Read the X-form entries, rejecting any off-pattern entry above `tol_pattern`.
pub fn xform_extract(rdm: &TwoSiteRdm, tol_pattern: f64) -> Result<XFormElements, EntanglementError> {
    if rdm.local_dim != 2 {
        return Err(EntanglementError::UnsupportedDimension(rdm.local_dim));
    }
    let m = &rdm.matrix;
    let on_pattern = |r: usize, c: usize| r == c || (r, c) == (1, 2) || (r, c) == (2, 1);
    for r in 0..4 {
        for c in 0..4 {
            if !on_pattern(r, c) && m[(r, c)].abs() > tol_pattern {
                return Err(EntanglementError::PatternViolation {
                    row: r,
                    col: c,
                    value: m[(r, c)],
                    tol: tol_pattern,
                });
            }
        }
    }
    if (m[(1, 2)] - m[(2, 1)]).abs() > tol_pattern {
        return Err(EntanglementError::PatternViolation {
            row: 2,
            col: 1,
            value: m[(2, 1)] - m[(1, 2)],
            tol: tol_pattern,
        });
    }
    Ok(XFormElements {
        u_plus: m[(0, 0)],
        u_minus: m[(3, 3)],
        w1: m[(1, 1)],
        w2: m[(2, 2)],
        z: 0.5 * (m[(1, 2)] + m[(2, 1)]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondCorrelators {
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
    pub mz_i: f64,
    pub mz_j: f64,
}

/// Ladder-operator matrix element: `S+` (`raise = true`) or `S-` acting on
/// local code `c`, as `(new_code, amplitude)`.
fn ladder(twice_s: i32, c: usize, raise: bool) -> Option<(usize, f64)> {
    let s = twice_s as f64 / 2.0;
    let m = c as f64 - s;
    let d = twice_s as usize + 1;
    if raise {
        (c + 1 < d).then(|| (c + 1, (s * (s + 1.0) - m * (m + 1.0)).sqrt()))
    } else {
        (c > 0).then(|| (c - 1, (s * (s + 1.0) - m * (m - 1.0)).sqrt()))
    }
}

/// `<state| L_i L'_j |state>` for ladder operators `L, L'`.
fn ladder_expectation(state: &[f64], basis: &SpinBasis, i: usize, j: usize, raise_i: bool, raise_j: bool) -> f64 {
    let twice_s = basis.spin().twice();
    let mut acc = 0.0;
    for (&config, &amp) in basis.states().iter().zip(state) {
        if amp == 0.0 {
            continue;
        }
        let Some((ci, ai)) = ladder(twice_s, basis.code(config, i), raise_i) else {
            continue;
        };
        let Some((cj, aj)) = ladder(twice_s, basis.code(config, j), raise_j) else {
            continue;
        };
        let target = basis.with_code(basis.with_code(config, i, ci), j, cj);
        if let Some(k) = basis.state_index(target) {
            acc += state[k] * ai * aj * amp;
        }
    }
    acc
}

/// Bond correlators by direct operator application inside the sector.
pub fn bond_correlators(
    state: &[f64],
    basis: &SpinBasis,
    bond: (usize, usize),
) -> Result<BondCorrelators, EntanglementError> {
    let (i, j) = bond;
    check_inputs(state, basis, i, j)?;
    let spin = basis.spin();
    let (mut czz, mut mz_i, mut mz_j) = (0.0, 0.0, 0.0);
    for (&config, &amp) in basis.states().iter().zip(state) {
        let p = amp * amp;
        let mi = spin.twice_m(basis.code(config, i)) as f64 / 2.0;
        let mj = spin.twice_m(basis.code(config, j)) as f64 / 2.0;
        czz += p * mi * mj;
        mz_i += p * mi;
        mz_j += p * mj;
    }
    let pm = ladder_expectation(state, basis, i, j, true, false);
    let mp = ladder_expectation(state, basis, i, j, false, true);
    let pp = ladder_expectation(state, basis, i, j, true, true);
    let mm = ladder_expectation(state, basis, i, j, false, false);
    Ok(BondCorrelators {
        cxx: 0.25 * (pm + mp + pp + mm),
        cyy: 0.25 * (pm + mp - pp - mm),
        czz,
        mz_i,
        mz_j,
    })
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy (bits) from the full eigendecomposition.
pub fn von_neumann_entropy(rdm: &TwoSiteRdm) -> Result<f64, EntanglementError> {
    let e = rdm.eigenvalues();
    if e[0] < NEGATIVE_EIGENVALUE_LIMIT {
        return Err(EntanglementError::NotADensityMatrix(e[0]));
    }
    Ok(shannon_bits(e.into_iter().map(|p| p.max(0.0))))
}

/// Entropy of an X-form RDM from its entries alone.
pub fn entropy_closed_form(x: &XFormElements) -> f64 {
    let (lp, lm) = x.central_eigenvalues();
    shannon_bits([x.u_plus, x.u_minus, lp.max(0.0), lm.max(0.0)])
}

/// Wootters concurrence of a two-qubit RDM.
pub fn concurrence(rdm: &TwoSiteRdm) -> Result<f64, EntanglementError> {
    if rdm.local_dim != 2 {
        return Err(EntanglementError::UnsupportedDimension(rdm.local_dim));
    }
    let eig = rdm.matrix.clone().symmetric_eigen();
    if eig.eigenvalues.min() < NEGATIVE_EIGENVALUE_LIMIT {
        return Err(EntanglementError::NotADensityMatrix(eig.eigenvalues.min()));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    let sqrt_rho = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();

    // sigma_y (x) sigma_y is real in this basis; rho is real so rho* = rho.
    let mut flip = DMatrix::zeros(4, 4);
    flip[(0, 3)] = -1.0;
    flip[(3, 0)] = -1.0;
    flip[(1, 2)] = 1.0;
    flip[(2, 1)] = 1.0;
    let rho_tilde = &flip * &rdm.matrix * &flip;
    let r = &sqrt_rho * rho_tilde * &sqrt_rho;
    let r = (&r + r.transpose()) * 0.5;
    let mut lambdas: Vec<f64> = r
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Concurrence of an X-form RDM: `2 max(0, |z| - sqrt(u+ u-))`. The corner
/// coherence `rho[0][3]` vanishes in a definite-Sz state, so the second
/// X-state branch never contributes.
pub fn concurrence_xform(x: &XFormElements) -> f64 {
    (2.0 * (x.z.abs() - (x.u_plus * x.u_minus).max(0.0).sqrt())).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{dense_lowest, lanczos_lowest, SolverOptions};
    use crate::hamiltonian::{assemble, Model};
    use crate::hilbert::Spin;
    use crate::lattice::Lattice;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ground(model: Model, n: usize, twice_sz: i32) -> (Vec<f64>, SpinBasis) {
        let l = Lattice::chain(n).unwrap();
        let b = SpinBasis::new(n, model.spin(), twice_sz).unwrap();
        let h = assemble(&model, &l, &b).unwrap();
        let r = lanczos_lowest(&h, 1, &SolverOptions::default()).unwrap();
        (r[0].vector.clone(), b)
    }

    /// Partial trace over a vector on the full (2S+1)^N product space,
    /// index = sum code_s d^s, written independently of the sector machinery.
    fn brute_force_rdm(full: &[f64], n: usize, d: usize, i: usize, j: usize) -> DMatrix<f64> {
        let mut rho = DMatrix::zeros(d * d, d * d);
        let digit = |idx: usize, s: usize| (idx / d.pow(s as u32)) % d;
        for x in 0..full.len() {
            for y in 0..full.len() {
                let same_rest = (0..n).filter(|&s| s != i && s != j).all(|s| digit(x, s) == digit(y, s));
                if !same_rest {
                    continue;
                }
                let r = (d - 1 - digit(x, i)) * d + (d - 1 - digit(x, j));
                let c = (d - 1 - digit(y, i)) * d + (d - 1 - digit(y, j));
                rho[(r, c)] += full[x] * full[y];
            }
        }
        rho
    }

    fn embed(state: &[f64], basis: &SpinBasis) -> Vec<f64> {
        let n = basis.num_sites();
        let d = basis.spin().local_dim();
        let mut full = vec![0.0; d.pow(n as u32)];
        for (&config, &amp) in basis.states().iter().zip(state) {
            let idx: usize = (0..n).map(|s| basis.code(config, s) * d.pow(s as u32)).sum();
            full[idx] = amp;
        }
        full
    }

    #[test]
    fn two_site_singlet_is_pure() {
        let (psi, b) = ground(Model::XxzHalf { delta: 1.0 }, 2, 0);
        let rho = two_site_rdm(&psi, &b, 0, 1).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 0.0, epsilon = 1e-12);
        let x = xform_extract(&rho, DEFAULT_TOL_PATTERN).unwrap();
        assert_abs_diff_eq!(x.z, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn polarized_state_is_product() {
        for (spin, n) in [(Spin::Half, 6), (Spin::One, 4)] {
            let t = spin.twice() * n as i32;
            let b = SpinBasis::new(n, spin, t).unwrap();
            let rho = two_site_rdm(&[1.0], &b, 1, 3).unwrap();
            assert_eq!(rho.matrix[(0, 0)], 1.0);
            assert_eq!(rho.matrix.iter().filter(|&&x| x != 0.0).count(), 1);
            assert_eq!(von_neumann_entropy(&rho).unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_brute_force_partial_trace() {
        let (psi, b) = ground(Model::XxzHalf { delta: 1.0 }, 4, 0);
        let full = embed(&psi, &b);
        let oracle = brute_force_rdm(&full, 4, 2, 0, 1);
        let rho = two_site_rdm(&psi, &b, 0, 1).unwrap();
        assert!((&rho.matrix - &oracle).amax() < 1e-12);

        let (psi, b) = ground(Model::Blbq { theta: 0.3 }, 4, 0);
        let oracle = brute_force_rdm(&embed(&psi, &b), 4, 3, 1, 3);
        let rho = two_site_rdm(&psi, &b, 1, 3).unwrap();
        assert!((&rho.matrix - &oracle).amax() < 1e-12);
    }

    #[test]
    fn superposition_of_orthogonal_states() {
        let l = Lattice::chain(6).unwrap();
        let b = SpinBasis::new(6, Spin::Half, 0).unwrap();
        let h = assemble(&Model::XxzHalf { delta: 0.4 }, &l, &b).unwrap();
        let levels = dense_lowest(&h, 2).unwrap();
        let (a, c) = (0.6, 0.8);
        let mix: Vec<f64> = levels[0]
            .vector
            .iter()
            .zip(&levels[1].vector)
            .map(|(x, y)| a * x + c * y)
            .collect();
        let rho = two_site_rdm(&mix, &b, 0, 2).unwrap();
        let oracle = brute_force_rdm(&embed(&mix, &b), 6, 2, 0, 2);
        assert!((&rho.matrix - &oracle).amax() < 1e-12);
        // Diagonal blocks are linear in the weights; cross terms fill the rest.
        let r0 = two_site_rdm(&levels[0].vector, &b, 0, 2).unwrap().matrix;
        let r1 = two_site_rdm(&levels[1].vector, &b, 0, 2).unwrap().matrix;
        let cross = &rho.matrix - (r0 * (a * a) + r1 * (c * c));
        let oracle_cross = brute_force_rdm(&embed(&mix, &b), 6, 2, 0, 2)
            - brute_force_rdm(&embed(&levels[0].vector, &b), 6, 2, 0, 2) * (a * a)
            - brute_force_rdm(&embed(&levels[1].vector, &b), 6, 2, 0, 2) * (c * c);
        assert!((cross - oracle_cross).amax() < 1e-12);
    }

    #[test]
    fn rejects_bad_pairs() {
        let b = SpinBasis::new(4, Spin::Half, 0).unwrap();
        let psi = vec![0.0; b.dimension()];
        assert!(matches!(two_site_rdm(&psi, &b, 2, 2), Err(EntanglementError::InvalidPair(2, 2))));
        assert!(two_site_rdm(&psi, &b, 0, 4).is_err());
        assert!(two_site_rdm(&psi[1..], &b, 0, 1).is_err());
    }

    #[test]
    fn xform_of_maximally_mixed() {
        let rho = TwoSiteRdm {
            local_dim: 2,
            matrix: DMatrix::identity(4, 4) * 0.25,
            site_pair: (0, 1),
        };
        let x = xform_extract(&rho, DEFAULT_TOL_PATTERN).unwrap();
        assert_eq!((x.u_plus, x.u_minus, x.w1, x.w2, x.z), (0.25, 0.25, 0.25, 0.25, 0.0));
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_closed_form(&x), 2.0, epsilon = 1e-15);
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn xform_pattern_violation() {
        let mut m = DMatrix::identity(4, 4) * 0.25;
        m[(0, 3)] = 0.1;
        m[(3, 0)] = 0.1;
        let rho = TwoSiteRdm { local_dim: 2, matrix: m, site_pair: (0, 1) };
        assert!(matches!(
            xform_extract(&rho, DEFAULT_TOL_PATTERN),
            Err(EntanglementError::PatternViolation { row: 0, col: 3, .. })
        ));
    }

    #[test]
    fn neel_product_correlators() {
        let b = SpinBasis::new(6, Spin::Half, 0).unwrap();
        let neel = b.encode(&[1, 0, 1, 0, 1, 0]);
        let mut psi = vec![0.0; b.dimension()];
        psi[b.state_index(neel).unwrap()] = 1.0;
        let c = bond_correlators(&psi, &b, (0, 1)).unwrap();
        assert_eq!((c.czz, c.cxx, c.cyy), (-0.25, 0.0, 0.0));
        assert_eq!((c.mz_i, c.mz_j), (0.5, -0.5));
    }

    #[test]
    fn heisenberg_ring_is_translation_invariant() {
        let n = 10;
        let (psi, b) = ground(Model::XxzHalf { delta: 1.0 }, n, 0);
        let l = Lattice::chain(n).unwrap();
        let first = bond_correlators(&psi, &b, l.bonds()[0]).unwrap();
        let e0 = von_neumann_entropy(&two_site_rdm(&psi, &b, 0, 1).unwrap()).unwrap();
        for &bond in l.bonds() {
            let c = bond_correlators(&psi, &b, bond).unwrap();
            assert_abs_diff_eq!(c.czz, first.czz, epsilon = 1e-10);
            assert_abs_diff_eq!(c.cxx, first.cxx, epsilon = 1e-10);
            assert_abs_diff_eq!(c.cxx, c.czz, epsilon = 1e-9);
            let rho = two_site_rdm(&psi, &b, bond.0, bond.1).unwrap();
            assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), e0, epsilon = 1e-10);
        }
    }

    #[test]
    fn xform_agrees_with_correlators_at_twelve_sites() {
        let (psi, b) = ground(Model::XxzHalf { delta: 0.5 }, 12, 0);
        let rho = two_site_rdm(&psi, &b, 0, 1).unwrap();
        rho.validate().unwrap();
        let x = xform_extract(&rho, DEFAULT_TOL_PATTERN).unwrap();
        let c = bond_correlators(&psi, &b, (0, 1)).unwrap();
        assert_abs_diff_eq!(c.mz_i, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.cxx, c.cyy, epsilon = 1e-10);
        assert_abs_diff_eq!(x.u_plus, 0.25 + c.czz, epsilon = 1e-9);
        assert_abs_diff_eq!(x.u_minus, 0.25 + c.czz, epsilon = 1e-9);
        assert_abs_diff_eq!(x.w1, 0.25 - c.czz, epsilon = 1e-9);
        assert_abs_diff_eq!(x.w2, 0.25 - c.czz, epsilon = 1e-9);
        assert_abs_diff_eq!(x.z, c.cxx + c.cyy, epsilon = 1e-9);
        assert_abs_diff_eq!(entropy_closed_form(&x), von_neumann_entropy(&rho).unwrap(), epsilon = 1e-10);
        assert_abs_diff_eq!(concurrence_xform(&x), concurrence(&rho).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn entropy_invariant_under_site_swap() {
        let (psi, b) = ground(Model::XxzOne { delta: 1.4, beta: 0.2 }, 6, 0);
        let a = von_neumann_entropy(&two_site_rdm(&psi, &b, 2, 3).unwrap()).unwrap();
        let c = von_neumann_entropy(&two_site_rdm(&psi, &b, 3, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(a, c, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_bell_and_limits() {
        for z in [0.5, -0.5] {
            let bell = XFormElements { u_plus: 0.0, u_minus: 0.0, w1: 0.5, w2: 0.5, z };
            assert_abs_diff_eq!(entropy_closed_form(&bell), 0.0, epsilon = 1e-15);
        }
        // Heisenberg-limit elements built from (1/4 - ln 2)/3 per component.
        let c = (0.25 - std::f64::consts::LN_2) / 3.0;
        let x = XFormElements::from_correlators(&BondCorrelators { cxx: c, cyy: c, czz: c, mz_i: 0.0, mz_j: 0.0 });
        assert_abs_diff_eq!(x.u_plus, 0.102284, epsilon = 5e-7);
        assert_abs_diff_eq!(x.w1, 0.397716, epsilon = 5e-7);
        assert_abs_diff_eq!(x.z, -0.295431, epsilon = 5e-7);
        assert_abs_diff_eq!(entropy_closed_form(&x), 1.37586, epsilon = 5e-6);
        assert_abs_diff_eq!(concurrence_xform(&x), 2.0 * std::f64::consts::LN_2 - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence(&x.to_rdm()).unwrap(), 0.386294, epsilon = 5e-7);
    }

    #[test]
    fn concurrence_rejects_qutrits() {
        let (psi, b) = ground(Model::Blbq { theta: 0.0 }, 4, 0);
        let rho = two_site_rdm(&psi, &b, 0, 1).unwrap();
        assert!(matches!(concurrence(&rho), Err(EntanglementError::UnsupportedDimension(3))));
        assert!(xform_extract(&rho, DEFAULT_TOL_PATTERN).is_err());
        let e = von_neumann_entropy(&rho).unwrap();
        assert!(e > 0.0 && e <= 2.0 * 3f64.log2());
    }

    #[test]
    fn not_a_density_matrix() {
        let rho = TwoSiteRdm {
            local_dim: 2,
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.6, 0.5, -0.1, 0.0])),
            site_pair: (0, 1),
        };
        assert!(matches!(von_neumann_entropy(&rho), Err(EntanglementError::NotADensityMatrix(_))));
    }

    proptest! {
        #[test]
        fn closed_form_equals_eigendecomposition(
            up in 0.0f64..1.0, um in 0.0f64..1.0, w1 in 0.0f64..1.0, w2 in 0.0f64..1.0, t in -1.0f64..1.0,
        ) {
            let total = up + um + w1 + w2;
            prop_assume!(total > 1e-3);
            let (up, um, w1, w2) = (up / total, um / total, w1 / total, w2 / total);
            let x = XFormElements { u_plus: up, u_minus: um, w1, w2, z: t * (w1 * w2).sqrt() };
            let rho = x.to_rdm();
            let exact = von_neumann_entropy(&rho).unwrap();
            prop_assert!((entropy_closed_form(&x) - exact).abs() <= 1e-10);
            let c = concurrence(&rho).unwrap();
            prop_assert!((concurrence_xform(&x) - c).abs() <= 1e-7);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        }
    }
}
