//! Sector-restricted sparse Hamiltonians for the three model families.
//!
//! Every family is a sum over lattice bonds of one two-site operator. That
//! operator is built once as a dense `d^2 x d^2` matrix on the two-site
//! product space (the bond stencil) and then scattered into CSR form row by
//! row.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HamiltonianError;
use crate::hilbert::{Spin, SpinBasis};
use crate::lattice::Lattice;

const DROP_TOL: f64 = 1e-14;

/// Model family tag, used where the sweep parameter is supplied separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Spin-1/2 XXZ: `SxSx + SySy + delta SzSz`.
    XxzHalf,
    /// Spin-1 XXZ with biquadratic term: `SxSx + SySy + delta SzSz - beta (S.S)^2`.
    XxzOne,
    /// Spin-1 bilinear-biquadratic: `cos(theta) S.S + sin(theta) (S.S)^2`.
    Blbq,
}

impl Family {
    pub fn spin(self) -> Spin {
        match self {
            Family::XxzHalf => Spin::Half,
            Family::XxzOne | Family::Blbq => Spin::One,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::XxzHalf => "xxz_half",
            Family::XxzOne => "xxz_one",
            Family::Blbq => "blbq",
        }
    }

    /// Model at sweep parameter `param` (delta for the XXZ families, theta
    /// for blbq). `beta` only matters for `XxzOne`.
    pub fn model(self, param: f64, beta: f64) -> Model {
        match self {
            Family::XxzHalf => Model::XxzHalf { delta: param },
            Family::XxzOne => Model::XxzOne { delta: param, beta },
            Family::Blbq => Model::Blbq { theta: param },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    XxzHalf { delta: f64 },
    XxzOne { delta: f64, beta: f64 },
    Blbq { theta: f64 },
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::XxzHalf { .. } => Family::XxzHalf,
            Model::XxzOne { .. } => Family::XxzOne,
            Model::Blbq { .. } => Family::Blbq,
        }
    }

    pub fn spin(&self) -> Spin {
        self.family().spin()
    }

    /// The sweep parameter: delta or theta.
    pub fn param(&self) -> f64 {
        match *self {
            Model::XxzHalf { delta } | Model::XxzOne { delta, .. } => delta,
            Model::Blbq { theta } => theta,
        }
    }

    /// Dense two-site bond operator in the local-code product basis
    /// (`index = code_i * d + code_j`).
    pub fn bond_matrix(&self) -> DMatrix<f64> {
        let ops = TwoSiteOps::new(self.spin());
        match *self {
            Model::XxzHalf { delta } => &ops.transverse + &ops.zz * delta,
            Model::XxzOne { delta, beta } => {
                &ops.transverse + &ops.zz * delta - ops.dot_squared() * beta
            }
            Model::Blbq { theta } => {
                ops.dot() * theta.cos() + ops.dot_squared() * theta.sin()
            }
        }
    }
}

/// Single-site spin operators in the local-code basis (code 0 = lowest m).
#[derive(Clone, Debug)]
pub struct LocalOps {
    pub sz: DMatrix<f64>,
    pub splus: DMatrix<f64>,
    pub sminus: DMatrix<f64>,
}

impl LocalOps {
    pub fn new(spin: Spin) -> Self {
        let d = spin.local_dim();
        let s = spin.twice() as f64 / 2.0;
        let mut sz = DMatrix::zeros(d, d);
        let mut splus = DMatrix::zeros(d, d);
        for c in 0..d {
            let m = spin.twice_m(c) as f64 / 2.0;
            sz[(c, c)] = m;
            if c + 1 < d {
                splus[(c + 1, c)] = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
            }
        }
        let sminus = splus.transpose();
        LocalOps { sz, splus, sminus }
    }
}

/// Two-site building blocks on the `d^2` product space.
#[derive(Clone, Debug)]
pub struct TwoSiteOps {
    /// `SxSx + SySy = (S+S- + S-S+) / 2`
    pub transverse: DMatrix<f64>,
    /// `SzSz`
    pub zz: DMatrix<f64>,
}

impl TwoSiteOps {
    pub fn new(spin: Spin) -> Self {
        let l = LocalOps::new(spin);
        let transverse = (l.splus.kronecker(&l.sminus) + l.sminus.kronecker(&l.splus)) * 0.5;
        let zz = l.sz.kronecker(&l.sz);
        TwoSiteOps { transverse, zz }
    }

    pub fn dot(&self) -> DMatrix<f64> {
        &self.transverse + &self.zz
    }

    pub fn dot_squared(&self) -> DMatrix<f64> {
        let d = self.dot();
        &d * &d
    }
}

/// Nonzero columns of the bond operator: `entries[in]` lists `(out, amplitude)`.
#[derive(Clone, Debug)]
struct BondStencil {
    local_dim: usize,
    entries: Vec<Vec<(usize, f64)>>,
}

impl BondStencil {
    fn new(matrix: &DMatrix<f64>, local_dim: usize) -> Self {
        let n = local_dim * local_dim;
        let entries = (0..n)
            .map(|col| {
                (0..n)
                    .filter_map(|row| {
                        let v = matrix[(row, col)];
                        (v.abs() >= DROP_TOL).then_some((row, v))
                    })
                    .collect()
            })
            .collect();
        BondStencil { local_dim, entries }
    }
}

/// Real symmetric matrix in compressed sparse row layout over one Sz sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHamiltonian {
    dimension: usize,
    twice_sz: i32,
    row_offsets: Vec<usize>,
    column_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Build `H` restricted to `basis`.
pub fn assemble(
    model: &Model,
    lattice: &Lattice,
    basis: &SpinBasis,
) -> Result<SparseHamiltonian, HamiltonianError> {
    if model.spin() != basis.spin() {
        return Err(HamiltonianError::ModelMismatch {
            model: model.family().name(),
            expected: model.spin().name(),
            found: basis.spin().name(),
        });
    }
    if lattice.num_sites() != basis.num_sites() {
        return Err(HamiltonianError::SiteCountMismatch {
            basis: basis.num_sites(),
            lattice: lattice.num_sites(),
        });
    }

    let d = basis.spin().local_dim();
    let stencil = BondStencil::new(&model.bond_matrix(), d);
    let rows: Vec<Vec<(usize, f64)>> = basis
        .states()
        .par_iter()
        .with_min_len(256)
        .map(|&config| row_entries(config, lattice.bonds(), basis, &stencil))
        .collect();

    let nnz = rows.iter().map(Vec::len).sum();
    let mut row_offsets = Vec::with_capacity(rows.len() + 1);
    let mut column_indices = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_offsets.push(0);
    for row in rows {
        for (c, v) in row {
            column_indices.push(c);
            values.push(v);
        }
        row_offsets.push(column_indices.len());
    }

    Ok(SparseHamiltonian {
        dimension: basis.dimension(),
        twice_sz: basis.twice_sz(),
        row_offsets,
        column_indices,
        values,
    })
}

fn row_entries(
    config: u64,
    bonds: &[(usize, usize)],
    basis: &SpinBasis,
    stencil: &BondStencil,
) -> Vec<(usize, f64)> {
    let d = stencil.local_dim;
    let mut raw: Vec<(usize, f64)> = Vec::new();
    for &(i, j) in bonds {
        let a = basis.code(config, i);
        let b = basis.code(config, j);
        for &(out, amp) in &stencil.entries[a * d + b] {
            let target = basis.with_code(basis.with_code(config, i, out / d), j, out % d);
            let col = basis
                .state_index(target)
                .expect("bond operator conserves total Sz");
            raw.push((col, amp));
        }
    }
    // Stable sort keeps the bond order inside each column, so the summation
    // order is fixed.
    raw.sort_by_key(|&(c, _)| c);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(raw.len());
    for (c, v) in raw {
        match merged.last_mut() {
            Some((last, acc)) if *last == c => *acc += v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|&(_, v)| v.abs() >= DROP_TOL);
    merged
}

impl SparseHamiltonian {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn twice_sz(&self) -> i32 {
        self.twice_sz
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.column_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        self.column_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    /// `H v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, HamiltonianError> {
        if v.len() != self.dimension {
            return Err(HamiltonianError::Dimension {
                expected: self.dimension,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.dimension];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// `out = H v` without length checks beyond debug assertions. Each row is
    /// summed sequentially, so the result does not depend on how rows are
    /// split across threads.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dimension);
        debug_assert_eq!(out.len(), self.dimension);
        out.par_iter_mut()
            .with_min_len(2048)
            .enumerate()
            .for_each(|(r, o)| {
                let span = self.row_offsets[r]..self.row_offsets[r + 1];
                let mut acc = 0.0;
                for (c, x) in self.column_indices[span.clone()].iter().zip(&self.values[span]) {
                    acc += x * v[*c];
                }
                *o = acc;
            });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for r in 0..self.dimension {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Largest `|H[r][c] - H[c][r]|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.dimension)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.entry(c, r)).abs())
            .fold(0.0, f64::max)
    }
}
