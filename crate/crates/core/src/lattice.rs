//! Periodic site graphs: the 1D ring and the 2D square torus.
//!
//! A [`Lattice`] is just a site count plus a deduplicated nearest-neighbor bond
//! list. Every Hamiltonian sum in this crate runs over `Lattice::bonds`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Chain { len: usize },
    Square { lx: usize, ly: usize },
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Chain { len } => write!(f, "{len}"),
            Geometry::Square { lx, ly } => write!(f, "{lx}x{ly}"),
        }
    }
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Chain { .. } => "chain",
            Geometry::Square { .. } => "square",
        }
    }
}

/// Sites `0..num_sites` and the bonds `(i, j)`, `i < j`, each listed once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    num_sites: usize,
    bonds: Vec<(usize, usize)>,
    geometry: Geometry,
}

impl Lattice {
    /// Periodic ring of `n` sites. For `n = 2` the two "wrap-around" bonds are
    /// the same pair and the ring keeps a single bond.
    pub fn chain(n: usize) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::InvalidSize(format!(
                "chain needs at least 2 sites, got {n}"
            )));
        }
        let raw = (0..n).map(|i| (i, (i + 1) % n));
        Ok(Self::from_raw_bonds(n, raw, Geometry::Chain { len: n }))
    }

    /// Periodic `lx` x `ly` square lattice; site `(x, y)` has index `x + lx * y`.
    pub fn square(lx: usize, ly: usize) -> Result<Self, LatticeError> {
        if lx < 3 || ly < 3 {
            return Err(LatticeError::InvalidSize(format!(
                "periodic square lattice needs both extents >= 3, got {lx}x{ly}"
            )));
        }
        let site = |x: usize, y: usize| x + lx * y;
        let mut raw = Vec::with_capacity(2 * lx * ly);
        for y in 0..ly {
            for x in 0..lx {
                raw.push((site(x, y), site((x + 1) % lx, y)));
                raw.push((site(x, y), site(x, (y + 1) % ly)));
            }
        }
        Ok(Self::from_raw_bonds(lx * ly, raw, Geometry::Square { lx, ly }))
    }

    fn from_raw_bonds(
        num_sites: usize,
        raw: impl IntoIterator<Item = (usize, usize)>,
        geometry: Geometry,
    ) -> Self {
        let mut seen = BTreeSet::new();
        let mut bonds = Vec::new();
        for (a, b) in raw {
            let pair = (a.min(b), a.max(b));
            if pair.0 != pair.1 && seen.insert(pair) {
                bonds.push(pair);
            }
        }
        Lattice {
            num_sites,
            bonds,
            geometry,
        }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn degree(&self, site: usize) -> usize {
        self.bonds
            .iter()
            .filter(|&&(i, j)| i == site || j == site)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_four() {
        let l = Lattice::chain(4).unwrap();
        assert_eq!(l.bonds(), &[(0, 1), (1, 2), (2, 3), (0, 3)]);
    }

    #[test]
    fn chain_of_two_keeps_one_bond() {
        let l = Lattice::chain(2).unwrap();
        assert_eq!(l.bonds(), &[(0, 1)]);
    }

    #[test]
    fn chain_of_twelve_is_two_regular() {
        let l = Lattice::chain(12).unwrap();
        assert_eq!(l.num_bonds(), 12);
        assert!((0..12).all(|s| l.degree(s) == 2));
    }

    #[test]
    fn short_chain_rejected() {
        assert!(matches!(Lattice::chain(1), Err(LatticeError::InvalidSize(_))));
    }

    #[test]
    fn square_bond_counts() {
        let l = Lattice::square(4, 4).unwrap();
        assert_eq!((l.num_sites(), l.num_bonds()), (16, 32));
        let l = Lattice::square(3, 3).unwrap();
        assert_eq!((l.num_sites(), l.num_bonds()), (9, 18));
        assert!((0..9).all(|s| l.degree(s) == 4));
    }

    #[test]
    fn narrow_square_rejected() {
        assert!(Lattice::square(4, 2).is_err());
        assert!(Lattice::square(2, 5).is_err());
    }

    #[test]
    fn chain_rotation_invariant() {
        for n in 2..20 {
            let l = Lattice::chain(n).unwrap();
            let original: BTreeSet<_> = l.bonds().iter().copied().collect();
            let rotated: BTreeSet<_> = l
                .bonds()
                .iter()
                .map(|&(i, j)| {
                    let (a, b) = ((i + 1) % n, (j + 1) % n);
                    (a.min(b), a.max(b))
                })
                .collect();
            assert_eq!(original, rotated);
        }
    }

    #[test]
    fn degree_sum_and_uniqueness() {
        let lattices = [
            Lattice::chain(7).unwrap(),
            Lattice::square(3, 5).unwrap(),
            Lattice::square(4, 4).unwrap(),
        ];
        for l in &lattices {
            let total: usize = (0..l.num_sites()).map(|s| l.degree(s)).sum();
            assert_eq!(total, 2 * l.num_bonds());
            let unique: BTreeSet<_> = l.bonds().iter().collect();
            assert_eq!(unique.len(), l.num_bonds());
            assert!(l.bonds().iter().all(|&(i, j)| i < j && j < l.num_sites()));
        }
    }
}
