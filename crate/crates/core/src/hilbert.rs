//! Fixed total-Sz sectors of spin-1/2 and spin-1 lattices.
//!
//! A configuration is packed into a `u64`, site 0 in the least significant
//! bits. Each site stores a local code `c` in `0..2S+1` with `m = c - S`, so
//! code 0 is the lowest local Sz:
//!
//! * spin-1/2: one bit per site, `0 = down`, `1 = up`;
//! * spin-1: two bits per site, `{0, 1, 2} <-> {-1, 0, +1}`.
//!
//! Total Sz is carried as the integer `2 * Sz` throughout to keep half-integer
//! sectors exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::BasisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Half,
    One,
}

impl Spin {
    /// `2S`.
    pub fn twice(self) -> i32 {
        match self {
            Spin::Half => 1,
            Spin::One => 2,
        }
    }

    /// Local Hilbert-space dimension `2S + 1`.
    pub fn local_dim(self) -> usize {
        self.twice() as usize + 1
    }

    pub fn bits_per_site(self) -> u32 {
        match self {
            Spin::Half => 1,
            Spin::One => 2,
        }
    }

    pub fn max_sites(self) -> usize {
        64 / self.bits_per_site() as usize
    }

    /// `2m` for a local code.
    #[inline]
    pub fn twice_m(self, code: usize) -> i32 {
        2 * code as i32 - self.twice()
    }

    pub fn name(self) -> &'static str {
        match self {
            Spin::Half => "1/2",
            Spin::One => "1",
        }
    }

    /// Reachable values of `2 * Sz` that are `>= 0`, ascending.
    pub fn nonnegative_sectors(self, num_sites: usize) -> Vec<i32> {
        let max = self.twice() * num_sites as i32;
        (0..=max).filter(|t| (max - t) % 2 == 0).collect()
    }

    /// Every reachable value of `2 * Sz`, ascending.
    pub fn all_sectors(self, num_sites: usize) -> Vec<i32> {
        let max = self.twice() * num_sites as i32;
        (-max..=max).step_by(2).collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sorted enumeration of one total-Sz sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinBasis {
    spin: Spin,
    num_sites: usize,
    twice_sz: i32,
    states: Vec<u64>,
}

impl SpinBasis {
    pub fn new(num_sites: usize, spin: Spin, twice_sz: i32) -> Result<Self, BasisError> {
        if num_sites == 0 || num_sites > spin.max_sites() {
            return Err(BasisError::TooManySites { num_sites });
        }
        let max = spin.twice() * num_sites as i32;
        if twice_sz.abs() > max || (max - twice_sz) % 2 != 0 {
            return Err(BasisError::InvalidSector {
                num_sites,
                spin: spin.name(),
                twice_sz,
            });
        }

        let mut states = Vec::new();
        enumerate(spin, num_sites, twice_sz, &mut states);
        Ok(SpinBasis {
            spin,
            num_sites,
            twice_sz,
            states,
        })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn twice_sz(&self) -> i32 {
        self.twice_sz
    }

    pub fn sz(&self) -> f64 {
        self.twice_sz as f64 / 2.0
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Position of `config` in the sector, `None` if it lies outside.
    #[inline]
    pub fn state_index(&self, config: u64) -> Option<usize> {
        self.states.binary_search(&config).ok()
    }

    #[inline]
    pub fn code(&self, config: u64, site: usize) -> usize {
        site_code(self.spin, config, site)
    }

    #[inline]
    pub fn with_code(&self, config: u64, site: usize, code: usize) -> u64 {
        set_site_code(self.spin, config, site, code)
    }

    /// Negate every local Sz.
    pub fn spin_flip(&self, config: u64) -> u64 {
        let top = self.spin.local_dim() - 1;
        (0..self.num_sites).fold(config, |acc, s| {
            set_site_code(self.spin, acc, s, top - site_code(self.spin, config, s))
        })
    }

    /// `2 * Sz` of an arbitrary configuration.
    pub fn twice_sz_of(&self, config: u64) -> i32 {
        (0..self.num_sites)
            .map(|s| self.spin.twice_m(self.code(config, s)))
            .sum()
    }

    /// Configuration from local codes, site 0 first.
    pub fn encode(&self, codes: &[usize]) -> u64 {
        codes
            .iter()
            .enumerate()
            .fold(0, |acc, (s, &c)| set_site_code(self.spin, acc, s, c))
    }
}

#[inline]
pub(crate) fn site_code(spin: Spin, config: u64, site: usize) -> usize {
    let bits = spin.bits_per_site();
    let mask = (1u64 << bits) - 1;
    ((config >> (bits as usize * site)) & mask) as usize
}

#[inline]
pub(crate) fn set_site_code(spin: Spin, config: u64, site: usize, code: usize) -> u64 {
    let bits = spin.bits_per_site() as usize;
    let mask = ((1u64 << bits) - 1) << (bits * site);
    (config & !mask) | ((code as u64) << (bits * site))
}

// Depth-first from the most significant site with ascending codes, which
// yields configurations in increasing numeric order.
fn enumerate(spin: Spin, num_sites: usize, twice_sz: i32, out: &mut Vec<u64>) {
    fn rec(
        spin: Spin,
        site: usize,
        remaining: i32,
        prefix: u64,
        out: &mut Vec<u64>,
    ) {
        let d = spin.local_dim();
        // `site` counts the sites still to be assigned, highest index first.
        if site == 0 {
            if remaining == 0 {
                out.push(prefix);
            }
            return;
        }
        let s = site - 1;
        let reach = spin.twice() * s as i32;
        for code in 0..d {
            let rest = remaining - spin.twice_m(code);
            if rest.abs() <= reach {
                rec(spin, s, rest, set_site_code(spin, prefix, s, code), out);
            }
        }
    }
    rec(spin, num_sites, twice_sz, 0, out);
}
