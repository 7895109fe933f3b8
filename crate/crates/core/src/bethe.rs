//! Independent oracles for the periodic spin-1/2 XXZ chain.
//!
//! * [`solve_ground`]: finite-N Bethe-ansatz ground state for `-1 < delta <= 1`.
//! * [`xx_oracle`]: Jordan-Wigner free fermions at `delta = 0`.
//! * [`hf_correlators`]: nearest-neighbor correlators from `E(delta)` via the
//!   Hellmann-Feynman relations `czz = (1/N) dE/d(delta)` and
//!   `cxx = (E/N - delta czz) / 2`.
//!
//! # Bethe equations
//!
//! With `delta = cos 2g` the `M` rapidities of a state with `M` down spins obey
//!
//! ```text
//! [sinh g(l_j + i) / sinh g(l_j - i)]^N = prod_{k != j} sinh g(l_j - l_k + 2i) / sinh g(l_j - l_k - 2i)
//! ```
//!
//! Taking logarithms with `t_n(x) = 2 atan(cot(n g) tanh(g x))` gives
//!
//! ```text
//! N t_1(l_j) = 2 pi I_j + sum_{k != j} t_2(l_j - l_k)
//! ```
//!
//! with `I_j` half-odd for even `M` and integer for odd `M`; the ground state
//! fills `I_j = -(M-1)/2, ..., (M-1)/2`. Each rapidity carries momentum
//! `k_j = pi - t_1(l_j)` and magnon energy `cos k_j - delta`, so
//! `E = N delta / 4 - sum_j (cos t_1(l_j) + delta)`. At `g = 0` (delta = 1) the
//! kernels reduce to `t_n(x) = 2 atan(x / n)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::BetheError;

const NEWTON_TARGET: f64 = 1e-12;
const CONVERGED_RESIDUAL: f64 = 1e-10;
const MAX_NEWTON_ITERATIONS: usize = 200;
const CONTINUATION_STEP: f64 = 0.05;
/// Below this `g` the kernels are evaluated in their rational form.
const RATIONAL_CUTOFF: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub num_sites: usize,
    pub num_down: usize,
    pub delta: f64,
    pub gamma: f64,
    pub rapidities: Vec<f64>,
    pub quantum_numbers: Vec<f64>,
    pub energy: f64,
    pub converged: bool,
    pub max_equation_residual: f64,
}

/// Phase kernel `t_n` and its derivative at anisotropy angle `gamma`.
#[derive(Clone, Copy, Debug)]
struct Kernel {
    gamma: f64,
    n: f64,
}

impl Kernel {
    fn cot_factor(&self) -> f64 {
        1.0 / (self.n * self.gamma).tan()
    }

    fn phase(&self, x: f64) -> f64 {
        if self.gamma < RATIONAL_CUTOFF {
            2.0 * (x / self.n).atan()
        } else {
            2.0 * (self.cot_factor() * (self.gamma * x).tanh()).atan()
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        if self.gamma < RATIONAL_CUTOFF {
            let u = x / self.n;
            2.0 / (self.n * (1.0 + u * u))
        } else {
            let c = self.cot_factor();
            let t = (self.gamma * x).tanh();
            2.0 * c * self.gamma * (1.0 - t * t) / (1.0 + c * c * t * t)
        }
    }
}

struct Equations {
    n: usize,
    quantum_numbers: Vec<f64>,
    k1: Kernel,
    k2: Kernel,
}

impl Equations {
    fn new(n: usize, m: usize, gamma: f64) -> Self {
        let quantum_numbers = (0..m).map(|j| j as f64 - (m as f64 - 1.0) / 2.0).collect();
        Equations {
            n,
            quantum_numbers,
            k1: Kernel { gamma, n: 1.0 },
            k2: Kernel { gamma, n: 2.0 },
        }
    }

    fn residual(&self, lam: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            lam.len(),
            lam.iter().enumerate().map(|(j, &lj)| {
                let scattering: f64 = lam
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &lk)| self.k2.phase(lj - lk))
                    .sum();
                self.n as f64 * self.k1.phase(lj) - scattering - 2.0 * PI * self.quantum_numbers[j]
            }),
        )
    }

    fn jacobian(&self, lam: &[f64]) -> DMatrix<f64> {
        let m = lam.len();
        let mut jac = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut diag = self.n as f64 * self.k1.derivative(lam[j]);
            for k in 0..m {
                if k != j {
                    let d = self.k2.derivative(lam[j] - lam[k]);
                    diag -= d;
                    jac[(j, k)] = d;
                }
            }
            jac[(j, j)] = diag;
        }
        jac
    }

    fn energy(&self, lam: &[f64], delta: f64) -> f64 {
        self.n as f64 * delta / 4.0
            - lam.iter().map(|&l| self.k1.phase(l).cos() + delta).sum::<f64>()
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// Damped Newton from `guess`; returns the solution and its final residual.
fn newton(eq: &Equations, guess: Vec<f64>) -> (Vec<f64>, f64) {
    let mut lam = guess;
    let mut res = eq.residual(&lam);
    let mut r = max_abs(&res);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if r <= NEWTON_TARGET {
            break;
        }
        let Some(step) = eq.jacobian(&lam).lu().solve(&res) else {
            break;
        };
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = lam.iter().zip(step.iter()).map(|(l, s)| l - scale * s).collect();
            let trial_res = eq.residual(&trial);
            let tr = max_abs(&trial_res);
            if tr.is_finite() && tr < r {
                lam = trial;
                res = trial_res;
                r = tr;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (lam, r)
}

fn gamma_of(delta: f64) -> f64 {
    0.5 * delta.clamp(-1.0, 1.0).acos()
}

/// Ground state of the `N`-site periodic XXZ ring in the `Sz = 0` sector.
///
/// Starts from the exact free-fermion rapidities at `delta = 0` and follows
/// the solution to the target anisotropy in small continuation steps.
pub fn solve_ground(n: usize, delta: f64) -> Result<BetheState, BetheError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(BetheError::InvalidSize(n));
    }
    if !(delta > -1.0 && delta <= 1.0) {
        return Err(BetheError::UnsupportedRegime(delta));
    }
    let m = n / 2;

    // Free fermions: t_1(l) = 2 pi I / N at g = pi/4, where cot(g) = 1.
    let free = Equations::new(n, m, PI / 4.0);
    let mut lam: Vec<f64> = free
        .quantum_numbers
        .iter()
        .map(|&i| (PI * i / n as f64).tan().atanh() / (PI / 4.0))
        .collect();

    let steps = (delta.abs() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    let mut residual = 0.0;
    for s in 1..=steps {
        let d = delta * s as f64 / steps as f64;
        let eq = Equations::new(n, m, gamma_of(d));
        let (next, r) = newton(&eq, lam);
        lam = next;
        residual = r;
        if r.is_nan() || r > CONVERGED_RESIDUAL {
            return Err(BetheError::Convergence { delta: d, residual: r });
        }
    }

    let gamma = gamma_of(delta);
    let eq = Equations::new(n, m, gamma);
    Ok(BetheState {
        num_sites: n,
        num_down: m,
        delta,
        gamma,
        energy: eq.energy(&lam, delta),
        quantum_numbers: eq.quantum_numbers.clone(),
        rapidities: lam,
        converged: residual <= CONVERGED_RESIDUAL,
        max_equation_residual: residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FermionBoundary {
    Periodic,
    Antiperiodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XxOracle {
    pub energy: f64,
    pub cxx: f64,
    pub czz: f64,
    pub boundary: FermionBoundary,
}

/// Exact `delta = 0` ground state of the even `N`-site ring at half filling.
///
/// The Jordan-Wigner string turns the spin ring into fermions with periodic
/// or antiperiodic boundary conditions depending on particle-number parity.
/// Both fillings are evaluated and the lower one is returned.
pub fn xx_oracle(n: usize) -> Result<XxOracle, BetheError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(BetheError::InvalidSize(n));
    }
    let filled = |boundary: FermionBoundary| {
        let shift = match boundary {
            FermionBoundary::Periodic => 0.0,
            FermionBoundary::Antiperiodic => 0.5,
        };
        let mut momenta: Vec<f64> = (0..n).map(|m| 2.0 * PI * (m as f64 + shift) / n as f64).collect();
        momenta.sort_by(|a, b| a.cos().total_cmp(&b.cos()));
        momenta.truncate(n / 2);
        let energy: f64 = momenta.iter().map(|k| k.cos()).sum();
        let g_re = momenta.iter().map(|k| k.cos()).sum::<f64>() / n as f64;
        let g_im = momenta.iter().map(|k| k.sin()).sum::<f64>() / n as f64;
        XxOracle {
            energy,
            cxx: 0.5 * g_re,
            czz: -(g_re * g_re + g_im * g_im),
            boundary,
        }
    };
    let p = filled(FermionBoundary::Periodic);
    let a = filled(FermionBoundary::Antiperiodic);
    Ok(if a.energy < p.energy { a } else { p })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HfCorrelators {
    pub czz: f64,
    pub cxx: f64,
}

/// Hellmann-Feynman correlators from an energy provider.
///
/// Uses the central difference `[E(d+h) - E(d-h)] / 2h`. When the provider
/// rejects `d + h` (the Bethe solver stops at delta = 1) the second-order
/// backward stencil `[3E(d) - 4E(d-h) + E(d-2h)] / 2h` is used instead.
pub fn hf_correlators<E>(
    energy_fn: impl Fn(f64) -> Result<f64, E>,
    n: usize,
    delta: f64,
    step: f64,
) -> Result<HfCorrelators, E> {
    let e0 = energy_fn(delta)?;
    let slope = match energy_fn(delta + step) {
        Ok(ep) => (ep - energy_fn(delta - step)?) / (2.0 * step),
        Err(err) => {
            let em = energy_fn(delta - step).map_err(|_| err)?;
            let emm = energy_fn(delta - 2.0 * step)?;
            (3.0 * e0 - 4.0 * em + emm) / (2.0 * step)
        }
    };
    let nn = n as f64;
    let czz = slope / nn;
    Ok(HfCorrelators {
        czz,
        cxx: 0.5 * (e0 / nn - delta * czz),
    })
}
