//! Parameter sweeps and the post-processing that turns them into critical
//! point estimates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{SectorSet, SolverOptions};
use crate::entanglement::{bond_correlators, concurrence, two_site_rdm, von_neumann_entropy};
use crate::error::{AnalysisError, Error};
use crate::hamiltonian::{Family, Model};
use crate::hilbert::Spin;
use crate::lattice::Lattice;

/// Inclusive uniform grid `start:end:count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self, AnalysisError> {
        if count < 2 {
            return Err(AnalysisError::TooFewPoints { needed: 2, found: count });
        }
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(AnalysisError::InvalidGrid(format!(
                "need finite start < end, got {start}:{end}"
            )));
        }
        Ok(Grid { start, end, count })
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.end } else { self.start + k as f64 * h })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AnalysisError::InvalidGrid(format!("expected start:end:count, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        let count = n.trim().parse().map_err(|_| bad())?;
        Grid::new(start, end, count)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}

/// One sweep point. Numeric fields are `NaN` when `error` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub geometry: String,
    pub size: String,
    pub param: f64,
    pub energy: f64,
    pub czz: f64,
    pub cxx: f64,
    pub ev: f64,
    pub concurrence: Option<f64>,
    pub degeneracy: usize,
    pub degenerate_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows of one size, in parameter order.
    pub fn series(&self, size: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.size == size).collect()
    }

    /// `(param, ev)` pairs of one size, skipping failed rows.
    pub fn ev_series(&self, size: &str) -> (Vec<f64>, Vec<f64>) {
        self.series(size)
            .into_iter()
            .filter(|r| r.error.is_none())
            .map(|r| (r.param, r.ev))
            .unzip()
    }

    pub fn failed(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub family: Family,
    pub lattices: Vec<Lattice>,
    pub grid: Grid,
    /// Biquadratic coefficient for `Family::XxzOne`; ignored otherwise.
    pub beta: f64,
    pub options: SolverOptions,
}

/// Observables of one ground state: energy, correlators and measures on the
/// lattice's first bond.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointObservables {
    pub energy: f64,
    pub czz: f64,
    pub cxx: f64,
    pub ev: f64,
    pub concurrence: Option<f64>,
    pub degeneracy: usize,
    pub degenerate_flag: bool,
}

pub fn evaluate_point(
    model: &Model,
    sectors: &SectorSet,
    options: &SolverOptions,
) -> Result<PointObservables, Error> {
    let report = sectors.scan(model, options)?;
    let bond = sectors.lattice().bonds()[0];
    let state = &report.representative.vector;
    let basis = &report.representative_basis;
    let rdm = two_site_rdm(state, basis, bond.0, bond.1)?;
    let corr = bond_correlators(state, basis, bond)?;
    let concurrence = match model.spin() {
        Spin::Half => Some(concurrence(&rdm)?),
        Spin::One => None,
    };
    Ok(PointObservables {
        energy: report.ground_energy,
        czz: corr.czz,
        cxx: corr.cxx,
        ev: von_neumann_entropy(&rdm)?,
        concurrence,
        degeneracy: report.degeneracy,
        degenerate_flag: report.degenerate_flag,
    })
}

/// Evaluate every (size, grid point). Failures are recorded on their row
/// rather than aborting the sweep. Rows are ordered by size, then parameter,
/// whatever the evaluation order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable, Error> {
    let spin = spec.family.spin();
    let sectors: Vec<SectorSet> = spec
        .lattices
        .iter()
        .map(|l| SectorSet::new(l, spin))
        .collect::<Result<_, _>>()?;
    let params = spec.grid.values();
    let tasks: Vec<(usize, f64)> = (0..sectors.len())
        .flat_map(|s| params.iter().map(move |&p| (s, p)))
        .collect();

    let rows = tasks
        .par_iter()
        .map(|&(s, p)| {
            let lattice = sectors[s].lattice();
            let model = spec.family.model(p, spec.beta);
            let mut row = SweepRow {
                family: spec.family,
                geometry: lattice.geometry().name().to_string(),
                size: lattice.geometry().to_string(),
                param: p,
                energy: f64::NAN,
                czz: f64::NAN,
                cxx: f64::NAN,
                ev: f64::NAN,
                concurrence: None,
                degeneracy: 0,
                degenerate_flag: false,
                error: None,
            };
            match evaluate_point(&model, &sectors[s], &spec.options) {
                Ok(obs) => {
                    row.energy = obs.energy;
                    row.czz = obs.czz;
                    row.cxx = obs.cxx;
                    row.ev = obs.ev;
                    row.concurrence = obs.concurrence;
                    row.degeneracy = obs.degeneracy;
                    row.degenerate_flag = obs.degenerate_flag;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    Ok(SweepTable { rows })
}

fn check_uniform(xs: &[f64]) -> Result<f64, AnalysisError> {
    let h = xs[1] - xs[0];
    let tol = 1e-9 * h.abs().max(1.0);
    if h <= 0.0 || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
        return Err(AnalysisError::NonUniformGrid);
    }
    Ok(h)
}

/// First derivative on a uniform grid: central differences inside,
/// first-order one-sided at the two ends.
pub fn finite_difference(xs: &[f64], ys: &[f64]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if xs.len() < 3 || xs.len() != ys.len() {
        return Err(AnalysisError::TooFewPoints { needed: 3, found: xs.len().min(ys.len()) });
    }
    let h = check_uniform(xs)?;
    let n = xs.len();
    Ok((0..n)
        .map(|i| {
            let d = if i == 0 {
                (ys[1] - ys[0]) / h
            } else if i == n - 1 {
                (ys[n - 1] - ys[n - 2]) / h
            } else {
                (ys[i + 1] - ys[i - 1]) / (2.0 * h)
            };
            (xs[i], d)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

/// Grid extremum refined by the parabola through it and its two neighbors.
pub fn locate_extremum(xs: &[f64], ys: &[f64], kind: ExtremumKind) -> Result<(f64, f64), AnalysisError> {
    if xs.len() < 3 || xs.len() != ys.len() {
        return Err(AnalysisError::TooFewPoints { needed: 3, found: xs.len().min(ys.len()) });
    }
    let better = |a: f64, b: f64| match kind {
        ExtremumKind::Min => a < b,
        ExtremumKind::Max => a > b,
    };
    let k = (1..ys.len()).fold(0, |best, i| if better(ys[i], ys[best]) { i } else { best });
    if k == 0 || k == ys.len() - 1 {
        return Err(AnalysisError::EdgeExtremum(xs[k]));
    }
    let (x0, x1, x2) = (xs[k - 1], xs[k], xs[k + 1]);
    let (y0, y1, y2) = (ys[k - 1], ys[k], ys[k + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Ok((x1, y1));
    }
    let x = x1 - 0.5 * num / den;
    let y = y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    Ok((x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    InverseL,
    InverseLSquared,
}

impl FitForm {
    fn abscissa(self, size: f64) -> f64 {
        match self {
            FitForm::InverseL => 1.0 / size,
            FitForm::InverseLSquared => 1.0 / (size * size),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub form: FitForm,
    /// `[intercept, slope]` of `y = a + b x(L)`.
    pub coefficients: [f64; 2],
    pub extrapolated_value: f64,
    pub residual_norm: f64,
}

/// Least-squares `y = a + b / L` (or `b / L^2`); the intercept is the
/// thermodynamic-limit estimate.
pub fn extrapolate(points: &[(f64, f64)], form: FitForm) -> Result<ScalingFit, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::InsufficientData(points.len()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(l, _)| form.abscissa(l)).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - xm) * (p.1 - ym)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ym - slope * xm;
    let residual_norm = xs
        .iter()
        .zip(points)
        .map(|(x, p)| (p.1 - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ScalingFit {
        form,
        coefficients: [intercept, slope],
        extrapolated_value: intercept,
        residual_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeExtremum {
    pub size: usize,
    pub location: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub minima: Vec<SizeExtremum>,
    pub fits: Vec<ScalingFit>,
    /// `|a(1/L) - a(1/L^2)|`.
    pub spread: f64,
}

/// Locate the minimum of `dE_v/d(param)` for each chain length on a shared
/// grid and extrapolate its position with both fit forms.
pub fn derivative_minimum_scaling(table: &SweepTable, sizes: &[usize]) -> Result<ScalingStudy, AnalysisError> {
    let mut minima = Vec::with_capacity(sizes.len());
    for &l in sizes {
        let (xs, ys) = table.ev_series(&l.to_string());
        let deriv = finite_difference(&xs, &ys)?;
        let (dx, dy): (Vec<f64>, Vec<f64>) = deriv.into_iter().unzip();
        let (location, value) = locate_extremum(&dx, &dy, ExtremumKind::Min)?;
        minima.push(SizeExtremum { size: l, location, value });
    }
    let points: Vec<(f64, f64)> = minima.iter().map(|m| (m.size as f64, m.location)).collect();
    let fits = vec![
        extrapolate(&points, FitForm::InverseL)?,
        extrapolate(&points, FitForm::InverseLSquared)?,
    ];
    let spread = (fits[0].extrapolated_value - fits[1].extrapolated_value).abs();
    Ok(ScalingStudy { minima, fits, spread })
}
