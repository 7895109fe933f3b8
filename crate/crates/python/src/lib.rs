//! Python bindings: `import pyspinent`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinent::{bethe, Family, Grid, SolverOptions};

fn to_py(e: spinent::Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn err<E: Into<spinent::Error>>(e: E) -> PyErr {
    to_py(e.into())
}

fn options(tol: f64, tol_deg: f64) -> SolverOptions {
    SolverOptions { tol, tol_deg, ..SolverOptions::default() }
}

fn family(name: &str) -> PyResult<Family> {
    match name.replace('-', "_").as_str() {
        "xxz_half" => Ok(Family::XxzHalf),
        "xxz_one" => Ok(Family::XxzOne),
        "blbq" => Ok(Family::Blbq),
        _ => Err(PyValueError::new_err(format!("unknown model family {name:?}"))),
    }
}

/// Periodic chain or square lattice.
#[pyclass(module = "pyspinent", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Lattice {
    inner: spinent::Lattice,
}

#[pymethods]
impl Lattice {
    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        Ok(Lattice { inner: spinent::Lattice::chain(n).map_err(err)? })
    }

    #[staticmethod]
    fn square(lx: usize, ly: usize) -> PyResult<Self> {
        Ok(Lattice { inner: spinent::Lattice::square(lx, ly).map_err(err)? })
    }

    #[getter]
    fn num_sites(&self) -> usize {
        self.inner.num_sites()
    }

    #[getter]
    fn bonds(&self) -> Vec<(usize, usize)> {
        self.inner.bonds().to_vec()
    }

    #[getter]
    fn geometry(&self) -> String {
        self.inner.geometry().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Lattice({} {})", self.inner.geometry().name(), self.inner.geometry())
    }
}

/// A Hamiltonian: `Model.xxz_half(delta)`, `Model.xxz_one(delta, beta)` or `Model.blbq(theta)`.
#[pyclass(module = "pyspinent", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Model {
    inner: spinent::Model,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn xxz_half(delta: f64) -> Self {
        Model { inner: spinent::Model::XxzHalf { delta } }
    }

    #[staticmethod]
    #[pyo3(signature = (delta, beta = 0.0))]
    fn xxz_one(delta: f64, beta: f64) -> Self {
        Model { inner: spinent::Model::XxzOne { delta, beta } }
    }

    #[staticmethod]
    fn blbq(theta: f64) -> Self {
        Model { inner: spinent::Model::Blbq { theta } }
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    #[getter]
    fn param(&self) -> f64 {
        self.inner.param()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Ground state returned by [`ground_state`]; bond quantities take site indices.
#[pyclass(module = "pyspinent", frozen)]
struct GroundState {
    report: spinent::GroundStateReport,
}

impl GroundState {
    fn rdm_inner(&self, i: usize, j: usize) -> PyResult<spinent::TwoSiteRdm> {
        spinent::two_site_rdm(&self.report.representative.vector, &self.report.representative_basis, i, j).map_err(err)
    }
}

#[pymethods]
impl GroundState {
    #[getter]
    fn energy(&self) -> f64 {
        self.report.ground_energy
    }

    #[getter]
    fn degeneracy(&self) -> usize {
        self.report.degeneracy
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.report.degenerate_flag
    }

    /// Total Sz of the representative state.
    #[getter]
    fn sz(&self) -> f64 {
        self.report.ground_sz()
    }

    #[getter]
    fn vector(&self) -> Vec<f64> {
        self.report.representative.vector.clone()
    }

    /// Two-site reduced density matrix, rows ordered by descending Sz of (i, j).
    fn rdm(&self, i: usize, j: usize) -> PyResult<Vec<Vec<f64>>> {
        let r = self.rdm_inner(i, j)?;
        Ok(r.matrix.row_iter().map(|row| row.iter().copied().collect()).collect())
    }

    /// Von Neumann entropy of the pair in bits.
    fn entropy(&self, i: usize, j: usize) -> PyResult<f64> {
        spinent::von_neumann_entropy(&self.rdm_inner(i, j)?).map_err(err)
    }

    fn concurrence(&self, i: usize, j: usize) -> PyResult<f64> {
        spinent::concurrence(&self.rdm_inner(i, j)?).map_err(err)
    }

    fn correlators<'py>(&self, py: Python<'py>, i: usize, j: usize) -> PyResult<Bound<'py, PyDict>> {
        let c = spinent::bond_correlators(&self.report.representative.vector, &self.report.representative_basis, (i, j))
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("cxx", c.cxx)?;
        d.set_item("cyy", c.cyy)?;
        d.set_item("czz", c.czz)?;
        d.set_item("mz_i", c.mz_i)?;
        d.set_item("mz_j", c.mz_j)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "GroundState(energy={}, degeneracy={}, sz={})",
            self.report.ground_energy,
            self.report.degeneracy,
            self.report.ground_sz()
        )
    }
}

/// Scan every Sz sector for the ground state.
#[pyfunction]
#[pyo3(signature = (model, lattice, tol = 1e-10, tol_deg = 1e-8))]
fn ground_state(py: Python<'_>, model: &Model, lattice: &Lattice, tol: f64, tol_deg: f64) -> PyResult<GroundState> {
    let (m, l) = (model.inner, lattice.inner.clone());
    let report = py
        .detach(|| spinent::ground_state_scan(&m, &l, &options(tol, tol_deg)))
        .map_err(err)?;
    Ok(GroundState { report })
}

/// The `k` lowest levels over all Sz sectors as `(energy, 2 Sz)` pairs.
#[pyfunction]
#[pyo3(signature = (model, lattice, k, tol = 1e-10, tol_deg = 1e-8))]
fn lowest_levels(
    py: Python<'_>,
    model: &Model,
    lattice: &Lattice,
    k: usize,
    tol: f64,
    tol_deg: f64,
) -> PyResult<Vec<(f64, i32)>> {
    let (m, l) = (model.inner, lattice.inner.clone());
    py.detach(|| -> Result<_, spinent::Error> {
        let set = spinent::SectorSet::new(&l, m.spin())?;
        Ok(set.lowest_levels(&m, k, &options(tol, tol_deg))?)
    })
    .map_err(to_py)
}

/// Bethe-ansatz ground state of the `n`-site XXZ ring, `-1 < delta <= 1`.
#[pyfunction]
fn bethe_ground<'py>(py: Python<'py>, n: usize, delta: f64) -> PyResult<Bound<'py, PyDict>> {
    let s = bethe::solve_ground(n, delta).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("energy", s.energy)?;
    d.set_item("rapidities", s.rapidities)?;
    d.set_item("quantum_numbers", s.quantum_numbers)?;
    d.set_item("converged", s.converged)?;
    d.set_item("max_equation_residual", s.max_equation_residual)?;
    Ok(d)
}

/// Exact free-fermion ground-state energy and bond correlators at delta = 0.
#[pyfunction]
fn xx_oracle<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let o = bethe::xx_oracle(n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("energy", o.energy)?;
    d.set_item("cxx", o.cxx)?;
    d.set_item("czz", o.czz)?;
    Ok(d)
}

/// Ground-state observables for every chain length and grid point.
///
/// Returns one dict per row with the same fields as the CLI table; `error` is
/// set (and numbers are NaN) for points that failed to converge.
#[pyfunction]
#[pyo3(signature = (family, sizes, start, end, count, geometry = "chain", beta = 0.0, tol = 1e-10, tol_deg = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    family: &str,
    sizes: Vec<usize>,
    start: f64,
    end: f64,
    count: usize,
    geometry: &str,
    beta: f64,
    tol: f64,
    tol_deg: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let fam = self::family(family)?;
    let lattices = sizes
        .iter()
        .map(|&n| match geometry {
            "chain" => spinent::Lattice::chain(n).map_err(err),
            "square" => spinent::Lattice::square(n, n).map_err(err),
            g => Err(PyValueError::new_err(format!("unknown geometry {g:?}"))),
        })
        .collect::<PyResult<Vec<_>>>()?;
    let grid = Grid::new(start, end, count).map_err(err)?;
    let spec = spinent::SweepSpec { family: fam, lattices, grid, beta, options: options(tol, tol_deg) };
    let table = py.detach(|| spinent::sweep(&spec)).map_err(to_py)?;
    table
        .rows
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("family", r.family.name())?;
            d.set_item("geometry", r.geometry)?;
            d.set_item("size", r.size)?;
            d.set_item("param", r.param)?;
            d.set_item("energy", r.energy)?;
            d.set_item("czz", r.czz)?;
            d.set_item("cxx", r.cxx)?;
            d.set_item("ev", r.ev)?;
            d.set_item("concurrence", r.concurrence)?;
            d.set_item("degeneracy", r.degeneracy)?;
            d.set_item("degenerate_flag", r.degenerate_flag)?;
            d.set_item("error", r.error)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pyspinent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Lattice>()?;
    m.add_class::<Model>()?;
    m.add_class::<GroundState>()?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_levels, m)?)?;
    m.add_function(wrap_pyfunction!(bethe_ground, m)?)?;
    m.add_function(wrap_pyfunction!(xx_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
