//! Python bindings. Rationals cross the boundary as `"n/d"` strings and
//! matrices as lists of rows of such strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use spgamma::cutoff::{self, CutoffConvention, PadicContext};
use spgamma::rat;
use spgamma::sample::cell_rng;
use spgamma::suite::{self, Suite, SuiteConfig};
use spgamma::torus::{self, SignConvention};
use spgamma::weyl;
use spgamma::{GroupShape, Mat, Rat};

type Rows = Vec<Vec<String>>;

fn err(e: spgamma::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat(rows: &Rows, r: usize, c: usize) -> PyResult<Mat> {
    if rows.is_empty() {
        return Ok(Mat::zeros(r, c));
    }
    let a = Mat::from_strings(rows).map_err(err)?;
    if a.shape() != (r, c) {
        return Err(PyValueError::new_err(format!("expected a {r}x{c} matrix, got {:?}", a.shape())));
    }
    Ok(a)
}

fn strs(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat::to_string).collect()
}

/// A point `n(X, Y)` of the unipotent radical, stored through `(X, Z)`.
#[pyclass(name = "NilpotentPair", from_py_object)]
#[derive(Clone)]
pub struct PyPair {
    inner: spgamma::NilpotentPair,
}

#[pymethods]
impl PyPair {
    #[new]
    fn new(r: usize, m: usize, x: Rows, z: Rows) -> PyResult<Self> {
        let shape = GroupShape::new(r, m).map_err(err)?;
        let inner = spgamma::NilpotentPair::from_xz(shape, mat(&x, r, 2 * m)?, mat(&z, r, r)?).map_err(err)?;
        Ok(PyPair { inner })
    }

    /// Builds the pair from `(X, Y)`; fails if the constraint does not hold.
    #[staticmethod]
    fn from_xy(r: usize, m: usize, x: Rows, y: Rows) -> PyResult<Self> {
        let shape = GroupShape::new(r, m).map_err(err)?;
        let inner = spgamma::NilpotentPair::from_xy(shape, mat(&x, r, 2 * m)?, mat(&y, r, r)?).map_err(err)?;
        Ok(PyPair { inner })
    }

    /// A seeded random pair with entries in `[-bound, bound]`.
    #[staticmethod]
    #[pyo3(signature = (r, m, seed=0, index=0, bound=10))]
    fn random(r: usize, m: usize, seed: u64, index: u64, bound: i64) -> PyResult<Self> {
        let shape = GroupShape::new(r, m).map_err(err)?;
        let mut rng = cell_rng(seed, "python", r, m, index);
        Ok(PyPair { inner: spgamma::sample::random_pair(&mut rng, shape, bound) })
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.shape.r
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.shape.m
    }

    #[getter]
    fn x(&self) -> Rows {
        self.inner.x.to_strings()
    }

    #[getter]
    fn z(&self) -> Rows {
        self.inner.z.to_strings()
    }

    #[getter]
    fn y(&self) -> Rows {
        self.inner.y().to_strings()
    }

    /// The `2n x 2n` matrix `n(X, Y)`.
    fn matrix(&self) -> Rows {
        self.inner.embed().to_strings()
    }

    /// `(m1, m2, X', Y', X1, Y1)` with `w0^{-1} n = m n(X', Y') nbar(X1, Y1)`.
    fn decompose_w0(&self) -> PyResult<(Rows, Rows, Rows, Rows, Rows, Rows)> {
        let f = spgamma::bruhat::decompose_w0(&self.inner).map_err(err)?;
        Ok((f.m1.to_strings(), f.m2.to_strings(), f.xp.to_strings(), f.yp.to_strings(), f.x1.to_strings(), f.y1.to_strings()))
    }

    /// Canonical representative of the `U_M` orbit: `(case, pair, u1, u2)`.
    fn canonical(&self) -> PyResult<(String, PyPair, Rows, Rows)> {
        let rep = spgamma::orbit::reduce_to_canonical(&self.inner).map_err(err)?;
        Ok((rep.case.label().to_string(), PyPair { inner: rep.point() }, rep.u1.to_strings(), rep.u2.to_strings()))
    }

    /// `(t1, t2)` from the minor-ratio formulas; `signs` is "uniform" or "printed".
    #[pyo3(signature = (signs="uniform"))]
    fn phi(&self, signs: &str) -> PyResult<(Vec<String>, Vec<String>)> {
        let conv = match signs {
            "uniform" => SignConvention::Uniform,
            "printed" => SignConvention::Printed,
            _ => return Err(PyValueError::new_err(format!("unknown sign convention '{signs}'"))),
        };
        let t = torus::phi_minor_formula(&self.inner, conv).map_err(err)?;
        Ok((strs(&t.t1), strs(&t.t2)))
    }

    /// `(t1, t2)` read off the big-cell factorization.
    fn phi_oracle(&self) -> PyResult<(Vec<String>, Vec<String>)> {
        let t = torus::phi_oracle(&self.inner).map_err(err)?;
        Ok((strs(&t.t1), strs(&t.t2)))
    }

    /// Value of the cut-off `phi(m)` at the Levi part of this point.
    #[pyo3(signature = (p, kappa, d=0, g=0))]
    fn cutoff(&self, p: u64, kappa: i64, d: i64, g: i64) -> PyResult<bool> {
        let ctx = PadicContext::new(p, kappa, d, g).map_err(err)?;
        cutoff::phi_of_m(&ctx, &self.inner.x, &self.inner.y(), CutoffConvention::LowerLeft).map_err(err)
    }

    fn __eq__(&self, other: &PyPair) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("NilpotentPair(r={}, m={}, x={:?}, z={:?})", self.inner.shape.r, self.inner.shape.m, self.x(), self.z())
    }
}

/// Elements of `B(M)` as signed permutations (1-based images).
#[pyfunction]
fn bessel_support(r: usize, m: usize) -> PyResult<Vec<Vec<i32>>> {
    let shape = GroupShape::new(r, m).map_err(err)?;
    Ok(weyl::bessel_support_set(shape).into_iter().map(|w| w.images).collect())
}

/// `|x|_p` as `None` for zero or the exponent `e` with `|x|_p = p^e`.
#[pyfunction]
fn padic_abs(x: &str, p: u64) -> PyResult<Option<i64>> {
    let x = rat::parse(x).map_err(err)?;
    match cutoff::padic_abs(&x, p).map_err(err)? {
        cutoff::PadicAbs::Zero => Ok(None),
        cutoff::PadicAbs::Pow(e) => Ok(Some(e)),
    }
}

/// Runs a suite and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (name, r=(1, 2), m=(0, 2), samples=10, seed=0, bound=10, prime=3, kappa=1))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    name: &str,
    r: (usize, usize),
    m: (usize, usize),
    samples: usize,
    seed: u64,
    bound: i64,
    prime: u64,
    kappa: i64,
) -> PyResult<String> {
    let cfg = SuiteConfig {
        suite: name.parse::<Suite>().map_err(err)?,
        r,
        m,
        samples,
        seed,
        bound,
        prime,
        kappa,
        ..Default::default()
    };
    let report = suite::run_suite(&cfg).map_err(err)?;
    Ok(suite::render(&report, suite::Format::Json))
}

#[pymodule]
fn pyspgamma(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<PyPair>()?;
    module.add_function(wrap_pyfunction!(bessel_support, module)?)?;
    module.add_function(wrap_pyfunction!(padic_abs, module)?)?;
    module.add_function(wrap_pyfunction!(run_suite, module)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_mean_zero_width() {
        let a = mat(&vec![], 3, 0).unwrap();
        assert_eq!(a.shape(), (3, 0));
    }

    #[test]
    fn rows_are_checked() {
        let rows = vec![vec!["1/2".to_string(), "-3".to_string()]];
        assert_eq!(mat(&rows, 1, 2).unwrap()[(0, 0)], rat::rat(1, 2));
        assert!(mat(&rows, 2, 1).is_err());
    }
}
