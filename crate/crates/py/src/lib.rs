use jandl::cochain::{CocycleFile, CocycleSource};
use jandl::counting::{centre_dim, count_simples, double_simple_count, flat_sect_equality, one_loop_sectors};
use jandl::groupoid::parse_group_spec;
use jandl::suite::{self, Manifest};
use jandl::torsion::{check_doubly_odd_reduction, torsion_2d, torsion_3d};
use jandl::transgress::{transgress as run_transgress, TransgressionMap};
use jandl::{Cochain, Error, GradedGroup, GradedGroupoid, Twist};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::Verification { .. } => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn input(group: &str) -> PyResult<(GradedGroup, GradedGroupoid)> {
    let g = parse_group_spec(group).map_err(err)?;
    let b = g.classifying_groupoid();
    Ok((g, b))
}

fn load(g: &GradedGroup, b: &GradedGroupoid, cocycle: &str, degree: usize, twist: Twist, order: u64) -> PyResult<Cochain> {
    let src: CocycleSource = cocycle.parse().map_err(err)?;
    src.resolve(g, b, degree, twist, order).map_err(err)
}

fn parse_map(map: &str) -> PyResult<TransgressionMap> {
    serde_json::from_value(serde_json::Value::String(map.to_string()))
        .map_err(|_| PyValueError::new_err(format!("unknown map '{map}'")))
}

/// Elements of a graded group as `(name, parity)` pairs.
#[pyfunction]
fn elements(group: &str) -> PyResult<Vec<(String, i64)>> {
    let (g, _) = input(group)?;
    Ok((0..g.order()).map(|x| (g.element_name(x).to_string(), g.sign(x).to_i64())).collect())
}

/// The count reports for a cocycle of degree 1, 2 or 3.
#[pyfunction]
#[pyo3(signature = (group, cocycle = "trivial", degree = 2, order = 4))]
fn count<'py>(py: Python<'py>, group: &str, cocycle: &str, degree: usize, order: u64) -> PyResult<Bound<'py, PyAny>> {
    let (g, b) = input(group)?;
    let c = load(&g, &b, cocycle, degree, Twist::Pi, order)?;
    let (reports, sectors) = match c.degree() {
        1 => (vec![flat_sect_equality(&c).map_err(err)?], None),
        2 => (vec![count_simples(&c).map_err(err)?, centre_dim(&g, &c).map_err(err)?], None),
        3 => (vec![double_simple_count(&c).map_err(err)?], Some(one_loop_sectors(&c).map_err(err)?)),
        d => return Err(err(Error::Degree(d))),
    };
    to_py(py, &serde_json::json!({ "reports": reports, "sectors": sectors }))
}

/// Transgresses a cocycle and returns the result in cocycle-file form.
#[pyfunction]
#[pyo3(signature = (group, cocycle, map, degree = 2, order = 4))]
fn transgress<'py>(
    py: Python<'py>,
    group: &str,
    cocycle: &str,
    map: &str,
    degree: usize,
    order: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let map = parse_map(map)?;
    let (g, b) = input(group)?;
    let c = load(&g, &b, cocycle, degree, map.input_twist(), order)?;
    let lg = map.loop_groupoid(&b).map_err(err)?;
    let t = run_transgress(map, &lg, &c).map_err(err)?;
    to_py(py, &CocycleFile::from_cochain(&t))
}

/// Torsion rows as `(generators, parities, surface, phase)` tuples.
#[pyfunction]
#[pyo3(signature = (group, cocycle = "trivial", degree = 2, order = 4))]
fn torsion(group: &str, cocycle: &str, degree: usize, order: u64) -> PyResult<Vec<(Vec<String>, Vec<i64>, String, String)>> {
    let (g, b) = input(group)?;
    let c = load(&g, &b, cocycle, degree, Twist::Pi, order)?;
    let table = match c.degree() {
        2 => torsion_2d(&g, &c).map_err(err)?,
        3 => {
            let t = torsion_3d(&g, &c).map_err(err)?;
            check_doubly_odd_reduction(&g, &c, &t).map_err(err)?;
            t
        }
        d => return Err(err(Error::Degree(d))),
    };
    Ok(table
        .rows
        .iter()
        .map(|r| {
            (
                r.generators.iter().map(|&x| g.element_name(x).to_string()).collect(),
                r.parities.iter().map(|s| s.to_i64()).collect(),
                r.surface.to_string(),
                r.phase.to_string(),
            )
        })
        .collect())
}

/// Runs the acceptance criteria; returns `(criterion, name, cases, witness)`.
#[pyfunction]
#[pyo3(signature = (seed = 7))]
fn verify(py: Python<'_>, seed: u64) -> Vec<(usize, String, usize, Option<String>)> {
    let m = Manifest::standard();
    py.detach(|| suite::run(&m, seed))
        .into_iter()
        .map(|o| (o.criterion, o.name.to_string(), o.cases, o.witness))
        .collect()
}

#[pymodule(name = "jandl")]
fn jandl_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(elements, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(transgress, m)?)?;
    m.add_function(wrap_pyfunction!(torsion, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
