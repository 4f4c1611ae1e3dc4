use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use superiso::ec::{bateman_horn_constant as bh, isogeny_class_census, random_x_source, search_curves as curves};
use superiso::weil::{compute_i_bound, scan_all as scan, search, verify_weil_record, SurfaceContext};
use superiso::{PrimalityPolicy, Registry, SuperIsolatedWeilRecord, WeilSearchParams};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn context(field: &str) -> PyResult<SurfaceContext> {
    let reg = Registry::load_default().map_err(err)?;
    SurfaceContext::new(reg.get(field).map_err(err)?).map_err(err)
}

#[pyfunction]
fn is_prime(n: BigInt) -> bool {
    superiso::is_prime(&n, &PrimalityPolicy::default())
}

#[pyfunction]
fn kronecker_class_number(d: i64) -> PyResult<u64> {
    superiso::quadratic::kronecker_class_number(d).map_err(err)
}

/// Isomorphism classes per ordinary trace.
#[pyfunction]
fn census(p: u64) -> PyResult<Vec<(i64, u64)>> {
    Ok(isogeny_class_census(p).map_err(err)?.into_iter().collect())
}

#[pyfunction]
fn bateman_horn_constant(d: u32, prime_bound: usize) -> PyResult<f64> {
    bh(d, prime_bound).map_err(err)
}

/// Curve records as `key=value` lines.
#[pyfunction]
fn search_curves(py: Python<'_>, d: u32, bits: u64, count: usize, seed: u64) -> PyResult<Vec<String>> {
    if bits < 8 {
        return Err(err("bits must be at least 8"));
    }
    let xs = random_x_source(d, bits, seed).map_err(err)?;
    let recs = py.detach(|| curves(d, xs, count, &PrimalityPolicy::default())).map_err(err)?;
    Ok(recs.iter().map(ToString::to_string).collect())
}

/// `(id, alias, kind, disc_k, disc_f)` for every registry field.
#[pyfunction]
fn fields() -> PyResult<Vec<(String, Option<String>, String, BigInt, i64)>> {
    let reg = Registry::load_default().map_err(err)?;
    Ok(reg.fields.iter().map(|f| (f.id.clone(), f.alias.clone(), f.kind.as_str().to_string(), f.disc_k.clone(), f.disc_f)).collect())
}

/// `(f1 coefficients, (a, b, c) of f2)`.
#[pyfunction]
fn search_polynomials(field: &str) -> PyResult<(Vec<BigInt>, (BigInt, BigInt, BigInt))> {
    let ctx = context(field)?;
    let f2 = &ctx.polys.f2;
    Ok((ctx.polys.f1.to_vec(), (f2.a.clone(), f2.b.clone(), f2.c.clone())))
}

/// `(i_max, certificate line)`.
#[pyfunction]
fn surface_bound(field: &str, p_max: BigInt) -> PyResult<(u64, String)> {
    let c = compute_i_bound(&context(field)?, &p_max).map_err(err)?;
    Ok((c.i_max, c.to_string()))
}

#[pyfunction]
#[pyo3(signature = (field, p_max, cofactor_max = 1000))]
fn surface_search(py: Python<'_>, field: &str, p_max: BigInt, cofactor_max: u64) -> PyResult<Vec<String>> {
    let ctx = context(field)?;
    let mut params = WeilSearchParams::new(p_max);
    params.cofactor_max = cofactor_max;
    let (recs, _) = py.detach(|| search(&ctx, &params, &PrimalityPolicy::default())).map_err(err)?;
    Ok(recs.iter().map(ToString::to_string).collect())
}

/// Raises `ValueError` with the rejection reason.
#[pyfunction]
fn verify_surface_record(line: &str) -> PyResult<()> {
    let rec: SuperIsolatedWeilRecord = line.parse().map_err(err)?;
    let ctx = context(&rec.field_id)?;
    verify_weil_record(&ctx.field, &ctx.polys, &rec, &PrimalityPolicy::default()).map_err(err)
}

/// `(total classes, near-prime record lines)`.
#[pyfunction]
fn scan_all(py: Python<'_>, p_max: BigInt, cofactor_max: u64, r_min: BigInt, r_max: BigInt) -> PyResult<(usize, Vec<String>)> {
    let reg = Registry::load_default().map_err(err)?;
    let s = py.detach(|| scan(&reg, &p_max, cofactor_max, &r_min, &r_max, &PrimalityPolicy::default())).map_err(err)?;
    Ok((s.total_classes, s.near_prime.iter().map(ToString::to_string).collect()))
}

#[pymodule]
fn superiso_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker_class_number, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(bateman_horn_constant, m)?)?;
    m.add_function(wrap_pyfunction!(search_curves, m)?)?;
    m.add_function(wrap_pyfunction!(fields, m)?)?;
    m.add_function(wrap_pyfunction!(search_polynomials, m)?)?;
    m.add_function(wrap_pyfunction!(surface_bound, m)?)?;
    m.add_function(wrap_pyfunction!(surface_search, m)?)?;
    m.add_function(wrap_pyfunction!(verify_surface_record, m)?)?;
    m.add_function(wrap_pyfunction!(scan_all, m)?)?;
    Ok(())
}
