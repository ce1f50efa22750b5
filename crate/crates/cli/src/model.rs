use std::collections::BTreeMap;

use asymspec::models::{by_name, custom, ModelDescriptor, Profiles};
use serde_json::{Map, Value};

use crate::args::ModelArgs;
use crate::error::CliError;
use crate::output::num;

/// Parameter flags each model accepts.
fn accepted(model: &str) -> &'static [&'static str] {
    match model {
        "toeplitz" => &["a", "b"],
        "lipkin-even" | "lipkin-odd" | "uniaxial" => &["gamma"],
        "collective" => &["hx", "hy", "hz", "gx", "gy"],
        "laguerre" => &["alpha0", "alpha1"],
        "jacobi" => &["alpha0", "alpha1", "beta0", "beta1"],
        _ => &[],
    }
}

fn numeric_flags(m: &ModelArgs) -> BTreeMap<String, f64> {
    let pairs = [
        ("gamma", m.gamma),
        ("alpha0", m.alpha0),
        ("alpha1", m.alpha1),
        ("beta0", m.beta0),
        ("beta1", m.beta1),
        ("a", m.a),
        ("b", m.b),
        ("hx", m.hx),
        ("hy", m.hy),
        ("hz", m.hz),
        ("gx", m.gx),
        ("gy", m.gy),
    ];
    pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
}

pub fn build(m: &ModelArgs) -> Result<ModelDescriptor, CliError> {
    let params = numeric_flags(m);
    let allowed = accepted(&m.model);
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("--{k} does not apply to model '{}'", m.model)));
    }
    let exprs = [&m.a0, &m.a1, &m.b0, &m.b1];
    if m.model == "custom" {
        let (Some(a0), Some(b0)) = (&m.a0, &m.b0) else {
            return Err(CliError::Usage("model 'custom' needs --A0 and --B0".into()));
        };
        let a1 = m.a1.as_deref().unwrap_or("0");
        let b1 = m.b1.as_deref().unwrap_or("0");
        return custom(a0, a1, b0, b1).map_err(CliError::usage);
    }
    if exprs.iter().any(|e| e.is_some()) {
        return Err(CliError::Usage("--A0/--A1/--B0/--B1 apply only to model 'custom'".into()));
    }
    by_name(&m.model, &params).map_err(CliError::usage)
}

pub fn parameters(model: &ModelDescriptor, m: &ModelArgs) -> Map<String, Value> {
    let mut out: Map<String, Value> = model.parameters.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    for (k, e) in [("A0", &m.a0), ("A1", &m.a1), ("B0", &m.b0), ("B1", &m.b1)] {
        if let Some(e) = e {
            out.insert(k.into(), Value::String(e.clone()));
        }
    }
    out
}

pub fn is_band(model: &ModelDescriptor) -> bool {
    matches!(model.profiles, Profiles::Band(_))
}

/// `2j` from a user-supplied `j`, which must be a positive multiple of 1/2.
pub fn two_j(j: f64) -> Result<usize, CliError> {
    let t = 2.0 * j;
    if !(t >= 1.0) || (t - t.round()).abs() > 1e-9 {
        return Err(CliError::Usage(format!("j = {j} must be a positive multiple of 1/2")));
    }
    Ok(t.round() as usize)
}
