use std::f64::consts::PI;

use asymspec::expr::parse;
use asymspec::models::{collective_spin_matrix, ModelDescriptor, RootSolver};
use asymspec::numerics::ScalarFn;
use asymspec::oracle::{eig_dense_hermitian, eig_tridiagonal, finite_trace, richardson_t1, staircase};
use asymspec::sequence::{spectral_range, ProfileSet};
use asymspec::spectra::{self, stieltjes_d0, stieltjes_d1, trace_t0, trace_t1, BandSpectrum, Spectrum};
use asymspec::states::{gap_check, Branch, Eigenstate, ObservableProfiles};
use asymspec::symbols::{exact_symbol, h0_h1};
use asymspec::Execution;
use serde_json::{json, Map, Value};

use crate::args::{DosArgs, ExpectArgs, GridArgs, ModelArgs, OutputArgs, RootsArgs, SymbolArgs, TraceArgs, VerifyArgs};
use crate::error::CliError;
use crate::model::{self, is_band, two_j};
use crate::output::{num, Metadata, Report, Table};

type CliResult<T> = Result<T, CliError>;

fn execution(out: &OutputArgs) -> Execution {
    if out.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn metadata(command: &str, model: &ModelDescriptor, args: &ModelArgs, out: &OutputArgs) -> Metadata {
    let mut tolerances = Map::new();
    tolerances.insert("quadrature".into(), num(out.tol));
    Metadata {
        command: command.into(),
        model: model.name.clone(),
        parameters: model::parameters(model, args),
        tolerances,
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn tridiagonal(model: &ModelDescriptor) -> CliResult<&ProfileSet> {
    model.tridiagonal().map_err(CliError::usage)
}

fn expression(text: &str, what: &str) -> CliResult<ScalarFn> {
    parse(text)
        .map(ScalarFn::from_expression)
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

fn check_tol(out: &OutputArgs) -> CliResult<()> {
    if out.tol > 0.0 && out.tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must be positive, got {}", out.tol)))
    }
}

/// Evenly spaced λ values, endpoints included.
fn lambda_grid(g: &GridArgs, range: (f64, f64)) -> CliResult<Vec<f64>> {
    let lo = g.lambda_min.unwrap_or(range.0);
    let hi = g.lambda_max.unwrap_or(range.1);
    let n = g.lambda_points;
    if n == 0 {
        return Err(CliError::Usage("--lambda-points must be positive".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || (n > 1 && lo >= hi) {
        return Err(CliError::Usage(format!("empty λ grid [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

pub fn dos(a: &DosArgs) -> CliResult<()> {
    check_tol(&a.output)?;
    let model = model::build(&a.model)?;
    let meta = metadata("dos", &model, &a.model, &a.output);
    let exec = execution(&a.output);
    let report = if is_band(&model) {
        dos_band(&model, a, exec, meta)?
    } else {
        dos_tridiagonal(&model, a, exec, meta)?
    };
    report.write(&a.output)?;
    Ok(())
}

fn dos_tridiagonal(model: &ModelDescriptor, a: &DosArgs, exec: Execution, meta: Metadata) -> CliResult<Report> {
    let p = tridiagonal(model)?;
    let sp = Spectrum::new(p).with_tolerance(a.output.tol);
    let grid = lambda_grid(&a.grid, sp.range())?;
    let first = a.order == 1;
    let closed = model.closed_forms.as_ref();
    let mut columns = vec!["lambda", "d0"];
    if first {
        columns.push("d1");
    }
    columns.push("rho0");
    if first {
        columns.push("rho1_cont");
    }
    if let Some(cf) = closed {
        if cf.d0.is_some() {
            columns.push("d0_closed");
        }
        if first && cf.d1.is_some() {
            columns.push("d1_closed");
        }
        columns.push("rho0_closed");
        if first {
            columns.push("rho1_closed");
        }
    }
    let rows: Vec<CliResult<Vec<Value>>> = exec.map(&grid, |&l| {
        let mut row = vec![num(l), num(sp.d0(l).map_err(CliError::during("d0"))?)];
        if first {
            row.push(num(sp.d1(l).map_err(CliError::during("d1"))?));
        }
        // densities are undefined at singular points; those cells stay empty
        row.push(num(sp.rho0(l).unwrap_or(f64::NAN)));
        if first {
            row.push(num(sp.rho1_continuous(l).unwrap_or(f64::NAN)));
        }
        if let Some(cf) = closed {
            let eval = |f: &asymspec::models::Evaluator| num(f(l).unwrap_or(f64::NAN));
            if let Some(d0) = &cf.d0 {
                row.push(eval(d0));
            }
            if first {
                if let Some(d1) = &cf.d1 {
                    row.push(eval(d1));
                }
            }
            row.push(eval(&cf.rho0));
            if first {
                row.push(eval(&cf.rho1));
            }
        }
        Ok(row)
    });
    let mut table = Table::new(&columns);
    for row in rows {
        table.push(row?);
    }
    let mut report = Report::new(meta, table);
    if first {
        let atoms = sp.atoms().map_err(CliError::during("atoms"))?;
        let list: Vec<Value> = atoms.iter().map(|t| json!({"lambda": num(t.location), "weight": num(t.weight)})).collect();
        report.sidecars.push(("atoms".into(), json!({ "atoms": list })));
    }
    Ok(report)
}

fn dos_band(model: &ModelDescriptor, a: &DosArgs, exec: Execution, meta: Metadata) -> CliResult<Report> {
    let bp = model.band().map_err(CliError::usage)?;
    let sp = BandSpectrum::new(&bp).with_tolerance(a.output.tol);
    let grid = lambda_grid(&a.grid, sp.range())?;
    let first = a.order == 1;
    let rows: Vec<CliResult<Vec<Value>>> = exec.map(&grid, |&l| {
        let (d0, d1) = sp.d0_d1(l).map_err(CliError::during("band distribution"))?;
        let mut row = vec![num(l), num(d0)];
        if first {
            row.push(num(d1));
        }
        Ok(row)
    });
    let mut table = Table::new(if first { &["lambda", "d0", "d1"] } else { &["lambda", "d0"] });
    for row in rows {
        table.push(row?);
    }
    Ok(Report::new(meta, table))
}

struct RootStats {
    max: f64,
    mean: f64,
}

fn stats(v: &[f64]) -> RootStats {
    RootStats {
        max: v.iter().copied().fold(0.0, f64::max),
        mean: v.iter().sum::<f64>() / v.len().max(1) as f64,
    }
}

pub fn roots(a: &RootsArgs) -> CliResult<()> {
    check_tol(&a.output)?;
    let model = model::build(&a.model)?;
    if model.name != "laguerre" && model.name != "jacobi" {
        return Err(CliError::Usage(format!("roots needs model laguerre or jacobi, not '{}'", model.name)));
    }
    let meta = metadata("roots", &model, &a.model, &a.output);
    let exec = execution(&a.output);
    let solvers = [RootSolver::new(&model, 0), RootSolver::new(&model, 1)];
    let [s0, s1] = solvers.map(|s| s.map_err(CliError::usage));
    let (s0, s1) = (s0?, s1?);
    let mut columns = vec!["j", "n", "lambda0", "lambda1"];
    if a.verify {
        columns.extend(["exact", "err0_pct", "err1_pct", "gap_err0_pct", "gap_err1_pct"]);
    }
    let mut table = Table::new(&columns);
    let mut summary = Map::new();
    let mut failures = Vec::new();
    for &j in &a.j {
        let tj = two_j(j)?;
        let approx = exec
            .try_map_range(tj + 1, |k| Ok::<_, asymspec::Error>((s0.solve(tj, k + 1)?, s1.solve(tj, k + 1)?)))
            .map_err(CliError::during("root solve"))?;
        let exact = if a.verify {
            let m = model.matrix(tj).map_err(CliError::usage)?;
            Some(eig_tridiagonal(&m, false).map_err(CliError::during("oracle"))?.eigenvalues)
        } else {
            None
        };
        let (mut e0, mut e1, mut g0, mut g1) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (k, (r0, r1)) in approx.iter().enumerate() {
            let mut row = vec![num(j), json!(k + 1), num(r0.lambda), num(r1.lambda)];
            if let Some(ex) = &exact {
                let e = ex[k];
                let gap = if k + 1 < ex.len() { ex[k + 1] - e } else { e - ex[k - 1] };
                let (d0, d1) = ((r0.lambda - e).abs(), (r1.lambda - e).abs());
                let rel = |d: f64| 100.0 * d / e.abs();
                let by_gap = |d: f64| 100.0 * d / gap;
                e0.push(rel(d0));
                e1.push(rel(d1));
                g0.push(by_gap(d0));
                g1.push(by_gap(d1));
                row.extend([num(e), num(rel(d0)), num(rel(d1)), num(by_gap(d0)), num(by_gap(d1))]);
            }
            table.push(row);
        }
        if a.verify {
            let (r0, r1, q0, q1) = (stats(&e0), stats(&e1), stats(&g0), stats(&g1));
            eprintln!(
                "j = {j}: order 1 max {:.4}% mean {:.5}% (gap-relative max {:.3}% mean {:.4}%); order 0 max {:.4}% mean {:.5}%",
                r1.max, r1.mean, q1.max, q1.mean, r0.max, r0.mean
            );
            summary.insert(
                j.to_string(),
                json!({
                    "order0": {"max_pct": num(r0.max), "mean_pct": num(r0.mean), "gap_max_pct": num(q0.max), "gap_mean_pct": num(q0.mean)},
                    "order1": {"max_pct": num(r1.max), "mean_pct": num(r1.mean), "gap_max_pct": num(q1.max), "gap_mean_pct": num(q1.mean)},
                }),
            );
            if r1.max > a.max_error_pct || r1.mean > a.mean_error_pct {
                failures.push(format!("j = {j}: max {:.4}% mean {:.5}%", r1.max, r1.mean));
            }
        }
    }
    let mut report = Report::new(meta, table);
    if a.verify {
        report.extras.insert("summary".into(), Value::Object(summary));
    }
    report.write(&a.output)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "linear-order root errors above {}% max / {}% mean: {}",
            a.max_error_pct,
            a.mean_error_pct,
            failures.join("; ")
        )))
    }
}

pub fn expect(a: &ExpectArgs) -> CliResult<()> {
    check_tol(&a.output)?;
    let model = model::build(&a.model)?;
    let p = tridiagonal(&model)?;
    let meta = metadata("expect", &model, &a.model, &a.output);
    let q = ObservableProfiles::new(expression(&a.q_a0, "--Q-A0")?, expression(&a.q_b0, "--Q-B0")?);
    let grid = lambda_grid(&a.grid, spectral_range(p))?;
    let values: Vec<(f64, Vec<f64>)> = execution(&a.output).map(&grid, |&l| match Eigenstate::new(p, l) {
        Ok(st) => {
            let all = st.expectation(&q, Branch::All).unwrap_or(f64::NAN);
            let parts = (0..st.support.len())
                .map(|k| st.expectation(&q, Branch::Interval(k)).unwrap_or(f64::NAN))
                .collect();
            (all, parts)
        }
        Err(_) => (f64::NAN, Vec::new()),
    });
    let split = values.iter().filter(|v| v.1.len() > 1).count();
    if split > 0 && !a.branches {
        eprintln!(
            "warning: the support splits into several intervals at {split} of {} λ values; \
             the unrestricted expectation there mixes branches (see --branches)",
            grid.len()
        );
    }
    let width = if a.branches { values.iter().map(|v| v.1.len()).max().unwrap_or(0).max(2) } else { 0 };
    let names: Vec<String> = (0..width).map(|k| format!("branch{k}")).collect();
    let mut columns = vec!["lambda", "expectation"];
    columns.extend(names.iter().map(String::as_str));
    let mut table = Table::new(&columns);
    for (l, (all, parts)) in grid.iter().zip(&values) {
        let mut row = vec![num(*l), num(*all)];
        row.extend((0..width).map(|k| num(parts.get(k).copied().unwrap_or(f64::NAN))));
        table.push(row);
    }
    Report::new(meta, table).write(&a.output)?;
    Ok(())
}

pub fn trace(a: &TraceArgs) -> CliResult<()> {
    check_tol(&a.output)?;
    let model = model::build(&a.model)?;
    let p = tridiagonal(&model)?;
    let meta = metadata("trace", &model, &a.model, &a.output);
    let f = expression(&a.f, "--f")?;
    let tol = a.output.tol;
    let t0 = trace_t0(p, &f, tol).map_err(CliError::during("T0"))?;
    let t1 = trace_t1(p, &f, tol).map_err(CliError::during("T1"))?;
    let mut table = Table::new(&["quantity", "j", "value"]);
    table.push(vec![json!("t0"), Value::Null, num(t0)]);
    table.push(vec![json!("t1"), Value::Null, num(t1)]);
    let mut failure = None;
    if a.verify {
        let sizes = a.j.iter().map(|&j| two_j(j)).collect::<CliResult<Vec<_>>>()?;
        let finite = execution(&a.output)
            .try_map_range(sizes.len(), |k| {
                let e = eig_tridiagonal(&model.matrix(sizes[k])?, false)?;
                Ok::<_, asymspec::Error>((sizes[k] as f64 / 2.0, finite_trace(&e, &f)))
            })
            .map_err(CliError::during("oracle traces"))?;
        for &(j, t) in &finite {
            table.push(vec![json!("finite"), num(j), num(t)]);
        }
        let rich = richardson_t1(&finite, t0).map_err(CliError::usage)?;
        let residual = (rich - t1).abs();
        table.push(vec![json!("richardson_t1"), Value::Null, num(rich)]);
        table.push(vec![json!("residual"), Value::Null, num(residual)]);
        eprintln!("T1 = {t1}; Richardson estimate {rich}; residual {residual:.3e}");
        if residual > a.max_residual * t1.abs().max(1.0) {
            failure = Some(format!("|Richardson - T1| = {residual:.3e} exceeds {}", a.max_residual));
        }
    }
    Report::new(meta, table).write(&a.output)?;
    failure.map_or(Ok(()), |m| Err(CliError::Verification(m)))
}

pub fn symbol(a: &SymbolArgs) -> CliResult<()> {
    let model = model::build(&a.model)?;
    let p = tridiagonal(&model)?;
    let meta = metadata("symbol", &model, &a.model, &a.output);
    if a.x_points == 0 || a.theta_points == 0 {
        return Err(CliError::Usage("--x-points and --theta-points must be positive".into()));
    }
    let s = h0_h1(p);
    let xs: Vec<f64> = (1..=a.x_points).map(|k| k as f64 / (a.x_points + 1) as f64).collect();
    let thetas: Vec<f64> = if a.theta_points == 1 {
        vec![0.0]
    } else {
        (0..a.theta_points).map(|k| PI * k as f64 / (a.theta_points - 1) as f64).collect()
    };
    let mut table = Table::new(&["j", "x", "theta", "exact", "h0", "h1", "truncated", "residual", "scaled_residual"]);
    for &j in &a.j {
        let tj = two_j(j)?;
        let m = model.matrix(tj).map_err(CliError::usage)?;
        for &x in &xs {
            for &t in &thetas {
                let exact = exact_symbol(&m, x, t);
                let h0 = s.h0(x, t);
                let h1 = s.h1(x, t).map_err(CliError::during("h1"))?;
                let truncated = h0 + h1 / j;
                let r = exact - truncated;
                table.push(vec![num(j), num(x), num(t), num(exact), num(h0), num(h1), num(truncated), num(r), num(j * j * r.abs())]);
            }
        }
    }
    Report::new(meta, table).write(&a.output)?;
    Ok(())
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
    passed: bool,
}

fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value,
        threshold,
        passed: value <= threshold,
    }
}

fn poly(k: i32) -> ScalarFn {
    let label = format!("x^{k}");
    ScalarFn::new(label, move |x| x.powi(k))
        .with_derivative(move |x| k as f64 * x.powi(k - 1))
        .with_second_derivative(move |x| (k * (k - 1)) as f64 * x.powi((k - 2).max(0)))
}

fn verify_tridiagonal(model: &ModelDescriptor, a: &VerifyArgs) -> CliResult<Vec<Check>> {
    let p = tridiagonal(model)?;
    let tol = a.output.tol;
    let sp = Spectrum::new(p).with_tolerance(tol);
    let fail = CliError::during;
    let mut checks = Vec::new();

    let (lo, hi) = sp.range();
    let mut worst_step = 0.0f64;
    let mut last = sp.d0(lo - 1e-3 * (hi - lo)).map_err(fail("d0"))?;
    for k in 0..=200 {
        let v = sp.d0(lo + (hi - lo) * k as f64 / 200.0).map_err(fail("d0"))?;
        worst_step = worst_step.max(last - v);
        last = v;
    }
    checks.push(at_most("d0_monotone", worst_step, 1e-12));

    let rho0 = spectra::rho(p, 0).map_err(fail("rho0"))?;
    let mass = rho0.continuous_mass(1e-9).map_err(fail("rho0 mass"))?;
    checks.push(at_most("rho0_mass", (mass - 1.0).abs(), 1e-6));
    let rho1 = spectra::rho(p, 1).map_err(fail("rho1"))?;
    let mass = rho1.continuous_mass(1e-7).map_err(fail("rho1 mass"))? + rho1.atom_mass();
    checks.push(at_most("rho1_mass", mass.abs(), 1e-5));

    let mut identity = 0.0f64;
    for f in [poly(1), poly(2), poly(4)] {
        let scale = |t: f64| t.abs().max(1.0);
        let t0 = trace_t0(p, &f, tol).map_err(fail("T0"))?;
        let s0 = stieltjes_d0(&sp, &f, tol).map_err(fail("Stieltjes D0"))?;
        let t1 = trace_t1(p, &f, tol).map_err(fail("T1"))?;
        let s1 = stieltjes_d1(&sp, &f, tol).map_err(fail("Stieltjes D1"))?;
        identity = identity.max((t0 - s0).abs() / scale(t0)).max((t1 - s1).abs() / scale(t1));
    }
    checks.push(at_most("trace_identity", identity, 1e-6));

    let sizes = a.j.iter().map(|&j| two_j(j)).collect::<CliResult<Vec<_>>>()?;
    let square = poly(2);
    let mut finite = Vec::new();
    for &tj in &sizes {
        let j = tj as f64 / 2.0;
        let m = model.matrix(tj).map_err(CliError::usage)?;
        let e = eig_tridiagonal(&m, false).map_err(fail("oracle"))?;
        finite.push((j, finite_trace(&e, &square)));
        let dim = e.dim() as f64;
        let (mut r0, mut r1) = (0.0, 0.0);
        for (k, &l) in e.eigenvalues.iter().enumerate() {
            let target = (k + 1) as f64 / dim;
            let d0 = sp.d0(l).map_err(fail("d0"))?;
            let d1 = sp.d1(l).map_err(fail("d1"))?;
            r0 += (d0 - target).abs();
            r1 += (d0 + (d1 + 0.25) / j - target).abs();
        }
        checks.push(at_most(format!("index_first_order_gain_j{j}"), r1 / r0, 0.5));
        // the spacing rule holds where the support is a single interval, away from singular points
        let singular = sp.singular_points();
        let clearance = |l: f64| singular.iter().map(|s| (s - l).abs()).fold(f64::INFINITY, f64::min);
        let single = (0..e.dim() - 1)
            .filter(|&k| Eigenstate::new(p, e.eigenvalues[k]).is_ok_and(|st| st.support.is_single_interval()))
            .max_by(|&x, &y| clearance(e.eigenvalues[x]).total_cmp(&clearance(e.eigenvalues[y])));
        if let Some(k) = single {
            let g = gap_check(&m, p, k).map_err(fail("gap"))?;
            checks.push(at_most(format!("bulk_gap_j{j}"), (g - 1.0).abs(), 0.1));
        }
    }
    if finite.len() >= 2 {
        let t0 = trace_t0(p, &square, tol).map_err(fail("T0"))?;
        let t1 = trace_t1(p, &square, tol).map_err(fail("T1"))?;
        let rich = richardson_t1(&finite, t0).map_err(CliError::usage)?;
        checks.push(at_most("trace_richardson_x2", (rich - t1).abs() / t1.abs().max(1.0), 0.05));

        let s = h0_h1(p);
        let scaled = |tj: usize| -> CliResult<f64> {
            let j = tj as f64 / 2.0;
            let m = model.matrix(tj).map_err(CliError::usage)?;
            let h1 = s.h1(0.5, 0.0).map_err(fail("h1"))?;
            let r = exact_symbol(&m, 0.5, 0.0) - (s.h0(0.5, 0.0) + h1 / j);
            Ok(j * j * r.abs())
        };
        let (small, large) = (sizes[0], sizes[sizes.len() - 1]);
        let (a1, a2) = (scaled(small)?, scaled(large)?);
        // residuals below 1e-12 are rounding noise
        let floor = 1e-12 * (large as f64 / 2.0).powi(2);
        checks.push(at_most("symbol_second_order", a2.max(floor) / a1.max(floor), 2.0));
    }
    Ok(checks)
}

fn verify_band(model: &ModelDescriptor, a: &VerifyArgs) -> CliResult<Vec<Check>> {
    let bp = model.band().map_err(CliError::usage)?;
    let sp = BandSpectrum::new(&bp).with_tolerance(a.output.tol);
    let fail = CliError::during;
    let (lo, hi) = sp.range();
    let pad = 1e-3 * (hi - lo);
    let mut checks = vec![
        at_most("d0_below_range", sp.d0(lo - pad).map_err(fail("d0"))?.abs(), 1e-12),
        at_most("d0_above_range", (sp.d0(hi + pad).map_err(fail("d0"))? - 1.0).abs(), 1e-12),
    ];
    let grid: Vec<f64> = (0..60).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 60.0).collect();
    let d0: Vec<f64> = grid.iter().map(|&l| sp.d0(l)).collect::<Result<_, _>>().map_err(fail("d0"))?;
    let worst_step = d0.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    checks.push(at_most("d0_monotone", worst_step, 1e-12));
    let h = [
        model.parameter("hx").unwrap_or(0.0),
        model.parameter("hy").unwrap_or(0.0),
        model.parameter("hz").unwrap_or(0.0),
    ];
    let (gx, gy) = (model.parameter("gx").unwrap_or(0.0), model.parameter("gy").unwrap_or(0.0));
    for &j in &a.j {
        let tj = two_j(j)?;
        let m = collective_spin_matrix(h, gx, gy, tj).map_err(CliError::usage)?;
        let e = eig_dense_hermitian(&m).map_err(fail("oracle"))?;
        let dev = grid.iter().zip(&d0).map(|(&l, v)| (staircase(&e, l) - v).abs()).sum::<f64>() / grid.len() as f64;
        checks.push(at_most(format!("staircase_mean_deviation_j{j}"), dev, 2.0 / j));
    }
    Ok(checks)
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    check_tol(&a.output)?;
    let model = model::build(&a.model)?;
    let meta = metadata("verify", &model, &a.model, &a.output);
    let checks = if is_band(&model) { verify_band(&model, a)? } else { verify_tridiagonal(&model, a)? };
    let mut table = Table::new(&["check", "value", "threshold", "passed"]);
    for c in &checks {
        eprintln!("{} {}: {:.3e} (limit {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
        table.push(vec![json!(c.name), num(c.value), num(c.threshold), json!(c.passed)]);
    }
    Report::new(meta, table).write(&a.output)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}
