use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stark_core::integrals::{z_closed_form, z_quadrature, ZQuery};
use stark_core::laguerre::{count_sign_changes, u_eval, u_plot_samples};
use stark_core::perturbation::{enumerate_states, stark_energy};
use stark_core::scalar::Real;
use stark_core::siegert::{energy_scan, siegert_energy};
use stark_core::{Order, ParabolicState, SolverOptions};

use crate::args::{BasisPlotArgs, BenchArgs, EnergyArgs, Format, NumericArgs, ScanArgs, StatesArgs, ZintArgs};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{fmt_f64, write_csv, write_json, DeviationRow, Summary};

/// Value rounded to 15 significant digits, printed in shortest form.
fn short(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn order(o: u8) -> Order {
    Order::try_from(o).unwrap_or(Order::Second)
}

/// Rayon pool sized by `STARK_THREADS` when set.
fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("STARK_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("STARK_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::usage(e.to_string()))
}

fn emit(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::File {
            path: path.to_owned(),
            source,
        }),
        None => Ok(stdout.write_all(bytes)?),
    }
}

pub fn energy(args: &EnergyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let state = args.state;
    let exp = state.expansion();
    writeln!(stdout, "state {state}  n={}", state.principal())?;
    for (name, v) in [("e0", &exp.e0), ("e1", &exp.e1), ("e2", &exp.e2)] {
        writeln!(stdout, "{name} = {v}  ({})", short(f64::from_rational(v)))?;
    }
    writeln!(
        stdout,
        "E = {}  (F = {}, order {})",
        short(stark_energy(&state, args.field, order(args.order))),
        args.field,
        args.order
    )?;
    Ok(())
}

#[derive(Serialize)]
struct StateRow {
    n1: u32,
    n2: u32,
    m: u32,
    e0: String,
    e1: String,
    e2: String,
}

pub fn states(args: &StatesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows: Vec<StateRow> = enumerate_states(args.n)?
        .into_iter()
        .map(|s| {
            let e = s.expansion();
            StateRow {
                n1: s.n1,
                n2: s.n2,
                m: s.m,
                e0: e.e0.to_string(),
                e1: e.e1.to_string(),
                e2: e.e2.to_string(),
            }
        })
        .collect();
    let mut buf = Vec::new();
    match args.format {
        Some(Format::Csv) => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Some(Format::Json) => {
            serde_json::to_writer_pretty(&mut buf, &rows)?;
            writeln!(buf)?;
        }
        None => {
            writeln!(buf, "{:>4} {:>4} {:>4} {:>10} {:>6} {:>10}", "n1", "n2", "m", "e0", "e1", "e2")?;
            for r in &rows {
                writeln!(buf, "{:>4} {:>4} {:>4} {:>10} {:>6} {:>10}", r.n1, r.n2, r.m, r.e0, r.e1, r.e2)?;
            }
        }
    }
    emit(&buf, args.out.as_deref(), stdout)
}

pub fn zint(args: &ZintArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let q = ZQuery::new(args.alpha, args.k, args.kprime, args.m);
    let exact = z_closed_form(q);
    writeln!(stdout, "{exact}")?;
    if args.check {
        let value = f64::from_rational(&exact);
        let quad = z_quadrature(q);
        writeln!(stdout, "quadrature = {}", fmt_f64(quad))?;
        writeln!(stdout, "abs_diff = {}", fmt_f64((quad - value).abs()))?;
    }
    Ok(())
}

pub fn basis_plot(args: &BasisPlotArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !(args.x_max > 0.0 && args.x_max.is_finite()) {
        return Err(CliError::usage("x-max must be positive"));
    }
    if args.points < 2 {
        return Err(CliError::usage("need at least two points"));
    }
    let samples = u_plot_samples(args.k, args.m, args.x_max, args.points);
    let nodes = count_sign_changes(samples.iter().map(|&(x, _)| u_eval(args.k, args.m, x)));
    let mut buf = Vec::new();
    writeln!(buf, "# k={} m={} nodes={}", args.k, args.m, nodes)?;
    writeln!(buf, "x,u_norm_sq")?;
    for (x, y) in samples {
        writeln!(buf, "{},{}", fmt_f64(x), fmt_f64(y))?;
    }
    emit(&buf, args.out.as_deref(), stdout)
}

pub fn numeric(args: &NumericArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let defaults = SolverOptions::default();
    let opts = SolverOptions {
        tol: args.solver.tol.unwrap_or(defaults.tol),
        h_per_n: args.solver.h_per_n.unwrap_or(defaults.h_per_n),
        refinements: args.solver.refinements.unwrap_or(defaults.refinements),
        ..defaults
    };
    let sol = siegert_energy(&args.state, args.field, &opts)?;
    let e_pert = stark_energy(&args.state, args.field, Order::Second);
    match args.format {
        Some(Format::Json) => {
            let v = json!({
                "state": format!("{},{},{}", args.state.n1, args.state.n2, args.state.m),
                "F": args.field,
                "e_num_re": sol.energy.re,
                "e_num_im": sol.energy.im,
                "beta1_re": sol.beta1.re,
                "beta1_im": sol.beta1.im,
                "beta2_re": sol.beta2.re,
                "beta2_im": sol.beta2.im,
                "e_pert": e_pert,
                "iterations": sol.iterations,
                "residual": sol.residual,
                "converged": sol.converged,
                "boundary": format!("{:?}", sol.boundary).to_lowercase(),
            });
            serde_json::to_writer_pretty(&mut *stdout, &v)?;
            writeln!(stdout)?;
        }
        Some(Format::Csv) => return Err(CliError::usage("numeric supports --format json only")),
        None => {
            writeln!(stdout, "state {}  F = {}", args.state, args.field)?;
            writeln!(stdout, "E = {} {:+e}i", fmt_f64(sol.energy.re), sol.energy.im)?;
            writeln!(stdout, "width = {:e}", -2.0 * sol.energy.im)?;
            writeln!(stdout, "beta1 = {} {:+e}i", fmt_f64(sol.beta1.re), sol.beta1.im)?;
            writeln!(stdout, "beta2 = {} {:+e}i", fmt_f64(sol.beta2.re), sol.beta2.im)?;
            writeln!(stdout, "e_pert = {}", fmt_f64(e_pert))?;
            writeln!(
                stdout,
                "iterations = {}  residual = {:e}  converged = {}  boundary = {:?}",
                sol.iterations, sol.residual, sol.converged, sol.boundary
            )?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct ScanRow {
    #[serde(rename = "F")]
    field: f64,
    n1: u32,
    n2: u32,
    m: u32,
    e_pert: f64,
    e_num_re: Option<f64>,
    e_num_im: Option<f64>,
    converged: Option<bool>,
}

pub fn scan(args: &ScanArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let fallback = match args.n {
        Some(n) => Some(*enumerate_states(n)?.first().expect("nonempty shell")),
        None => None,
    };
    let cfg = RunConfig::resolve(&args.run, false, fallback)?;
    let states: Vec<ParabolicState> = match args.n {
        Some(n) => enumerate_states(n)?,
        None => vec![cfg.state],
    };
    let fields = cfg.fields();
    let opts = cfg.solver_options();
    let ord = order(cfg.order);
    let per_state: Vec<Vec<ScanRow>> = pool()?.install(|| {
        states
            .par_iter()
            .map(|s| {
                let numeric = if args.perturbative_only {
                    vec![None; fields.len()]
                } else {
                    energy_scan(s, &fields, &opts).into_iter().map(Some).collect()
                };
                fields
                    .iter()
                    .zip(numeric)
                    .map(|(&f, sol)| {
                        let ok = sol.as_ref().and_then(|r| r.as_ref().ok());
                        ScanRow {
                            field: f,
                            n1: s.n1,
                            n2: s.n2,
                            m: s.m,
                            e_pert: stark_energy(s, f, ord),
                            e_num_re: ok.map(|x| x.energy.re),
                            e_num_im: ok.map(|x| x.energy.im),
                            converged: sol.map(|r| r.map(|x| x.converged).unwrap_or(false)),
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let rows: Vec<ScanRow> = per_state.into_iter().flatten().collect();

    let mut buf = Vec::new();
    let mut echo = cfg.echo();
    if let Some(n) = args.n {
        echo[0] = format!("shell={n}");
    }
    match cfg.format {
        Format::Csv => {
            for line in &echo {
                writeln!(buf, "# {line}")?;
            }
            writeln!(buf, "F,n1,n2,m,e_pert,e_num_re,e_num_im,converged")?;
            for r in &rows {
                writeln!(
                    buf,
                    "{},{},{},{},{},{},{},{}",
                    fmt_f64(r.field),
                    r.n1,
                    r.n2,
                    r.m,
                    fmt_f64(r.e_pert),
                    r.e_num_re.map(fmt_f64).unwrap_or_default(),
                    r.e_num_im.map(fmt_f64).unwrap_or_default(),
                    r.converged.map(|c| c.to_string()).unwrap_or_default()
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &json!({ "rows": rows, "config": echo }))?;
            writeln!(buf)?;
        }
    }
    emit(&buf, cfg.out.as_deref(), stdout)
}

/// Deviation rows of one state over the configured grid. Points are solved
/// independently, so the result does not depend on the thread count.
pub fn bench_rows(cfg: &RunConfig) -> Result<Vec<DeviationRow>, CliError> {
    let opts = cfg.solver_options();
    let ord = order(cfg.order);
    let fields = cfg.fields();
    Ok(pool()?.install(|| {
        fields
            .par_iter()
            .map(|&f| {
                let sol = siegert_energy(&cfg.state, f, &opts);
                DeviationRow::new(f, stark_energy(&cfg.state, f, ord), &sol)
            })
            .collect()
    }))
}

pub fn bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run, args.strict, None)?;
    let rows = bench_rows(&cfg)?;
    let mut buf = Vec::new();
    match cfg.format {
        Format::Csv => write_csv(&mut buf, &cfg, &rows)?,
        Format::Json => write_json(&mut buf, &cfg, &rows)?,
    }
    emit(&buf, cfg.out.as_deref(), stdout)?;
    let summary = Summary::of(&rows);
    eprintln!("{} {}", cfg.state, summary.line());
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        return Err(CliError::Unconverged {
            failed,
            total: rows.len(),
            strict: cfg.strict,
        });
    }
    Ok(())
}
