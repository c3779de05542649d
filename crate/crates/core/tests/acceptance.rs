//! Release gate: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::time::Instant;

use clap::Parser;
use num_bigint::BigInt;
use num_rational::BigRational;
use stark_cli::commands::bench_rows;
use stark_cli::config::RunConfig;
use stark_cli::args::RunArgs;
use stark_core::integrals::{z_closed_form, z_quadrature, ZQuery};
use stark_core::perturbation::{
    e1_closed, e1_from_integrals, e2_closed, e2_from_integrals, enumerate_states, stark_energy,
    states_up_to, SecondOrderReport,
};
use stark_core::scalar::Real;
use stark_core::siegert::siegert_energy;
use stark_core::{FirstOrderPairF64, Order, ParabolicState, SolverOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

/// `(k+m)!/k!` from plain factorials.
fn rising(k: u32, m: u32) -> BigRational {
    BigRational::new(fact(k + m), fact(k))
}

fn sigma(analytic: f64, numeric: f64) -> f64 {
    ((analytic - numeric) / numeric).abs() * 100.0
}

fn integral_oracle_sweep() -> Outcome {
    let start = Instant::now();
    let (mut worst_rel, mut worst_abs, mut bad, mut count) = (0.0f64, 0.0f64, 0usize, 0usize);
    for alpha in 0..=4 {
        for m in 0..=6 {
            for k in 0..=12 {
                for kp in 0..=12 {
                    let q = ZQuery::new(alpha, k, kp, m);
                    let exact = f64::from_rational(&z_closed_form(q));
                    let quad = z_quadrature(q);
                    count += 1;
                    if exact == 0.0 {
                        worst_abs = worst_abs.max(quad.abs());
                        bad += usize::from(quad.abs() > 1e-12);
                    } else {
                        let rel = ((quad - exact) / exact).abs();
                        worst_rel = worst_rel.max(rel);
                        bad += usize::from(rel > 1e-9);
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad == 0 && secs < 30.0,
        format!("{count} tuples, {bad} outside tolerance, max rel {worst_rel:.1e}, max abs at zeros {worst_abs:.1e}, {secs:.1} s"),
    )
}

fn classical_special_cases() -> Outcome {
    let mut zeroth = 0;
    let mut diagonal = 0;
    let mut off_diagonal = Vec::new();
    for m in 0..=6 {
        for k in 0..=12 {
            for kp in 0..=12 {
                let delta = if k == kp { rising(k, m) } else { BigRational::from_integer(0.into()) };
                if z_closed_form(ZQuery::new(0, k, kp, m)) != delta {
                    zeroth += 1;
                }
                let want = delta * BigRational::from_integer((2 * k + m + 1).into());
                let q = ZQuery::new(1, k, kp, m);
                let got = z_closed_form(q);
                if got != want {
                    if k == kp {
                        diagonal += 1;
                    } else {
                        off_diagonal.push((q, got, z_quadrature(q)));
                    }
                }
            }
        }
    }
    let example = off_diagonal
        .first()
        .map(|(q, z, quad)| format!(", e.g. Z(1,{},{};m={}) = {z} (quadrature {quad})", q.k, q.kprime, q.m))
        .unwrap_or_default();
    outcome(
        zeroth == 0 && diagonal == 0 && off_diagonal.is_empty(),
        format!(
            "alpha=0: {zeroth} mismatches; alpha=1: {diagonal} diagonal and {} off-diagonal mismatches{example}",
            off_diagonal.len()
        ),
    )
}

/// Every signed-`m` state with `n ≤ n_max`.
fn signed_states(n_max: u32) -> Vec<ParabolicState> {
    let mut out = Vec::new();
    for n in 1..=i64::from(n_max) {
        for m in -(n - 1)..=(n - 1) {
            for n1 in 0..n - m.abs() {
                let n2 = n - 1 - m.abs() - n1;
                out.push(ParabolicState::from_signed(n1, n2, m).expect("nonnegative"));
            }
        }
    }
    out
}

fn first_order_routes() -> Outcome {
    let states = signed_states(10);
    let bad = states.iter().filter(|s| e1_from_integrals(s) != e1_closed(s)).count();
    let e1_100 = e1_closed(&ParabolicState::new(1, 0, 0));
    let e1_021 = e1_closed(&ParabolicState::new(0, 2, 1));
    let spot = e1_100 == BigRational::from_integer(3.into()) && e1_021 == BigRational::from_integer((-12).into());
    outcome(
        states.len() == 385 && bad == 0 && spot,
        format!("{} states, {bad} disagree, e1(1,0,0) = {e1_100}, e1(0,2,1) = {e1_021}", states.len()),
    )
}

fn second_order_routes() -> Outcome {
    let states = signed_states(10);
    let bad = states.iter().filter(|s| e2_from_integrals(s) != e2_closed(s)).count();
    let ground = SecondOrderReport::new(ParabolicState::GROUND);
    let want_ground = BigRational::new((-9).into(), 4.into());
    let printed_k = BigRational::new((-3).into(), 4.into());
    outcome(
        bad == 0 && ground.closed == want_ground && ground.routes_agree() && ground.printed_k_sum == printed_k,
        format!("{} states, {bad} disagree; {ground}", states.len()),
    )
}

fn first_order_wavefunction_residual() -> Outcome {
    let mut worst = (0.0f64, ParabolicState::GROUND);
    for s in states_up_to(3) {
        let n = f64::from(s.principal());
        let r = FirstOrderPairF64::new(s).max_relative_residual(0.1, 20.0 * n, 25);
        if r > worst.0 {
            worst = (r, s);
        }
    }
    outcome(worst.0 <= 1e-6, format!("max relative residual {:.1e} at {}", worst.0, worst.1))
}

fn field_free_solver() -> Outcome {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let (mut de, mut db, mut failures) = (0.0f64, 0.0f64, Vec::new());
    let states = states_up_to(6);
    for s in &states {
        let n = f64::from(s.principal());
        match siegert_energy(s, 0.0, &opts) {
            Ok(sol) => {
                de = de.max((sol.energy.re + 0.5 / (n * n)).abs());
                db = db.max((sol.beta1.re - (f64::from(s.n1) + 0.5 * f64::from(s.m + 1)) / n).abs());
            }
            Err(e) => failures.push(format!("{s}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && de <= 1e-8 && db <= 1e-8 && secs < 60.0,
        format!("{} states, max |dE| {de:.1e}, max |dbeta1| {db:.1e}, {secs:.1} s {failures:?}", states.len()),
    )
}

fn low_state_deviations() -> Outcome {
    let opts = SolverOptions::default();
    let s = |state: ParabolicState, f: f64| -> Option<f64> {
        let sol = siegert_energy(&state, f, &opts).ok().filter(|x| x.converged)?;
        Some(sigma(stark_energy(&state, f, Order::Second), sol.energy.re))
    };
    let ground = s(ParabolicState::GROUND, 0.1);
    let red = s(ParabolicState::new(0, 1, 0), 0.01);
    let blue = s(ParabolicState::new(1, 0, 0), 0.01);
    let pass = matches!(ground, Some(g) if g < 1.0)
        && matches!(red, Some(r) if r < 2.0)
        && matches!(blue, Some(b) if (0.2..=0.8).contains(&b));
    let f = |x: Option<f64>| x.map_or("failed".to_string(), |v| format!("{v:.3}%"));
    outcome(
        pass,
        format!("(0,0,0)@0.1 {}, (0,1,0)@0.01 {}, (1,0,0)@0.01 {}", f(ground), f(red), f(blue)),
    )
}

fn bench_config(state: ParabolicState) -> RunConfig {
    let args = RunArgs {
        state: Some(state),
        ..Default::default()
    };
    RunConfig::resolve(&args, false, None).expect("default config")
}

fn high_shell_deviations() -> Outcome {
    let start = Instant::now();
    let mut max_sigma = (0.0f64, ParabolicState::GROUND);
    let mut failures = Vec::new();
    let mut not_monotone_extremes = Vec::new();
    let mut not_monotone_interior = Vec::new();
    for n in [4u32, 6, 8, 10] {
        let extremes = [
            ParabolicState::new(n - 1, 0, 0),
            ParabolicState::new(0, n - 1, 0),
            ParabolicState::new(0, 0, n - 1),
        ];
        for s in enumerate_states(n).expect("n >= 1") {
            let rows = bench_rows(&bench_config(s)).expect("bench runs");
            let sigmas: Vec<f64> = rows.iter().filter_map(|r| r.sigma_percent).collect();
            if sigmas.len() != rows.len() {
                failures.push(s);
                continue;
            }
            for &v in &sigmas {
                if v > max_sigma.0 {
                    max_sigma = (v, s);
                }
            }
            if sigmas.windows(2).any(|w| w[1] < w[0]) {
                if extremes.contains(&s) {
                    not_monotone_extremes.push(s);
                } else {
                    not_monotone_interior.push(s);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if !not_monotone_interior.is_empty() {
        println!(
            "    note: sigma changes direction for {} interior substates (first: {}); the perturbative residual changes sign there",
            not_monotone_interior.len(),
            not_monotone_interior[0]
        );
    }
    outcome(
        failures.is_empty() && max_sigma.0 < 3.5 && not_monotone_extremes.is_empty(),
        format!(
            "max sigma {:.3}% at {}, unconverged {:?}, non-monotone extreme substates {:?}, {secs:.0} s",
            max_sigma.0, max_sigma.1, failures, not_monotone_extremes
        ),
    )
}

fn cubic_residual_scaling() -> Outcome {
    let opts = SolverOptions::default();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..=10 {
        let f = 10f64.powf(-3.0 + f64::from(i) / 10.0);
        match siegert_energy(&ParabolicState::GROUND, f, &opts) {
            Ok(sol) => {
                let r = (stark_energy(&ParabolicState::GROUND, f, Order::Second) - sol.energy.re).abs();
                xs.push(f.ln());
                ys.push(r.ln());
            }
            Err(e) => return outcome(false, format!("solver failed at F = {f}: {e}")),
        }
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    outcome(
        (2.5..=3.5).contains(&slope),
        format!("log-log slope {slope:.3} (the ground state has no odd-order shift; the leading remainder is quartic)"),
    )
}

fn bench_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut files = Vec::new();
    for name in ["first.csv", "second.csv"] {
        let path = dir.path().join(name);
        let cli = stark_cli::Cli::try_parse_from([
            "stark",
            "bench",
            "--state",
            "0,1,0",
            "--out",
            path.to_str().expect("utf-8 path"),
        ])
        .expect("valid arguments");
        if let Err(e) = stark_cli::run(cli, &mut std::io::sink()) {
            return outcome(false, format!("bench failed: {e}"));
        }
        files.push(fs::read(&path).expect("bench output"));
    }
    outcome(
        files[0] == files[1] && !files[0].is_empty(),
        format!("{} bytes, identical: {}", files[0].len(), files[0] == files[1]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("integral closed form vs quadrature", integral_oracle_sweep),
        ("classical integral special cases", classical_special_cases),
        ("first-order routes agree", first_order_routes),
        ("second-order routes agree", second_order_routes),
        ("first-order wavefunction residual", first_order_wavefunction_residual),
        ("field-free solver exactness", field_free_solver),
        ("ground and n=2 deviations", low_state_deviations),
        ("n = 4..10 deviations", high_shell_deviations),
        ("cubic residual scaling", cubic_residual_scaling),
        ("bench determinism", bench_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {:>2} {:<36} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
