//! Deviation rows and their CSV and JSON encodings.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! recovers every value bit for bit. Lines starting with `#` carry the
//! configuration echo and the summary; data files never contain timestamps.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use stark_core::{SiegertError, SiegertSolutionF64};

use crate::config::RunConfig;

pub const CSV_HEADER: [&str; 7] = [
    "F",
    "e_pert",
    "e_num_re",
    "e_num_im",
    "sigma_percent",
    "iterations",
    "converged",
];

/// Perturbative against numerical energy at one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    #[serde(rename = "F")]
    pub field: f64,
    pub e_pert: f64,
    /// Absent when the solver returned no energy.
    pub e_num_re: Option<f64>,
    pub e_num_im: Option<f64>,
    /// `|(e_pert − e_num_re)/e_num_re| × 100`, only for converged points.
    pub sigma_percent: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `|(analytic − numeric)/numeric| × 100`.
pub fn sigma_percent(analytic: f64, numeric: f64) -> f64 {
    ((analytic - numeric) / numeric).abs() * 100.0
}

impl DeviationRow {
    pub fn new(field: f64, e_pert: f64, solution: &Result<SiegertSolutionF64, SiegertError>) -> Self {
        match solution {
            Ok(sol) => Self {
                field,
                e_pert,
                e_num_re: Some(sol.energy.re),
                e_num_im: Some(sol.energy.im),
                sigma_percent: sol.converged.then(|| sigma_percent(e_pert, sol.energy.re)),
                iterations: sol.iterations,
                converged: sol.converged,
            },
            Err(_) => Self {
                field,
                e_pert,
                e_num_re: None,
                e_num_im: None,
                sigma_percent: None,
                iterations: 0,
                converged: false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub max_sigma_percent: Option<f64>,
    pub all_converged: bool,
}

impl Summary {
    pub fn of(rows: &[DeviationRow]) -> Self {
        Self {
            max_sigma_percent: rows
                .iter()
                .filter_map(|r| r.sigma_percent)
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s)))),
            all_converged: rows.iter().all(|r| r.converged),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "max_sigma_percent={} all_converged={}",
            self.max_sigma_percent.map(fmt_f64).unwrap_or_default(),
            self.all_converged
        )
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, config: &RunConfig, rows: &[DeviationRow]) -> Result<(), csv::Error> {
    let mut out = out;
    for line in config.echo() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.field),
            fmt_f64(r.e_pert),
            fmt_opt(r.e_num_re),
            fmt_opt(r.e_num_im),
            fmt_opt(r.sigma_percent),
            r.iterations.to_string(),
            r.converged.to_string(),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    writeln!(out, "# {}", Summary::of(rows).line())?;
    Ok(())
}

/// Rows of a file written by [`write_csv`]; `#` lines are skipped.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<DeviationRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input)
        .deserialize()
        .collect()
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: &'a [DeviationRow],
    config: &'a RunConfig,
    summary: Summary,
}

pub fn write_json<W: Write>(mut out: W, config: &RunConfig, rows: &[DeviationRow]) -> Result<(), serde_json::Error> {
    let report = JsonReport {
        rows,
        config,
        summary: Summary::of(rows),
    };
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out).map_err(serde_json::Error::io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::RunArgs;
    use proptest::prelude::*;
    use stark_core::ParabolicState;

    fn config() -> RunConfig {
        let args = RunArgs {
            state: Some(ParabolicState::GROUND),
            ..Default::default()
        };
        RunConfig::resolve(&args, false, None).unwrap()
    }

    fn row(field: f64, re: Option<f64>, im: Option<f64>, converged: bool) -> DeviationRow {
        DeviationRow {
            field,
            e_pert: -0.5 - 2.25 * field * field,
            e_num_re: re,
            e_num_im: im,
            sigma_percent: if converged { re.map(|e| sigma_percent(-0.5 - 2.25 * field * field, e)) } else { None },
            iterations: 7,
            converged,
        }
    }

    #[test]
    fn csv_layout() {
        let rows = vec![row(0.0, Some(-0.5), Some(0.0), true), row(0.1, None, None, false)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &config(), &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# state=0,0,0"));
        let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert_eq!(lines[header], "F,e_pert,e_num_re,e_num_im,sigma_percent,iterations,converged");
        assert_eq!(
            lines[header + 1],
            "0.0000000000000000e0,-5.0000000000000000e-1,-5.0000000000000000e-1,0.0000000000000000e0,0.0000000000000000e0,7,true"
        );
        assert_eq!(lines[header + 2], "1.0000000000000001e-1,-5.2249999999999996e-1,,,,7,false");
        assert_eq!(
            *lines.last().unwrap(),
            "# max_sigma_percent=0.0000000000000000e0 all_converged=false"
        );
    }

    #[test]
    fn json_layout() {
        let rows = vec![row(0.0, Some(-0.5), Some(0.0), true), row(0.1, None, None, false)];
        let mut buf = Vec::new();
        write_json(&mut buf, &config(), &rows).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["F"], 0.0);
        assert!(v["rows"][1]["sigma_percent"].is_null());
        assert_eq!(v["config"]["state"], "0,0,0");
        assert_eq!(v["config"]["steps"], 20);
        assert_eq!(v["summary"]["all_converged"], false);
        assert_eq!(v["summary"]["max_sigma_percent"], 0.0);
    }

    #[test]
    fn sigma_matches_the_definition() {
        assert!((sigma_percent(-0.5225, -0.5274181751) - 0.932_497).abs() < 1e-5);
        assert_eq!(sigma_percent(-0.5, -0.5), 0.0);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            fields in proptest::collection::vec(0.0f64..1.0, 1..8),
            re in -1.0f64..0.0,
            im in -1e-2f64..0.0,
            mask in proptest::collection::vec(any::<bool>(), 8),
        ) {
            let rows: Vec<DeviationRow> = fields
                .iter()
                .zip(&mask)
                .map(|(&f, &ok)| if ok { row(f, Some(re * (1.0 + f)), Some(im), true) } else { row(f, None, None, false) })
                .collect();
            let mut buf = Vec::new();
            write_csv(&mut buf, &config(), &rows).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, rows);
        }
    }
}
