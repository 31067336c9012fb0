//! CSV and JSON result files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::metrics::{sig6, sig6_opt, Metrics};
use super::runner::RunRecord;
use crate::{Error, Point3, Result};

pub const RECORDS_HEADER: &str =
    "scenario,algorithm,repetition,seed,best_ig,iterations,energy,time_s,wall_time_s,checker,path_file,error";
pub const METRICS_HEADER: &str = "algorithm,runs,failures,i_mean,i_std,mean_iterations,mean_wall_time_s";
pub const PATH_HEADER: &str = "index,x,y,z,medium,cum_time_s,cum_energy";
pub const BESTSOL_HEADER: &str = "iteration,bestsol";

/// Marker written for an undefined standard deviation.
pub const UNDEFINED: &str = "NA";

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let checker = match (&r.check, &r.error) {
            (_, Some(_)) => "error",
            (Some(c), _) if c.passes() => "pass",
            (Some(_), _) => "fail",
            (None, _) => "no-path",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.algorithm.slug(),
            r.repetition,
            r.seed,
            sig6(r.best_ig),
            r.iterations,
            sig6_opt(r.energy),
            sig6_opt(r.time),
            sig6(r.wall_time),
            checker,
            r.path_file().unwrap_or_default(),
            field(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

pub fn metrics_csv(metrics: &[Metrics]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            m.algorithm.slug(),
            m.runs,
            m.failures,
            sig6(m.i_mean),
            m.i_std.map(sig6).unwrap_or_else(|| UNDEFINED.into()),
            sig6(m.mean_iterations),
            sig6(m.mean_wall_time),
        );
    }
    out
}

pub fn bestsol_csv(series: &[f64]) -> String {
    let mut out = String::from(BESTSOL_HEADER);
    out.push('\n');
    for (i, v) in series.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, sig6(*v));
    }
    out
}

pub fn path_csv(record: &RunRecord) -> String {
    let mut out = String::from(PATH_HEADER);
    out.push('\n');
    for (i, row) in record.path.iter().enumerate() {
        let p = row.position;
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{}",
            sig6(p.x),
            sig6(p.y),
            sig6(p.z),
            row.medium.as_str(),
            sig6(row.cum_time),
            sig6(row.cum_energy),
        );
    }
    out
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes all result files into `out_dir` (created if missing) and returns
/// their paths. `summary` is stored as `summary.json` next to the metrics.
pub fn emit_results<S: Serialize>(
    out_dir: &Path,
    records: &[RunRecord],
    metrics: &[Metrics],
    summary: &S,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = vec![
        write(out_dir, "records.csv", &records_csv(records))?,
        write(out_dir, "metrics.csv", &metrics_csv(metrics))?,
    ];
    for r in records {
        if r.error.is_none() {
            files.push(write(out_dir, &r.bestsol_file(), &bestsol_csv(&r.bestsol))?);
        }
        if let Some(name) = r.path_file() {
            files.push(write(out_dir, &name, &path_csv(r))?);
        }
    }
    #[derive(Serialize)]
    struct Summary<'a, S> {
        spec: &'a S,
        metrics: &'a [Metrics],
    }
    let json = serde_json::to_string_pretty(&Summary { spec: summary, metrics }).map_err(|source| Error::Json {
        path: out_dir.join("summary.json"),
        source,
    })?;
    files.push(write(out_dir, "summary.json", &json)?);
    Ok(files)
}

/// Reads the positions back from a `path_*.csv` file.
pub fn read_path_csv(path: &Path) -> Result<Vec<Point3>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| c.trim() == name)
            .ok_or_else(|| Error::Config(format!("{}: missing column {name}", path.display())))
    };
    let (ix, iy, iz) = (col("x")?, col("y")?, col("z")?);
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let cells: Vec<&str> = l.split(',').collect();
            let get = |i: usize| {
                cells
                    .get(i)
                    .and_then(|c| c.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("{}: bad value on line {}", path.display(), n + 2)))
            };
            Ok(Point3::new(get(ix)?, get(iy)?, get(iz)?))
        })
        .collect()
}
