//! Tables, `.dat` files and gnuplot scripts from stored estimate records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::commands::EstimateRow;
use crate::store::{read_records, RECORDS_FILE};
use crate::{Cli, ReportArgs};

/// File-name stem for a series; characters outside `[A-Za-z0-9_-]` become `_`.
pub fn file_stem(mode: &str, functional: &str, d: usize) -> String {
    let clean: String =
        functional.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    format!("{mode}_{clean}_d{d}")
}

/// Writes `x mean stderr` columns sorted by `x`.
pub fn write_dat(path: &Path, rows: &[EstimateRow]) -> Result<()> {
    let mut pts: Vec<(f64, f64, f64)> = rows.iter().filter_map(|r| r.x().map(|x| (x, r.mean, r.stderr))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut text = String::new();
    if let Some(r) = rows.first() {
        writeln!(text, "# {} {} d={}", r.mode, r.functional, r.d)?;
    }
    writeln!(text, "# x mean stderr")?;
    for (x, m, s) in pts {
        writeln!(text, "{x} {m} {s}")?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn gnuplot_script(stem: &str, rows: &[EstimateRow]) -> String {
    let r = &rows[0];
    let xlabel = match r.mode.as_str() {
        "thermo" | "dense" => "n",
        "density" => "s",
        _ => "lambda",
    };
    let logx = if xlabel == "n" { "set logscale x\n" } else { "" };
    format!(
        "set terminal pngcairo size 800,600\nset output '{stem}.png'\nset title '{} {} (d = {})'\n\
         set xlabel '{xlabel}'\nset ylabel 'estimate'\n{logx}\
         plot '{stem}.dat' using 1:2:3 with yerrorlines title '{}'\n",
        r.mode, r.functional, r.d, r.functional
    )
}

/// Series keyed by (mode, functional, d).
pub type Series = BTreeMap<(String, String, usize), Vec<EstimateRow>>;

/// Groups estimate rows by (mode, functional, d). Later records with the
/// same abscissa replace earlier ones.
pub fn collect(text: &str) -> (Series, Vec<String>) {
    let (recs, mut warnings) = read_records(text);
    let mut groups = Series::new();
    for rec in recs.iter().filter(|r| r.config.command == "estimate") {
        let Some(rows) = rec.payload.get("rows") else {
            warnings.push(format!("record {}: estimate without rows", rec.id));
            continue;
        };
        let rows: Vec<EstimateRow> = match serde_json::from_value(rows.clone()) {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("record {}: malformed rows ({e})", rec.id));
                continue;
            }
        };
        for row in rows {
            let g = groups.entry((row.mode.clone(), row.functional.clone(), row.d)).or_default();
            g.retain(|o| o.x() != row.x());
            g.push(row);
        }
    }
    for rows in groups.values_mut() {
        rows.sort_by(|a, b| a.x().unwrap_or(f64::NAN).total_cmp(&b.x().unwrap_or(f64::NAN)));
    }
    (groups, warnings)
}

pub fn run(cli: &Cli, a: &ReportArgs) -> Result<bool> {
    let input: PathBuf = match (&a.input, &cli.out) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join(RECORDS_FILE),
        (None, None) => anyhow::bail!("report needs --input or --out"),
    };
    let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let (groups, warnings) = collect(&text);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let dir = cli.out.clone().or_else(|| input.parent().map(Path::to_path_buf)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    for ((mode, functional, d), rows) in &groups {
        println!("# {mode} {functional} d={d}");
        println!("{:>12} {:>14} {:>12} {:>6}", "x", "mean", "stderr", "reps");
        for r in rows {
            let x = r.x().map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            println!("{x:>12} {:>14.6} {:>12.6} {:>6}", r.mean, r.stderr, r.reps);
        }
        let stem = file_stem(mode, functional, *d);
        write_dat(&dir.join(format!("{stem}.dat")), rows)?;
        std::fs::write(dir.join(format!("{stem}.gp")), gnuplot_script(&stem, rows))?;
    }
    eprintln!("{} series written to {}", groups.len(), dir.display());
    Ok(true)
}
