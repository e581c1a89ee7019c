//! Plot-ready output: whitespace-separated data files (distance in the
//! first column, one column per algorithm) plus a gnuplot script that
//! renders them. No plotting library is needed to produce them.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::{fmt_sig, Metric, SweepTable};

pub const FIG10_FILE: &str = "fig10_assignment_probability.dat";
pub const FIG11_FILE: &str = "fig11_handovers.dat";
pub const SCRIPT_FILE: &str = "plot_figures.gp";

struct Figure {
    file: &'static str,
    metric: Metric,
    title: &'static str,
    ylabel: &'static str,
}

const FIGURES: [Figure; 2] = [
    Figure {
        file: FIG10_FILE,
        metric: Metric::FapAssignmentProbability,
        title: "Assignment probability to FAP",
        ylabel: "assignment probability",
    },
    Figure {
        file: FIG11_FILE,
        metric: Metric::HandoversPerUe,
        title: "Expected handovers per UE",
        ylabel: "handovers per UE",
    },
];

/// Data file contents for one metric: a `#` header naming the columns,
/// then one line per distance.
pub fn data_file(table: &SweepTable, metric: Metric) -> String {
    let algorithms = table.algorithms();
    let mut out = String::from("# distance_m");
    for alg in &algorithms {
        out.push(' ');
        out.push_str(alg.token());
    }
    out.push('\n');
    for d in table.distances() {
        out.push_str(&fmt_sig(d, 6));
        for alg in &algorithms {
            let v = table.get(d, *alg, metric).map_or(f64::NAN, |r| r.mean);
            out.push(' ');
            out.push_str(&fmt_sig(v, 6));
        }
        out.push('\n');
    }
    out
}

fn script(table: &SweepTable) -> String {
    let algorithms = table.algorithms();
    let mut out = String::from("set terminal pngcairo size 800,600\nset key best\nset grid\nset xlabel \"distance between eNB and FAP (m)\"\n");
    for fig in &FIGURES {
        let stem = fig.file.trim_end_matches(".dat");
        out.push_str(&format!(
            "\nset output \"{stem}.png\"\nset title \"{}\"\nset ylabel \"{}\"\nplot ",
            fig.title, fig.ylabel
        ));
        let series: Vec<String> = algorithms
            .iter()
            .enumerate()
            .map(|(i, alg)| {
                format!(
                    "\"{}\" using 1:{} with linespoints title \"{}\"",
                    fig.file,
                    i + 2,
                    alg.token()
                )
            })
            .collect();
        out.push_str(&series.join(", \\\n     "));
        out.push('\n');
    }
    out
}

/// Writes every `(name, contents)` pair under `dir` so that either all files
/// appear or none do: contents go to temporaries first and are renamed only
/// once every write succeeded.
pub fn write_all_atomic(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, contents) {
            cleanup(&staged);
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    for (i, (tmp, dest)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, dest) {
            cleanup(&staged[i..]);
            return Err(Error::io(dest, e));
        }
    }
    Ok(staged.into_iter().map(|(_, dest)| dest).collect())
}

/// Emits the Fig. 10 and Fig. 11 data files and the plotting script.
pub fn emit_plot_data(table: &SweepTable, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut files: Vec<(&str, String)> = FIGURES
        .iter()
        .map(|f| (f.file, data_file(table, f.metric)))
        .collect();
    files.push((SCRIPT_FILE, script(table)));
    write_all_atomic(out_dir, &files)
}
