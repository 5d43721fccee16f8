use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ReportFormat;
use super::hypotheses::{H1Test, Outcome};
use super::{ExperimentReport, RunnerError};
use crate::corpus::Variable;
use crate::labeling::Label;
use crate::metrics::{ConfusionMatrix, IterationRecord};

pub const RECORDS_HEADER: [&str; 10] = [
    "language", "variable", "fold", "seed", "tp", "fp", "fn", "tn", "accuracy", "fp_pct",
];

const UNDEFINED: &str = "NA";

/// One header line plus one tab-separated line per record.
pub fn records_tsv(records: &[IterationRecord]) -> String {
    let mut out = RECORDS_HEADER.join("\t");
    out.push('\n');
    for r in records {
        let m = &r.matrix;
        let fp_pct = r
            .fp_pct
            .map_or_else(|| UNDEFINED.to_string(), |v| v.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.language, r.variable, r.fold, r.seed, m.tp, m.fp, m.fn_, m.tn, r.accuracy, fp_pct
        )
        .unwrap();
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunnerError> {
    fs::write(path, contents).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_records_tsv(path: &Path, records: &[IterationRecord]) -> Result<(), RunnerError> {
    write_file(path, &records_tsv(records))
}

/// Reads a `records.tsv`. Accuracy and FP% are recomputed from the counts;
/// the threat class of each variable comes from `threat_of`.
pub fn read_records_tsv(
    path: &Path,
    threat_of: impl Fn(Variable) -> Label,
) -> Result<Vec<IterationRecord>, RunnerError> {
    let file = fs::File::open(path).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let parse_err = |message: String| RunnerError::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .from_reader(file);
    let header = rdr.headers().map_err(|e| parse_err(e.to_string()))?;
    if header.iter().ne(RECORDS_HEADER.iter().copied()) {
        return Err(parse_err(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |what: &str| parse_err(format!("line {line}: bad {what}"));
        if row.len() != RECORDS_HEADER.len() {
            return Err(bad("column count"));
        }
        let variable: Variable = row[1].parse().map_err(|_| bad("variable"))?;
        let fold: usize = row[2].parse().map_err(|_| bad("fold"))?;
        let seed: u64 = row[3].parse().map_err(|_| bad("seed"))?;
        let mut counts = [0u64; 4];
        for (i, c) in counts.iter_mut().enumerate() {
            *c = row[4 + i].parse().map_err(|_| bad(RECORDS_HEADER[4 + i]))?;
        }
        let matrix = ConfusionMatrix::new(
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            threat_of(variable),
        );
        let record = IterationRecord::new(&row[0], variable, fold, seed, matrix)
            .map_err(|e| parse_err(format!("line {line}: {e}")))?;
        out.push(record);
    }
    Ok(out)
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

fn opt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), pct)
}

fn p_value(p: f64) -> String {
    format!("{p:.2e}")
}

fn h1_row(out: &mut String, t: &H1Test) {
    match &t.outcome {
        Outcome::Tested { result } => writeln!(
            out,
            "| {} | {} | {} | {:.2} | {} | {} | {} |",
            t.label,
            t.n_defined,
            pct(result.estimate),
            result.t,
            result.df,
            p_value(result.p),
            t.n_excluded
        ),
        Outcome::Untestable { reason } => writeln!(
            out,
            "| {} | {} | untestable: {} | | | | {} |",
            t.label, t.n_defined, reason, t.n_excluded
        ),
    }
    .unwrap();
}

/// Human-readable report: accuracy/FP% tables per variable, hypothesis
/// tests and the name-length regressions.
pub fn render_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "# Experiment report\n").unwrap();
    writeln!(
        w,
        "version {}, seed {}, k = {}, {} iteration records\n",
        report.version,
        report.config.seed,
        report.config.k,
        report.records.len()
    )
    .unwrap();

    writeln!(w, "## Accuracy and FP% (mean over iterations)\n").unwrap();
    for spec in &report.config.variables {
        let rows: Vec<_> = report
            .aggregates
            .iter()
            .filter(|a| a.variable == spec.name)
            .collect();
        writeln!(w, "### {}\n", spec.name).unwrap();
        writeln!(
            w,
            "| Language | Accuracy | FP% | Pooled accuracy | Pooled FP% |"
        )
        .unwrap();
        writeln!(w, "|---|---|---|---|---|").unwrap();
        for a in &rows {
            writeln!(
                w,
                "| {} | {} | {} | {} | {} |",
                a.language,
                pct(a.mean_accuracy),
                opt_pct(a.mean_fp_pct),
                pct(a.pooled_accuracy),
                opt_pct(a.pooled_fp_pct)
            )
            .unwrap();
        }
        if !rows.is_empty() {
            let n = rows.len() as f64;
            let acc = rows.iter().map(|a| a.mean_accuracy).sum::<f64>() / n;
            let fps: Vec<f64> = rows.iter().filter_map(|a| a.mean_fp_pct).collect();
            let fp = (!fps.is_empty()).then(|| fps.iter().sum::<f64>() / fps.len() as f64);
            writeln!(w, "| Average | {} | {} | | |", pct(acc), opt_pct(fp)).unwrap();
        }
        writeln!(w).unwrap();
    }

    writeln!(w, "## FP% against chance (one-sample t vs 50%)\n").unwrap();
    writeln!(w, "| Group | n | Mean FP% | t | df | p | Excluded |").unwrap();
    writeln!(w, "|---|---|---|---|---|---|---|").unwrap();
    for t in report
        .h1
        .per_variable
        .iter()
        .chain([&report.h1.combat, &report.h1.size])
    {
        h1_row(w, t);
    }
    writeln!(w).unwrap();

    writeln!(w, "## Combat vs size FP% (pooled two-sample t)\n").unwrap();
    match &report.h2.outcome {
        Outcome::Tested { result } => {
            writeln!(
                w,
                "combat M = {}, SD = {} (n = {}); size M = {}, SD = {} (n = {}); \
                 t({}) = {:.2}, p = {}\n",
                pct(result.a.mean),
                pct(result.a.sd),
                result.a.n,
                pct(result.b.mean),
                pct(result.b.sd),
                result.b.n,
                result.test.df,
                result.test.t,
                p_value(result.test.p)
            )
            .unwrap();
        }
        Outcome::Untestable { reason } => writeln!(w, "untestable: {reason}\n").unwrap(),
    }

    writeln!(
        w,
        "## Attribute vs name length (simple linear regression)\n"
    )
    .unwrap();
    writeln!(w, "| Scope | Variable | Deg. Freedom | F | p | R^2 |").unwrap();
    writeln!(w, "|---|---|---|---|---|---|").unwrap();
    for r in &report.length_regressions {
        match &r.outcome {
            Outcome::Tested { result } => writeln!(
                w,
                "| {} | {} | {}, {} | {:.2} | {} | {:.3} |",
                r.scope,
                r.variable,
                result.df1,
                result.df2,
                result.f,
                p_value(result.p),
                result.r2
            ),
            Outcome::Untestable { reason } => writeln!(
                w,
                "| {} | {} | untestable: {} | | | |",
                r.scope, r.variable, reason
            ),
        }
        .unwrap();
    }

    if !report.failures.is_empty() {
        writeln!(w, "\n## Failed groups\n").unwrap();
        for f in &report.failures {
            writeln!(w, "- {} / {}: {}", f.language, f.variable, f.reason).unwrap();
        }
    }
    out
}

/// Writes the requested formats into `out_dir`, creating it if needed.
pub fn emit_report(
    report: &ExperimentReport,
    formats: &[ReportFormat],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunnerError> {
    fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for format in formats {
        let (name, contents) = match format {
            ReportFormat::Tsv => ("records.tsv", records_tsv(&report.records)),
            ReportFormat::Json => ("report.json", report.to_json()),
            ReportFormat::Md => ("report.md", render_markdown(report)),
        };
        let path = out_dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(pct(0.5743), "57.43%");
        assert_eq!(p_value(2.3312e-14), "2.33e-14");
        assert_eq!(opt_pct(None), "n/a");
    }

    #[test]
    fn tsv_round_trip() {
        let records = vec![
            IterationRecord::new(
                "ja",
                Variable::Attack,
                0,
                99,
                ConfusionMatrix::new(30, 20, 10, 40, Label::High),
            )
            .unwrap(),
            IterationRecord::new(
                "ja",
                Variable::Height,
                1,
                7,
                ConfusionMatrix::new(30, 0, 0, 40, Label::High),
            )
            .unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.tsv");
        write_records_tsv(&path, &records).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().ends_with("\tNA"));
        assert_eq!(read_records_tsv(&path, |_| Label::High).unwrap(), records);
    }

    #[test]
    fn bad_tsv_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        fs::write(&path, "language\tvariable\n").unwrap();
        assert!(matches!(
            read_records_tsv(&path, |_| Label::High),
            Err(RunnerError::Parse { .. })
        ));
        fs::write(
            &path,
            format!(
                "{}\nja\tSpeed\t0\t1\t1\t1\t1\t1\t0.5\t0.5\n",
                RECORDS_HEADER.join("\t")
            ),
        )
        .unwrap();
        assert!(read_records_tsv(&path, |_| Label::High).is_err());
    }
}
