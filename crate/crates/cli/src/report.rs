//! Reports and their two text renderings.

use std::fmt::Write;

use loopcoh::exact::BlockLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Human,
    Machine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    /// Shown in human mode only.
    Info { key: String, value: String },
    Block { label: BlockLabel, dim: usize, hdim: usize },
    Check { name: String, pass: bool, detail: Option<String> },
    Verdict(bool),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            records: Vec::new(),
        }
    }

    pub fn info(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.records.push(Record::Info {
            key: key.into(),
            value: value.into(),
        });
    }

    pub fn block(&mut self, label: BlockLabel, dim: usize, hdim: usize) {
        self.records.push(Record::Block { label, dim, hdim });
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.records.push(Record::Check {
            name: name.into(),
            pass,
            detail,
        });
    }

    /// Appends a verdict that is PASS exactly when every check passed.
    pub fn conclude(&mut self) {
        let ok = self.checks_pass();
        self.records.push(Record::Verdict(ok));
    }

    pub fn checks_pass(&self) -> bool {
        self.records.iter().all(|r| !matches!(r, Record::Check { pass: false, .. } | Record::Verdict(false)))
    }

    /// 0 when everything passed, 1 when a check or verdict failed.
    pub fn exit_code(&self) -> i32 {
        if self.checks_pass() {
            0
        } else {
            1
        }
    }
}

fn token(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn multidegree(d: &[i64]) -> String {
    let parts: Vec<String> = d.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn emit_report(r: &Report, mode: Mode) -> String {
    match mode {
        Mode::Machine => emit_machine(r),
        Mode::Human => emit_human(r),
    }
}

fn emit_machine(r: &Report) -> String {
    let mut out = format!("# {}\n", r.title);
    for rec in &r.records {
        match rec {
            Record::Info { .. } => {}
            Record::Block { label, dim, hdim } => {
                let _ = writeln!(
                    out,
                    "block deg={} w={} d={} dim={dim} hdim={hdim}",
                    label.degree,
                    label.weight,
                    multidegree(&label.multidegree)
                );
            }
            Record::Check { name, pass, detail } => {
                let _ = write!(out, "check {} {}", token(name), if *pass { "pass" } else { "fail" });
                if let Some(d) = detail {
                    let _ = write!(out, " detail={}", token(d));
                }
                out.push('\n');
            }
            Record::Verdict(ok) => {
                let _ = writeln!(out, "verdict {}", if *ok { "PASS" } else { "FAIL" });
            }
        }
    }
    out
}

fn emit_human(r: &Report) -> String {
    let mut out = format!("{}\n{}\n", r.title, "=".repeat(r.title.chars().count()));
    let infos: Vec<(&String, &String)> = r
        .records
        .iter()
        .filter_map(|rec| match rec {
            Record::Info { key, value } => Some((key, value)),
            _ => None,
        })
        .collect();
    let kw = infos.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in &infos {
        let _ = writeln!(out, "{k:<kw$}  {v}");
    }
    let rows: Vec<[String; 5]> = r
        .records
        .iter()
        .filter_map(|rec| match rec {
            Record::Block { label, dim, hdim } => Some([
                label.degree.to_string(),
                label.weight.to_string(),
                multidegree(&label.multidegree),
                dim.to_string(),
                hdim.to_string(),
            ]),
            _ => None,
        })
        .collect();
    if !rows.is_empty() {
        let head = ["deg", "weight", "multidegree", "dim", "H"];
        let widths: Vec<usize> = (0..5)
            .map(|c| rows.iter().map(|r| r[c].len()).chain([head[c].len()]).max().unwrap_or(0))
            .collect();
        out.push('\n');
        let line = |cells: [&str; 5]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ").trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(head));
        for r in &rows {
            let _ = writeln!(out, "{}", line([&r[0], &r[1], &r[2], &r[3], &r[4]]));
        }
    }
    let checks: Vec<_> = r
        .records
        .iter()
        .filter_map(|rec| match rec {
            Record::Check { name, pass, detail } => Some((name, pass, detail)),
            _ => None,
        })
        .collect();
    if !checks.is_empty() {
        out.push('\n');
        let nw = checks.iter().map(|c| c.0.chars().count()).max().unwrap_or(0);
        for (name, pass, detail) in checks {
            let status = if *pass { "pass" } else { "FAIL" };
            match detail {
                Some(d) => {
                    let _ = writeln!(out, "{name:<nw$}  {status}  {d}");
                }
                None => {
                    let _ = writeln!(out, "{name:<nw$}  {status}");
                }
            }
        }
    }
    for rec in &r.records {
        if let Record::Verdict(ok) = rec {
            let _ = writeln!(out, "\nverdict: {}", if *ok { "PASS" } else { "FAIL" });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("loopcoh derham plane");
        assert_eq!(emit_report(&r, Mode::Machine), "# loopcoh derham plane\n");
        assert_eq!(emit_report(&r, Mode::Human).lines().count(), 2);
    }

    #[test]
    fn single_block_line() {
        let mut r = Report::new("t");
        r.block(BlockLabel::new(1, 2, vec![0, -1]), 4, 1);
        assert_eq!(emit_report(&r, Mode::Machine), "# t\nblock deg=1 w=2 d=(0,-1) dim=4 hdim=1\n");
    }

    #[test]
    fn checks_and_verdict() {
        let mut r = Report::new("t");
        r.check("jacobi", true, None);
        r.check("d squared", false, Some("deg=1 w=0".into()));
        r.conclude();
        let text = emit_report(&r, Mode::Machine);
        assert_eq!(text, "# t\ncheck jacobi pass\ncheck dsquared fail detail=deg=1w=0\nverdict FAIL\n");
        assert_eq!(r.exit_code(), 1);
        assert!(emit_report(&r, Mode::Human).ends_with("verdict: FAIL\n"));
    }
}
