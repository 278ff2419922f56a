//! Report envelope and emission: every command produces one
//! [`CommandOutcome`]; this module renders it in the requested formats and
//! routes it to stdout or to files under `--out`.

use std::path::Path;

use serde::Serialize;

use crate::Failure;

/// Report formats the CLI can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Full machine-readable report (the only format carrying a timestamp).
    Json,
    /// Flat tables for plotting hand-off.
    Csv,
    /// Human-readable summary document.
    Md,
}

/// Everything a command run produced, format-agnostic.
pub struct CommandOutcome {
    /// File-name slug, e.g. "verify-matreg".
    pub slug: &'static str,
    /// Echo of the effective configuration.
    pub config: serde_json::Value,
    /// Overall verdict; drives the process exit code.
    pub pass: bool,
    /// Machine-readable results, embedded in the JSON envelope.
    pub results: serde_json::Value,
    /// Markdown body (the envelope header is prepended on render).
    pub markdown: String,
    /// CSV documents as (name-suffix, content); an empty suffix names the
    /// file `<slug>.csv`, otherwise `<slug>-<suffix>.csv`.
    pub csv: Vec<(String, String)>,
    /// Human summary lines for stderr.
    pub summary: Vec<String>,
}

/// One named pass/fail check inside a command report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// What was checked.
    pub name: String,
    /// Whether it held.
    pub pass: bool,
    /// Measured values and thresholds.
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// Render checks as a Markdown table.
pub fn checks_markdown(checks: &[Check]) -> String {
    let mut s = String::from("| check | verdict | detail |\n|---|---|---|\n");
    for c in checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        s.push_str(&format!("| {} | {} | {} |\n", c.name, verdict, c.detail));
    }
    s
}

/// Summary lines for a check list.
pub fn checks_summary(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .map(|c| {
            format!(
                "{}: {} — {}",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            )
        })
        .collect()
}

#[derive(Serialize)]
struct RunReport<'a> {
    tool: &'static str,
    version: &'static str,
    generated_at_unix: u64,
    command: &'static str,
    config: &'a serde_json::Value,
    pass: bool,
    results: &'a serde_json::Value,
}

fn render_json(outcome: &CommandOutcome) -> Result<String, Failure> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = RunReport {
        tool: "quantcat",
        version: env!("CARGO_PKG_VERSION"),
        generated_at_unix: now,
        command: outcome.slug,
        config: &outcome.config,
        pass: outcome.pass,
        results: &outcome.results,
    };
    Ok(quantcat::report::to_json_string(&report)?)
}

fn render_md(outcome: &CommandOutcome) -> String {
    let mut s = format!("# quantcat {}\n\n", outcome.slug);
    if let serde_json::Value::Object(map) = &outcome.config {
        for (k, v) in map {
            s.push_str(&format!("- {k}: {v}\n"));
        }
    }
    s.push_str(&format!(
        "- verdict: **{}**\n\n",
        if outcome.pass { "PASS" } else { "FAIL" }
    ));
    s.push_str(&outcome.markdown);
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Emit the outcome in all requested formats, then the summary to stderr.
pub fn emit(
    outcome: &CommandOutcome,
    formats: &[Format],
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut formats_dedup: Vec<Format> = Vec::new();
    for f in formats {
        if !formats_dedup.contains(f) {
            formats_dedup.push(*f);
        }
    }

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        for fmt in &formats_dedup {
            match fmt {
                Format::Json => {
                    let path = dir.join(format!("{}.json", outcome.slug));
                    write_file(&path, &render_json(outcome)?)?;
                    eprintln!("wrote {}", path.display());
                }
                Format::Md => {
                    let path = dir.join(format!("{}.md", outcome.slug));
                    write_file(&path, &render_md(outcome))?;
                    eprintln!("wrote {}", path.display());
                }
                Format::Csv => {
                    for (suffix, content) in &outcome.csv {
                        let name = if suffix.is_empty() {
                            format!("{}.csv", outcome.slug)
                        } else {
                            format!("{}-{}.csv", outcome.slug, suffix)
                        };
                        let path = dir.join(name);
                        write_file(&path, content)?;
                        eprintln!("wrote {}", path.display());
                    }
                }
            }
        }
    } else {
        for fmt in &formats_dedup {
            match fmt {
                Format::Json => print!("{}", render_json(outcome)?),
                Format::Md => print!("{}", render_md(outcome)),
                Format::Csv => {
                    for (suffix, content) in &outcome.csv {
                        if !suffix.is_empty() {
                            println!("# {suffix}");
                        }
                        print!("{content}");
                    }
                }
            }
        }
    }

    for line in &outcome.summary {
        eprintln!("{line}");
    }
    eprintln!(
        "{}: {}",
        outcome.slug,
        if outcome.pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}
