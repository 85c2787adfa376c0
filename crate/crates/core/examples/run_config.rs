//! Builds a run configuration in code, runs it, and reruns it from the
//! `config` object embedded in its report.

use serde_json::Value;
use weylreduce::cli::{run, RunConfig, Subcommand};

fn main() -> weylreduce::Result<()> {
    let mut cfg = RunConfig::new(Subcommand::Integrate);
    cfg.action = Some("sym-s3".into());
    cfg.function = Some("cos_r_sq".into());
    cfg.n_samples = 200_000;
    cfg.seed = 2024;
    let first = run(&cfg)?;
    print!("{}", first.report);

    let report: Value = serde_json::from_str(&first.report)?;
    let again: RunConfig = serde_json::from_value(report["config"].clone())?;
    let second = run(&again)?;
    println!("rerun identical: {}, exit status {}", first.report == second.report, second.status);
    Ok(())
}
