use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// The machine-readable summary every command emits once.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub outputs: Value,
    pub wall_time_s: f64,
}

pub struct ReportBuilder {
    command: String,
    args: Vec<String>,
    started: Instant,
}

impl ReportBuilder {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            started: Instant::now(),
        }
    }

    pub fn finish(
        self,
        config: impl Serialize,
        seeds: Vec<u64>,
        outputs: impl Serialize,
    ) -> serde_json::Result<RunReport> {
        Ok(RunReport {
            command: self.command,
            args: self.args,
            config: serde_json::to_value(config)?,
            seeds,
            outputs: serde_json::to_value(outputs)?,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        })
    }
}
