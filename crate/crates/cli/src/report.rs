use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Cli;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Everything a report depends on besides the input itself.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisConfig {
    pub command: &'static str,
    pub input: String,
    pub budget_lang: usize,
    pub probe_window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl AnalysisConfig {
    pub fn new(command: &'static str, input: &str, cli: &Cli) -> Self {
        AnalysisConfig {
            command,
            input: input.to_string(),
            budget_lang: cli.budget_lang,
            probe_window: cli.probe_window,
            length: None,
            ell: None,
            right: None,
            m_max: None,
            radius_max: None,
            profile: None,
            cap: None,
            out: None,
        }
    }

    /// `key=value` pairs sorted by key.
    fn summary(&self) -> String {
        let Ok(Value::Object(map)) = serde_json::to_value(self) else { unreachable!("config is a struct") };
        let mut parts = Vec::new();
        for (k, v) in map {
            match v {
                Value::String(s) if s.is_empty() => {}
                Value::String(s) => parts.push(format!("{k}={s}")),
                v => parts.push(format!("{k}={v}")),
            }
        }
        parts.join(" ")
    }
}

/// One report, kept in all three renderings until the format is chosen.
pub struct Report {
    config: AnalysisConfig,
    body: Map<String, Value>,
    lines: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(config: AnalysisConfig) -> Self {
        Report { config, body: Map::new(), lines: Vec::new(), header: Vec::new(), rows: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.body.insert(key.to_string(), value);
    }

    pub fn line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn csv_header(&mut self, cols: &[&str]) {
        self.header = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn csv_row<const N: usize>(&mut self, row: [String; N]) {
        self.rows.push(row.to_vec());
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => {
                let mut s = format!("# {}\n", self.config.summary());
                for l in &self.lines {
                    s += l;
                    s.push('\n');
                }
                Ok(s)
            }
            Format::Json => {
                let mut root = Map::new();
                root.insert("schema".into(), SCHEMA.into());
                root.insert("config".into(), serde_json::to_value(&self.config)?);
                for (k, v) in &self.body {
                    root.insert(k.clone(), v.clone());
                }
                Ok(serde_json::to_string_pretty(&Value::Object(root))? + "\n")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                let body = String::from_utf8(w.into_inner()?)?;
                Ok(format!("# {}\n{body}", self.config.summary()))
            }
        }
    }
}
