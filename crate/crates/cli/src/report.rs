use std::process::ExitCode;

use pottsforge::model::number::display_decimal;
use pottsforge::{BigRational, Error};
use serde_json::{json, Map, Value};

/// What a successful subcommand hands back: text for humans, a JSON document for
/// scripts, and warnings that go to stderr in text mode.
#[derive(Debug, Default)]
pub struct Report {
    pub subcommand: &'static str,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
    pub text: String,
    /// Exit status when the run itself succeeded but found something wrong.
    pub status: u8,
    /// Print `text` even under `--json` (CSV streams).
    pub text_only: bool,
}

impl Report {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            subcommand,
            ..Self::default()
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn output(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.into(), v.into());
        self
    }

    pub fn line(&mut self, s: impl AsRef<str>) -> &mut Self {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
        self
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "warnings": self.warnings,
        });
        if let Some(seed) = self.seed {
            doc["seed"] = seed.into();
        }
        doc
    }

    pub fn emit(self, json: bool) -> ExitCode {
        if json && !self.text_only {
            println!("{}", pretty(&self.to_json()));
        } else {
            for w in &self.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", self.text);
        }
        ExitCode::from(self.status)
    }
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

/// Exact value plus its decimal rendering.
pub fn exact(x: &BigRational, digits: usize) -> Value {
    json!({
        "value_num": x.numer().to_string(),
        "value_den": x.denom().to_string(),
        "value_decimal": display_decimal(x, digits),
    })
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Extra detail for the JSON error document (NoCrossing endpoints and so on).
    pub detail: Option<Value>,
    /// Text printed to stdout before the error, for reports that are still useful.
    pub text: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
            detail: None,
            text: String::new(),
        }
    }

    pub fn emit(self, json: bool) -> ExitCode {
        eprintln!("error: {}", self.message);
        if json {
            let mut doc = json!({ "error": self.message, "exit_code": self.code });
            if let Some(d) = self.detail {
                doc["detail"] = d;
            }
            println!("{}", pretty(&doc));
        } else {
            print!("{}", self.text);
        }
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_regime_error() { 2 } else { 1 };
        let detail = match innermost(&e) {
            Error::NoCrossing {
                zeta_low,
                zeta_high,
                grid_len,
            } => Some(json!({
                "kind": "no_crossing",
                "zeta_low": exact(zeta_low, 10),
                "zeta_high": exact(zeta_high, 10),
                "grid_len": grid_len,
            })),
            Error::CapExceeded { what, size, cap } => {
                Some(json!({ "kind": "cap_exceeded", "what": what, "size": size, "cap": cap }))
            }
            _ => None,
        };
        Self {
            code,
            message: e.to_string(),
            detail,
            text: String::new(),
        }
    }
}

pub fn innermost(e: &Error) -> &Error {
    match e {
        Error::Stage { source, .. } => innermost(source),
        other => other,
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}
