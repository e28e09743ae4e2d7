//! JSON run configurations, turned into the equivalent command line.

use std::ffi::OsString;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// `{"schema_version": 1, "command": "spectrum", "params": {"family": "sextic", "pair": "AE"}}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

/// Parameters that are positional on the command line.
const POSITIONAL: &[(&str, &str)] = &[("reproduce", "figure")];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    /// Command-line words equivalent to this configuration. Unknown keys
    /// come out as unknown flags, which the parser rejects.
    pub fn to_args(&self) -> Result<Vec<OsString>, CliError> {
        let mut args: Vec<OsString> = vec!["complex-spectra".into(), self.command.clone().into()];
        for (key, value) in &self.params {
            let positional = POSITIONAL.iter().any(|&(c, k)| c == self.command && k == key);
            let flag = format!("--{}", key.replace('_', "-"));
            let mut push = |v: &Value| -> Result<(), CliError> {
                let text = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(CliError::Usage(format!("parameter {key:?} has an unsupported value {v}"))),
                };
                if !positional {
                    args.push(flag.clone().into());
                }
                args.push(text.into());
                Ok(())
            };
            match value {
                Value::Null | Value::Bool(false) => {}
                Value::Bool(true) => args.push(flag.clone().into()),
                Value::Array(items) => items.iter().try_for_each(&mut push)?,
                other => push(other)?,
            }
        }
        Ok(args)
    }
}
