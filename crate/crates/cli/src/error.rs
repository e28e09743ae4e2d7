use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad configuration or an out-of-range parameter.
    Usage(String),
    /// Reading or writing files.
    Io(String),
    Numerical(complex_spectra::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Numerical(_) => 1,
        }
    }

    /// One-line JSON description for standard error.
    pub fn to_json(&self) -> String {
        let value = match self {
            CliError::Usage(message) => json!({ "error": "usage", "message": message }),
            CliError::Io(message) => json!({ "error": "io", "message": message }),
            CliError::Numerical(e) => {
                let debug = format!("{e:?}");
                let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("");
                json!({ "error": "numerical", "kind": kind, "message": e.to_string() })
            }
        };
        value.to_string()
    }
}

impl From<complex_spectra::Error> for CliError {
    fn from(e: complex_spectra::Error) -> Self {
        use complex_spectra::Error as E;
        match e {
            E::InvalidInput(m) | E::InvalidPotential(m) | E::Unsupported(m) => CliError::Usage(m),
            E::Io(m) | E::Schema(m) => CliError::Io(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
