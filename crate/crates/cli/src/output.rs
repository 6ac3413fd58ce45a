use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use qmoduli::verify::SCHEMA;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// A document with the schema tag in front of its own fields.
#[derive(Serialize)]
pub struct Tagged<T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: T,
}

pub fn tagged<T: Serialize>(body: T) -> Tagged<T> {
    Tagged {
        schema: SCHEMA,
        body,
    }
}

pub struct Sink {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Writes `doc` as pretty JSON, or `text` when the text format is chosen.
    pub fn emit<T: Serialize>(
        &self,
        doc: &T,
        text: impl FnOnce() -> String,
    ) -> Result<(), CliError> {
        let mut body = match self.format {
            Format::Json => serde_json::to_string_pretty(doc).expect("documents serialize"),
            Format::Text => text(),
        };
        if !body.ends_with('\n') {
            body.push('\n');
        }
        match &self.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Output(format!("standard output: {e}"))),
        }
    }
}
