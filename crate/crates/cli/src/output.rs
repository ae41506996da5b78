use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{CliError, Result};

/// A file, or standard output when no path is set.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        Self { path }
    }

    pub fn write_with(&self, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        let wrap = |e| CliError::io(self.path.clone().unwrap_or_else(|| "<stdout>".into()), e);
        match &self.path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p).map_err(wrap)?);
                f(&mut w).and_then(|_| w.flush()).map_err(wrap)
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                f(&mut w).and_then(|_| w.flush()).map_err(wrap)
            }
        }
    }

    pub fn write_json<T: Serialize>(&self, value: &T) -> Result<()> {
        self.write_with(|w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}
