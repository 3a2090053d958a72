use std::io::Write;

use caterpillar_core::newick::ParseError;
use caterpillar_core::real::{format_fixed_with, format_significant_with, Real, Rounding};
use caterpillar_core::Error;
use num_rational::BigRational;
use serde_json::{json, Value};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_TRUNCATION: u8 = 3;
pub const EXIT_REJECTED: u8 = 4;
pub const EXIT_GUARD: u8 = 5;

const SIGNIFICANT: usize = 10;

/// An error headed for the JSON envelope on stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    pub fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            kind,
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn envelope(&self) -> Value {
        let mut v = json!({
            "error": self.kind,
            "message": self.message,
            "exit_code": self.code,
        });
        if let Value::Object(extra) = &self.detail {
            v.as_object_mut().unwrap().extend(extra.clone());
        }
        v
    }

    pub fn report(&self) {
        eprintln!("{}", self.envelope());
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::KTooLargeForTruncation { k, m } => {
                CliError::new(EXIT_TRUNCATION, "KTooLargeForTruncation", message)
                    .with_detail(json!({"k": k, "m": m}))
            }
            Error::NotAv132 { positions } => CliError::new(EXIT_REJECTED, "NotAv132", message)
                .with_detail(json!({"positions": positions})),
            Error::InvalidPermutation(_) => {
                CliError::new(EXIT_REJECTED, "InvalidPermutation", message)
            }
            Error::NameCountMismatch { .. } => {
                CliError::new(EXIT_REJECTED, "NameCountMismatch", message)
            }
            Error::CapExceeded { n, cap } => CliError::new(EXIT_GUARD, "CapExceeded", message)
                .with_detail(json!({"n": n, "cap": cap, "override": "CATERPILLAR_MAX_N"})),
            Error::SizeTooSmall { .. } => CliError::new(EXIT_REJECTED, "SizeTooSmall", message),
            Error::IndexOutOfRange { .. } => {
                CliError::new(EXIT_REJECTED, "IndexOutOfRange", message)
            }
            Error::InvalidNode(_) => CliError::new(EXIT_REJECTED, "InvalidNode", message),
            Error::InvalidParameter(_) => CliError::new(EXIT_REJECTED, "InvalidParameter", message),
            Error::NoConvergence(_) => CliError::new(EXIT_FAILURE, "NoConvergence", message),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::new(EXIT_REJECTED, "ParseError", e.to_string())
            .with_detail(json!({"offset": e.offset}))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(EXIT_FAILURE, "Io", e.to_string())
    }
}

/// Decimal rendering options shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fmt {
    pub places: Option<usize>,
    pub rounding: Rounding,
}

impl Fmt {
    /// Fixed `places` decimals unless the user asked for something else.
    pub fn or_places(self, places: usize) -> Fmt {
        Fmt {
            places: Some(self.places.unwrap_or(places)),
            ..self
        }
    }

    pub fn ratio(&self, v: &BigRational) -> String {
        match self.places {
            Some(p) => format_fixed_with(v, p, self.rounding),
            None => format_significant_with(v, SIGNIFICANT, self.rounding),
        }
    }

    pub fn real(&self, v: &Real) -> String {
        self.ratio(&v.to_rational())
    }
}

/// Collects the report and writes it to stdout in one piece.
#[derive(Default)]
pub struct Out(String);

impl Out {
    pub fn line(&mut self, s: impl AsRef<str>) {
        self.0.push_str(s.as_ref());
        self.0.push('\n');
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.0.push(',');
            }
            first = false;
            self.0.push_str(c.as_ref());
        }
        self.0.push('\n');
    }

    pub fn flush(self) -> Result<(), CliError> {
        let mut stdout = std::io::stdout().lock();
        match stdout
            .write_all(self.0.as_bytes())
            .and_then(|_| stdout.flush())
        {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        }
    }
}
