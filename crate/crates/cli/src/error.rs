//! CLI error taxonomy with one exit code per failure class.

use std::fmt;
use std::path::PathBuf;

use confusion_bounds::Error as CoreError;

/// Failure classes surfaced by the CLI. Exit codes:
///
/// | code | meaning                                   |
/// |------|-------------------------------------------|
/// | 0    | success / validation pass                 |
/// | 1    | validation verdict fail                   |
/// | 2    | parse error (file, line, column)          |
/// | 3    | dimension mismatch between inputs         |
/// | 4    | data error (empty class, bad weights)     |
/// | 5    | parameter out of range / infeasible config|
/// | 6    | domain error (command unfit for the data) |
/// | 7    | numerical failure                         |
/// | 8    | I/O error                                 |
#[derive(Debug)]
pub enum CliError {
    Parse {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Dimension(String),
    Data(String),
    Parameter(String),
    Domain(String),
    Numerical(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Dimension(_) => 3,
            CliError::Data(_) => 4,
            CliError::Parameter(_) => 5,
            CliError::Domain(_) => 6,
            CliError::Numerical(_) => 7,
            CliError::Io { .. } => 8,
        }
    }

    pub fn parse(file: impl Into<PathBuf>, line: usize, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            file: file.into(),
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse {
                file,
                line,
                column,
                message,
            } => write!(
                f,
                "parse error: {}:{}:{}: {}",
                file.display(),
                line,
                column,
                message
            ),
            CliError::Dimension(m) => write!(f, "dimension mismatch: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Parameter(m) => write!(f, "parameter error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io { path, source } => write!(f, "io error: {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidSample(m)
            | CoreError::InvalidDistribution(m)
            | CoreError::InvalidWeights(m) => CliError::Data(m),
            CoreError::DimensionMismatch(m) => CliError::Dimension(m),
            CoreError::InvalidParameter(m) | CoreError::InvalidConfig(m) => CliError::Parameter(m),
            CoreError::InvalidMatrix(m) => CliError::Numerical(m),
            e @ CoreError::NonConvergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::parse("f", 1, 1, "x").exit_code(), 2);
        assert_eq!(CliError::Dimension(String::new()).exit_code(), 3);
        assert_eq!(CliError::Data(String::new()).exit_code(), 4);
        assert_eq!(CliError::Parameter(String::new()).exit_code(), 5);
        assert_eq!(CliError::Domain(String::new()).exit_code(), 6);
        assert_eq!(CliError::Numerical(String::new()).exit_code(), 7);
        assert_eq!(
            CliError::Io {
                path: "f".into(),
                source: std::io::Error::other("x"),
            }
            .exit_code(),
            8
        );
    }

    #[test]
    fn core_errors_map_onto_cli_classes() {
        assert_eq!(
            CliError::from(CoreError::InvalidSample("s".into())).exit_code(),
            4
        );
        assert_eq!(
            CliError::from(CoreError::DimensionMismatch("d".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(CoreError::InvalidConfig("c".into())).exit_code(),
            5
        );
        assert_eq!(
            CliError::from(CoreError::NonConvergence {
                residual: 1.0,
                sweeps: 100
            })
            .exit_code(),
            7
        );
    }
}
