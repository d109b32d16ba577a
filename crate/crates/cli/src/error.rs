use std::fmt;

/// Everything a subcommand can fail with, mapped onto process exit codes.
#[derive(Debug)]
pub enum Failure {
    Core(rolegauss::Error),
    /// Replayed artifacts whose digests differ from the manifest.
    Mismatch(Vec<String>),
}

impl Failure {
    /// 2 configuration, 3 input, 4 numerical, 1 replay mismatch.
    pub fn exit_code(&self) -> u8 {
        use rolegauss::Error::*;
        match self {
            Failure::Core(Config(_) | Capacity { .. }) => 2,
            Failure::Core(Parse { .. } | Input(_) | Io(_)) => 3,
            Failure::Core(Numerical(_)) => 4,
            Failure::Mismatch(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => e.fmt(f),
            Failure::Mismatch(names) => write!(f, "replay differs from manifest: {}", names.join(", ")),
        }
    }
}

impl From<rolegauss::Error> for Failure {
    fn from(e: rolegauss::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

pub type Result<T> = std::result::Result<T, Failure>;
