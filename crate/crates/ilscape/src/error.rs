use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ilscape_core::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed input file. `location` is a line number or byte offset.
    #[error("{}: {location}: {message}", path.display())]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn core(&self) -> Option<&ilscape_core::Error> {
        match self {
            Error::Core(e) => Some(e),
            Error::Context { source, .. } => source.core(),
            _ => None,
        }
    }

    /// 1 for bad input, 2 for incomparable descriptors, 3 for violated
    /// internal invariants.
    pub fn exit_code(&self) -> i32 {
        use ilscape_core::Error as E;
        match self.core() {
            Some(E::Incomparable { .. } | E::BinMismatch { .. }) => 2,
            Some(E::NonSymmetric) => 3,
            _ => 1,
        }
    }
}

pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T, E: Into<Error>> Context<T> for std::result::Result<T, E> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| Error::Context {
            context: what(),
            source: Box::new(e.into()),
        })
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
