use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] adaptflow_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: parse error at offset {offset}: {message}")]
    Parse { path: PathBuf, offset: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error(
        "dataset required: {what} not found at {path}. Download the SPE Comparative Solution \
         Project model 2 data set (file spe_perm.dat, 60x220x85 cells, kx/ky/kz blocks in mD) \
         and point ADAPTFLOW_DATA at the directory containing it, or set medium.path in the config"
    )]
    DatasetRequired { what: String, path: PathBuf },
    #[error("vtk: {0}")]
    Vtk(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
