use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] doa_core::CoreError),
    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
    #[error("music baseline needs 1 <= K < M, got K={k} with M={m}")]
    MusicDomain { k: usize, m: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
