use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),
    #[error("layout of {segments} segments exceeds the cap of {cap}")]
    LayoutTooLarge { segments: u128, cap: usize },
    #[error("degenerate energy: |k² − V| = {gap:e} is below the threshold")]
    DegenerateEnergy { gap: f64 },
    #[error("non-physical transfer matrix: |m22| = {0} < 1")]
    NonPhysicalMatrix(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("insufficient points for fit: {kept} kept, {required} required")]
    InsufficientPoints { kept: usize, required: usize },
}
