use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the region where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("Gaussian model not applicable: {0}")]
    ModelInapplicable(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Pipeline stage names used to tag errors surfaced by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Dispersion,
    PhaseMatch,
    Kernel,
    Decomposition,
    Gaussian,
    Validity,
    Analysis,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Dispersion => "dispersion",
            Stage::PhaseMatch => "phasematch",
            Stage::Kernel => "kernel",
            Stage::Decomposition => "decomposition",
            Stage::Gaussian => "gaussian",
            Stage::Validity => "validity",
            Stage::Analysis => "analysis",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

impl Error {
    pub fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}

/// Attach a stage name to the error of a `Result`.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
