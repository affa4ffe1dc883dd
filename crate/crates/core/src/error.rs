use thiserror::Error;

use crate::numkernel::RankCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("root iteration did not converge within {iterations} iterations (degree {degree})")]
    NonConvergence { degree: usize, iterations: usize },

    #[error("ambiguous numerical rank in {context}: gap ratio {gap:.3e}", gap = certificate.gap_ratio)]
    AmbiguousRank {
        context: String,
        certificate: RankCertificate,
    },

    #[error("forms share a common component")]
    CommonComponent,

    #[error("form vanishes identically: {0}")]
    ZeroForm(String),

    #[error("degenerate line: {0}")]
    DegenerateLine(String),

    #[error("non-generic configuration: {0}")]
    NonGeneric(String),

    #[error("expected {expected} {what}, found {found}")]
    CountMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("degenerate chart: {0}")]
    ChartDegenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }

    /// Stage names from outermost to innermost.
    pub fn stages(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Error::Stage { stage, source } = cur {
            out.push(stage.as_str());
            cur = source;
        }
        out
    }

    pub fn is_non_generic(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::NonGeneric(_) | Error::DegenerateLine(_) | Error::CommonComponent | Error::ZeroForm(_)
        )
    }

    /// Failures that a higher working precision may cure.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::NonConvergence { .. } | Error::AmbiguousRank { .. } | Error::CountMismatch { .. }
        )
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
