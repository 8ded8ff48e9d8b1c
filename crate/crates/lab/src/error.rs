use std::fmt;

use timesq_core::ErrorKind;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const PRECISION: u8 = 3;
    pub const GUARD: u8 = 4;
    pub const HYPOTHESIS: u8 = 5;
}

/// Stage of the composed pipeline an error came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Positivity,
    Host,
    Growth,
    Density,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Positivity => "i:positive-entropy",
            Stage::Host => "ii:q-host",
            Stage::Growth => "iii:entropy-growth",
            Stage::Density => "iv:density",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] timesq_core::Error),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("stage {stage}: {source}")]
    Stage { stage: Stage, source: Box<LabError> },
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> LabError {
        LabError::Config(msg.into())
    }

    pub fn at(self, stage: Stage) -> LabError {
        match self {
            LabError::Stage { .. } => self,
            other => LabError::Stage { stage, source: Box::new(other) },
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            LabError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => exit::CONFIG,
            LabError::Core(e) => match e.kind() {
                ErrorKind::Validation => exit::CONFIG,
                ErrorKind::Precision => exit::PRECISION,
                ErrorKind::Guard => exit::GUARD,
            },
            LabError::Hypothesis(_) => exit::HYPOTHESIS,
            LabError::Io(_) => exit::IO,
            LabError::Stage { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

/// Tags core errors with a stage.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<LabError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.into().at(stage))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use timesq_core::Error;

    #[test]
    fn codes_follow_kinds() {
        assert_eq!(LabError::from(Error::InvalidMultiplier(1)).exit_code(), exit::CONFIG);
        assert_eq!(LabError::from(Error::InsufficientPrecision("x".into())).exit_code(), exit::PRECISION);
        assert_eq!(LabError::from(Error::NoAnalyticModel).exit_code(), exit::GUARD);
        assert_eq!(LabError::Hypothesis("a".into()).exit_code(), exit::HYPOTHESIS);
        assert_eq!(LabError::config("bad").exit_code(), exit::CONFIG);
    }

    #[test]
    fn stage_tag_keeps_inner_code() {
        let e = LabError::from(Error::InsufficientPrecision("x".into())).at(Stage::Growth);
        assert_eq!(e.exit_code(), exit::PRECISION);
        assert_eq!(e.stage(), Some(Stage::Growth));
        assert!(e.to_string().starts_with("stage iii:entropy-growth"));
        let again = e.at(Stage::Density);
        assert_eq!(again.stage(), Some(Stage::Growth));
    }
}
