use crate::indicators::Channel;

/// Unified error type for the whole pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("region mask has no set pixels")]
    EmptyRegion,
    #[error("mask contains no horizontally adjacent pixel pair")]
    NoAdjacentPairs,
    #[error("calibration needs at least 2 matrices, got {0}")]
    InsufficientCalibration(usize),
    #[error("anchor library is missing channel {0}")]
    IncompleteLibrary(Channel),
    #[error("feature vector is zero; cosine matching undefined")]
    DegenerateFeature,
    #[error("forward trace does not belong to this encoder state")]
    TraceMismatch,
    #[error("training diverged at batch {0} (non-finite loss)")]
    TrainingDiverged(usize),
    #[error("head archive holds no previous tasks")]
    NoHistory,
    #[error("affinity-weighted aggregate is zero; reference undefined")]
    DegenerateReference,
    #[error("slerp between antipodal vectors has no unique geodesic")]
    UndefinedGeodesic,
    #[error("AUC needs both classes present")]
    UndefinedMetric,
    /// Wraps a per-indicator failure with the channel it occurred on.
    #[error("channel {channel}: {source}")]
    Channel {
        channel: Channel,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tag an error with the indicator channel it came from.
    pub fn on_channel(self, channel: Channel) -> Error {
        Error::Channel {
            channel,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
