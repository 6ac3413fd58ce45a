//! Work caps for exhaustive enumerations.

/// Environment variable overriding every enumeration cap.
pub const MAX_WORK_ENV: &str = "QML_MAX_WORK";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of candidate vectors in `wall_hyperplanes`.
    pub max_candidates: u64,
    /// Maximum number of linear programs solved by one enumeration.
    pub max_lps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_candidates: 1_000_000,
            max_lps: 10_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with both caps replaced by `QML_MAX_WORK` when it is set.
    pub fn from_env() -> Self {
        match std::env::var(MAX_WORK_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            Some(w) => Limits {
                max_candidates: w,
                max_lps: w,
            },
            None => Limits::default(),
        }
    }
}
