use serde::{Deserialize, Serialize};

/// Absolute agreement floor for the pass rule.
pub const ABS_FLOOR: f64 = 1e-9;
/// Number of standard errors allowed by the pass rule.
pub const Z_BAND: f64 = 3.0;

/// Parameters echoed into a report; unset fields are omitted from JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Outcome of one identity check.
///
/// `pass` holds exactly when `|lhs - rhs| <= max(3 · stderr, 1e-9)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub identity: String,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
    /// `(lhs - rhs) / stderr`; `None` when the comparison is deterministic.
    pub z: Option<f64>,
    pub pass: bool,
    pub seed: u64,
    pub samples: usize,
    pub quad_order: Option<usize>,
    pub convention: Option<String>,
    pub redraws: u64,
    /// Closed-form value of both sides, where one is known.
    pub exact: Option<f64>,
}

impl VerifyReport {
    pub fn new(
        identity: impl Into<String>,
        params: Params,
        lhs: f64,
        rhs: f64,
        stderr: f64,
    ) -> Self {
        let diff = lhs - rhs;
        let z = (stderr > 0.0).then(|| diff / stderr);
        Self {
            identity: identity.into(),
            params,
            lhs,
            rhs,
            stderr,
            z,
            pass: agrees(lhs, rhs, stderr),
            seed: 0,
            samples: 0,
            quad_order: None,
            convention: None,
            redraws: 0,
            exact: None,
        }
    }

    pub fn with_seed(mut self, seed: u64, samples: usize) -> Self {
        self.seed = seed;
        self.samples = samples;
        self
    }

    pub fn with_quad_order(mut self, q: usize) -> Self {
        self.quad_order = Some(q);
        self
    }

    pub fn with_convention(mut self, name: impl Into<String>) -> Self {
        self.convention = Some(name.into());
        self
    }

    pub fn with_redraws(mut self, redraws: u64) -> Self {
        self.redraws = redraws;
        self
    }

    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact = Some(exact);
        self
    }
}

/// The pass rule shared by every report.
pub fn agrees(lhs: f64, rhs: f64, stderr: f64) -> bool {
    (lhs - rhs).abs() <= (Z_BAND * stderr).max(ABS_FLOOR)
}
