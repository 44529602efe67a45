//! JSON run reports.

use serde::Serialize;

#[derive(Debug, Clone, Serialize, Default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub n: u64,
    pub n_explicit: bool,
    pub m: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_hint: Option<u64>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

/// Peak sizes of the per-aggregate state, in entries.
#[derive(Debug, Clone, Serialize, Default)]
pub struct StateSizes {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_band_entries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_entries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_estimators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f2_counters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gk_entries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gk_induced_len: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub read_ms: f64,
    pub pass_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_regime: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_variant: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeat_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeat_rate_variant: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pr_band: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<u64>,
    pub state: StateSizes,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(command: &'static str, params: Params) -> Self {
        RunReport {
            command,
            params,
            count: None,
            sum: None,
            avg: None,
            avg_regime: None,
            distinct: None,
            distinct_variant: None,
            repeat_rate: None,
            repeat_rate_variant: None,
            median: None,
            pr_band: None,
            outcomes: None,
            state: StateSizes::default(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields always serialize")
    }
}
