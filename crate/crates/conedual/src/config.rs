//! JSON run configurations for the batch front-end.

use serde::{Deserialize, Serialize};

use crate::seqcore::SymmetricSequence;

fn default_dim() -> usize {
    1
}

fn default_budget() -> usize {
    1000
}

fn default_restarts_grid() -> usize {
    1024
}

/// One batch run; the `command` tag picks the computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Revesz(ReveszConfig),
    Wiener(WienerConfig),
    CheckPd(CheckPdConfig),
    Decompose(DecomposeConfig),
    ParsevalTest(ParsevalConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReveszConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(rename = "M")]
    pub m: Vec<Vec<i64>>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<i64>>,
    pub r: SymmetricSequence,
    /// 0 means the default window supp r ∪ ±(M∪L) ∪ {‖n‖∞ ≤ 2·max index}.
    #[serde(default)]
    pub window_half_width: i64,
    #[serde(rename = "G")]
    pub g_schedule: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WienerConfig {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r_schedule: Vec<usize>,
    #[serde(rename = "G")]
    pub g_schedule: Vec<usize>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckPdConfig {
    pub sequence: SymmetricSequence,
    #[serde(rename = "G", default = "default_restarts_grid")]
    pub g: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub phi: SymmetricSequence,
    pub window_half_width: i64,
    #[serde(rename = "G", default = "default_restarts_grid")]
    pub g: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParsevalConfig {
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Canonical support of the random sequences, 0..=radius.
    #[serde(default = "default_parseval_radius")]
    pub support_radius: usize,
    /// Atoms per random measure.
    #[serde(default = "default_parseval_atoms")]
    pub atoms: usize,
}

fn default_parseval_radius() -> usize {
    5
}

fn default_parseval_atoms() -> usize {
    4
}
