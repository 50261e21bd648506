//! Effective configuration of a pipeline run and its stable hash.

use serde::{Deserialize, Serialize};

use crate::corpus::TokenizerConfig;
use crate::eval::EvalConfig;
use crate::nea::TrainConfig;
use crate::topic_models::SamplerConfig;

/// Every stage parameter of a run. Paths are not part of it, so the same
/// settings written to different directories hash identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tokenizer: TokenizerConfig,
    pub sampler: SamplerConfig,
    pub nea: TrainConfig,
    pub eval: EvalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 1,
            tokenizer: TokenizerConfig::default(),
            sampler: SamplerConfig::default(),
            nea: TrainConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// 64-bit FNV-1a over the canonical JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}
