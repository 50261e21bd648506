//! Effective configuration: defaults, then the `--config` file, then flags.

use std::path::{Path, PathBuf};

use nea_core::config::PipelineConfig;
use nea_core::{Error, Result};

use crate::args::{NeaFlags, SamplerFlags};

pub fn load(path: Option<&Path>) -> Result<PipelineConfig> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn set<T: Copy>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

pub fn apply_sampler(cfg: &mut PipelineConfig, f: &SamplerFlags) {
    let s = &mut cfg.sampler;
    set(&mut s.topics, f.topics);
    set(&mut s.iterations, f.iterations);
    set(&mut s.window, f.window);
    if f.alpha.is_some() {
        s.alpha = f.alpha;
    }
    if f.beta.is_some() {
        s.beta = f.beta;
    }
}

pub fn apply_nea(cfg: &mut PipelineConfig, f: &NeaFlags) {
    let n = &mut cfg.nea;
    set(&mut n.dim, f.dim);
    set(&mut n.minibatches, f.minibatches);
    set(&mut n.batch_size, f.batch_size);
    set(&mut n.negatives, f.negatives);
    set(&mut n.learning_rate, f.learning_rate);
    set(&mut n.noise_exponent, f.noise_exponent);
    set(&mut n.log_interval, f.log_interval);
    set(&mut n.workers, f.workers);
}

/// `<output>.<suffix>`, keeping any extension `output` already has.
pub fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let mut s = output.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the effective configuration next to `output`.
pub fn persist(cfg: &PipelineConfig, output: &Path) -> Result<()> {
    let path = sibling(output, "config.toml");
    let text = toml::to_string(cfg).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))?;
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn persisted_config_reloads_identically() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("model.bin");
        let mut cfg = PipelineConfig::default();
        cfg.sampler.alpha = Some(0.5);
        cfg.nea.dim = 7;
        cfg.tokenizer.stopwords = vec!["the".into()];
        persist(&cfg, &out).unwrap();
        let back = load(Some(&sibling(&out, "config.toml"))).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[nea]\ndimension = 3\n").unwrap();
        assert!(matches!(load(Some(&path)), Err(Error::Config(_))));
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg = PipelineConfig::default();
        let flags = SamplerFlags {
            topics: Some(3),
            iterations: None,
            alpha: Some(0.2),
            beta: None,
            window: None,
        };
        apply_sampler(&mut cfg, &flags);
        assert_eq!(cfg.sampler.topics, 3);
        assert_eq!(cfg.sampler.alpha, Some(0.2));
        assert_eq!(cfg.sampler.iterations, 200);
    }
}
