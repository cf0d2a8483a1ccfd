//! Sweep configuration, read from TOML.
//!
//! ```toml
//! m_tx = 2
//! n_rx = 2
//! t = 3
//! snr_db = [10.0, 14.0, 18.0]   # dB of rho (SNR per receive antenna over M)
//! trials = 10000                # per SNR point, upper limit
//! target_errors = 100           # optional early stop, checked per batch
//! seed = 1
//! decoder = "stack"             # stack | fano | sphere | babai
//! frontend = "mmse_dfe"         # mmse_dfe | naive
//! child_order = "schnorr_euchner"
//! delta = 0.25                  # Fano step
//! outage_rate = "r_last"        # r_last | scheme
//!
//! [rate]
//! kind = "fixed_bpcu"           # or kind = "multiplexing", r = 0.5
//! bpcu = 4.0
//!
//! [bias]
//! kind = "fixed"                # fixed { b } | awgn_optimal { sigma2 } | variable { zeta, phi }
//! b = 0.6
//!
//! [max_nodes]
//! kind = "none"                 # none | fixed { limit } | l0_rule
//!
//! [code]
//! p = 5
//! k_info = 6
//! # path = "code.toml"          # load a serialized code instead
//!
//! [complexity]
//! l_rule = "rho_scaling"        # rho_scaling | grid | l0_rule
//! grid_points = 24
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::BiasSchedule;
use crate::decoders::ChildOrder;
use crate::error::{Error, Result};
use crate::frontend::FrontendKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    #[default]
    Stack,
    Fano,
    Sphere,
    Babai,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Stack => "stack",
            DecoderKind::Fano => "fano",
            DecoderKind::Sphere => "sphere",
            DecoderKind::Babai => "babai",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateMode {
    FixedBpcu { bpcu: f64 },
    Multiplexing { r: f64 },
}

impl Default for RateMode {
    fn default() -> Self {
        RateMode::FixedBpcu { bpcu: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxNodes {
    #[default]
    None,
    Fixed { limit: u64 },
    L0Rule,
}

/// Rate function used for the outage flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageRate {
    #[default]
    RLast,
    /// Achievable rate of the configured bias schedule.
    Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    #[serde(default = "default_p")]
    pub p: u64,
    #[serde(default = "default_k_info")]
    pub k_info: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_p() -> u64 {
    5
}

fn default_k_info() -> usize {
    6
}

impl Default for CodeSpec {
    fn default() -> Self {
        Self { p: default_p(), k_info: default_k_info(), path: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LRule {
    /// `L = rho` at each SNR point.
    #[default]
    RhoScaling,
    /// Log-spaced absolute grid from `m` to the largest sample.
    Grid,
    /// Per-trial time-out limit from the complexity bounds.
    L0Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexitySpec {
    #[serde(default)]
    pub l_rule: LRule,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_grid_points() -> usize {
    24
}

impl Default for ComplexitySpec {
    fn default() -> Self {
        Self { l_rule: LRule::default(), grid_points: default_grid_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub m_tx: usize,
    pub n_rx: usize,
    pub t: usize,
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub rate: RateMode,
    #[serde(default)]
    pub decoder: DecoderKind,
    #[serde(default)]
    pub frontend: FrontendKind,
    #[serde(default)]
    pub child_order: ChildOrder,
    #[serde(default)]
    pub bias: BiasSchedule,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_errors: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_nodes: MaxNodes,
    #[serde(default)]
    pub outage_rate: OutageRate,
    #[serde(default)]
    pub code: CodeSpec,
    #[serde(default)]
    pub complexity: ComplexitySpec,
}

fn default_delta() -> f64 {
    0.25
}

impl SimConfig {
    /// Defaults: R = 4 bpcu, fixed bias b = 0.6, stack decoder, MMSE-DFE front end.
    pub fn new(m_tx: usize, n_rx: usize, t: usize, snr_db: Vec<f64>, trials: u64) -> Self {
        Self {
            m_tx,
            n_rx,
            t,
            snr_db,
            rate: RateMode::default(),
            decoder: DecoderKind::default(),
            frontend: FrontendKind::default(),
            child_order: ChildOrder::default(),
            bias: BiasSchedule::default(),
            delta: default_delta(),
            trials,
            target_errors: None,
            seed: 0,
            max_nodes: MaxNodes::default(),
            outage_rate: OutageRate::default(),
            code: CodeSpec::default(),
            complexity: ComplexitySpec::default(),
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.m_tx * self.t
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.m_tx == 0 || self.n_rx == 0 || self.t == 0 {
            return bad(format!("M, N, T must be positive: {}, {}, {}", self.m_tx, self.n_rx, self.t));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|v| !v.is_finite()) {
            return bad("snr_db must be a non-empty list of finite values".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta = {} must be positive", self.delta));
        }
        match self.rate {
            RateMode::FixedBpcu { bpcu } if !(bpcu >= 0.0) => return bad(format!("rate {bpcu} must be >= 0")),
            RateMode::Multiplexing { r } if !(r >= 0.0 && r <= self.m_tx.min(self.n_rx) as f64) => {
                return bad(format!("multiplexing gain {r} outside [0, min(M, N)]"))
            }
            _ => {}
        }
        if let MaxNodes::Fixed { limit: 0 } = self.max_nodes {
            return bad("max_nodes limit must be positive".into());
        }
        if self.frontend == FrontendKind::Naive && self.n_rx < self.m_tx {
            return bad("naive front-end needs N >= M".into());
        }
        if self.complexity.grid_points < 2 {
            return bad("complexity.grid_points must be at least 2".into());
        }
        self.bias.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let BiasSchedule::Variable { zeta, .. } = &self.bias {
            if zeta.len() != self.m_tx {
                return bad(format!("zeta has {} entries, M = {}", zeta.len(), self.m_tx));
            }
        }
        if self.code.path.is_none() && !crate::lattice::is_prime(self.code.p) {
            return bad(format!("code.p = {} is not prime", self.code.p));
        }
        if self.code.path.is_none() && (self.code.k_info == 0 || self.code.k_info >= self.dim()) {
            return bad(format!("code.k_info = {} outside 1..{}", self.code.k_info, self.dim()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let text = r#"
m_tx = 2
n_rx = 2
t = 3
snr_db = [10.0, 14.0]
trials = 100
seed = 7
decoder = "fano"
frontend = "naive"

[rate]
kind = "multiplexing"
r = 0.5

[bias]
kind = "variable"
zeta = [1.5, 0.5]
phi = 0.25

[max_nodes]
kind = "fixed"
limit = 5000
"#;
        let cfg = SimConfig::from_toml(text).unwrap();
        assert_eq!(cfg.decoder, DecoderKind::Fano);
        assert_eq!(cfg.frontend, FrontendKind::Naive);
        assert_eq!(cfg.rate, RateMode::Multiplexing { r: 0.5 });
        assert_eq!(cfg.max_nodes, MaxNodes::Fixed { limit: 5000 });
        assert_eq!(cfg.code, CodeSpec::default());
        let back = SimConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = SimConfig::new(2, 2, 3, vec![10.0], 10);
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.trials = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base.clone();
        c.snr_db.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.code.p = 32;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.bias = BiasSchedule::Variable { zeta: vec![1.0], phi: 0.5 };
        assert!(c.validate().is_err());
        assert!(SimConfig::from_toml("m_tx = 2").is_err());
        assert!(SimConfig::from_toml("m_tx = 2\nn_rx = 2\nt = 3\nsnr_db = [1.0]\ntrials = 1\nbogus = 1").is_err());
    }
}
