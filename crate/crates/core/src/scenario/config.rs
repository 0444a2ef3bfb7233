use serde::{Deserialize, Serialize};

use crate::economy::{AbmParams, Regime};
use crate::error::{Error, Result};
use crate::risk::DefaultModel;

/// Current version of the configuration schema.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce a run or a Monte Carlo batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub regime: Regime,
    /// Seeds beyond `i64::MAX` are written as decimal strings, since TOML
    /// integers are signed.
    #[serde(with = "wide_u64")]
    pub seed: u64,
    pub banks: usize,
    pub firms: usize,
    pub households: usize,
    pub steps: u32,
    pub runs: usize,
    /// Exogenous per-step default probability of every bank.
    pub p_def: f64,
    /// Surcharge scale `zeta`.
    pub zeta: f64,
    /// Rate added to interbank offers in the Tobin-tax regime.
    pub tobin_rate: f64,
    pub abm: AbmParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schema: SCHEMA_VERSION,
            regime: Regime::NoCds,
            seed: 42,
            banks: 20,
            firms: 100,
            households: 1300,
            steps: 500,
            runs: 200,
            p_def: 0.01,
            zeta: 0.02,
            tobin_rate: 0.002,
            abm: AbmParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.banks < 3 {
            return Err(Error::Config(format!("need at least 3 banks, got {}", self.banks)));
        }
        if self.firms == 0 {
            return Err(Error::Config("need at least one firm".into()));
        }
        if self.households <= self.firms {
            return Err(Error::Config(format!(
                "every firm needs an owner plus at least one worker: {} households for {} firms",
                self.households, self.firms
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        for (name, v) in [("p_def", self.p_def), ("zeta", self.zeta), ("tobin_rate", self.tobin_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        self.abm.validate()
    }

    /// Rate added to interbank offers under this regime.
    pub fn interbank_tax(&self) -> f64 {
        if self.regime == Regime::TobinTax {
            self.tobin_rate
        } else {
            0.0
        }
    }

    /// Pricing model shared by every bank: `P_def` per step over the
    /// loan term, undiscounted.
    pub fn default_model(&self) -> DefaultModel {
        DefaultModel::uniform(self.banks, self.p_def, self.abm.loan_term())
    }

    /// Same configuration under another regime.
    pub fn with_regime(&self, regime: Regime) -> Self {
        ScenarioConfig { regime, ..self.clone() }
    }
}

/// Serde adapter for `u64` values in formats limited to `i64`.
pub mod wide_u64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wide {
            Int(u64),
            Text(String),
        }
        match Wide::deserialize(d)? {
            Wide::Int(v) => Ok(v),
            Wide::Text(t) => t.parse().map_err(|_| de::Error::custom(format!("`{t}` is not a u64"))),
        }
    }

    /// Same adapter for sequences.
    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
            struct One(u64);
            impl serde::Serialize for One {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(&self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&One(*x))?;
            }
            seq.end()
        }
    }
}
