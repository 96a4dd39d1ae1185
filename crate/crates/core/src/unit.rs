use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Logarithm base used when reporting an information quantity.
///
/// Every computation in this crate runs in nats; conversion happens once,
/// when a value leaves the public API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoUnit {
    #[default]
    Bits,
    Nats,
}

impl InfoUnit {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            InfoUnit::Nats => nats,
            InfoUnit::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            InfoUnit::Nats => value,
            InfoUnit::Bits => value * std::f64::consts::LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InfoUnit::Bits => "bits",
            InfoUnit::Nats => "nats",
        }
    }
}

impl fmt::Display for InfoUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InfoUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bits" | "bit" => Ok(InfoUnit::Bits),
            "nats" | "nat" => Ok(InfoUnit::Nats),
            other => Err(format!("unknown unit `{other}` (expected bits or nats)")),
        }
    }
}
