//! Resource caps. Every enumeration in the crate is exact: when a cap would
//! be exceeded the operation fails with [`Error::CapExceeded`] instead of
//! sampling or truncating.

use crate::error::{Error, Result};

/// Name of the environment variable read by [`Caps::from_env`].
pub const CAPS_ENV: &str = "INTENSIO_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Bits of choice `|W|·|R|` per group variable when `frame_valid`
    /// enumerates the full intension space `(2^R)^W`.
    pub frame_bits: u32,
    /// Total number of valuations a single validity check may enumerate.
    pub valuations: u64,
    /// Per-world choice combinations in intensional composition.
    pub compose: u64,
    /// Group carrier size when closing seeds under the theory operations.
    pub carrier: usize,
    /// Relations a single evaluation may materialize.
    pub relations: usize,
    /// Models a bounded search may visit.
    pub models: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            frame_bits: 12,
            valuations: 1 << 24,
            compose: 4096,
            carrier: 64,
            relations: 1 << 16,
            models: 1 << 36,
        }
    }
}

impl Caps {
    /// Defaults overridden by `INTENSIO_CAPS`, e.g. `compose=8192,carrier=128`.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Document(format!("{CAPS_ENV}: expected key=value, got '{item}'")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Document(format!("{CAPS_ENV}: '{value}' is not a number")))?;
            match key.trim() {
                "frame_bits" => self.frame_bits = value as u32,
                "valuations" => self.valuations = value,
                "compose" => self.compose = value,
                "carrier" => self.carrier = value as usize,
                "relations" => self.relations = value as usize,
                "models" => self.models = value,
                other => return Err(Error::Document(format!("{CAPS_ENV}: unknown cap '{other}'"))),
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default().with_overrides("compose=10, carrier=5").unwrap();
        assert_eq!(caps.compose, 10);
        assert_eq!(caps.carrier, 5);
        assert_eq!(caps.frame_bits, 12);
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("compose").is_err());
    }
}
