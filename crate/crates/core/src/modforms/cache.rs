//! JSON cache of eigenform data with full-precision decimal text.

use super::eigen::Eigenform;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub eigenvalue_index: usize,
    pub raw_coeffs: Vec<String>,
    pub normalized: Vec<String>,
    pub petersson_norm: String,
    pub harmonic_weight: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCache {
    pub format_version: u32,
    pub weight: u32,
    pub dim: usize,
    pub precision_bits: u32,
    pub forms: Vec<FormRecord>,
}

fn text<T: Real>(x: T) -> String {
    format!("{x:e}")
}

fn parse<T: Real>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Cache(format!("bad decimal text {s:?}")))
}

impl EigenCache {
    pub fn from_forms<T: Real>(weight: u32, forms: &[Eigenform<T>]) -> Self {
        EigenCache {
            format_version: CACHE_FORMAT_VERSION,
            weight,
            dim: forms.len(),
            precision_bits: T::BITS,
            forms: forms
                .iter()
                .map(|f| FormRecord {
                    eigenvalue_index: f.eigenvalue_index,
                    raw_coeffs: f.raw_coeffs.iter().map(|&x| text(x)).collect(),
                    normalized: f.normalized.iter().map(|&x| text(x)).collect(),
                    petersson_norm: text(f.petersson_norm),
                    harmonic_weight: text(f.harmonic_weight),
                })
                .collect(),
        }
    }

    /// Rebuilds the forms; the cache must carry exactly the precision of `T`.
    pub fn to_forms<T: Real>(&self) -> Result<Vec<Eigenform<T>>> {
        if self.format_version != CACHE_FORMAT_VERSION {
            return Err(Error::Cache(format!(
                "cache format version {} is not {}",
                self.format_version, CACHE_FORMAT_VERSION
            )));
        }
        if self.precision_bits != T::BITS {
            return Err(Error::Cache(format!(
                "cache precision {} bits does not match working precision {}",
                self.precision_bits,
                T::BITS
            )));
        }
        if self.dim != self.forms.len() {
            return Err(Error::Cache("dim disagrees with the number of stored forms".into()));
        }
        self.forms
            .iter()
            .map(|r| {
                Ok(Eigenform {
                    weight: self.weight,
                    eigenvalue_index: r.eigenvalue_index,
                    raw_coeffs: r.raw_coeffs.iter().map(|s| parse(s)).collect::<Result<_>>()?,
                    normalized: r.normalized.iter().map(|s| parse(s)).collect::<Result<_>>()?,
                    petersson_norm: parse(&r.petersson_norm)?,
                    harmonic_weight: parse(&r.harmonic_weight)?,
                })
            })
            .collect()
    }

    pub fn coeff_limit(&self) -> usize {
        self.forms.iter().map(|f| f.normalized.len()).min().unwrap_or(usize::MAX)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::write(path, body + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        serde_json::from_str(&body).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::super::eigen::eigenforms;
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let forms = eigenforms::<f64>(24, 30).unwrap();
        let cache = EigenCache::from_forms(24, &forms);
        let json = serde_json::to_string(&cache).unwrap();
        let back: EigenCache = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_forms::<f64>().unwrap(), forms);
        assert!(back.to_forms::<f32>().is_err());
        let mut stale = back;
        stale.format_version = 0;
        assert!(stale.to_forms::<f64>().is_err());
    }
}
