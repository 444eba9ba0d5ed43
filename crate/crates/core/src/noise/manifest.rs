//! Sidecar manifest for persisted noise realisations: one `key = value` pair per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{MollifierKind, RenormLaw};
use crate::error::{Error, Result};

/// Everything needed to regenerate a persisted noise field.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseManifest {
    pub seed: u64,
    pub side: f64,
    pub points: usize,
    pub mollifier: MollifierKind,
    pub eps: f64,
    pub c_eps: f64,
    pub law: RenormLaw,
}

impl NoiseManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("seed", self.seed.to_string());
        put("side", format!("{:e}", self.side));
        put("points", self.points.to_string());
        put("mollifier", self.mollifier.to_string());
        put("eps", format!("{:e}", self.eps));
        put("c_eps", format!("{:e}", self.c_eps));
        put("law_prefactor", format!("{:e}", self.law.prefactor));
        put("calibrated_intercept", format!("{:e}", self.law.intercept));
        out
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        out.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    /// Parses the keyed format; blank lines and `#` comments are skipped, unknown keys rejected.
    pub fn read(input: impl BufRead) -> Result<Self> {
        let mut map = BTreeMap::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Format(format!("missing '=' in {line:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| map.remove(key).ok_or_else(|| Error::Format(format!("missing key {key}")));
        let num = |s: String, key: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("{key}: {e}")));
        let manifest = Self {
            seed: take("seed")?.parse().map_err(|e| Error::Format(format!("seed: {e}")))?,
            side: num(take("side")?, "side")?,
            points: take("points")?.parse().map_err(|e| Error::Format(format!("points: {e}")))?,
            mollifier: take("mollifier")?.parse()?,
            eps: num(take("eps")?, "eps")?,
            c_eps: num(take("c_eps")?, "c_eps")?,
            law: RenormLaw {
                prefactor: num(take("law_prefactor")?, "law_prefactor")?,
                intercept: num(take("calibrated_intercept")?, "calibrated_intercept")?,
            },
        };
        if let Some(extra) = map.keys().next() {
            return Err(Error::Format(format!("unknown key {extra}")));
        }
        Ok(manifest)
    }
}
