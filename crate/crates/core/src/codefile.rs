//! On-disk form of a constructed code: the code itself plus provenance
//! metadata, as one JSON object.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::construct::LrcCode;
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub tool_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    #[serde(flatten)]
    pub code: LrcCode,
}

impl CodeFile {
    pub fn new(code: LrcCode, seed: u64) -> Self {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        CodeFile { tool_version: TOOL_VERSION.to_string(), seed, created_at, code }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let code = &file.code;
        if code.generator.field() != code.field {
            return Err(Error::Malformed("generator field differs from the declared field".into()));
        }
        if code.generator.rows() != code.params.k || code.generator.cols() != code.params.n {
            return Err(Error::Malformed(format!(
                "generator is {}x{}, parameters say {}x{}",
                code.generator.rows(),
                code.generator.cols(),
                code.params.k,
                code.params.n
            )));
        }
        if code.structure.n != code.params.n {
            return Err(Error::Malformed("structure length differs from n".into()));
        }
        code.structure.check_ranges()?;
        Ok(file)
    }
}
