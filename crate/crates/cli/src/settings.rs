// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! Optional TOML configuration, merged underneath command-line flags.
//!
//! ```toml
//! seed = 7
//! threads = 4
//!
//! [search]
//! restarts = 16
//!
//! [dual]
//! restarts = 32
//!
//! [tolerances]
//! marginal = 1e-9
//! ```

use qwass::config::Tolerances;
use qwass::dual::DualBudget;
use qwass::transport::SearchBudget;
use qwass::{Error, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub search: SearchBudget,
    pub dual: DualBudget,
    pub tolerances: Option<Tolerances>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}
