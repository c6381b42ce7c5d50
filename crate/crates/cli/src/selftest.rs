//! The `selftest` command: the acceptance suite over the bundled library.

use std::path::Path;

use twistss_core::acceptance::{CriterionResult, Suite, SuiteConfig};
use twistss_core::Result;

use crate::input::load_model_dir;

pub fn run(seed: u64, models: Option<&Path>) -> Result<Vec<CriterionResult>> {
    let extra_models = match models {
        Some(dir) => load_model_dir(dir)?,
        None => Vec::new(),
    };
    let config = SuiteConfig {
        seed,
        extra_models,
        ..SuiteConfig::default()
    };
    Ok(Suite::new(&config)?.run())
}
