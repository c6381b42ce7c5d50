//! Resolving model arguments to files or bundled models.

use std::path::Path;

use twistss_core::library::{bundled_model, BUNDLED_MODELS};
use twistss_core::{CdgaModel, Error};

/// A path to a model document, or the name of a bundled model. A missing
/// path whose file stem names a bundled model (`examples/torus3.json`)
/// resolves to that model.
pub fn load_model(arg: &str) -> Result<CdgaModel, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("{arg}: {e}")))?;
        return CdgaModel::load(&text).map_err(|e| annotate(arg, e));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    if BUNDLED_MODELS.contains(&stem) {
        return bundled_model(stem);
    }
    Err(Error::Schema(format!(
        "`{arg}` is neither a readable file nor a bundled model ({})",
        BUNDLED_MODELS.join(", ")
    )))
}

fn annotate(source: &str, e: Error) -> Error {
    match e {
        Error::Schema(msg) => Error::Schema(format!("{source}: {msg}")),
        other => other,
    }
}

/// Loads every `*.json` file in `dir`, sorted by name.
pub fn load_model_dir(dir: &Path) -> Result<Vec<CdgaModel>, Error> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Schema(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Schema(format!("{}: {e}", p.display())))?;
            CdgaModel::load(&text).map_err(|e| annotate(&p.display().to_string(), e))
        })
        .collect()
}
