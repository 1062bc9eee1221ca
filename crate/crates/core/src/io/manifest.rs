use super::{write_atomic, IoError};
use crate::sweep::{RunRecord, SweepSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const TOOL_NAME: &str = "masersim";

/// Self-describing record of one invocation: the resolved spec (all
/// defaults filled in), its hash and what every grid point produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub preset: String,
    pub spec_hash: String,
    pub started_at: String,
    pub finished_at: String,
    pub spec: SweepSpec,
    pub records: Vec<RunRecord>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(spec: &SweepSpec, records: Vec<RunRecord>) -> Self {
        Self {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            preset: spec.seed_label.clone(),
            spec_hash: spec.hash(),
            started_at: String::new(),
            finished_at: String::new(),
            spec: spec.clone(),
            records,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        let mut json = serde_json::to_vec_pretty(self)?;
        json.push(b'\n');
        write_atomic(path, &json)
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(IoError::at(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::figure_preset;

    #[test]
    fn round_trip_preserves_spec_and_hash() {
        let spec = figure_preset("fig6").unwrap();
        let m = Manifest::new(&spec, Vec::new());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.json");
        m.write(&p).unwrap();
        let back = Manifest::read(&p).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.spec.hash(), m.spec_hash);
        assert_eq!(back.preset, "fig6");
    }
}
