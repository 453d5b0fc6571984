//! Provenance sidecars: every command writes `<artifact>.prov` listing its
//! fully resolved configuration (including defaulted values and seeds) as
//! `key=value` lines. The sidecar alone suffices to re-run the artifact
//! byte-identically; nothing in it depends on the wall clock.

use crate::error::Result;

use std::fs;
use std::path::{Path, PathBuf};

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".prov");
    artifact.with_file_name(name)
}

pub fn write_provenance(artifact: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut out = String::new();
    for (key, value) in entries {
        out.push_str(key);
        out.push('=');
        out.push_str(value);
        out.push('\n');
    }
    fs::write(sidecar_path(artifact), out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_sits_next_to_the_artifact() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/run/out.csv")),
            PathBuf::from("/tmp/run/out.csv.prov")
        );
    }
}
