use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::io::{file_name, sha256_file, sha256_hex, write_json};

#[derive(Serialize)]
struct InputDigest {
    name: String,
    sha256: String,
}

/// Everything needed to reproduce an output: the command, its effective
/// parameters and the digests of its inputs. Paths are reduced to file
/// names and no timestamps are recorded, so reruns give identical files.
#[derive(Serialize)]
pub struct Manifest {
    command: &'static str,
    version: &'static str,
    seed: Option<u64>,
    config_hash: String,
    parameters: Value,
    inputs: Vec<InputDigest>,
}

impl Manifest {
    pub fn new<P: Serialize>(
        command: &'static str,
        seed: Option<u64>,
        parameters: &P,
        inputs: &[&Path],
    ) -> Result<Self> {
        let parameters = serde_json::to_value(parameters)?;
        let config_hash = sha256_hex(format!("{command}\n{parameters}").as_bytes());
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    name: file_name(p),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config_hash,
            parameters,
            inputs,
        })
    }

    /// Writes `<output>.manifest.json`, or `<output>/manifest.json` for a
    /// directory output.
    pub fn write_next_to(&self, output: &Path) -> Result<PathBuf> {
        let path = if output.is_dir() {
            output.join("manifest.json")
        } else {
            let mut name = output.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        };
        write_json(&path, self)?;
        Ok(path)
    }
}
