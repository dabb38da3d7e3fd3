//! TOML configuration: machine descriptors and kernel lists.
//!
//! A machine argument is resolved as a file path first, then as
//! `<name>.toml` inside the directory named by `ROOFSIM_PRESET_DIR`, then
//! as a built-in preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{preset, KernelModel, MachineModel};

pub const PRESET_DIR_ENV: &str = "ROOFSIM_PRESET_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelList {
    #[serde(rename = "kernel")]
    pub kernels: Vec<KernelModel>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn machine_from_toml(text: &str) -> Result<MachineModel> {
    let m: MachineModel = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    m.validate()?;
    Ok(m)
}

pub fn machine_to_toml(m: &MachineModel) -> Result<String> {
    toml::to_string_pretty(m).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_machine(path: &Path) -> Result<MachineModel> {
    machine_from_toml(&read(path)?).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn kernels_from_toml(text: &str) -> Result<Vec<KernelModel>> {
    let list: KernelList = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if list.kernels.is_empty() {
        return Err(Error::Config("kernel list is empty".into()));
    }
    for k in &list.kernels {
        k.validate()?;
    }
    Ok(list.kernels)
}

pub fn load_kernels(path: &Path) -> Result<Vec<KernelModel>> {
    kernels_from_toml(&read(path)?)
}

fn preset_dir_candidate(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(PRESET_DIR_ENV)?;
    let p = Path::new(&dir).join(format!("{name}.toml"));
    p.is_file().then_some(p)
}

/// Resolves a machine given as a path or a preset name.
pub fn resolve_machine(spec: &str) -> Result<MachineModel> {
    let as_path = Path::new(spec);
    if as_path.is_file() {
        return load_machine(as_path);
    }
    if let Some(p) = preset_dir_candidate(spec) {
        return load_machine(&p);
    }
    preset(spec)
}
