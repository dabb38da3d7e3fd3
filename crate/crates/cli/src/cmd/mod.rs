pub mod hpcg;
pub mod model;
pub mod simulate;
pub mod spmv_traffic;
pub mod time;

use roofsim_core::config::resolve_machine;
use roofsim_core::MachineModel;

use crate::error::CliError;

pub fn machine(spec: &str) -> Result<MachineModel, CliError> {
    Ok(resolve_machine(spec)?)
}
