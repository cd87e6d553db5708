//! Command implementations behind the `cpdim` binary, exposed as a
//! library so the integration tests can drive them directly.

pub mod commands;
pub mod data;
pub mod records;

use cpdim_core::CoreError;

/// Process exit code for an error, per the documented contract:
/// 2 invalid input, 3 budget exceeded, 4 consistency failure.
pub fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Input(_)
        | CoreError::Precondition(_)
        | CoreError::Io(_)
        | CoreError::CacheFormat(_) => 2,
        CoreError::Infeasible(_) => 3,
        CoreError::Consistency(_) => 4,
    }
}
