//! Stage orchestration behind the `soaccept` command.

pub mod config;
pub mod manifest;
pub mod rank;
pub mod stages;
