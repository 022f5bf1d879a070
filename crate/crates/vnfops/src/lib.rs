// SPDX-License-Identifier: Apache-2.0

//! Library surface of the workbench CLI: the operational-savings model
//! lives here so it can be tested and reused directly.

pub mod fixtures;
pub mod opex;

pub use fixtures::{fixture_files, oracle_policies, skewed_snapshot};
pub use opex::{
    opex_savings, Category, CategorySavings, IncidentModel, InvalidModel, Process,
    SavingsReport, Scenario, ScenarioFraction,
};
