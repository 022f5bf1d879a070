// SPDX-License-Identifier: Apache-2.0

//! The operational-savings calculator: an impact-weighted incident-category
//! model estimating how much automated verification, monitoring, and
//! troubleshooting reduce incident cost.
//!
//! Every parameter is data: categories ship as an embedded default (the
//! published incident-share statistics with uniform placeholder durations)
//! and can be replaced wholesale from a JSON file.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// The automated processes that can address an incident category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Process {
    Verification,
    Monitoring,
    Troubleshooting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    /// Fraction of all incidents in this category.
    pub share: f64,
    /// Average incident duration, hours.
    pub mean_duration: f64,
    /// Which processes address this category; empty means unaddressable.
    pub addressable_by: BTreeSet<Process>,
}

/// How much of an addressable incident's impact the processes remove.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFraction {
    pub conservative: f64,
    pub optimistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidentModel {
    pub categories: Vec<Category>,
    pub scenario_fraction: ScenarioFraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Conservative,
    Optimistic,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid incident model: {0}")]
pub struct InvalidModel(pub String);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategorySavings {
    pub name: String,
    pub share: f64,
    /// share × mean_duration: this category's weight in total impact.
    pub impact: f64,
    /// Fraction of this category's impact removed (0 if unaddressable).
    pub reduction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub scenario: Scenario,
    pub fraction: f64,
    pub per_category: Vec<CategorySavings>,
    /// Impact-weighted savings over the addressable categories only.
    pub overall_addressable: f64,
    /// Impact-weighted savings over all incidents, including the
    /// unaddressable remainder.
    pub overall_total: f64,
}

impl IncidentModel {
    /// The published incident-share breakdown: software bugs 44%, network
    /// overload 19%, faulty changes 10%, faulty policies 10%; the other
    /// 17% of incidents are out of reach. Durations are uniform
    /// placeholders — only ratios enter the result.
    pub fn default_model() -> IncidentModel {
        let all: BTreeSet<Process> = [
            Process::Verification,
            Process::Monitoring,
            Process::Troubleshooting,
        ]
        .into_iter()
        .collect();
        let ops: BTreeSet<Process> =
            [Process::Monitoring, Process::Troubleshooting].into_iter().collect();
        let cat = |name: &str, share: f64, by: &BTreeSet<Process>| Category {
            name: name.into(),
            share,
            mean_duration: 1.0,
            addressable_by: by.clone(),
        };
        IncidentModel {
            categories: vec![
                cat("software-bugs", 0.44, &all),
                cat("network-overload", 0.19, &ops),
                cat("faulty-changes", 0.10, &all),
                cat("faulty-policies", 0.10, &all),
            ],
            scenario_fraction: ScenarioFraction { conservative: 0.30, optimistic: 0.80 },
        }
    }

    pub fn from_json(text: &str) -> Result<IncidentModel, InvalidModel> {
        let m: IncidentModel =
            serde_json::from_str(text).map_err(|e| InvalidModel(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), InvalidModel> {
        if self.categories.is_empty() {
            return Err(InvalidModel("no categories".into()));
        }
        let mut total = 0.0;
        for c in &self.categories {
            if !(0.0..=1.0).contains(&c.share) {
                return Err(InvalidModel(format!("share of {} outside [0,1]", c.name)));
            }
            if c.mean_duration <= 0.0 {
                return Err(InvalidModel(format!("duration of {} not positive", c.name)));
            }
            total += c.share;
        }
        if total > 1.0 + 1e-9 {
            return Err(InvalidModel(format!("shares sum to {total}, above 1")));
        }
        for f in [self.scenario_fraction.conservative, self.scenario_fraction.optimistic] {
            if !(0.0..=1.0).contains(&f) {
                return Err(InvalidModel(format!("scenario fraction {f} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Computes the savings report.
///
/// Each category weighs `share × mean_duration`; addressable categories
/// have that impact cut by the scenario fraction, others by nothing. The
/// addressable ratio divides by addressable impact only; the total ratio
/// divides by all impact, where the unlisted remainder share carries the
/// impact-weighted mean duration of the listed categories.
pub fn opex_savings(m: &IncidentModel, scenario: Scenario) -> Result<SavingsReport, InvalidModel> {
    m.validate()?;
    let fraction = match scenario {
        Scenario::Conservative => m.scenario_fraction.conservative,
        Scenario::Optimistic => m.scenario_fraction.optimistic,
    };

    let mut per_category = Vec::with_capacity(m.categories.len());
    let (mut saved, mut addressable_impact, mut listed_impact, mut listed_share) =
        (0.0, 0.0, 0.0, 0.0);
    for c in &m.categories {
        let impact = c.share * c.mean_duration;
        let reduction = if c.addressable_by.is_empty() { 0.0 } else { fraction };
        saved += impact * reduction;
        if !c.addressable_by.is_empty() {
            addressable_impact += impact;
        }
        listed_impact += impact;
        listed_share += c.share;
        per_category.push(CategorySavings {
            name: c.name.clone(),
            share: c.share,
            impact,
            reduction,
        });
    }

    let rest_share = (1.0 - listed_share).max(0.0);
    let mean_duration = listed_impact / listed_share;
    let total_impact = listed_impact + rest_share * mean_duration;

    Ok(SavingsReport {
        scenario,
        fraction,
        per_category,
        overall_addressable: if addressable_impact > 0.0 { saved / addressable_impact } else { 0.0 },
        overall_total: if total_impact > 0.0 { saved / total_impact } else { 0.0 },
    })
}

impl SavingsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("category,share,impact,reduction\n");
        for c in &self.per_category {
            writeln!(s, "{},{:.6},{:.6},{:.6}", c.name, c.share, c.impact, c.reduction)
                .expect("string write");
        }
        writeln!(s, "overall_addressable,,,{:.6}", self.overall_addressable).expect("string write");
        writeln!(s, "overall_total,,,{:.6}", self.overall_total).expect("string write");
        s
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        writeln!(
            s,
            "scenario: {:?} (fraction {:.2})",
            self.scenario, self.fraction
        )
        .expect("string write");
        for c in &self.per_category {
            writeln!(
                s,
                "  {:<18} share {:>5.2}  impact {:>6.3}  reduction {:>5.2}",
                c.name, c.share, c.impact, c.reduction
            )
            .expect("string write");
        }
        writeln!(s, "savings over addressable incidents: {:.3}", self.overall_addressable)
            .expect("string write");
        writeln!(s, "savings over all incidents:         {:.3}", self.overall_total)
            .expect("string write");
        s
    }
}
