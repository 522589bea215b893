//! Structured (JSON) and human-readable campaign reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Campaign, CampaignConfig};
use crate::fixture::FixtureRecord;
use crate::instance::InstanceSummary;

/// Version of the JSON layout below. Bump on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// An averaging step needed `|U|⁻¹` and the field does not have it.
    BadCharacteristic,
    /// A non-convex subcomplex on which some identity fails (fuzz only).
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadCharacteristicRecord {
    pub characteristic: u64,
    pub context: String,
    pub order: usize,
    pub elements: Vec<usize>,
    pub divides_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: Option<u64>,
    /// What the trial was about, e.g. a subcomplex in `hash:ids` form.
    pub subject: String,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_characteristic: Option<BadCharacteristicRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub data: serde_json::Value,
}

impl TrialRecord {
    pub fn new(index: usize, seed: Option<u64>, subject: impl Into<String>) -> Self {
        TrialRecord {
            index,
            seed,
            subject: subject.into(),
            outcome: Outcome::Pass,
            checks: Vec::new(),
            bad_characteristic: None,
            error: None,
            data: serde_json::Value::Null,
        }
    }

    /// Pass iff every check holds.
    pub fn settle(mut self) -> Self {
        if self.outcome == Outcome::Pass && !self.checks.iter().all(|c| c.holds) {
            self.outcome = Outcome::Fail;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub bad_characteristic: usize,
    pub counterexamples: usize,
    pub ok: bool,
    /// Why `ok` is false, if it is.
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub campaign: Campaign,
    pub config: CampaignConfig,
    pub config_hash: String,
    pub instance: InstanceSummary,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub fixtures: Vec<FixtureRecord>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> u8 {
        if self.summary.ok {
            0
        } else {
            1
        }
    }
}

pub fn summarize(
    campaign: Campaign,
    expect_bad: bool,
    trials: &[TrialRecord],
    fixtures: &[FixtureRecord],
) -> Summary {
    let count = |o: Outcome| trials.iter().filter(|t| t.outcome == o).count();
    let (passed, failed) = (count(Outcome::Pass), count(Outcome::Fail));
    let (bad, counter) = (
        count(Outcome::BadCharacteristic),
        count(Outcome::Counterexample),
    );
    let mut problems = Vec::new();
    if failed > 0 {
        problems.push(format!("{failed} trial(s) failed"));
    }
    if bad > 0 && !expect_bad {
        problems.push(format!("{bad} trial(s) hit a bad characteristic"));
    }
    if expect_bad && bad == 0 {
        problems.push("a bad characteristic was expected but never met".into());
    }
    if trials
        .iter()
        .filter_map(|t| t.bad_characteristic.as_ref())
        .any(|b| !b.divides_order)
    {
        problems.push("a characteristic failure named a subgroup of invertible order".into());
    }
    if campaign == Campaign::Fuzz {
        if counter == 0 {
            problems.push("no non-convex counterexample was found".into());
        }
        if fixtures.iter().any(|f| !f.replays) {
            problems.push("an archived fixture did not replay".into());
        }
    }
    Summary {
        trials: trials.len(),
        passed,
        failed,
        bad_characteristic: bad,
        counterexamples: counter,
        ok: problems.is_empty(),
        problems,
    }
}

pub fn render_human(r: &Report) -> String {
    let mut out = String::new();
    let s = &r.summary;
    let i = &r.instance;
    let _ = writeln!(
        out,
        "campaign     {:?} (schema {})",
        r.campaign, r.schema_version
    );
    let _ = writeln!(out, "config       {}", r.config_hash);
    let _ = writeln!(
        out,
        "instance     {} vertices, {} cells, |G| = {}, dim V = {} over {}, {} level(s){}",
        i.vertices,
        i.cells,
        i.group_order,
        i.rep_dim,
        r.config.field,
        i.levels,
        if i.exhaustive { ", exhaustive" } else { "" }
    );
    let _ = writeln!(
        out,
        "trials       {} run, {} passed, {} failed, {} bad characteristic, {} counterexample(s)",
        s.trials, s.passed, s.failed, s.bad_characteristic, s.counterexamples
    );
    for t in r
        .trials
        .iter()
        .filter(|t| t.outcome == Outcome::Fail)
        .take(10)
    {
        let broken: Vec<&str> = t
            .checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name.as_str())
            .collect();
        let _ = writeln!(
            out,
            "  FAIL #{} {}: {}",
            t.index,
            t.subject,
            t.error.clone().unwrap_or(broken.join(", "))
        );
    }
    let mut named = std::collections::BTreeSet::new();
    for b in r
        .trials
        .iter()
        .filter_map(|t| t.bad_characteristic.as_ref())
    {
        if named.insert((b.elements.clone(), b.context.clone())) && named.len() <= 10 {
            let _ = writeln!(
                out,
                "  characteristic {} divides |U| = {} at {} (elements {:?})",
                b.characteristic, b.order, b.context, b.elements
            );
        }
    }
    for f in &r.fixtures {
        let _ = writeln!(
            out,
            "  fixture {} -> {}: {} -> {} cells, gap cells {:?}, replays {}",
            f.file, f.minimized_file, f.original_cells, f.minimized_cells, f.gap_cells, f.replays
        );
    }
    for n in &r.notes {
        let _ = writeln!(out, "note         {n}");
    }
    let verdict = if s.ok {
        "PASS".to_string()
    } else {
        format!("FAIL ({})", s.problems.join("; "))
    };
    let _ = writeln!(out, "result       {verdict}");
    out
}
