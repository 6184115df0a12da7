//! Scenario files: JSON documents describing a campaign, its probability model and an
//! initial state.
//!
//! Parsing errors carry line and column. Integrity errors name the JSON path of the offending
//! entry and the id involved. The digest is the SHA-256 of the canonical serialization (sorted
//! keys, numbers re-rendered from their binary64 values), so whitespace, key order and
//! number spelling do not affect it.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::campaign::{Axis, Campaign, CampaignState, Commander, Objective, Player};
use crate::error::ScenarioError;
use crate::transitions::{ImprovementEntry, ProbabilityKind, ProbabilityModel, ProbabilityOverride};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerPlayer {
    pub player1: Vec<f64>,
    pub player2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImprovementSpec {
    pub player: Player,
    pub target: usize,
    pub kind: ProbabilityKind,
    pub condition: Vec<usize>,
    pub boost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilityModelSpec {
    pub initial_attack: PerPlayer,
    pub initial_reinforce: PerPlayer,
    #[serde(default)]
    pub improvements: Vec<ImprovementSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub state: String,
    pub player: Player,
    pub objective: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub discount: f64,
    pub objectives: Vec<Objective>,
    pub axes: Vec<Axis>,
    pub commanders: Vec<Commander>,
    pub probability_model: ProbabilityModelSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideSpec>,
    pub initial_state: String,
}

/// A validated scenario: campaign, initial state and the canonical file it came from.
#[derive(Debug, Clone)]
pub struct Scenario {
    file: ScenarioFile,
    campaign: Campaign,
    initial_state: CampaignState,
    digest: String,
}

const BUNDLED: &[(&str, &str)] = &[
    ("three_axis", include_str!("../scenarios/three_axis.json")),
    ("obj06", include_str!("../scenarios/obj06.json")),
    ("obj10", include_str!("../scenarios/obj10.json")),
    ("obj14", include_str!("../scenarios/obj14.json")),
    ("obj18", include_str!("../scenarios/obj18.json")),
    ("obj22", include_str!("../scenarios/obj22.json")),
    ("counterexample", include_str!("../scenarios/counterexample.json")),
    ("absorbing", include_str!("../scenarios/absorbing.json")),
];

fn probability(location: String, p: f64) -> Result<(), ScenarioError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ScenarioError::integrity(location, format!("probability {p} is outside [0, 1]")))
    }
}

fn parse_state(location: &str, text: &str, objectives: usize) -> Result<CampaignState, ScenarioError> {
    let state: CampaignState = text
        .parse()
        .map_err(|_| ScenarioError::integrity(location, format!("state {text:?} must be a string over '1' and '2'")))?;
    if state.len() != objectives {
        return Err(ScenarioError::integrity(
            location,
            format!("state {text:?} has {} entries, campaign has {objectives} objectives", state.len()),
        ));
    }
    Ok(state)
}

impl ScenarioFile {
    /// Referential integrity with JSON-path locations. Structural rules are re-checked by [`Campaign::new`].
    fn check(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion(self.schema_version.clone()));
        }
        let n = self.objectives.len();
        if n == 0 {
            return Err(ScenarioError::integrity("objectives", "campaign has no objectives"));
        }
        for (i, o) in self.objectives.iter().enumerate() {
            if o.id != i {
                return Err(ScenarioError::integrity(format!("objectives[{i}].id"), format!("objective id {} must equal its position {i}", o.id)));
            }
            if !o.loss.is_finite() || o.loss < 0.0 {
                return Err(ScenarioError::integrity(format!("objectives[{i}].loss"), format!("objective {i} has negative or non-finite loss {}", o.loss)));
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (x, axis) in self.axes.iter().enumerate() {
            if axis.id != x {
                return Err(ScenarioError::integrity(format!("axes[{x}].id"), format!("axis id {} must equal its position {x}", axis.id)));
            }
            if axis.objectives.is_empty() {
                return Err(ScenarioError::integrity(format!("axes[{x}].objectives"), format!("axis {x} is empty")));
            }
            for (k, &o) in axis.objectives.iter().enumerate() {
                let loc = format!("axes[{x}].objectives[{k}]");
                let slot = owner
                    .get_mut(o)
                    .ok_or_else(|| ScenarioError::integrity(&loc, format!("unknown objective {o}")))?;
                if let Some(first) = slot.replace(x) {
                    return Err(ScenarioError::integrity(loc, format!("objective {o} appears in axes {first} and {x}")));
                }
            }
        }
        if let Some(o) = owner.iter().position(Option::is_none) {
            return Err(ScenarioError::integrity("axes", format!("objective {o} belongs to no axis")));
        }
        let mut axis_owner: Vec<Option<usize>> = vec![None; self.axes.len()];
        for (c, cmd) in self.commanders.iter().enumerate() {
            if cmd.id != c {
                return Err(ScenarioError::integrity(format!("commanders[{c}].id"), format!("commander id {} must equal its position {c}", cmd.id)));
            }
            if cmd.axes.is_empty() {
                return Err(ScenarioError::integrity(format!("commanders[{c}].axes"), format!("commander {c} is responsible for no axis")));
            }
            for (k, &x) in cmd.axes.iter().enumerate() {
                let loc = format!("commanders[{c}].axes[{k}]");
                let slot = axis_owner
                    .get_mut(x)
                    .ok_or_else(|| ScenarioError::integrity(&loc, format!("unknown axis {x}")))?;
                if let Some(first) = slot.replace(c) {
                    return Err(ScenarioError::integrity(loc, format!("axis {x} is assigned to commanders {first} and {c}")));
                }
            }
        }
        if let Some(x) = axis_owner.iter().position(Option::is_none) {
            return Err(ScenarioError::integrity("commanders", format!("axis {x} has no responsible commander")));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(ScenarioError::integrity("discount", format!("discount {} must lie strictly inside (0, 1)", self.discount)));
        }

        let model = &self.probability_model;
        for (name, table) in [("initial_attack", &model.initial_attack), ("initial_reinforce", &model.initial_reinforce)] {
            for (player, values) in [("player1", &table.player1), ("player2", &table.player2)] {
                let loc = format!("probability_model.{name}.{player}");
                if values.len() != n {
                    return Err(ScenarioError::integrity(loc, format!("{} entries, expected one per objective ({n})", values.len())));
                }
                for (o, &p) in values.iter().enumerate() {
                    probability(format!("{loc}[{o}]"), p)?;
                }
            }
        }
        for (i, e) in model.improvements.iter().enumerate() {
            let loc = format!("probability_model.improvements[{i}]");
            if e.target >= n {
                return Err(ScenarioError::integrity(format!("{loc}.target"), format!("unknown objective {}", e.target)));
            }
            if e.condition.is_empty() {
                return Err(ScenarioError::integrity(format!("{loc}.condition"), "condition set is empty"));
            }
            for (k, &o) in e.condition.iter().enumerate() {
                if o >= n {
                    return Err(ScenarioError::integrity(format!("{loc}.condition[{k}]"), format!("unknown objective {o}")));
                }
                if o == e.target {
                    return Err(ScenarioError::integrity(format!("{loc}.condition[{k}]"), format!("target objective {o} cannot condition itself")));
                }
            }
            probability(format!("{loc}.boost"), e.boost)?;
        }
        let mut seen = HashSet::new();
        for (i, ov) in self.overrides.iter().enumerate() {
            let loc = format!("overrides[{i}]");
            parse_state(&format!("{loc}.state"), &ov.state, n)?;
            if ov.objective >= n {
                return Err(ScenarioError::integrity(format!("{loc}.objective"), format!("unknown objective {}", ov.objective)));
            }
            if ov.alpha.is_none() && ov.rho.is_none() {
                return Err(ScenarioError::integrity(loc, "override sets neither alpha nor rho"));
            }
            if let Some(a) = ov.alpha {
                probability(format!("{loc}.alpha"), a)?;
            }
            if let Some(r) = ov.rho {
                probability(format!("{loc}.rho"), r)?;
            }
            if !seen.insert((ov.state.clone(), ov.player, ov.objective)) {
                return Err(ScenarioError::integrity(
                    loc,
                    format!("duplicate override for state {}, player {}, objective {}", ov.state, ov.player, ov.objective),
                ));
            }
        }
        parse_state("initial_state", &self.initial_state, n)?;
        Ok(())
    }

    fn model(&self) -> Result<ProbabilityModel, ScenarioError> {
        let spec = &self.probability_model;
        let improvements = spec
            .improvements
            .iter()
            .map(|e| ImprovementEntry {
                player: e.player,
                target: e.target,
                kind: e.kind,
                condition: e.condition.clone(),
                boost: e.boost,
            })
            .collect();
        let overrides = self
            .overrides
            .iter()
            .map(|ov| {
                Ok(ProbabilityOverride {
                    state: ov.state.parse()?,
                    player: ov.player,
                    objective: ov.objective,
                    alpha: ov.alpha,
                    rho: ov.rho,
                })
            })
            .collect::<Result<Vec<_>, crate::ModelError>>()?;
        Ok(ProbabilityModel::new(
            [spec.initial_attack.player1.clone(), spec.initial_attack.player2.clone()],
            [spec.initial_reinforce.player1.clone(), spec.initial_reinforce.player2.clone()],
            improvements,
            overrides,
        )?)
    }
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        file.check()?;
        let model = file.model()?;
        let campaign = Campaign::new(file.objectives.clone(), file.axes.clone(), file.commanders.clone(), file.discount, model)?;
        let initial_state: CampaignState = file.initial_state.parse()?;
        if let Some(axis) = campaign.unachievable_axis(&initial_state) {
            let objectives = campaign.axes()[axis]
                .objectives
                .iter()
                .map(|&o| format!("{o}={}", initial_state.controller(o)))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(ScenarioError::InitialState { axis, objectives });
        }
        let digest = digest_of(&file);
        Ok(Scenario { file, campaign, initial_state, digest })
    }

    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(ScenarioError::parse)?;
        Scenario::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::from_json_str(&text)
    }

    /// Pretty canonical JSON; loading it back gives an identical scenario and digest.
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&canonical_value(&self.file)).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn bundled(name: &str) -> Option<Result<Self, ScenarioError>> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::from_json_str(text))
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    pub fn name(&self) -> Option<&str> {
        self.file.name.as_deref()
    }

    pub fn campaign(&self) -> &Campaign {
        &self.campaign
    }

    pub fn into_campaign(self) -> Campaign {
        self.campaign
    }

    pub fn initial_state(&self) -> &CampaignState {
        &self.initial_state
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> &str {
        &self.digest
    }
}

fn canonical_value(file: &ScenarioFile) -> serde_json::Value {
    // serde_json's default map is ordered by key, which gives the canonical key order
    let value = serde_json::to_value(file).expect("scenario serializes");
    debug_assert!(matches!(value, serde_json::Value::Object(_)));
    value
}

pub fn digest_of(file: &ScenarioFile) -> String {
    let text = serde_json::to_string(&canonical_value(file)).expect("scenario serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Objective ids grouped by axis, for summaries.
pub fn axis_layout(campaign: &Campaign) -> BTreeMap<usize, Vec<usize>> {
    campaign
        .axes()
        .iter()
        .map(|a| (a.id, a.objectives.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_axis_text() -> &'static str {
        BUNDLED[0].1
    }

    #[test]
    fn bundled_scenarios_load() {
        for name in Scenario::bundled_names() {
            let s = Scenario::bundled(name).unwrap().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.digest().len(), 64);
        }
    }

    #[test]
    fn round_trip_is_identity_on_canonical_form() {
        let s = Scenario::from_json_str(three_axis_text()).unwrap();
        let again = Scenario::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(s.to_json_string(), again.to_json_string());
        assert_eq!(s.digest(), again.digest());
        assert_eq!(s.file(), again.file());
    }

    #[test]
    fn digest_ignores_formatting_and_number_spelling() {
        let s = Scenario::from_json_str(three_axis_text()).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(three_axis_text()).unwrap();
        value["discount"] = serde_json::json!(0.90);
        let compact = serde_json::to_string(&value).unwrap().replace("0.9,", "9e-1,");
        let t = Scenario::from_json_str(&compact).unwrap();
        assert_eq!(s.digest(), t.digest());
        value["discount"] = serde_json::json!(0.8);
        let u = Scenario::from_json_str(&value.to_string()).unwrap();
        assert_ne!(s.digest(), u.digest());
    }

    #[test]
    fn objective_in_two_axes_is_named() {
        let mut value: serde_json::Value = serde_json::from_str(three_axis_text()).unwrap();
        value["axes"][1]["objectives"][0] = serde_json::json!(1);
        let err = Scenario::from_json_str(&value.to_string()).unwrap_err();
        match err {
            ScenarioError::Integrity { location, message } => {
                assert_eq!(location, "axes[1].objectives[0]");
                assert!(message.contains("objective 1"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"schema_version\": \"campaign-mpe/1\",\n  \"discount\": ,\n}";
        match Scenario::from_json_str(text).unwrap_err() {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unachievable_initial_state_names_axis() {
        let mut value: serde_json::Value = serde_json::from_str(BUNDLED[1].1).unwrap();
        // obj06 axis 1 = objectives 2..5; "2111" there is unachievable
        value["initial_state"] = serde_json::json!("112111");
        match Scenario::from_json_str(&value.to_string()).unwrap_err() {
            ScenarioError::InitialState { axis, .. } => assert_eq!(axis, 1),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_out_of_range_probability_and_schema() {
        let mut value: serde_json::Value = serde_json::from_str(three_axis_text()).unwrap();
        value["probability_model"]["initial_attack"]["player2"][3] = serde_json::json!(1.5);
        match Scenario::from_json_str(&value.to_string()).unwrap_err() {
            ScenarioError::Integrity { location, .. } => assert_eq!(location, "probability_model.initial_attack.player2[3]"),
            other => panic!("unexpected {other}"),
        }
        let mut value: serde_json::Value = serde_json::from_str(three_axis_text()).unwrap();
        value["schema_version"] = serde_json::json!("campaign-mpe/0");
        assert!(matches!(Scenario::from_json_str(&value.to_string()), Err(ScenarioError::SchemaVersion(_))));
    }
}
