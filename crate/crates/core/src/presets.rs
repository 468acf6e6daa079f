//! Named scenarios and tables shipped with the library.

use crate::error::{Error, Result};
use crate::hardy::hardy_protocol;
use crate::instrument::pr_box_table;
use crate::qubit::tsirelson_settings;
use crate::scenario::{qutrit_witness, ProbabilityTable, TemporalScenario};
use crate::signaling::SignalingScenario;

pub const PRESET_NAMES: [&str; 5] = [
    "tsirelson-qubit",
    "signal-protocol",
    "hardy-protocol",
    "qutrit-witness",
    "pr-box-table",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Scenario(TemporalScenario),
    Table(ProbabilityTable),
}

impl Preset {
    pub fn table(&self) -> Result<ProbabilityTable> {
        match self {
            Preset::Scenario(sc) => crate::scenario::full_table(sc),
            Preset::Table(t) => Ok(t.clone()),
        }
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    Ok(match name {
        "tsirelson-qubit" => Preset::Scenario(tsirelson_settings().scenario()),
        "signal-protocol" => Preset::Scenario(SignalingScenario::protocol().temporal()),
        "hardy-protocol" => Preset::Scenario(hardy_protocol()),
        "qutrit-witness" => Preset::Scenario(qutrit_witness()),
        "pr-box-table" => Preset::Table(pr_box_table()),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    })
}

pub fn preset_scenario(name: &str) -> Result<TemporalScenario> {
    match preset(name)? {
        Preset::Scenario(sc) => Ok(sc),
        Preset::Table(_) => Err(Error::Shape(format!(
            "preset {name} is a table, not a scenario"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::chsh_value;
    use crate::io::{parse_scenario, parse_table, to_json, ScenarioJson, TableJson};
    use crate::operator::Outcome;
    use crate::qubit::TSIRELSON;
    use crate::scenario::correlators;

    #[test]
    fn every_preset_round_trips() {
        for name in PRESET_NAMES {
            match preset(name).unwrap() {
                Preset::Scenario(sc) => {
                    let text = serde_json::to_string(&ScenarioJson::from(&sc)).unwrap();
                    assert_eq!(parse_scenario(&text).unwrap(), sc, "{name}");
                }
                Preset::Table(t) => {
                    assert_eq!(parse_table(&to_json(&TableJson::from(&t))).unwrap(), t)
                }
            }
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(preset("bell"), Err(Error::UnknownPreset(_))));
        assert!(preset_scenario("pr-box-table").is_err());
    }

    #[test]
    fn preset_values() {
        let c = correlators(&preset_scenario("tsirelson-qubit").unwrap());
        assert!((chsh_value(&c).unwrap() - TSIRELSON).abs() < 1e-9);
        let t = preset("qutrit-witness").unwrap().table().unwrap();
        assert!((t.bob_marginal(Outcome::Minus, 0, 0) - 1.0).abs() < 1e-12);
        assert!((t.bob_marginal(Outcome::Minus, 1, 0) - 0.5).abs() < 1e-12);
    }
}
