//! Configurations shipped with the binary.

use crate::config::RunConfig;
use crate::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("harmonic_table1", include_str!("../presets/harmonic_table1.json")),
    ("harmonic_fig1", include_str!("../presets/harmonic_fig1.json")),
    ("qzm_B0.02_gr", include_str!("../presets/qzm_B0.02_gr.json")),
    ("qzm_B0.02_ex1", include_str!("../presets/qzm_B0.02_ex1.json")),
    ("qzm_B0.2_gr", include_str!("../presets/qzm_B0.2_gr.json")),
    ("qzm_B0.2_ex1", include_str!("../presets/qzm_B0.2_ex1.json")),
    ("qzm_B2_gr", include_str!("../presets/qzm_B2_gr.json")),
    ("qzm_B2_ex1", include_str!("../presets/qzm_B2_ex1.json")),
    ("qzm_B20_gr", include_str!("../presets/qzm_B20_gr.json")),
    ("qzm_B20_ex1", include_str!("../presets/qzm_B20_ex1.json")),
    ("qzm_B200_gr", include_str!("../presets/qzm_B200_gr.json")),
    ("qzm_B200_ex1", include_str!("../presets/qzm_B200_ex1.json")),
    ("qzm_B2000_gr", include_str!("../presets/qzm_B2000_gr.json")),
    ("qzm_B2000_ex1", include_str!("../presets/qzm_B2000_ex1.json")),
    ("qzm_B10000_gr", include_str!("../presets/qzm_B10000_gr.json")),
    ("qzm_B10000_ex1", include_str!("../presets/qzm_B10000_ex1.json")),
];

pub fn text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`; run `oppq presets` for the list")))
}

pub fn load(name: &str) -> Result<RunConfig, CliError> {
    RunConfig::from_json(text(name)?, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for (name, _) in PRESETS {
            let c = load(name).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn zeeman_presets_cover_each_field_and_state() {
        for b in ["0.02", "0.2", "2", "20", "200", "2000", "10000"] {
            for state in ["gr", "ex1"] {
                assert!(text(&format!("qzm_B{b}_{state}")).is_ok(), "{b} {state}");
            }
        }
        assert!(text("qzm_B3_gr").is_err());
    }

    #[test]
    fn staged_preset_switches_bound() {
        let c = load("qzm_B0.2_ex1").unwrap();
        let p = c.prec().unwrap();
        assert_eq!(c.b_u_at(20).unwrap().unwrap(), p.parse("0.6962736300273").unwrap());
        assert_eq!(c.b_u_at(26).unwrap().unwrap(), p.parse("0.6962736300272785").unwrap());
        assert_eq!(c.b_u_at(28).unwrap().unwrap(), p.parse("0.69627363002727813").unwrap());
    }
}
