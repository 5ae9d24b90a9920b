//! Run configuration: one JSON document, unknown keys rejected.

use oppq_core::mer::{PolyTerm, QzmSystem, Recurrence1D, StepPoly};
use oppq_core::mpnum::{BigReal, Precision};
use oppq_core::oppq::{BuPolicy, NormalizationMode, Problem};
use oppq_core::refweight::Weight1D;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Stem used in output file names. Defaults to the system kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub system: SystemConfig,
    /// Decimal digits, at least 30.
    pub precision: u32,
    /// `I` for 1-D systems, `m_s` for the Zeeman problem. Strictly ascending.
    pub orders: Vec<usize>,
    /// Search window `[lo, hi]` for minima, as decimal strings.
    pub window: [String; 2],
    /// Domain for the level-set crossings. Defaults to `window`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds_window: Option<[String; 2]>,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Bisection stops once brackets are narrower than `10^-tol_exponent`.
    pub tol_exponent: u32,
    /// Manual upper bound `B_U`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_u: Option<String>,
    /// `B_U` values that take effect from a given order on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_u_stages: Vec<BuStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bu_policy: Option<PolicyConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default)]
    pub exec: ExecConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    Harmonic,
    Qzm {
        b: String,
        #[serde(default = "default_z")]
        z: String,
        eps0: String,
    },
    #[serde(rename = "custom-1d")]
    Custom1d {
        #[serde(default = "default_label")]
        label: String,
        missing_order: usize,
        /// `coeffs[k]` multiplies `μ(p − k)`.
        coeffs: Vec<Vec<TermConfig>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        divisor: Option<Vec<TermConfig>>,
        weight: WeightConfig,
        #[serde(default)]
        normalization: NormalizationConfig,
    },
}

/// Monomial `c · p^p_pow · E^e_pow`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub c: String,
    #[serde(default)]
    pub p_pow: u32,
    #[serde(default)]
    pub e_pow: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightConfig {
    HarmonicHalfLine,
    HalfLineGamma { power: String, rate: String },
    Gaussian { variance: String },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationConfig {
    #[default]
    UnitMissingMomentVector,
    FirstMomentOne,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuStage {
    pub from_order: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub theta: f64,
    pub kappa: u32,
    pub floor_digits: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emit {
    #[serde(default = "yes")]
    pub tables: bool,
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default = "yes")]
    pub ledger: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Emit {
            tables: true,
            plots: true,
            ledger: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ExecConfig {
    #[default]
    Parallel,
    Sequential,
}

fn default_scan_points() -> usize {
    41
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_z() -> String {
    "1".into()
}
fn default_label() -> String {
    "custom".into()
}
fn yes() -> bool {
    true
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn system_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| match &self.system {
            SystemConfig::Harmonic => "harmonic".into(),
            SystemConfig::Qzm { .. } => "qzm".into(),
            SystemConfig::Custom1d { label, .. } => label.clone(),
        })
    }

    pub fn prec(&self) -> Result<Precision, CliError> {
        Precision::new(self.precision).map_err(|e| invalid("precision", e))
    }

    pub fn tol(&self) -> Result<BigReal, CliError> {
        Ok(self.prec()?.pow10(-(self.tol_exponent as i32)))
    }

    pub fn window(&self) -> Result<(BigReal, BigReal), CliError> {
        parse_window(self.prec()?, &self.window, "window")
    }

    pub fn bounds_window(&self) -> Result<(BigReal, BigReal), CliError> {
        match &self.bounds_window {
            Some(w) => parse_window(self.prec()?, w, "bounds_window"),
            None => self.window(),
        }
    }

    pub fn policy(&self) -> BuPolicy {
        self.bu_policy.as_ref().map_or_else(BuPolicy::default, |p| BuPolicy {
            theta: p.theta,
            kappa: p.kappa,
            floor_digits: p.floor_digits,
        })
    }

    /// `B_U` in force at `order`: the last stage reached, else the flat value.
    pub fn b_u_at(&self, order: usize) -> Result<Option<BigReal>, CliError> {
        let p = self.prec()?;
        let staged = self.b_u_stages.iter().filter(|s| s.from_order <= order).next_back();
        match (staged, &self.b_u) {
            (Some(s), _) => Ok(Some(p.parse(&s.value).map_err(|e| invalid("b_u_stages", e))?)),
            (None, Some(v)) => Ok(Some(p.parse(v).map_err(|e| invalid("b_u", e))?)),
            (None, None) => Ok(None),
        }
    }

    pub fn has_manual_bu(&self) -> bool {
        self.b_u.is_some() || !self.b_u_stages.is_empty()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = self.prec()?;
        if self.orders.is_empty() {
            return Err(invalid("orders", "at least one order is required"));
        }
        if self.orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("orders", "orders must be strictly ascending"));
        }
        if self.scan_points < 3 {
            return Err(invalid("scan_points", "need at least 3 points"));
        }
        if self.tol_exponent == 0 || self.tol_exponent >= self.precision {
            return Err(invalid("tol_exponent", format!("must lie in 1..{}", self.precision)));
        }
        let (lo, _) = self.window()?;
        let (blo, _) = self.bounds_window()?;
        if self.b_u_stages.windows(2).any(|w| w[0].from_order >= w[1].from_order) {
            return Err(invalid("b_u_stages", "stages must be strictly ascending in from_order"));
        }
        self.b_u_at(usize::MAX)?;
        if let Some(policy) = &self.bu_policy {
            if !(policy.theta > 0.0) || policy.kappa == 0 {
                return Err(invalid("bu_policy", "theta and kappa must be positive"));
            }
        }
        match &self.system {
            SystemConfig::Qzm { b, z, eps0 } => {
                let sys = QzmSystem::parse(p, b, z, eps0).map_err(|e| invalid("system", e))?;
                if lo < *sys.eps0() || blo < *sys.eps0() {
                    return Err(invalid("window", "QZM windows must start at or above eps0"));
                }
            }
            SystemConfig::Custom1d { .. } => {
                self.custom_recurrence(p)?;
            }
            SystemConfig::Harmonic => {}
        }
        Ok(())
    }

    fn custom_recurrence(&self, p: Precision) -> Result<Recurrence1D, CliError> {
        let SystemConfig::Custom1d {
            label,
            missing_order,
            coeffs,
            divisor,
            ..
        } = &self.system
        else {
            unreachable!("custom recurrence requested for another system")
        };
        let poly = |terms: &[TermConfig]| -> Result<StepPoly, CliError> {
            let terms = terms
                .iter()
                .map(|t| {
                    Ok(PolyTerm {
                        coeff: p.parse(&t.c).map_err(|e| invalid("system.coeffs", e))?,
                        p_pow: t.p_pow,
                        e_pow: t.e_pow,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(StepPoly::new(terms))
        };
        let coeffs = coeffs.iter().map(|c| poly(c)).collect::<Result<Vec<_>, _>>()?;
        let divisor = divisor.as_deref().map(poly).transpose()?;
        Recurrence1D::new(*missing_order, coeffs, divisor, label.clone()).map_err(|e| invalid("system", e))
    }

    /// Problem supporting every requested order.
    pub fn problem(&self) -> Result<Problem, CliError> {
        self.validate()?;
        let p = self.prec()?;
        let max_order = *self.orders.last().unwrap();
        let problem = match &self.system {
            SystemConfig::Harmonic => Problem::harmonic(max_order, p)?,
            SystemConfig::Qzm { b, z, eps0 } => Problem::qzm(QzmSystem::parse(p, b, z, eps0)?, max_order, p)?,
            SystemConfig::Custom1d {
                weight, normalization, ..
            } => {
                let weight = match weight {
                    WeightConfig::HarmonicHalfLine => Weight1D::HarmonicHalfLine,
                    WeightConfig::HalfLineGamma { power, rate } => Weight1D::HalfLineGamma {
                        power: p.parse(power).map_err(|e| invalid("system.weight.power", e))?,
                        rate: p.parse(rate).map_err(|e| invalid("system.weight.rate", e))?,
                    },
                    WeightConfig::Gaussian { variance } => Weight1D::Gaussian {
                        variance: p.parse(variance).map_err(|e| invalid("system.weight.variance", e))?,
                    },
                };
                let mode = match normalization {
                    NormalizationConfig::UnitMissingMomentVector => NormalizationMode::UnitMissingMomentVector,
                    NormalizationConfig::FirstMomentOne => NormalizationMode::FirstMomentOne,
                };
                Problem::one_d(self.custom_recurrence(p)?, &weight, max_order, mode, p)?
            }
        };
        let exec = match self.exec {
            ExecConfig::Parallel => oppq_core::par::Exec::Parallel,
            ExecConfig::Sequential => oppq_core::par::Exec::Sequential,
        };
        Ok(problem.with_exec(exec))
    }
}

fn parse_window(p: Precision, w: &[String; 2], field: &str) -> Result<(BigReal, BigReal), CliError> {
    let lo = p.parse(&w[0]).map_err(|e| invalid(field, e))?;
    let hi = p.parse(&w[1]).map_err(|e| invalid(field, e))?;
    if lo >= hi {
        return Err(invalid(field, format!("lower end {} is not below upper end {}", w[0], w[1])));
    }
    Ok((lo, hi))
}
