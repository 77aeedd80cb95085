//! Method identifiers and their parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const DEFAULT_BIN_COUNT: usize = 5;
pub const DEFAULT_IQR_FACTOR: f64 = 1.5;
pub const DEFAULT_HEAD_TAIL_THRESHOLD: f64 = 0.4;
pub const DEFAULT_EXP_GROWTH: f64 = 2.0;
pub const MAX_BIN_COUNT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    Unclassed,
    DefinedInterval,
    EqualInterval,
    PrettyBreaks,
    GeometricInterval,
    ExponentialBinSizes,
    ManualInterval,
    Quantile,
    Percentile,
    BoxPlot,
    StdDeviation,
    MaximumBreaks,
    NaturalBreaks,
    Ckmeans,
    HeadTailBreaks,
    Resiliency,
    Custom(String),
}

impl MethodId {
    /// The sixteen built-in methods in catalog order.
    pub const BUILTIN: [MethodId; 16] = [
        MethodId::Unclassed,
        MethodId::DefinedInterval,
        MethodId::EqualInterval,
        MethodId::PrettyBreaks,
        MethodId::GeometricInterval,
        MethodId::ExponentialBinSizes,
        MethodId::ManualInterval,
        MethodId::Quantile,
        MethodId::Percentile,
        MethodId::BoxPlot,
        MethodId::StdDeviation,
        MethodId::MaximumBreaks,
        MethodId::NaturalBreaks,
        MethodId::Ckmeans,
        MethodId::HeadTailBreaks,
        MethodId::Resiliency,
    ];

    pub fn as_str(&self) -> &str {
        match self {
            MethodId::Unclassed => "unclassed",
            MethodId::DefinedInterval => "defined_interval",
            MethodId::EqualInterval => "equal_interval",
            MethodId::PrettyBreaks => "pretty_breaks",
            MethodId::GeometricInterval => "geometric_interval",
            MethodId::ExponentialBinSizes => "exponential_bin_sizes",
            MethodId::ManualInterval => "manual_interval",
            MethodId::Quantile => "quantile",
            MethodId::Percentile => "percentile",
            MethodId::BoxPlot => "box_plot",
            MethodId::StdDeviation => "std_deviation",
            MethodId::MaximumBreaks => "maximum_breaks",
            MethodId::NaturalBreaks => "natural_breaks",
            MethodId::Ckmeans => "ckmeans",
            MethodId::HeadTailBreaks => "head_tail_breaks",
            MethodId::Resiliency => "resiliency",
            MethodId::Custom(_) => "custom",
        }
    }

    /// Methods whose bin count is fixed at six by definition.
    pub fn fixed_bin_count(&self) -> Option<usize> {
        match self {
            MethodId::Percentile | MethodId::BoxPlot => Some(6),
            _ => None,
        }
    }

    /// Whether `binCount` is an input of this method.
    pub fn uses_bin_count(&self) -> bool {
        matches!(
            self,
            MethodId::EqualInterval
                | MethodId::PrettyBreaks
                | MethodId::GeometricInterval
                | MethodId::ExponentialBinSizes
                | MethodId::Quantile
                | MethodId::StdDeviation
                | MethodId::MaximumBreaks
                | MethodId::NaturalBreaks
                | MethodId::Ckmeans
                | MethodId::Resiliency
        )
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodId::Custom(name) => write!(f, "custom:{name}"),
            other => f.write_str(other.as_str()),
        }
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(name) = s.strip_prefix("custom:") {
            if name.is_empty() {
                return Err(Error::UnknownMethod(s.to_string()));
            }
            return Ok(MethodId::Custom(name.to_string()));
        }
        MethodId::BUILTIN
            .iter()
            .find(|m| m.as_str() == s)
            .cloned()
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

impl Serialize for MethodId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MethodId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdDevStep {
    #[default]
    Whole,
    Half,
}

impl StdDevStep {
    pub fn multiplier(self) -> f64 {
        match self {
            StdDevStep::Whole => 1.0,
            StdDevStep::Half => 0.5,
        }
    }
}

/// A method and its parameters. Unset parameters take their defaults;
/// parameters the method does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodSpec {
    pub method_id: MethodId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defined_interval_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manual_breaks: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_dev_step: Option<StdDevStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iqr_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_tail_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member_methods: Option<Vec<MethodId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_growth: Option<f64>,
}

impl MethodSpec {
    pub fn new(method_id: MethodId) -> Self {
        MethodSpec {
            method_id,
            bin_count: None,
            defined_interval_size: None,
            manual_breaks: None,
            std_dev_step: None,
            iqr_factor: None,
            head_tail_threshold: None,
            member_methods: None,
            exp_growth: None,
        }
    }

    pub fn with_bins(method_id: MethodId, k: usize) -> Self {
        MethodSpec {
            bin_count: Some(k),
            ..MethodSpec::new(method_id)
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count.unwrap_or(DEFAULT_BIN_COUNT)
    }

    pub fn iqr_factor(&self) -> f64 {
        self.iqr_factor.unwrap_or(DEFAULT_IQR_FACTOR)
    }

    pub fn head_tail_threshold(&self) -> f64 {
        self.head_tail_threshold
            .unwrap_or(DEFAULT_HEAD_TAIL_THRESHOLD)
    }

    pub fn exp_growth(&self) -> f64 {
        self.exp_growth.unwrap_or(DEFAULT_EXP_GROWTH)
    }

    pub fn std_dev_step(&self) -> StdDevStep {
        self.std_dev_step.unwrap_or_default()
    }

    /// Drops every parameter the method ignores. Data-dependent defaults
    /// (interval size, manual breaks, resiliency members) are filled in by
    /// the method runner, not here.
    pub fn relevant(&self) -> MethodSpec {
        let mut out = MethodSpec::new(self.method_id.clone());
        match &self.method_id {
            MethodId::EqualInterval
            | MethodId::PrettyBreaks
            | MethodId::GeometricInterval
            | MethodId::Quantile
            | MethodId::MaximumBreaks
            | MethodId::NaturalBreaks
            | MethodId::Ckmeans => out.bin_count = Some(self.bin_count()),
            MethodId::ExponentialBinSizes => {
                out.bin_count = Some(self.bin_count());
                out.exp_growth = Some(self.exp_growth());
            }
            MethodId::StdDeviation => {
                out.bin_count = Some(self.bin_count());
                out.std_dev_step = Some(self.std_dev_step());
            }
            MethodId::DefinedInterval => out.defined_interval_size = self.defined_interval_size,
            MethodId::ManualInterval => {
                out.manual_breaks = self.manual_breaks.clone();
                // the breaks default is derived from the bin count
                if self.manual_breaks.is_none() {
                    out.bin_count = Some(self.bin_count());
                }
            }
            MethodId::BoxPlot => out.iqr_factor = Some(self.iqr_factor()),
            MethodId::HeadTailBreaks => out.head_tail_threshold = Some(self.head_tail_threshold()),
            MethodId::Resiliency => {
                out.bin_count = Some(self.bin_count());
                out.member_methods = self.member_methods.clone();
            }
            MethodId::Unclassed | MethodId::Percentile | MethodId::Custom(_) => {}
        }
        out
    }
}

impl From<MethodId> for MethodSpec {
    fn from(id: MethodId) -> Self {
        MethodSpec::new(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_id_round_trips_through_text() {
        for m in MethodId::BUILTIN
            .iter()
            .cloned()
            .chain([MethodId::Custom("a b".into())])
        {
            assert_eq!(m.to_string().parse::<MethodId>().unwrap(), m);
        }
        assert!("custom:".parse::<MethodId>().is_err());
        assert!(matches!(
            "jenks".parse::<MethodId>(),
            Err(Error::UnknownMethod(_))
        ));
    }

    #[test]
    fn irrelevant_params_are_dropped() {
        let mut noisy = MethodSpec::with_bins(MethodId::EqualInterval, 4);
        noisy.iqr_factor = Some(3.0);
        noisy.manual_breaks = Some(vec![1.0]);
        assert_eq!(
            noisy.relevant(),
            MethodSpec::with_bins(MethodId::EqualInterval, 4)
        );
    }

    #[test]
    fn spec_json_is_camel_case() {
        let spec = MethodSpec::with_bins(MethodId::Custom("x".into()), 3);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"methodId":"custom:x","binCount":3}"#);
        let back: MethodSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
