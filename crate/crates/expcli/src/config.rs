//! Experiment configuration, read from TOML or JSON.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};
use skewlab::dynamics::{Axis, Cocycle, CocycleSU2, CocycleU1, ExpandingMap, Factor};
use skewlab::fourier::TrigSeries;
use skewlab::transfer::{Alpha, Group};

use crate::RunError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub config_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub map: MapSpec,
    pub cocycle: CocycleSpec,
    #[serde(default)]
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub weyl: WeylSpec,
    #[serde(default)]
    pub trapped: TrappedSpec,
    #[serde(default)]
    pub captive: CaptiveSpec,
    #[serde(default)]
    pub correlation: CorrelationSpec,
}

fn default_seed() -> u64 {
    0x5EED
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MapKindSpec {
    Linear,
    Perturbed,
}

/// `E(x) = kx + a sin(2πx)/2π mod 1`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub kind: MapKindSpec,
    pub degree: u32,
    #[serde(default)]
    pub amplitude: f64,
}

/// `mean + Σ cos[n-1] cos(2πnx) + sin[n-1] sin(2πnx)`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl SeriesSpec {
    pub fn series(&self) -> TrigSeries {
        TrigSeries::new(self.mean, self.cos.clone(), self.sin.clone())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    U1,
    Su2,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FormSpec {
    #[default]
    Exponential,
    Product,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AxisSpec {
    X,
    Y,
    Z,
}

impl From<AxisSpec> for Axis {
    fn from(a: AxisSpec) -> Self {
        match a {
            AxisSpec::X => Axis::X,
            AxisSpec::Y => Axis::Y,
            AxisSpec::Z => Axis::Z,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub axis: AxisSpec,
    pub angle: SeriesSpec,
}

/// U(1): `phase` is Ω. SU(2) exponential: `omega` holds the three
/// components of `Ω·J`. SU(2) product: `factors` in left-to-right order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub form: FormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<SeriesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<[SeriesSpec; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

/// Block labels: frequencies ν for U(1), spins j (multiples of ½) for SU(2).
/// `values` and `range` are merged.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlphaSpec {
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CutoffPolicy {
    Auto,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CutoffValue {
    Fixed(usize),
    Policy(CutoffPolicy),
}

/// `K` is either fixed or `max(min, ⌈factor·|α|·w⌉)` with `w` the
/// harmonic weight of the cocycle.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    #[serde(default = "default_cutoff_value")]
    pub value: CutoffValue,
    #[serde(default = "default_cutoff_min")]
    pub min: usize,
    #[serde(default = "default_cutoff_factor")]
    pub factor: f64,
}

fn default_cutoff_value() -> CutoffValue {
    CutoffValue::Policy(CutoffPolicy::Auto)
}
fn default_cutoff_min() -> usize {
    64
}
fn default_cutoff_factor() -> f64 {
    2.0
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            value: default_cutoff_value(),
            min: default_cutoff_min(),
            factor: default_cutoff_factor(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_stability")]
    pub stability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
    #[serde(default = "default_sobolev")]
    pub sobolev_order: f64,
}

fn default_stability() -> f64 {
    1e-6
}
fn default_quadrature() -> f64 {
    1e-10
}
fn default_sobolev() -> f64 {
    -3.0
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            stability: default_stability(),
            floor: None,
            quadrature: default_quadrature(),
            sobolev_order: default_sobolev(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRule {
    /// `δ(α) = |α|^{-1/2}`.
    InverseSqrt,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DeltaSpec {
    Rule(DeltaRule),
    /// One δ per block, in ascending α order.
    List(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeylSpec {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_sweep")]
    pub epsilon_sweep: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: DeltaSpec,
    #[serde(default = "default_weyl_scale")]
    pub momentum_scale: f64,
    /// Base points per unit of `1/δ`.
    #[serde(default = "default_x_density")]
    pub x_density: f64,
    #[serde(default = "default_weyl_sphere")]
    pub sphere_grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_epsilon() -> f64 {
    0.2
}
fn default_sweep() -> Vec<f64> {
    vec![0.1, 0.2, 0.3]
}
fn default_delta() -> DeltaSpec {
    DeltaSpec::Rule(DeltaRule::InverseSqrt)
}
fn default_weyl_scale() -> f64 {
    TAU
}
fn default_x_density() -> f64 {
    8.0
}
fn default_weyl_sphere() -> usize {
    16
}
fn default_budget() -> u64 {
    1 << 22
}

impl Default for WeylSpec {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            epsilon_sweep: default_sweep(),
            delta: default_delta(),
            momentum_scale: default_weyl_scale(),
            x_density: default_x_density(),
            sphere_grid: default_weyl_sphere(),
            kappa: None,
            budget: default_budget(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrappedSpec {
    #[serde(default = "default_trapped_delta")]
    pub delta: f64,
    #[serde(default = "default_trapped_x")]
    pub x_grid: usize,
    #[serde(default = "default_trapped_sphere")]
    pub sphere_grid: usize,
    #[serde(default = "default_one")]
    pub momentum_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Optional box-counting sweep over the cloud.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub box_deltas: Vec<f64>,
}

fn default_trapped_delta() -> f64 {
    0.05
}
fn default_trapped_x() -> usize {
    256
}
fn default_trapped_sphere() -> usize {
    64
}
fn default_one() -> f64 {
    1.0
}

impl Default for TrappedSpec {
    fn default() -> Self {
        Self {
            delta: default_trapped_delta(),
            x_grid: default_trapped_x(),
            sphere_grid: default_trapped_sphere(),
            momentum_scale: 1.0,
            kappa: None,
            budget: default_budget(),
            box_deltas: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LayoutSpec {
    #[default]
    Fibonacci,
    Equator,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CaptiveSpec {
    #[serde(default = "default_depth")]
    pub n_max: usize,
    #[serde(default = "default_grid")]
    pub x_grid: usize,
    #[serde(default = "default_grid")]
    pub xi_grid: usize,
    #[serde(default = "default_captive_sphere")]
    pub sphere_grid: usize,
    #[serde(default)]
    pub sphere_layout: LayoutSpec,
    /// Window `|ξ| ≤ R`; defaults to the escape radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Sobolev order used by the gap bound.
    #[serde(default = "default_bound_order")]
    pub order: f64,
}

fn default_depth() -> usize {
    18
}
fn default_grid() -> usize {
    64
}
fn default_captive_sphere() -> usize {
    16
}
fn default_bound_order() -> f64 {
    -20.0
}

impl Default for CaptiveSpec {
    fn default() -> Self {
        Self {
            n_max: default_depth(),
            x_grid: default_grid(),
            xi_grid: default_grid(),
            sphere_grid: default_captive_sphere(),
            sphere_layout: LayoutSpec::Fibonacci,
            radius: None,
            kappa: None,
            order: default_bound_order(),
        }
    }
}

/// One coefficient of a block observable: `value · e^{2πi mode x} e_component`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub mode: i64,
    #[serde(default)]
    pub component: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    #[serde(default = "default_block")]
    pub alpha: f64,
    #[serde(default = "default_observable")]
    pub psi: Vec<CoefficientSpec>,
    #[serde(default = "default_observable")]
    pub phi: Vec<CoefficientSpec>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_fit")]
    pub fit: [usize; 2],
    #[serde(default = "default_srb_cutoff")]
    pub srb_cutoff: usize,
}

fn default_block() -> f64 {
    1.0
}
fn default_observable() -> Vec<CoefficientSpec> {
    vec![CoefficientSpec {
        mode: 1,
        component: 0,
        re: 1.0,
        im: 0.0,
    }]
}
fn default_n_max() -> usize {
    40
}
fn default_fit() -> [usize; 2] {
    [10, 40]
}
fn default_srb_cutoff() -> usize {
    64
}

impl Default for CorrelationSpec {
    fn default() -> Self {
        Self {
            alpha: default_block(),
            psi: default_observable(),
            phi: default_observable(),
            n_max: default_n_max(),
            fit: default_fit(),
            srb_cutoff: default_srb_cutoff(),
        }
    }
}

impl ExperimentConfig {
    /// Parse TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let cfg: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.config_version != CONFIG_VERSION {
            return Err(RunError::Config(format!(
                "config_version {} is not supported (expected {CONFIG_VERSION})",
                self.config_version
            )));
        }
        self.build_map()?;
        self.build_cocycle()?;
        self.alphas()?;
        let t = &self.tolerance;
        if !(t.stability > 0.0) || !(t.quadrature > 0.0) {
            return Err(RunError::Config("tolerances must be positive".into()));
        }
        let [lo, hi] = self.correlation.fit;
        if lo >= hi || hi > self.correlation.n_max {
            return Err(RunError::Config(format!(
                "correlation fit window [{lo}, {hi}] must be increasing and within n_max = {}",
                self.correlation.n_max
            )));
        }
        Ok(())
    }

    pub fn group(&self) -> Group {
        match self.cocycle.group {
            GroupSpec::U1 => Group::U1,
            GroupSpec::Su2 => Group::SU2,
        }
    }

    pub fn build_map(&self) -> Result<ExpandingMap, RunError> {
        let m = match self.map.kind {
            MapKindSpec::Linear => ExpandingMap::linear(self.map.degree),
            MapKindSpec::Perturbed => ExpandingMap::perturbed(self.map.degree, self.map.amplitude),
        };
        m.map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn build_cocycle(&self) -> Result<Cocycle, RunError> {
        let c = &self.cocycle;
        match (c.group, c.form) {
            (GroupSpec::U1, FormSpec::Exponential) => {
                if c.omega.is_some() || !c.factors.is_empty() {
                    return Err(RunError::Config("a U(1) cocycle takes only `phase`".into()));
                }
                let phase = c
                    .phase
                    .as_ref()
                    .map(SeriesSpec::series)
                    .unwrap_or_else(TrigSeries::zero);
                Ok(CocycleU1::new(phase).into())
            }
            (GroupSpec::U1, FormSpec::Product) => Err(RunError::Config("product form needs group = \"su2\"".into())),
            (GroupSpec::Su2, FormSpec::Exponential) => {
                if c.phase.is_some() || !c.factors.is_empty() {
                    return Err(RunError::Config(
                        "an exponential SU(2) cocycle takes only `omega`".into(),
                    ));
                }
                let omega = c
                    .omega
                    .as_ref()
                    .ok_or_else(|| RunError::Config("missing `omega`".into()))?;
                Ok(CocycleSU2::Exponential([omega[0].series(), omega[1].series(), omega[2].series()]).into())
            }
            (GroupSpec::Su2, FormSpec::Product) => {
                if c.phase.is_some() || c.omega.is_some() {
                    return Err(RunError::Config("a product SU(2) cocycle takes only `factors`".into()));
                }
                if c.factors.is_empty() {
                    return Err(RunError::Config("missing `factors`".into()));
                }
                Ok(CocycleSU2::Product(
                    c.factors
                        .iter()
                        .map(|f| Factor::new(f.axis.into(), f.angle.series()))
                        .collect(),
                )
                .into())
            }
        }
    }

    /// Sorted, deduplicated block labels.
    pub fn alphas(&self) -> Result<Vec<Alpha>, RunError> {
        let mut raw = self.alpha.values.clone();
        if let Some(r) = &self.alpha.range {
            if !(r.step > 0.0) || r.end < r.start {
                return Err(RunError::Config("alpha range needs step > 0 and end >= start".into()));
            }
            let n = ((r.end - r.start) / r.step + 1e-9).floor() as usize;
            raw.extend((0..=n).map(|i| r.start + i as f64 * r.step));
        }
        let mut out = Vec::with_capacity(raw.len());
        for v in raw {
            out.push(self.alpha_from(v)?);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn alpha_from(&self, v: f64) -> Result<Alpha, RunError> {
        match self.group() {
            Group::U1 => {
                if v.fract() != 0.0 {
                    return Err(RunError::Config(format!("U(1) frequency {v} is not an integer")));
                }
                Ok(Alpha::Frequency(v as i64))
            }
            Group::SU2 => Alpha::spin(v).map_err(|e| RunError::Config(e.to_string())),
        }
    }

    /// Truncation order for one block.
    pub fn cutoff_for(&self, alpha: Alpha, cocycle: &Cocycle) -> usize {
        match self.cutoff.value {
            CutoffValue::Fixed(k) => k,
            CutoffValue::Policy(CutoffPolicy::Auto) => {
                let w = match cocycle {
                    Cocycle::U1(c) => c.phase.harmonic_weight(),
                    Cocycle::SU2(c) => c.harmonic_weight(),
                };
                let auto = (self.cutoff.factor * alpha.value().abs() * w).ceil() as usize;
                auto.max(self.cutoff.min)
            }
        }
    }

    pub fn delta_for(&self, index: usize, alpha: Alpha) -> Result<f64, RunError> {
        match &self.weyl.delta {
            DeltaSpec::Rule(DeltaRule::InverseSqrt) => {
                let a = alpha.value().abs();
                if a == 0.0 {
                    return Err(RunError::Config("the inverse-sqrt δ rule needs α ≠ 0".into()));
                }
                Ok(a.powf(-0.5))
            }
            DeltaSpec::List(list) => list
                .get(index)
                .copied()
                .ok_or_else(|| RunError::Config(format!("no δ listed for block {index}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG: &str = r#"
config_version = 1
[map]
kind = "linear"
degree = 2
[cocycle]
group = "u1"
phase = { cos = [1.0] }
[alpha]
values = [3, 1]
range = { start = 0, end = 2, step = 1 }
"#;

    #[test]
    fn parses_and_sorts_alphas() {
        let cfg = ExperimentConfig::parse(FIG).unwrap();
        let a: Vec<i64> = cfg
            .alphas()
            .unwrap()
            .into_iter()
            .map(|a| match a {
                Alpha::Frequency(n) => n,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(a, vec![0, 1, 2, 3]);
        assert_eq!(cfg.seed, 0x5EED);
        assert_eq!(
            cfg.cutoff_for(Alpha::Frequency(100), &cfg.build_cocycle().unwrap()),
            200
        );
        assert_eq!(cfg.cutoff_for(Alpha::Frequency(1), &cfg.build_cocycle().unwrap()), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = FIG.replace("degree = 2", "degree = 2\nslope = 3");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(RunError::Config(_))));
        let bad = FIG.replace("config_version = 1", "config_version = 9");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(RunError::Config(_))));
    }

    #[test]
    fn toml_round_trip_and_json_mirror() {
        let cfg = ExperimentConfig::parse(FIG).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::parse(&json).unwrap(), cfg);
    }

    #[test]
    fn fixed_cutoff_and_spins() {
        let text = r#"
config_version = 1
cutoff = { value = 40 }
[map]
kind = "linear"
degree = 2
[cocycle]
group = "su2"
form = "product"
factors = [
  { axis = "z", angle = { cos = [1.0] } },
  { axis = "y", angle = { mean = 0.7 } },
]
[alpha]
range = { start = 0, end = 1, step = 0.5 }
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.alphas().unwrap().len(), 3);
        assert_eq!(cfg.cutoff_for(Alpha::Spin(2), &cfg.build_cocycle().unwrap()), 40);
        let bad = text.replace("step = 0.5", "step = 0.25");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }
}
