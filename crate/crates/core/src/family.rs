//! Named map families behind a common trait, registered by tag and built at
//! runtime from family specs such as `power:d=3` or
//! `blaschke:a_modulus=0.9,a_angle=0`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};

/// A family tag plus its numeric parameters, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    tag: String,
    params: Vec<(String, f64)>,
}

impl FamilySpec {
    pub fn new(tag: impl Into<String>, params: Vec<(String, f64)>) -> Self {
        Self {
            tag: tag.into(),
            params,
        }
    }

    /// Parses `tag` or `tag:key=value,key=value`.
    pub fn parse(spec: &str) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedFamilySpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (tag, rest) = match spec.split_once(':') {
            None => (spec.trim(), None),
            Some((t, r)) => (t.trim(), Some(r)),
        };
        if tag.is_empty() {
            return Err(malformed("empty family tag"));
        }
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for item in rest.split(',') {
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| malformed("expected key=value pairs after ':'"))?;
                let key = key.trim();
                if key.is_empty() {
                    return Err(malformed("empty parameter name"));
                }
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| malformed(&format!("parameter '{key}' is not a number")))?;
                if !value.is_finite() {
                    return Err(malformed(&format!("parameter '{key}' must be finite")));
                }
                if params.iter().any(|(k, _)| k == key) {
                    return Err(malformed(&format!("parameter '{key}' given twice")));
                }
                params.push((key.to_string(), value));
            }
        }
        Ok(Self::new(tag, params))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// The parameter list as `key=value,key=value`.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}", self.tag)
        } else {
            write!(f, "{}:{}", self.tag, self.params_string())
        }
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        FamilySpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One interchangeable map family. Implementations validate their own
/// parameter domains and report a slope bound used to pick adequate grids.
pub trait MapFamily: Send + Sync {
    fn tag(&self) -> &'static str;

    /// Parameters the family requires.
    fn required_params(&self) -> &'static [&'static str];

    /// Parameters with a default when omitted.
    fn optional_params(&self) -> &'static [&'static str] {
        &[]
    }

    /// Builds the map at the requested grid size.
    fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap>;

    /// Upper bound on `|θ′|` for the given parameters, used to choose grid
    /// sizes that keep lift steps inside the unwrapping band.
    fn slope_bound(&self, spec: &FamilySpec) -> f64;

    /// Checks parameter names and domains without building a map.
    fn validate(&self, spec: &FamilySpec) -> Result<()> {
        self.check_param_names(spec)?;
        // Domain checks run through a tiny build probe by default.
        Ok(())
    }

    fn check_param_names(&self, spec: &FamilySpec) -> Result<()> {
        for (name, _) in spec.params() {
            if !self.required_params().contains(&name.as_str())
                && !self.optional_params().contains(&name.as_str())
            {
                return Err(Error::UnknownFamilyParam {
                    family: self.tag().to_string(),
                    name: name.clone(),
                });
            }
        }
        for name in self.required_params() {
            if spec.get(name).is_none() {
                return Err(Error::MissingFamilyParam {
                    family: self.tag().to_string(),
                    name,
                });
            }
        }
        Ok(())
    }
}

fn integer_param(spec: &FamilySpec, name: &'static str) -> Result<i64> {
    let v = spec.get(name).expect("checked by check_param_names");
    if (v - v.round()).abs() > 1e-9 || v.abs() > 1e9 {
        return Err(Error::InvalidParameter {
            name,
            value: v,
            requirement: "must be an integer of moderate size",
        });
    }
    Ok(v.round() as i64)
}

struct ConstantFamily;

impl MapFamily for ConstantFamily {
    fn tag(&self) -> &'static str {
        "constant"
    }

    fn required_params(&self) -> &'static [&'static str] {
        &[]
    }

    fn optional_params(&self) -> &'static [&'static str] {
        &["angle"]
    }

    fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap> {
        self.check_param_names(spec)?;
        CircleMap::constant(spec.get("angle").unwrap_or(0.0), grid_size)
    }

    fn slope_bound(&self, _spec: &FamilySpec) -> f64 {
        0.0
    }
}

struct PowerFamily;

impl MapFamily for PowerFamily {
    fn tag(&self) -> &'static str {
        "power"
    }

    fn required_params(&self) -> &'static [&'static str] {
        &["d"]
    }

    fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap> {
        self.check_param_names(spec)?;
        CircleMap::power(integer_param(spec, "d")?, grid_size)
    }

    fn slope_bound(&self, spec: &FamilySpec) -> f64 {
        spec.get("d").map(f64::abs).unwrap_or(0.0)
    }

    fn validate(&self, spec: &FamilySpec) -> Result<()> {
        self.check_param_names(spec)?;
        integer_param(spec, "d").map(|_| ())
    }
}

struct PerturbedFamily;

impl MapFamily for PerturbedFamily {
    fn tag(&self) -> &'static str {
        "perturbed"
    }

    fn required_params(&self) -> &'static [&'static str] {
        &["d", "eps", "m"]
    }

    fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap> {
        self.check_param_names(spec)?;
        CircleMap::perturbed(
            integer_param(spec, "d")?,
            spec.get("eps").unwrap(),
            integer_param(spec, "m")?,
            grid_size,
        )
    }

    fn slope_bound(&self, spec: &FamilySpec) -> f64 {
        let d = spec.get("d").map(f64::abs).unwrap_or(0.0);
        let eps = spec.get("eps").unwrap_or(0.0);
        let m = spec.get("m").unwrap_or(0.0);
        d + (eps * m).abs()
    }

    fn validate(&self, spec: &FamilySpec) -> Result<()> {
        self.check_param_names(spec)?;
        integer_param(spec, "d")?;
        integer_param(spec, "m")?;
        Ok(())
    }
}

struct BlaschkeFamily;

impl MapFamily for BlaschkeFamily {
    fn tag(&self) -> &'static str {
        "blaschke"
    }

    fn required_params(&self) -> &'static [&'static str] {
        &["a_modulus"]
    }

    fn optional_params(&self) -> &'static [&'static str] {
        &["a_angle"]
    }

    fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap> {
        self.check_param_names(spec)?;
        CircleMap::blaschke(
            spec.get("a_modulus").unwrap(),
            spec.get("a_angle").unwrap_or(0.0),
            grid_size,
        )
    }

    fn slope_bound(&self, spec: &FamilySpec) -> f64 {
        let a = spec.get("a_modulus").unwrap_or(0.0).abs();
        if a >= 1.0 {
            f64::INFINITY
        } else {
            (1.0 + a) / (1.0 - a)
        }
    }

    fn validate(&self, spec: &FamilySpec) -> Result<()> {
        self.check_param_names(spec)?;
        let a = spec.get("a_modulus").unwrap();
        if !(0.0..1.0).contains(&a) {
            return Err(Error::InvalidParameter {
                name: "a_modulus",
                value: a,
                requirement: "must lie in [0, 1)",
            });
        }
        Ok(())
    }
}

/// Registry of map families keyed by tag.
pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Box<dyn MapFamily>>,
}

impl FamilyRegistry {
    /// Registry with the built-in families: constant, power, perturbed,
    /// blaschke.
    pub fn standard() -> Self {
        let mut registry = Self {
            families: BTreeMap::new(),
        };
        registry.register(Box::new(ConstantFamily));
        registry.register(Box::new(PowerFamily));
        registry.register(Box::new(PerturbedFamily));
        registry.register(Box::new(BlaschkeFamily));
        registry
    }

    pub fn register(&mut self, family: Box<dyn MapFamily>) {
        self.families.insert(family.tag(), family);
    }

    pub fn get(&self, tag: &str) -> Option<&dyn MapFamily> {
        self.families.get(tag).map(|f| f.as_ref())
    }

    pub fn tags(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    fn resolve(&self, spec: &FamilySpec) -> Result<&dyn MapFamily> {
        self.get(spec.tag())
            .ok_or_else(|| Error::UnknownFamily(spec.tag().to_string()))
    }

    /// Builds the map described by a spec.
    pub fn build(&self, spec: &FamilySpec, grid_size: usize) -> Result<CircleMap> {
        self.resolve(spec)?.build(spec, grid_size)
    }

    /// Validates a spec (tag, parameter names, parameter domains).
    pub fn validate_spec(&self, spec: &FamilySpec) -> Result<()> {
        self.resolve(spec)?.validate(spec)
    }

    /// Grid size large enough to power the family's maps up to `fᵏ` while
    /// keeping every lift step inside the unwrapping band, with headroom.
    pub fn suggested_grid_size(&self, spec: &FamilySpec, max_power: u32) -> Result<usize> {
        let slope = self.resolve(spec)?.slope_bound(spec);
        let needed = (max_power.max(1) as f64 * slope * 3.4).ceil() as usize;
        Ok(needed.max(256).next_power_of_two())
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::degree;

    #[test]
    fn parses_specs_with_and_without_params() {
        let plain = FamilySpec::parse("constant").unwrap();
        assert_eq!(plain.tag(), "constant");
        assert!(plain.params().is_empty());

        let spec = FamilySpec::parse("blaschke:a_modulus=0.9,a_angle=0").unwrap();
        assert_eq!(spec.tag(), "blaschke");
        assert_eq!(spec.get("a_modulus"), Some(0.9));
        assert_eq!(spec.to_string(), "blaschke:a_modulus=0.9,a_angle=0");
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["", ":d=1", "power:d", "power:d=x", "power:d=1,d=2"] {
            assert!(
                matches!(
                    FamilySpec::parse(bad),
                    Err(Error::MalformedFamilySpec { .. })
                ),
                "spec {bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn registry_builds_all_builtin_families() {
        let registry = FamilyRegistry::standard();
        for (spec, expected_degree) in [
            ("constant", 0_i64),
            ("constant:angle=1.2", 0),
            ("power:d=3", 3),
            ("power:d=-2", -2),
            ("perturbed:d=2,eps=0.5,m=3", 2),
            ("blaschke:a_modulus=0.5", 1),
        ] {
            let spec = FamilySpec::parse(spec).unwrap();
            let map = registry.build(&spec, 2048).unwrap();
            assert_eq!(degree(&map).unwrap().degree, expected_degree, "{spec}");
        }
    }

    #[test]
    fn registry_rejects_unknown_tags_and_params() {
        let registry = FamilyRegistry::standard();
        let unknown = FamilySpec::parse("moebius:a=1").unwrap();
        assert!(matches!(
            registry.build(&unknown, 512).unwrap_err(),
            Error::UnknownFamily(_)
        ));

        let extra = FamilySpec::parse("power:d=1,q=2").unwrap();
        assert!(matches!(
            registry.build(&extra, 512).unwrap_err(),
            Error::UnknownFamilyParam { .. }
        ));

        let missing = FamilySpec::parse("perturbed:d=1").unwrap();
        assert!(matches!(
            registry.build(&missing, 512).unwrap_err(),
            Error::MissingFamilyParam { .. }
        ));
    }

    #[test]
    fn validation_checks_domains_without_building() {
        let registry = FamilyRegistry::standard();
        let bad = FamilySpec::parse("blaschke:a_modulus=1.0").unwrap();
        assert!(matches!(
            registry.validate_spec(&bad).unwrap_err(),
            Error::InvalidParameter { .. }
        ));
        let fractional = FamilySpec::parse("power:d=1.5").unwrap();
        assert!(matches!(
            registry.validate_spec(&fractional).unwrap_err(),
            Error::InvalidParameter { .. }
        ));
    }

    #[test]
    fn suggested_grids_keep_powers_inside_the_band() {
        let registry = FamilyRegistry::standard();
        for spec in [
            "power:d=5",
            "perturbed:d=1,eps=0.5,m=3",
            "blaschke:a_modulus=0.95",
        ] {
            let spec = FamilySpec::parse(spec).unwrap();
            let n = registry.suggested_grid_size(&spec, 20).unwrap();
            let map = registry.build(&spec, n).unwrap();
            assert!(map.pow(20).is_ok(), "{spec} at N = {n}");
        }
    }
}
