//! Distribution spec documents.
//!
//! A spec is a JSON object with a `kind` and its parameters, for example
//! `{"schema": "tailforge.dist/1", "kind": "pareto", "alpha": 3}`. Besides the
//! built-in kinds two wrappers exist:
//! `{"kind": "gamma_transform", "gamma": g, "base": {...}}` and
//! `{"kind": "power_tail", "m": m, "base": {...}}`.
//!
//! The inline form `kind:key=value,...` is accepted too, e.g.
//! `xu_piecewise:alpha=5.5,x1=4096`. The keys `pow=m` and `tilt=g` wrap the
//! built-in, with the power applied first; `rule=geometric,factor=3` selects the
//! plateau rule.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::dist::{builtin, power_tail, BuiltinSpec, Distribution};
use crate::error::{Error, Result};
use crate::transform::{gamma_transform, TransformSpec};

pub const SCHEMA: &str = "tailforge.dist/1";

#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Builtin(BuiltinSpec),
    GammaTransform { gamma: f64, base: Box<DistSpec> },
    PowerTail { m: u32, base: Box<DistSpec> },
}

impl DistSpec {
    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistSpec::Builtin(b) => builtin(b),
            DistSpec::GammaTransform { gamma, base } => gamma_transform(&base.build()?, TransformSpec::new(*gamma)?),
            DistSpec::PowerTail { m, base } => power_tail(&base.build()?, *m),
        }
    }

    pub fn tilted(self, gamma: f64) -> DistSpec {
        DistSpec::GammaTransform {
            gamma,
            base: Box::new(self),
        }
    }

    fn to_value_inner(&self) -> Value {
        match self {
            DistSpec::Builtin(b) => serde_json::to_value(b).expect("builtin specs serialize"),
            DistSpec::GammaTransform { gamma, base } => {
                serde_json::json!({"kind": "gamma_transform", "gamma": gamma, "base": base.to_value_inner()})
            }
            DistSpec::PowerTail { m, base } => {
                serde_json::json!({"kind": "power_tail", "m": m, "base": base.to_value_inner()})
            }
        }
    }

    /// JSON document with the schema tag at the top level.
    pub fn to_value(&self) -> Value {
        let mut v = self.to_value_inner();
        if let Value::Object(m) = &mut v {
            let mut out = Map::new();
            out.insert("schema".into(), Value::String(SCHEMA.into()));
            out.extend(std::mem::take(m));
            return Value::Object(out);
        }
        v
    }

    pub fn from_value(v: &Value) -> Result<DistSpec> {
        let Value::Object(obj) = v else {
            return Err(Error::Spec("spec must be a JSON object".into()));
        };
        if let Some(s) = obj.get("schema") {
            if s.as_str() != Some(SCHEMA) {
                return Err(Error::Spec(format!("unsupported schema {s}, expected \"{SCHEMA}\"")));
            }
        }
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Spec("missing \"kind\"".into()))?;
        let base = || -> Result<Box<DistSpec>> {
            let b = obj.get("base").ok_or_else(|| Error::Spec(format!("{kind} needs \"base\"")))?;
            Ok(Box::new(DistSpec::from_value(b)?))
        };
        match kind {
            "gamma_transform" => {
                let gamma = obj
                    .get("gamma")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Spec("gamma_transform needs numeric \"gamma\"".into()))?;
                Ok(DistSpec::GammaTransform { gamma, base: base()? })
            }
            "power_tail" => {
                let m = obj
                    .get("m")
                    .and_then(Value::as_u64)
                    .and_then(|m| u32::try_from(m).ok())
                    .ok_or_else(|| Error::Spec("power_tail needs integer \"m\"".into()))?;
                Ok(DistSpec::PowerTail { m, base: base()? })
            }
            _ => {
                let mut o = obj.clone();
                o.remove("schema");
                serde_json::from_value(Value::Object(o))
                    .map(DistSpec::Builtin)
                    .map_err(|e| Error::Spec(e.to_string()))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<DistSpec> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        DistSpec::from_value(&v)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("values serialize")
    }

    /// Parses `kind:key=value,...`.
    pub fn parse_inline(s: &str) -> Result<DistSpec> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = kind.trim();
        if kind.is_empty() {
            return Err(Error::Spec(format!("empty kind in {s:?}")));
        }
        let mut obj = Map::new();
        obj.insert("kind".into(), Value::String(kind.into()));
        let mut rule = Map::new();
        let (mut pow, mut tilt) = (None, None);
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("expected key=value, got {pair:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "pow" => pow = Some(v.parse::<u32>().map_err(|_| Error::Spec(format!("pow must be an integer, got {v:?}")))?),
                "tilt" => tilt = Some(v.parse::<f64>().map_err(|_| Error::Spec(format!("tilt must be a number, got {v:?}")))?),
                "rule" => {
                    rule.insert("rule".into(), Value::String(v.into()));
                }
                "factor" => {
                    rule.insert("factor".into(), scalar(v));
                }
                _ => {
                    obj.insert(k.into(), scalar(v));
                }
            }
        }
        if !rule.is_empty() {
            obj.insert("rule".into(), Value::Object(rule));
        }
        let mut spec = DistSpec::from_value(&Value::Object(obj))?;
        if let Some(m) = pow {
            spec = DistSpec::PowerTail { m, base: Box::new(spec) };
        }
        if let Some(g) = tilt {
            spec = spec.tilted(g);
        }
        Ok(spec)
    }

    /// Inline string if it is one, otherwise the path of a JSON spec file.
    pub fn load(arg: &str) -> Result<DistSpec> {
        let path = std::path::Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("{arg}: {e}")))?;
            DistSpec::from_json(&text)
        } else {
            DistSpec::parse_inline(arg)
        }
    }
}

fn scalar(v: &str) -> Value {
    if let Ok(i) = v.parse::<u64>() {
        return Value::from(i);
    }
    match v.parse::<f64>() {
        Ok(f) => Value::from(f),
        Err(_) if v == "null" => Value::Null,
        Err(_) => Value::String(v.into()),
    }
}

impl Serialize for DistSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        DistSpec::from_value(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::PlateauRule;

    #[test]
    fn inline_and_json_agree() {
        let a = DistSpec::parse_inline("pareto:alpha=3").unwrap();
        let b = DistSpec::from_json(r#"{"schema": "tailforge.dist/1", "kind": "pareto", "alpha": 3}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(DistSpec::parse_inline("dyadic_pareto").unwrap(), DistSpec::Builtin(BuiltinSpec::DyadicPareto));
    }

    #[test]
    fn wrappers_round_trip() {
        let s = DistSpec::parse_inline("xu_piecewise:alpha=6,x1=5000,pow=2,tilt=0.5").unwrap();
        let text = s.to_json_pretty();
        assert_eq!(DistSpec::from_json(&text).unwrap(), s);
        let DistSpec::GammaTransform { gamma, base } = &s else {
            panic!("{s:?}")
        };
        assert_eq!(*gamma, 0.5);
        assert!(matches!(**base, DistSpec::PowerTail { m: 2, .. }));
        let d = s.build().unwrap();
        assert!(d.log_tail(10.0).unwrap() < -5.0);
    }

    #[test]
    fn plateau_rule_inline() {
        let s = DistSpec::parse_inline("plateau_example:rule=geometric,factor=3,max_plateaus=5").unwrap();
        let DistSpec::Builtin(BuiltinSpec::PlateauExample { rule, max_plateaus, .. }) = s else {
            panic!()
        };
        assert_eq!(rule, PlateauRule::Geometric { factor: 3.0 });
        assert_eq!(max_plateaus, 5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(DistSpec::parse_inline("nosuch:alpha=1").is_err());
        assert!(DistSpec::from_json(r#"{"schema": "other/2", "kind": "pareto", "alpha": 3}"#).is_err());
        assert!(DistSpec::parse_inline("pareto:alpha").is_err());
        assert!(DistSpec::from_json("[1]").is_err());
    }
}
