//! Metric input: builtin families, metric files, and the shared
//! key-value text format.
//!
//! A metric file is UTF-8 text of `key = value` lines (`#` starts a
//! comment). Recognized keys are the component expressions `g11 g12 g13
//! g22 g23 g33` (missing off-diagonal components default to `0`; the
//! diagonal ones are required), `signature` (`+++` or `-++`) and `name`.
//!
//! ```text
//! # an expanding diagonal metric
//! name = diag-exp
//! signature = +++
//! g11 = 1
//! g22 = exp(2*x1)
//! g33 = 1
//! ```
//!
//! Run configuration files for the CLI use the same grammar with
//! different keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::{eval_jet, parse_expression, Expression, JetValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    /// (+,+,+)
    Riemannian,
    /// (-,+,+)
    Lorentzian,
}

impl Signature {
    pub fn as_str(&self) -> &'static str {
        match self {
            Signature::Riemannian => "+++",
            Signature::Lorentzian => "-++",
        }
    }
}

/// A symmetric 3x3 array of coordinate expressions: one representative
/// of the conformal structure under study.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub signature: Signature,
    /// g11, g12, g13, g22, g23, g33.
    components: [Expression; 6],
}

const COMPONENT_KEYS: [&str; 6] = ["g11", "g12", "g13", "g22", "g23", "g33"];

fn sym_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => unreachable!(),
    }
}

impl MetricSpec {
    pub fn new(name: impl Into<String>, signature: Signature, components: [Expression; 6]) -> Self {
        MetricSpec {
            name: name.into(),
            signature,
            components,
        }
    }

    /// Component expression `g_ij` (symmetric access).
    pub fn component(&self, i: usize, j: usize) -> &Expression {
        &self.components[sym_index(i, j)]
    }

    pub fn components(&self) -> &[Expression; 6] {
        &self.components
    }

    /// Map every component expression, keeping name and signature.
    pub fn map_components(&self, f: impl Fn(&Expression) -> Expression) -> [Expression; 6] {
        let c = &self.components;
        [f(&c[0]), f(&c[1]), f(&c[2]), f(&c[3]), f(&c[4]), f(&c[5])]
    }

    /// Jets of all components at a point.
    pub fn eval(&self, point: [f64; 3], order: usize) -> Result<[JetValue; 6]> {
        let e = |k: usize| eval_jet(&self.components[k], point, order);
        Ok([e(0)?, e(1)?, e(2)?, e(3)?, e(4)?, e(5)?])
    }

    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_key_values(text)?;
        let mut components: Vec<Expression> = Vec::with_capacity(6);
        for key in COMPONENT_KEYS {
            match kv.get(key) {
                Some(src) => components.push(parse_expression(src)?),
                None => {
                    let diagonal = key.as_bytes()[1] == key.as_bytes()[2];
                    if diagonal {
                        return Err(Error::Config(format!(
                            "metric file missing required diagonal component `{key}`"
                        )));
                    }
                    components.push(Expression::constant(0.0));
                }
            }
        }
        let signature = match kv.get("signature").map(String::as_str) {
            None | Some("+++") | Some("riemannian") => Signature::Riemannian,
            Some("-++") | Some("lorentzian") => Signature::Lorentzian,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown signature `{other}` (expected `+++` or `-++`)"
                )))
            }
        };
        let name = kv.get("name").cloned().unwrap_or_else(|| "metric".into());
        Ok(MetricSpec {
            name,
            signature,
            components: components.try_into().expect("six components"),
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "signature = {}", self.signature.as_str())?;
        for (k, key) in COMPONENT_KEYS.iter().enumerate() {
            if !self.components[k].is_zero_literal() {
                writeln!(f, "{key} = {}", self.components[k])?;
            }
        }
        Ok(())
    }
}

/// Builtin metric families.
///
/// * `euclidean` - the flat metric.
/// * `diagonal` - `diag(f1, f2, f3)` with expression parameters `f1 f2 f3`.
/// * `conformally_flat` - `e^(2 phi) delta` with expression parameter `phi`.
/// * `sphere_stereographic` - round sphere of radius `r` in a
///   stereographic chart, `4 r^4 / (r^2 + |x|^2)^2 delta`.
pub fn builtin_metric(name: &str, params: &BTreeMap<String, String>) -> Result<MetricSpec> {
    let get = |key: &str| -> Result<&String> {
        params.get(key).ok_or_else(|| Error::MissingParam {
            builtin: name.to_string(),
            param: key.to_string(),
        })
    };
    let zero = Expression::constant(0.0);
    let one = Expression::constant(1.0);
    match name {
        "euclidean" => Ok(MetricSpec::new(
            "euclidean",
            Signature::Riemannian,
            [
                one.clone(),
                zero.clone(),
                zero.clone(),
                one.clone(),
                zero,
                one,
            ],
        )),
        "diagonal" => {
            let f1 = parse_expression(get("f1")?)?;
            let f2 = parse_expression(get("f2")?)?;
            let f3 = parse_expression(get("f3")?)?;
            Ok(MetricSpec::new(
                format!("diagonal({f1}, {f2}, {f3})"),
                Signature::Riemannian,
                [f1, zero.clone(), zero.clone(), f2, zero, f3],
            ))
        }
        "conformally_flat" => {
            let phi = parse_expression(get("phi")?)?;
            let factor = phi.exp_scaled(2.0);
            Ok(MetricSpec::new(
                format!("conformally_flat({phi})"),
                Signature::Riemannian,
                [
                    factor.clone(),
                    zero.clone(),
                    zero.clone(),
                    factor.clone(),
                    zero,
                    factor,
                ],
            ))
        }
        "sphere_stereographic" => {
            let radius: f64 = get("radius")?.parse().map_err(|_| {
                Error::Config(format!(
                    "sphere_stereographic radius must be a number, got `{}`",
                    params["radius"]
                ))
            })?;
            if radius <= 0.0 {
                return Err(Error::Config("sphere radius must be positive".into()));
            }
            let r2 = radius * radius;
            let src = format!("{:?}/(({r2:?} + x1^2 + x2^2 + x3^2)^2)", 4.0 * r2 * r2);
            let factor = parse_expression(&src)?;
            Ok(MetricSpec::new(
                format!("sphere_stereographic({radius})"),
                Signature::Riemannian,
                [
                    factor.clone(),
                    zero.clone(),
                    zero.clone(),
                    factor.clone(),
                    zero,
                    factor,
                ],
            ))
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Convenience constructors used throughout the tests and suites.
pub fn euclidean() -> MetricSpec {
    builtin_metric("euclidean", &BTreeMap::new()).unwrap()
}

pub fn diagonal(f1: &str, f2: &str, f3: &str) -> Result<MetricSpec> {
    let params = BTreeMap::from([
        ("f1".to_string(), f1.to_string()),
        ("f2".to_string(), f2.to_string()),
        ("f3".to_string(), f3.to_string()),
    ]);
    builtin_metric("diagonal", &params)
}

pub fn conformally_flat(phi: &str) -> Result<MetricSpec> {
    let params = BTreeMap::from([("phi".to_string(), phi.to_string())]);
    builtin_metric("conformally_flat", &params)
}

pub fn sphere_stereographic(radius: f64) -> Result<MetricSpec> {
    let params = BTreeMap::from([("radius".to_string(), format!("{radius:?}"))]);
    builtin_metric("sphere_stereographic", &params)
}

/// Parse `key = value` lines; later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_identity() {
        let m = euclidean();
        let jets = m.eval([0.3, -1.0, 2.0], 2).unwrap();
        for (k, j) in jets.iter().enumerate() {
            let diag = matches!(k, 0 | 3 | 5);
            assert_eq!(j.value(), if diag { 1.0 } else { 0.0 });
            assert_eq!(j.partial([1, 0, 0]), 0.0);
        }
    }

    #[test]
    fn conformally_flat_zero_phi_is_euclidean() {
        let m = conformally_flat("0").unwrap();
        let jets = m.eval([1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(jets[0].value(), 1.0);
        assert_eq!(jets[3].value(), 1.0);
        assert_eq!(jets[5].value(), 1.0);
        assert_eq!(jets[1].value(), 0.0);
    }

    #[test]
    fn unit_sphere_at_origin_is_four_delta() {
        // direct evaluation of 4 r^4/(r^2+|x|^2)^2 at x = 0, r = 1
        let m = sphere_stereographic(1.0).unwrap();
        let jets = m.eval([0.0; 3], 0).unwrap();
        assert!((jets[0].value() - 4.0).abs() < 1e-15);
        assert!((jets[3].value() - 4.0).abs() < 1e-15);
        assert!((jets[5].value() - 4.0).abs() < 1e-15);
        assert_eq!(jets[1].value(), 0.0);
    }

    #[test]
    fn unknown_builtin_and_missing_param() {
        assert!(matches!(
            builtin_metric("torus", &BTreeMap::new()).unwrap_err(),
            Error::UnknownBuiltin(n) if n == "torus"
        ));
        assert!(matches!(
            builtin_metric("conformally_flat", &BTreeMap::new()).unwrap_err(),
            Error::MissingParam { param, .. } if param == "phi"
        ));
    }

    #[test]
    fn metric_file_roundtrip_with_defaults() {
        let text = "
            # comment line
            name = test-metric
            signature = +++
            g11 = 1
            g22 = exp(2*x1)   # trailing comment
            g33 = 1 + x3^2
        ";
        let m = MetricSpec::parse(text).unwrap();
        assert_eq!(m.name, "test-metric");
        assert!(m.component(0, 1).is_zero_literal());
        assert!(m.component(1, 2).is_zero_literal());
        let shown = m.to_string();
        let back = MetricSpec::parse(&shown).unwrap();
        assert_eq!(back.component(1, 1).to_string(), m.component(1, 1).to_string());

        let missing = "g11 = 1\ng22 = 1\n";
        assert!(MetricSpec::parse(missing).is_err());
    }
}
