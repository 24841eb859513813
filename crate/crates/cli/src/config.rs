//! Run configuration: JSON parsing and validation.
//!
//! Validation walks the raw JSON tree so every error can name the
//! offending field by its JSON pointer (`/points/0`, `/base/a`, …).

use bmetric_core::acb::{AcbManifold, ManifoldKind, MetricPerturbation};
use bmetric_core::verify::Tolerances;
use bmetric_core::{make_conformal_surface, make_flat_surface, ScalarFieldExpr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSpec {
    Flat,
    Conformal {
        a: String,
        b: String,
        #[serde(skip)]
        exprs: (ScalarFieldExpr, ScalarFieldExpr),
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub t: [f64; 2],
    pub u: [f64; 2],
    pub v: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub t_range: [f64; 2],
    pub count: usize,
    pub u: f64,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub entry: [usize; 2],
    pub expr: String,
    #[serde(skip)]
    parsed: ScalarFieldExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub manifold: ManifoldKind,
    pub base: BaseSpec,
    pub points: Vec<[f64; 3]>,
    pub seed: [f64; 2],
    pub tolerances: Tolerances,
    pub output: Option<OutputFormat>,
    pub sample: Option<SampleSpec>,
    pub sweep: Option<SweepSpec>,
    pub metric_perturbation: Option<PerturbationSpec>,
}

impl RunConfig {
    pub fn manifold(&self) -> AcbManifold {
        let base = match &self.base {
            BaseSpec::Flat => make_flat_surface(),
            BaseSpec::Conformal { exprs, .. } => make_conformal_surface(exprs.0.clone(), exprs.1.clone()),
        };
        let m = AcbManifold::new(self.manifold, base);
        match &self.metric_perturbation {
            Some(p) => m.with_perturbation(MetricPerturbation {
                row: p.entry[0],
                col: p.entry[1],
                expr: p.parsed.clone(),
            }),
            None => m,
        }
    }

    /// Explicit points followed by the seeded random sample, if any.
    pub fn all_points(&self) -> Vec<[f64; 3]> {
        let mut out = self.points.clone();
        if let Some(s) = &self.sample {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let mut draw = |r: [f64; 2]| if r[0] == r[1] { r[0] } else { rng.gen_range(r[0]..r[1]) };
            for _ in 0..s.count {
                let t = draw(s.t);
                let u = draw(s.u);
                let v = draw(s.v);
                out.push([t, u, v]);
            }
        }
        out
    }

    /// Grid points of the sweep block: `count` values of `t` spaced evenly
    /// over the closed range.
    pub fn sweep_points(&self) -> Result<Vec<[f64; 3]>, ConfigError> {
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| ConfigError::at("/sweep", "a sweep block is required for this command"))?;
        let [lo, hi] = s.t_range;
        let n = s.count;
        Ok((0..n)
            .map(|i| {
                let t = if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                [t, s.u, s.v]
            })
            .collect())
    }

    /// `(u, v)` seed as a horizontal tangent vector.
    pub fn seed_vector(&self) -> [f64; 3] {
        [0.0, self.seed[0], self.seed[1]]
    }
}

struct Ctx<'a> {
    path: String,
    value: &'a Value,
}

impl<'a> Ctx<'a> {
    fn child(&self, key: &str) -> Option<Ctx<'a>> {
        self.value.get(key).map(|value| Ctx {
            path: format!("{}/{}", self.path, key),
            value,
        })
    }

    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::at(&self.path, message)
    }

    fn object(&self, allowed: &[&str]) -> Result<&'a Map<String, Value>, ConfigError> {
        let map = self.value.as_object().ok_or_else(|| self.err("expected an object"))?;
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::at(format!("{}/{}", self.path, key), "unknown field"));
            }
        }
        Ok(map)
    }

    fn number(&self) -> Result<f64, ConfigError> {
        self.value
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err("expected a finite number"))
    }

    fn positive(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(self.err(format!("must be > 0, got {x}")))
        }
    }

    fn count(&self) -> Result<usize, ConfigError> {
        self.value
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    fn string(&self) -> Result<&'a str, ConfigError> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn items(&self) -> Result<Vec<Ctx<'a>>, ConfigError> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, value)| Ctx {
                path: format!("{}/{}", self.path, i),
                value,
            })
            .collect())
    }

    fn numbers<const K: usize>(&self) -> Result<[f64; K], ConfigError> {
        let items = self.items()?;
        if items.len() != K {
            return Err(self.err(format!("expected {K} numbers, got {}", items.len())));
        }
        let mut out = [0.0; K];
        for (slot, item) in out.iter_mut().zip(&items) {
            *slot = item.number()?;
        }
        Ok(out)
    }

    fn range(&self) -> Result<[f64; 2], ConfigError> {
        let r = self.numbers::<2>()?;
        if r[0] > r[1] {
            return Err(self.err(format!("range is reversed: [{}, {}]", r[0], r[1])));
        }
        Ok(r)
    }

    fn expression(&self) -> Result<ScalarFieldExpr, ConfigError> {
        let text = self.string()?;
        text.parse()
            .map_err(|e: bmetric_core::ParseError| self.err(format!("invalid expression {text:?}: {e}")))
    }
}

const TOP_LEVEL: &[&str] = &[
    "manifold",
    "base",
    "points",
    "seed",
    "tolerances",
    "output",
    "sample",
    "sweep",
    "metric_perturbation",
];

/// Parses and validates a configuration document, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::at("", format!("invalid JSON: {e}")))?;
    let root = Ctx {
        path: String::new(),
        value: &value,
    };
    root.object(TOP_LEVEL)?;

    let manifold = match root.child("manifold") {
        None => return Err(ConfigError::at("/manifold", "missing required field")),
        Some(c) => match c.string()? {
            "cone" => ManifoldKind::Cone,
            "s1_extension" => ManifoldKind::S1Extension,
            other => return Err(c.err(format!("expected \"cone\" or \"s1_extension\", got {other:?}"))),
        },
    };

    let base_ctx = root
        .child("base")
        .ok_or_else(|| ConfigError::at("/base", "missing required field"))?;
    base_ctx.object(&["kind", "a", "b"])?;
    let kind = base_ctx
        .child("kind")
        .ok_or_else(|| ConfigError::at("/base/kind", "missing required field"))?;
    let base = match kind.string()? {
        "flat" => {
            if let Some(extra) = base_ctx.child("a").or_else(|| base_ctx.child("b")) {
                return Err(extra.err("only conformal bases take expressions"));
            }
            BaseSpec::Flat
        }
        "conformal" => {
            let field = |name: &str| {
                base_ctx
                    .child(name)
                    .ok_or_else(|| ConfigError::at(format!("/base/{name}"), "missing required field"))
            };
            let (a_ctx, b_ctx) = (field("a")?, field("b")?);
            let exprs = (a_ctx.expression()?, b_ctx.expression()?);
            BaseSpec::Conformal {
                a: a_ctx.string()?.to_string(),
                b: b_ctx.string()?.to_string(),
                exprs,
            }
        }
        other => return Err(kind.err(format!("expected \"flat\" or \"conformal\", got {other:?}"))),
    };

    let cone = manifold == ManifoldKind::Cone;
    let mut points = Vec::new();
    if let Some(c) = root.child("points") {
        for item in c.items()? {
            let p = item.numbers::<3>()?;
            if cone && !(p[0] > 0.0) {
                return Err(item.err(format!("cone points need t > 0, got t = {}", p[0])));
            }
            points.push(p);
        }
    }

    let seed = match root.child("seed") {
        Some(c) => {
            let s = c.numbers::<2>()?;
            if s == [0.0, 0.0] {
                return Err(c.err("seed must be a non-zero horizontal vector"));
            }
            s
        }
        None => [1.0, 0.0],
    };

    let mut tolerances = Tolerances::default();
    if let Some(c) = root.child("tolerances") {
        c.object(&["second_order", "third_order", "class"])?;
        if let Some(x) = c.child("second_order") {
            tolerances.second_order = x.positive()?;
        }
        if let Some(x) = c.child("third_order") {
            tolerances.third_order = x.positive()?;
        }
        if let Some(x) = c.child("class") {
            tolerances.class = x.positive()?;
        }
    }

    let output = match root.child("output") {
        None => None,
        Some(c) => Some(match c.string()? {
            "json" => OutputFormat::Json,
            "csv" => OutputFormat::Csv,
            other => return Err(c.err(format!("expected \"json\" or \"csv\", got {other:?}"))),
        }),
    };

    let sample = match root.child("sample") {
        None => None,
        Some(c) => {
            c.object(&["count", "seed", "t", "u", "v"])?;
            let req = |name: &str| {
                c.child(name)
                    .ok_or_else(|| ConfigError::at(format!("{}/{name}", c.path), "missing required field"))
            };
            let t_ctx = req("t")?;
            let t = t_ctx.range()?;
            if cone && !(t[0] > 0.0) {
                return Err(t_ctx.err("cone samples need t > 0"));
            }
            Some(SampleSpec {
                count: req("count")?.count()?,
                seed: req("seed")?
                    .value
                    .as_u64()
                    .ok_or_else(|| ConfigError::at(format!("{}/seed", c.path), "expected a non-negative integer"))?,
                t,
                u: req("u")?.range()?,
                v: req("v")?.range()?,
            })
        }
    };

    let sweep = match root.child("sweep") {
        None => None,
        Some(c) => {
            c.object(&["t_range", "count", "u", "v"])?;
            let req = |name: &str| {
                c.child(name)
                    .ok_or_else(|| ConfigError::at(format!("{}/{name}", c.path), "missing required field"))
            };
            let range_ctx = req("t_range")?;
            let t_range = range_ctx.range()?;
            if cone && !(t_range[0] > 0.0) {
                return Err(range_ctx.err("cone sweeps need t > 0"));
            }
            let count_ctx = req("count")?;
            let count = count_ctx.count()?;
            if count < 2 {
                return Err(count_ctx.err(format!("a sweep needs at least 2 points, got {count}")));
            }
            let coord = |name: &str| c.child(name).map(|x| x.number()).transpose().map(|x| x.unwrap_or(0.0));
            Some(SweepSpec {
                t_range,
                count,
                u: coord("u")?,
                v: coord("v")?,
            })
        }
    };

    let metric_perturbation = match root.child("metric_perturbation") {
        None => None,
        Some(c) => {
            c.object(&["entry", "expr"])?;
            let entry_ctx = c
                .child("entry")
                .ok_or_else(|| ConfigError::at(format!("{}/entry", c.path), "missing required field"))?;
            let raw = entry_ctx.items()?;
            if raw.len() != 2 {
                return Err(entry_ctx.err("expected two indices"));
            }
            let mut entry = [0usize; 2];
            for (slot, item) in entry.iter_mut().zip(&raw) {
                let i = item.count()?;
                if i > 2 {
                    return Err(item.err("index must be 0, 1 or 2"));
                }
                *slot = i;
            }
            let expr_ctx = c
                .child("expr")
                .ok_or_else(|| ConfigError::at(format!("{}/expr", c.path), "missing required field"))?;
            Some(PerturbationSpec {
                entry,
                expr: expr_ctx.string()?.to_string(),
                parsed: expr_ctx.expression()?,
            })
        }
    };

    Ok(RunConfig {
        manifold,
        base,
        points,
        seed,
        tolerances,
        output,
        sample,
        sweep,
        metric_perturbation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_cone_gets_defaults() {
        let c = parse_config(r#"{"manifold":"cone","base":{"kind":"flat"},"points":[[2,0,0]]}"#).unwrap();
        assert_eq!(c.manifold, ManifoldKind::Cone);
        assert_eq!(c.base, BaseSpec::Flat);
        assert_eq!(c.points, vec![[2.0, 0.0, 0.0]]);
        assert_eq!(c.seed, [1.0, 0.0]);
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.output.is_none() && c.sample.is_none() && c.sweep.is_none());
    }

    #[test]
    fn negative_cone_parameter_is_reported_with_its_pointer() {
        let e = parse_config(r#"{"manifold":"cone","base":{"kind":"flat"},"points":[[-1,0,0]]}"#).unwrap_err();
        assert_eq!(e.pointer, "/points/0");
        // the extension has no such restriction
        assert!(parse_config(r#"{"manifold":"s1_extension","base":{"kind":"flat"},"points":[[-1,0,0]]}"#).is_ok());
    }

    #[test]
    fn conformal_base_expressions() {
        let c =
            parse_config(r#"{"manifold":"cone","base":{"kind":"conformal","a":"u^2","b":"0"},"points":[]}"#).unwrap();
        let m = c.manifold();
        let k = m.base().gaussian_curvature_at(&[0.0, 0.0]).unwrap();
        assert!((k + 2.0).abs() < 1e-12);
        let e = parse_config(r#"{"manifold":"cone","base":{"kind":"conformal","a":"2*(u","b":"0"}}"#).unwrap_err();
        assert_eq!(e.pointer, "/base/a");
        assert!(e.message.contains("byte 4"), "{}", e.message);
    }

    #[test]
    fn field_errors_name_their_paths() {
        let cases = [
            (r#"{"base":{"kind":"flat"}}"#, "/manifold"),
            (r#"{"manifold":"torus","base":{"kind":"flat"}}"#, "/manifold"),
            (
                r#"{"manifold":"cone","base":{"kind":"flat"},"tolerances":{"class":0}}"#,
                "/tolerances/class",
            ),
            (
                r#"{"manifold":"cone","base":{"kind":"flat"},"points":[[1,2]]}"#,
                "/points/0",
            ),
            (r#"{"manifold":"cone","base":{"kind":"flat"},"extra":1}"#, "/extra"),
            (
                r#"{"manifold":"cone","base":{"kind":"flat"},"sweep":{"t_range":[1,2],"count":1}}"#,
                "/sweep/count",
            ),
            (r#"{"manifold":"cone","base":{"kind":"flat"},"seed":[0,0]}"#, "/seed"),
            (r#"{"manifold":"cone","base":{"kind":"conformal","a":"u"}}"#, "/base/b"),
        ];
        for (text, pointer) in cases {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.pointer, pointer, "{text}: {e}");
        }
    }

    #[test]
    fn sweep_grid_hits_both_ends() {
        let c = parse_config(
            r#"{"manifold":"s1_extension","base":{"kind":"flat"},"sweep":{"t_range":[0,3.141592653589793],"count":5}}"#,
        )
        .unwrap();
        let pts = c.sweep_points().unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0][0], 0.0);
        assert_eq!(pts[4][0], std::f64::consts::PI);
    }

    #[test]
    fn samples_are_reproducible() {
        let text = r#"{"manifold":"cone","base":{"kind":"flat"},"points":[[1,0,0]],
            "sample":{"count":3,"seed":9,"t":[1,2],"u":[-1,1],"v":[0,0]}}"#;
        let a = parse_config(text).unwrap().all_points();
        let b = parse_config(text).unwrap().all_points();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a[1..].iter().all(|p| (1.0..2.0).contains(&p[0]) && p[2] == 0.0));
    }
}
