//! The `describe`, `verify` and `sweep` commands and their report formats.

use std::io::Write;

use bmetric_core::acb::{AcbManifold, ManifoldKind};
use bmetric_core::classify::{classify_at, nabla_phi_square_norm_at, LeeForms};
use bmetric_core::curvature::{curvature_table_at, CurvatureTable};
use bmetric_core::geometry::LocalGeometry;
use bmetric_core::verify::{verify_theorems, Tier, VerificationReport};
use bmetric_core::GeometryError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BaseSpec, RunConfig};
use crate::error::CliError;

/// Everything computed at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointValues {
    /// Coordinate components `g_ij` in `(t, u, v)`.
    pub metric: [[f64; 3]; 3],
    /// Coordinate components of `e₁, e₂, e₃ = ξ`.
    pub phi_basis: [[f64; 3]; 3],
    /// `F_ijk = F(e_i, e_j, e_k)`, row-major.
    pub f_phi_basis: Vec<f64>,
    pub lee: LeeForms,
    pub class_label: String,
    pub class_residual: f64,
    pub curvature: CurvatureTable,
    pub norm_nabla_phi: f64,
    /// `‖∇′J‖²` of the base surface at `(u, v)`.
    pub norm_nabla_j: f64,
    /// Gaussian curvature `k′` of the base at `(u, v)`.
    pub base_curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<PointValues>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescribeReport {
    pub manifold: ManifoldKind,
    pub base: BaseRecord,
    pub seed: [f64; 2],
    pub perturbed: bool,
    pub points: Vec<PointRecord>,
}

fn base_record(base: &BaseSpec) -> BaseRecord {
    match base {
        BaseSpec::Flat => BaseRecord {
            kind: "flat".into(),
            a: None,
            b: None,
        },
        BaseSpec::Conformal { a, b, .. } => BaseRecord {
            kind: "conformal".into(),
            a: Some(a.clone()),
            b: Some(b.clone()),
        },
    }
}

fn evaluate_point(
    m: &AcbManifold,
    p: &[f64; 3],
    seed: &[f64; 3],
    class_tol: f64,
) -> Result<PointValues, GeometryError> {
    let (basis, lee, dec) = classify_at(m, p, seed, class_tol)?;
    let curvature = curvature_table_at(m, p, &basis, Some(m.kind()))?;
    let base_point = AcbManifold::base_point(p);
    Ok(PointValues {
        metric: LocalGeometry::at(m, p)?.g,
        phi_basis: basis.e,
        f_phi_basis: dec.f_components.data().to_vec(),
        lee,
        class_label: dec.label_string(),
        class_residual: dec.residual_norm,
        curvature,
        norm_nabla_phi: nabla_phi_square_norm_at(m, p)?,
        norm_nabla_j: m.base().nabla_j_square_norm_at(&base_point)?,
        base_curvature: m.base().gaussian_curvature_at(&base_point)?,
    })
}

/// Evaluates every point in parallel; output order follows input order and a
/// failure at one point is recorded on that point only.
fn evaluate_all(config: &RunConfig, points: &[[f64; 3]]) -> Vec<PointRecord> {
    let m = config.manifold();
    let seed = config.seed_vector();
    points
        .par_iter()
        .map(|p| match evaluate_point(&m, p, &seed, config.tolerances.class) {
            Ok(values) => PointRecord {
                point: *p,
                error: None,
                values: Some(values),
            },
            Err(e) => PointRecord {
                point: *p,
                error: Some(e.to_string()),
                values: None,
            },
        })
        .collect()
}

pub fn cmd_describe(config: &RunConfig) -> DescribeReport {
    DescribeReport {
        manifold: config.manifold,
        base: base_record(&config.base),
        seed: config.seed,
        perturbed: config.metric_perturbation.is_some(),
        points: evaluate_all(config, &config.all_points()),
    }
}

/// Runs the theorem suite; the boolean is the overall verdict.
pub fn cmd_verify(config: &RunConfig) -> Result<(VerificationReport, bool), CliError> {
    let m = config.manifold();
    let report = verify_theorems(&m, &config.all_points(), &config.seed_vector(), config.tolerances)?;
    let ok = report.passed();
    Ok((report, ok))
}

pub fn cmd_sweep(config: &RunConfig) -> Result<Vec<PointRecord>, CliError> {
    let points = config.sweep_points()?;
    Ok(evaluate_all(config, &points))
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "t",
    "u",
    "v",
    "tau",
    "tau_star",
    "tau_star2",
    "k12",
    "k13",
    "k23",
    "norm_nabla_phi",
    "class_label",
    "residual",
];

/// 17 significant digits: enough to reimport every `f64` bit for bit.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// One row per record. A failed point keeps its coordinates, leaves the
/// numeric columns empty and puts `error: <reason>` in `class_label`.
pub fn write_records_csv<W: Write>(records: &[PointRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in records {
        let mut row: Vec<String> = r.point.iter().map(|&x| fmt_float(x)).collect();
        match (&r.values, &r.error) {
            (Some(v), _) => {
                let c = &v.curvature;
                for x in [c.tau, c.tau_star, c.tau_star2, c.k12, c.k13, c.k23, v.norm_nabla_phi] {
                    row.push(fmt_float(x));
                }
                row.push(v.class_label.clone());
                row.push(fmt_float(v.class_residual));
            }
            (None, err) => {
                row.extend(std::iter::repeat(String::new()).take(7));
                row.push(format!("error: {}", err.as_deref().unwrap_or("unknown")));
                row.push(String::new());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn tier_name(tier: Tier) -> &'static str {
    match tier {
        Tier::Axiom => "axiom",
        Tier::SecondOrder => "second_order",
        Tier::ThirdOrder => "third_order",
        Tier::Class => "class",
        Tier::Sign => "sign",
    }
}

/// One row per check.
pub fn write_verification_csv<W: Write>(report: &VerificationReport, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "t",
        "u",
        "v",
        "check",
        "lhs",
        "rhs",
        "residual",
        "tolerance",
        "tier",
        "gating",
        "passed",
    ])?;
    for p in &report.points {
        let coords: Vec<String> = p.point.iter().map(|&x| fmt_float(x)).collect();
        if let Some(e) = &p.error {
            let mut row = coords.clone();
            row.push(format!("evaluation error: {e}"));
            row.extend(std::iter::repeat(String::new()).take(5));
            row.extend(["true".to_string(), "false".to_string()]);
            w.write_record(&row)?;
        }
        for c in &p.checks {
            let mut row = coords.clone();
            row.extend([
                c.name.clone(),
                fmt_float(c.lhs),
                fmt_float(c.rhs),
                fmt_float(c.residual),
                fmt_float(c.tolerance),
                tier_name(c.tier).to_string(),
                c.gating.to_string(),
                c.passed.to_string(),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(text: &str) -> RunConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn describe_flat_cone_at_t2() {
        let r = cmd_describe(&cfg(r#"{"manifold":"cone","base":{"kind":"flat"},"points":[[2,0,0]]}"#));
        let v = r.points[0].values.as_ref().unwrap();
        assert!((v.lee.theta_star[2] - 1.0).abs() < 1e-12);
        assert!((v.curvature.tau + 0.5).abs() < 1e-12);
        assert_eq!(v.class_label, "F5");
    }

    #[test]
    fn describe_flat_extension_at_pi_over_6() {
        let r = cmd_describe(&cfg(
            r#"{"manifold":"s1_extension","base":{"kind":"flat"},"points":[[0.5235987755982988,0,0]]}"#,
        ));
        let v = r.points[0].values.as_ref().unwrap();
        assert!((v.lee.theta[2] + 2.0).abs() < 1e-12);
        assert!((v.curvature.tau - 2.0).abs() < 1e-12);
        assert_eq!(v.class_label, "F4");
    }

    #[test]
    fn empty_points_give_an_empty_report() {
        let r = cmd_describe(&cfg(r#"{"manifold":"cone","base":{"kind":"flat"},"points":[]}"#));
        assert!(r.points.is_empty());
    }

    #[test]
    fn a_bad_point_does_not_hide_its_neighbours() {
        // 1/u is undefined on the line u = 0
        let c = cfg(
            r#"{"manifold":"s1_extension","base":{"kind":"conformal","a":"1/u","b":"0"},
            "points":[[0,1,0],[0,0,0],[0,2,0]]}"#,
        );
        let r = cmd_describe(&c);
        assert!(r.points[0].values.is_some());
        assert!(r.points[1].error.is_some() && r.points[1].values.is_none());
        assert!(r.points[2].values.is_some());
        assert_eq!(r.points[2].point, [0.0, 2.0, 0.0]);
    }

    #[test]
    fn floats_reimport_exactly() {
        for x in [std::f64::consts::PI, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.1 + 0.2] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn sweep_csv_marks_failed_rows() {
        let c = cfg(
            r#"{"manifold":"s1_extension","base":{"kind":"conformal","a":"1/u","b":"0"},
            "sweep":{"t_range":[0,1],"count":2,"u":0,"v":0}}"#,
        );
        let rows = cmd_sweep(&c).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains("error: "), "{}", lines[1]);
    }
}
