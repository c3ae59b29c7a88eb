//! Execution of resolved commands.

use std::path::{Path, PathBuf};

use drsn::borel::{borel, laplace_sum, pade_continue, BorelKind, PoleReport};
use drsn::io::{parse_field, parse_uni_series, SeriesRecord};
use drsn::normalization::{normalize, NormalFormData, EPS_PIPELINE};
use drsn::painleve::{painleve_demo, PainleveReport};
use drsn::saddle_node::{classify, Classification, SaddleNodeField};
use drsn::sectorial::{
    domain_membership, homological_residual, integrate_flow, FlowOptions, Membership,
    SectorGeometry, SectorSign, SectorialField,
};
use drsn::C64;
use serde::Serialize;

use crate::cli::{BorelRun, Command, NormalizeRun, PainleveRun, SectorRun};
use crate::error::{CliError, Result};
use crate::report::{emit, Check, Report};

/// Tolerance of the Painleve I spectral checks.
pub const EPS_SPECTRAL: f64 = 1e-9;
/// Tolerance on `c1 + c2` and on the symplectic defect.
pub const EPS_STRUCTURE: f64 = 1e-8;
/// Largest admissible relative homological residual.
pub const EPS_RESIDUAL: f64 = 1e-6;
/// Coefficients below this count as zero when testing for the identity map.
pub const EPS_IDENTITY: f64 = 1e-12;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn input<T>(path: &Path, r: drsn::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Run a command, write its artifacts and return whether every check passed.
pub fn run(command: &Command) -> Result<bool> {
    match command {
        Command::Normalize(r) => run_normalize(r),
        Command::Borel(r) => run_borel(r),
        Command::Sector(r) => run_sector(r),
        Command::Painleve(r) => run_painleve(r),
    }
}

fn finish<T: Serialize>(report: Report<T>, out: Option<&Path>) -> Result<bool> {
    emit(&report.to_json(), out)?;
    Ok(report.passed)
}

#[derive(Debug, Serialize)]
struct MapRecord {
    comp_y1: SeriesRecord,
    comp_y2: SeriesRecord,
    provenance: Vec<String>,
    tangent_to_identity: bool,
    identity: bool,
}

#[derive(Debug, Serialize)]
struct NormalizeResult {
    input: PathBuf,
    order: usize,
    x_order: usize,
    y_order: usize,
    working_y_order: usize,
    lambda: C64,
    residue: C64,
    classification: Classification,
    normal_form: NormalFormData,
    map: MapRecord,
    residual_max: f64,
}

fn run_normalize(r: &NormalizeRun) -> Result<bool> {
    let loaded = input(&r.input, parse_field(&read(&r.input)?))?;
    let norm = normalize(&loaded.field, r.order, r.x_order, r.ydeg)?;
    let full = loaded
        .diagonalizing
        .with_orders(r.x_order, norm.working_y_order)
        .then(&norm.map)?
        .with_orders(r.x_order, r.ydeg);
    let residual_max = norm.residual_max()?;
    let result = NormalizeResult {
        input: r.input.clone(),
        order: r.order,
        x_order: r.x_order,
        y_order: r.ydeg,
        working_y_order: norm.working_y_order,
        lambda: loaded.field.lambda,
        residue: loaded.field.residue,
        classification: classify(&loaded.field),
        normal_form: norm.data.clone(),
        map: MapRecord {
            comp_y1: (&full.comp_y1).into(),
            comp_y2: (&full.comp_y2).into(),
            provenance: full.provenance.clone(),
            tangent_to_identity: full.is_tangent_to_identity,
            identity: full.is_identity(EPS_IDENTITY),
        },
        residual_max,
    };
    let checks = vec![Check::at_most(
        "conjugacy residual below order N",
        residual_max,
        EPS_PIPELINE,
    )];
    finish(Report::new("normalize", checks, result), r.out.as_deref())
}

#[derive(Debug, Serialize)]
struct Evaluation {
    x: C64,
    value: Option<C64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct BorelResult {
    series: PathBuf,
    kind: BorelKind,
    direction: f64,
    terms: usize,
    pade: Option<PoleReport>,
    evaluations: Vec<Evaluation>,
}

fn run_borel(r: &BorelRun) -> Result<bool> {
    let f = input(&r.series, parse_uni_series(&read(&r.series)?))?;
    let mut b = borel(&f, r.kind);
    let n = b.coeffs.len();
    let orders = r.pade.or(if n >= 3 {
        Some(((n - 1) / 2, (n - 1) / 2))
    } else {
        None
    });
    let pade = match orders {
        Some(o) => {
            let (p, report) = pade_continue(&b, o)?;
            b.pade = Some(p);
            Some(report)
        }
        None => None,
    };
    let g = b.continuation();
    let evaluations: Vec<Evaluation> = r
        .eval
        .iter()
        .map(|&x| {
            let v = laplace_sum(&g, r.direction, x, b.constant).map(|v| match r.kind {
                BorelKind::Bis => v,
                BorelKind::B => v / x,
            });
            match v {
                Ok(v) => Evaluation {
                    x,
                    value: Some(v),
                    error: None,
                },
                Err(e) => Evaluation {
                    x,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let checks = evaluations
        .iter()
        .map(|e| {
            Check::flag(
                &format!("Laplace sum at {}", e.x),
                e.value.is_some(),
                0.0,
                0.0,
            )
        })
        .collect();
    let result = BorelResult {
        series: r.series.clone(),
        kind: r.kind,
        direction: r.direction,
        terms: f.coeffs().len(),
        pade,
        evaluations,
    };
    finish(Report::new("borel", checks, result), r.out.as_deref())
}

#[derive(Debug, Serialize)]
struct TrajectorySummary {
    path: PathBuf,
    samples: usize,
    t_final: f64,
    x_final: C64,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ResidualEntry {
    integrand: &'static str,
    m: usize,
    relative_residual: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SectorResult {
    input: PathBuf,
    prepared: bool,
    order: usize,
    sign: SectorSign,
    lambda: C64,
    residue: C64,
    geometry: SectorGeometry,
    base: [C64; 3],
    membership: Membership,
    trajectory: Option<TrajectorySummary>,
    residuals: Vec<ResidualEntry>,
}

/// Field normal below `x^{N+2}`: the input itself or its formal normal form.
fn prepared_field(r: &SectorRun, loaded: &SaddleNodeField) -> Result<SaddleNodeField> {
    if r.prepared {
        return Ok(loaded.clone());
    }
    let n = r.order + 2;
    Ok(normalize(loaded, n, n + 2, r.ydeg)?.field)
}

fn write_trajectory(path: &Path, t: &drsn::sectorial::Trajectory) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "t",
        "re_x",
        "im_x",
        "re_y1",
        "im_y1",
        "re_y2",
        "im_y2",
        "in_omega",
        "in_sigma",
        "in_theta_plus",
        "in_theta_minus",
    ])?;
    let flag = |b: bool| if b { "1".to_string() } else { "0".to_string() };
    for ((t, p), m) in t.times.iter().zip(&t.states).zip(&t.flags) {
        w.write_record([
            t.to_string(),
            p[0].re.to_string(),
            p[0].im.to_string(),
            p[1].re.to_string(),
            p[1].im.to_string(),
            p[2].re.to_string(),
            p[2].im.to_string(),
            flag(m.in_omega),
            flag(m.in_sigma),
            flag(m.in_theta_plus),
            flag(m.in_theta_minus),
        ])?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn run_sector(r: &SectorRun) -> Result<bool> {
    let loaded = input(&r.input, parse_field(&read(&r.input)?))?;
    let prepared = prepared_field(r, &loaded.field)?;
    let field = SectorialField::from_prepared(&prepared, r.order)?;
    let geom = SectorGeometry::for_field(&field, r.sign, &r.geometry)?;
    let membership = domain_membership(r.base, &geom);
    let mut checks = vec![Check::flag(
        "base point in Omega",
        membership.in_omega,
        0.0,
        0.0,
    )];
    if !membership.in_omega {
        return Err(CliError::Config(format!(
            "base point ({}, {}, {}) is outside the stable domain",
            r.base[0], r.base[1], r.base[2]
        )));
    }
    let trajectory = match &r.emit {
        Some(path) => {
            let opts = FlowOptions {
                t_end: r.t_end,
                ..r.path.flow
            };
            let summary = match integrate_flow(&field, r.base, &geom, &opts) {
                Ok(t) => {
                    write_trajectory(path, &t)?;
                    TrajectorySummary {
                        path: path.clone(),
                        samples: t.len(),
                        t_final: *t.times.last().unwrap_or(&0.0),
                        x_final: t.states.last().map_or(r.base[0], |s| s[0]),
                        error: None,
                    }
                }
                Err(e) => TrajectorySummary {
                    path: path.clone(),
                    samples: 0,
                    t_final: 0.0,
                    x_final: r.base[0],
                    error: Some(e.to_string()),
                },
            };
            checks.push(Check::flag(
                "trajectory stays in Omega",
                summary.error.is_none(),
                0.0,
                0.0,
            ));
            Some(summary)
        }
        None => None,
    };
    let mut residuals = Vec::new();
    if r.residual_check {
        let product = |_: C64, y1: C64, y2: C64| y1 * y2;
        let affine = |_: C64, y1: C64, y2: C64| 1.0 + y1 + y2;
        let cases: [(&'static str, &dyn Fn(C64, C64, C64) -> C64, usize); 2] =
            [("y1*y2", &product, 1), ("1+y1+y2", &affine, r.order)];
        for (name, a, m) in cases {
            let entry = match homological_residual(&field, a, m, r.base, &geom, &r.path) {
                Ok(v) => ResidualEntry {
                    integrand: name,
                    m,
                    relative_residual: Some(v),
                    error: None,
                },
                Err(e) => ResidualEntry {
                    integrand: name,
                    m,
                    relative_residual: None,
                    error: Some(e.to_string()),
                },
            };
            let measured = entry.relative_residual.unwrap_or(f64::INFINITY);
            checks.push(Check::at_most(
                &format!("homological residual for {name}, M = {m}"),
                measured,
                EPS_RESIDUAL,
            ));
            residuals.push(entry);
        }
    }
    let result = SectorResult {
        input: r.input.clone(),
        prepared: r.prepared,
        order: r.order,
        sign: r.sign,
        lambda: field.lambda(),
        residue: field.a(),
        geometry: geom,
        base: r.base,
        membership,
        trajectory,
        residuals,
    };
    finish(Report::new("sector", checks, result), r.out.as_deref())
}

fn run_painleve(r: &PainleveRun) -> Result<bool> {
    let report: PainleveReport = painleve_demo(r.order, r.x_order, r.ydeg)?;
    let one = C64::new(1.0, 0.0);
    let checks = vec![
        Check::at_most(
            "residue equals 1",
            (report.residue - one).norm(),
            EPS_SPECTRAL,
        ),
        Check::at_most(
            "a1 + a2 equals 1",
            (report.a1 + report.a2 - one).norm(),
            EPS_SPECTRAL,
        ),
        Check::at_most(
            "c1 + c2 vanishes up to v-degree 3",
            report.c_sum_max,
            EPS_STRUCTURE,
        ),
        Check::at_most(
            "conjugacy residual below order N",
            report.conjugacy_residual,
            EPS_PIPELINE,
        ),
        Check::flag(
            "transversally Hamiltonian",
            report.hamiltonian.passed,
            report.hamiltonian.max_defect,
            report.hamiltonian.tolerance,
        ),
        Check::flag(
            "formal map transversally symplectic",
            report.symplectic.passed,
            report.symplectic.max_defect,
            report.symplectic.tolerance,
        ),
    ];
    finish(Report::new("painleve", checks, report), r.out.as_deref())
}
