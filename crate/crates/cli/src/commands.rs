use clap::{ArgGroup, Args};
use serde::Serialize;

use ptpara::coords::{cylindrical_to_spherical, parabolic_to_cylindrical, uv_to_parabolic};
use ptpara::greens::{pseudo_greens, sector_greens, GreensQuadrature, GreensRequest};
use ptpara::oracle::level_table;
use ptpara::spectrum::{pt_phase_scan_with, spectrum_table_with, ExcludedLevel};
use ptpara::{Complex, Execution, OscillatorPoint, Phase, PhaseGrid, PointBundle, SphericalPoint};

use crate::output::{csv, float, json, Metadata};
use crate::{Common, Failure, Format};

fn broken_sectors(excluded: &[ExcludedLevel]) -> String {
    let nus: Vec<String> = excluded.iter().map(|e| e.nu.to_string()).collect();
    format!("PT symmetry broken for nu = {}", nus.join(", "))
}

fn check_strict(common: &Common, excluded: &[ExcludedLevel]) -> Result<(), Failure> {
    if excluded.is_empty() {
        return Ok(());
    }
    if common.strict {
        return Err(Failure::BrokenPhase(broken_sectors(excluded)));
    }
    if common.format == Format::Csv {
        eprintln!("ptpara: note: {} ; those sectors are omitted", broken_sectors(excluded));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumRow {
    n2: u32,
    nt2: u32,
    nu: u32,
    lambda: f64,
    omega: f64,
    energy: f64,
    degeneracy: u32,
}

#[derive(Serialize)]
struct SpectrumDoc {
    metadata: Metadata,
    entries: Vec<SpectrumRow>,
    excluded: Vec<ExcludedLevel>,
}

pub fn spectrum(common: &Common) -> Result<String, Failure> {
    let params = common.params()?;
    let table = spectrum_table_with(&params, common.max_n, common.max_nu, Execution::Parallel)?;
    check_strict(common, &table.excluded)?;
    let rows: Vec<SpectrumRow> = table
        .entries
        .iter()
        .map(|e| SpectrumRow {
            n2: e.qn.n2,
            nt2: e.qn.nt2,
            nu: e.qn.nu,
            lambda: e.lambda,
            omega: e.omega,
            energy: e.energy,
            degeneracy: e.degeneracy,
        })
        .collect();
    match common.format {
        Format::Json => json(&SpectrumDoc {
            metadata: Metadata::new(&params),
            entries: rows,
            excluded: table.excluded,
        }),
        Format::Csv => Ok(csv(
            "n2,nt2,nu,lambda,omega,energy,degeneracy",
            rows.iter().map(|r| {
                vec![
                    r.n2.to_string(),
                    r.nt2.to_string(),
                    r.nu.to_string(),
                    float(r.lambda),
                    float(r.omega),
                    float(r.energy),
                    r.degeneracy.to_string(),
                ]
            }),
        )),
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let x = x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"))?;
            let y = y.parse::<f64>().map_err(|e| format!("{y:?}: {e}"))?;
            Ok([x, y])
        }
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("level").required(true).args(["energy", "omega"])))]
pub struct GreensArgs {
    /// Source point u_a as "x,y".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    ua: [f64; 2],
    /// Source point v_a as "x,y".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    va: [f64; 2],
    /// Target point u_b as "x,y".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    ub: [f64; 2],
    /// Target point v_b as "x,y".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    vb: [f64; 2],
    /// Energy (negative).
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    /// Pseudo-frequency, E = -2 m omega^2.
    #[arg(long)]
    omega: Option<f64>,
    /// Restrict to azimuthal sector nu; this is where B and C enter.
    #[arg(long)]
    nu: Option<u32>,
    /// Upper pseudo-time limit [default: 60 / omega].
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
}

#[derive(Serialize)]
struct GreensDoc {
    metadata: Metadata,
    omega: f64,
    energy: f64,
    pseudo: f64,
    physical: f64,
    converged: bool,
    tail_estimate: f64,
}

#[derive(Serialize)]
struct SectorDoc {
    metadata: Metadata,
    omega: f64,
    energy: f64,
    nu: u32,
    pseudo: Complex,
    physical: Complex,
    converged: bool,
    tail_estimate: f64,
}

pub fn greens(common: &Common, args: &GreensArgs) -> Result<String, Failure> {
    let params = common.params()?;
    let energy = match (args.energy, args.omega) {
        (Some(e), _) => e,
        (None, Some(w)) => -2.0 * params.m() * w * w,
        (None, None) => unreachable!("clap requires one of --energy, --omega"),
    };
    let req = GreensRequest {
        params,
        energy,
        a: OscillatorPoint::new(args.ua, args.va),
        b: OscillatorPoint::new(args.ub, args.vb),
        quadrature: GreensQuadrature {
            beta_max: args.beta_max,
            rel_tol: args.rel_tol,
        },
    };
    let omega = req.omega()?;
    let metadata = Metadata::new(&params);
    match args.nu {
        None => {
            let g = pseudo_greens(&req)?;
            match common.format {
                Format::Json => json(&GreensDoc {
                    metadata,
                    omega,
                    energy,
                    pseudo: g.pseudo,
                    physical: g.physical,
                    converged: g.converged,
                    tail_estimate: g.tail_estimate,
                }),
                Format::Csv => Ok(csv(
                    "omega,energy,pseudo,physical,converged,tail_estimate",
                    [vec![
                        float(omega),
                        float(energy),
                        float(g.pseudo),
                        float(g.physical),
                        g.converged.to_string(),
                        float(g.tail_estimate),
                    ]],
                )),
            }
        }
        Some(nu) => {
            if common.strict {
                ptpara::spectrum::lambda_value(&params, nu)?;
            }
            let g = sector_greens(&req, nu)?;
            match common.format {
                Format::Json => json(&SectorDoc {
                    metadata,
                    omega,
                    energy,
                    nu,
                    pseudo: g.pseudo,
                    physical: g.physical,
                    converged: g.converged,
                    tail_estimate: g.tail_estimate,
                }),
                Format::Csv => Ok(csv(
                    "omega,energy,nu,pseudo_re,pseudo_im,physical_re,physical_im,converged,tail_estimate",
                    [vec![
                        float(omega),
                        float(energy),
                        nu.to_string(),
                        float(g.pseudo.re),
                        float(g.pseudo.im),
                        float(g.physical.re),
                        float(g.physical.im),
                        g.converged.to_string(),
                        float(g.tail_estimate),
                    ]],
                )),
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct PhaseScanArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    b_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    b_max: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    c_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    c_max: f64,
    /// Grid points per axis, endpoints included.
    #[arg(long, default_value_t = 41)]
    points: usize,
}

#[derive(Serialize)]
struct PhasePoint {
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "C")]
    c: f64,
    classification: &'static str,
    offending_nu: Option<u32>,
    max_imag_energy: f64,
}

#[derive(Serialize)]
struct PhaseDoc {
    metadata: Metadata,
    nu_max: u32,
    points: Vec<PhasePoint>,
}

pub fn phase_scan(common: &Common, args: &PhaseScanArgs) -> Result<String, Failure> {
    let params = common.params()?;
    if args.points == 0 || !(args.b_min <= args.b_max && args.c_min <= args.c_max) {
        return Err(Failure::Config(
            "phase grid needs points > 0 and min <= max on both axes".into(),
        ));
    }
    let grid = PhaseGrid {
        b_min: args.b_min,
        b_max: args.b_max,
        b_points: args.points,
        c_min: args.c_min,
        c_max: args.c_max,
        c_points: args.points,
    };
    let reports = pt_phase_scan_with(&params, &grid, common.max_nu, Execution::Parallel)?;
    if common.strict {
        if let Some(r) = reports.iter().find(|r| r.classification == Phase::Broken) {
            return Err(Failure::BrokenPhase(format!(
                "PT symmetry broken at B = {}, C = {} (nu = {})",
                r.params.b(),
                r.params.c(),
                r.offending_nu.unwrap_or_default()
            )));
        }
    }
    let points: Vec<PhasePoint> = reports
        .iter()
        .map(|r| PhasePoint {
            b: r.params.b(),
            c: r.params.c(),
            classification: r.classification.as_str(),
            offending_nu: r.offending_nu,
            max_imag_energy: r.max_imag_energy,
        })
        .collect();
    match common.format {
        Format::Json => json(&PhaseDoc {
            metadata: Metadata::new(&params),
            nu_max: common.max_nu,
            points,
        }),
        Format::Csv => Ok(csv(
            "B,C,classification",
            points
                .iter()
                .map(|p| vec![float(p.b), float(p.c), p.classification.to_string()]),
        )),
    }
}

#[derive(Serialize)]
struct OracleRow {
    n2: u32,
    nt2: u32,
    nu: u32,
    omega: f64,
    eps1: Complex,
    eps2: Complex,
    residual: f64,
    imag: f64,
}

#[derive(Serialize)]
struct OracleDoc {
    metadata: Metadata,
    max_relative_residual: f64,
    levels: Vec<OracleRow>,
    excluded: Vec<ExcludedLevel>,
}

pub fn oracle(common: &Common) -> Result<String, Failure> {
    let params = common.params()?;
    let table = level_table(&params, common.max_n, common.max_nu, Execution::Parallel)?;
    check_strict(common, &table.excluded)?;
    let max_relative_residual = table.max_relative_residual(params.alpha());
    let levels: Vec<OracleRow> = table
        .levels
        .iter()
        .map(|l| OracleRow {
            n2: l.qn.n2,
            nt2: l.qn.nt2,
            nu: l.qn.nu,
            omega: l.omega,
            eps1: l.eps1,
            eps2: l.eps2,
            residual: l.residual,
            imag: l.imag,
        })
        .collect();
    match common.format {
        Format::Json => json(&OracleDoc {
            metadata: Metadata::new(&params),
            max_relative_residual,
            levels,
            excluded: table.excluded,
        }),
        Format::Csv => Ok(csv(
            "n2,nt2,nu,omega,eps1_re,eps1_im,eps2_re,eps2_im,residual,imag",
            levels.iter().map(|l| {
                vec![
                    l.n2.to_string(),
                    l.nt2.to_string(),
                    l.nu.to_string(),
                    float(l.omega),
                    float(l.eps1.re),
                    float(l.eps1.im),
                    float(l.eps2.re),
                    float(l.eps2.im),
                    float(l.residual),
                    float(l.imag),
                ]
            }),
        )),
    }
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    r: f64,
    /// Polar angle in radians.
    #[arg(long)]
    theta: f64,
    /// Azimuth in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Serialize)]
struct TransformDoc {
    metadata: Metadata,
    bundle: PointBundle,
    /// The spherical point recovered from the oscillator representation.
    round_trip: SphericalPoint,
}

pub fn transform(common: &Common, args: &TransformArgs) -> Result<String, Failure> {
    let params = common.params()?;
    let bundle = PointBundle::from_spherical(SphericalPoint::new(args.r, args.theta, args.phi)?)?;
    let back = cylindrical_to_spherical(parabolic_to_cylindrical(uv_to_parabolic(bundle.oscillator)?)?)?;
    match common.format {
        Format::Json => json(&TransformDoc {
            metadata: Metadata::new(&params),
            bundle,
            round_trip: back,
        }),
        Format::Csv => {
            let (s, c, p, o) = (
                bundle.spherical,
                bundle.cylindrical,
                bundle.parabolic,
                bundle.oscillator,
            );
            let values = [
                s.r, s.theta, s.phi, c.rho, c.z, p.xi, p.eta, o.u[0], o.u[1], o.v[0], o.v[1], back.r, back.theta,
                back.phi,
            ];
            Ok(csv(
                "r,theta,phi,rho,z,xi,eta,u1,u2,v1,v2,r_back,theta_back,phi_back",
                [values.iter().map(|&x| float(x)).collect()],
            ))
        }
    }
}
