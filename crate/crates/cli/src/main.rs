//! Command line surface for the discrete analytic function toolkit: tiling
//! generation, validity checks, special functions, integrability
//! verification, and SVG rendering.
//!
//! Exit codes: 0 when the requested computation passes its tolerance, 1 when
//! a check fails, 2 on usage or input errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use isoradial::document::TilingDocument;
use isoradial::graph::{check_rhombic_embeddable, QuadGraph};
use isoradial::integrability::{
    check_3d_consistency, verify_isomonodromy, IsomonodromyKind, SystemKind,
};
use isoradial::labeling::{
    check_integrability, check_lift_faces, labeling_from_realization, lift_to_zd,
    weights_from_labeling, Realization, SlopeData,
};
use isoradial::linear::{
    exponential_on_patch, extend_to_hull, integral_reconstruct, QuadratureSpec, VertexFunction,
};
use isoradial::linearization::tangent_check;
use isoradial::num::SplitMix64;
use isoradial::render::{render_svg, Layer};
use isoradial::special::{
    discrete_log_on_patch, greens_function, DiscreteLog, DiscretePower, PowerParameters,
};
use isoradial::{tiling, C64, Error};

#[derive(Parser)]
#[command(name = "isoradial", version, about = "Discrete analytic functions on rhombic quad-graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TilingKind {
    Square,
    DualKagome,
    Penrose,
}

#[derive(Clone, Copy, ValueEnum)]
enum EquationKind {
    #[value(alias = "cr")]
    CauchyRiemann,
    CrossRatio,
    Hirota,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    /// Output format of the numeric report.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a rhombic tiling patch.
    Generate {
        #[arg(long, value_enum)]
        kind: TilingKind,
        /// Side length for square patches (a size x size block).
        #[arg(long)]
        size: Option<i64>,
        /// Radius for radius-based patches.
        #[arg(long)]
        radius: Option<i64>,
        /// Seed for the multigrid offsets.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Check rhombic embeddability and integrability of a patch.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Evaluate the discrete exponential on a patch.
    Exp {
        #[arg(long)]
        input: PathBuf,
        /// Real part of the spectral parameter.
        #[arg(long)]
        re: f64,
        /// Imaginary part of the spectral parameter.
        #[arg(long, default_value_t = 0.0)]
        im: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reconstruct a discrete holomorphic payload from its axis data by
    /// contour quadrature and report the deviation. Accuracy degrades with
    /// the lattice depth of the patch (about 1e-6 up to depth 10).
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        /// Name of the function payload to reconstruct.
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Green's function of the patch from its base vertex.
    Green {
        #[arg(long)]
        input: PathBuf,
        /// Keep only vertices whose lattice lift has sup-norm at most this.
        #[arg(long)]
        depth: Option<i64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Discrete logarithm on a patch (choosing the lowest covering sector
    /// per vertex).
    Log {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        depth: Option<i64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Discrete power function on an octant window of the covering.
    Power {
        /// Exponent parameter in (0, 1) (the functions are w^(2g-1), z^(2g)).
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1)]
        sector: i64,
        #[arg(long, default_value_t = 8)]
        depth: i64,
        /// Tiling supplying the slope data; defaults to the square lattice.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fuzz elementary cubes of one equation family for 3D consistency.
    Consistency {
        #[arg(long, value_enum)]
        kind: EquationKind,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Verify the isomonodromic pole structure of the discrete logarithm
    /// (Cauchy-Riemann kind) or power function (Hirota kind).
    Isomonodromy {
        #[arg(long, value_enum)]
        kind: EquationKind,
        #[arg(long, default_value_t = 6)]
        size: i64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Tangent vectors to the power-function family by central differences.
    Tangent {
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
        #[arg(long, default_value_t = 8)]
        window: i64,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Render a document layer to SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        layer: Layer,
        /// Function payload for heatmap/pattern layers.
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn load_patch(path: &PathBuf) -> Result<(TilingDocument, QuadGraph, SlopeData), Error> {
    let doc = TilingDocument::load(path)?;
    let (graph, slopes) = doc.to_graph()?;
    let slopes = slopes.ok_or_else(|| Error::MissingPayload("slopes".into()))?;
    Ok((doc, graph, slopes))
}

/// Print to stdout, treating a closed pipe as a silent success.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn emit_json(value: serde_json::Value) {
    emit(&serde_json::to_string_pretty(&value).unwrap());
}

fn emit_vertex_map(
    doc: &mut TilingDocument,
    name: &str,
    values: &VertexFunction,
    output: &Option<PathBuf>,
) -> Result<(), Error> {
    doc.insert_function(name, values, None);
    match output {
        Some(path) => doc.save(path)?,
        None => {
            let map: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(v, z)| (v.to_string(), json!([z.re, z.im])))
                .collect();
            emit(&serde_json::to_string_pretty(&json!({ name: map })).unwrap());
        }
    }
    Ok(())
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            kind,
            size,
            radius,
            seed,
            output,
        } => {
            let patch = match kind {
                TilingKind::Square => match (size, radius) {
                    (Some(s), None) => tiling::square_patch(s, s)?,
                    (None, Some(r)) => tiling::square_patch_radius(r)?,
                    _ => tiling::square_patch(10, 10)?,
                },
                TilingKind::DualKagome => tiling::dual_kagome_patch(radius.or(size).unwrap_or(5))?,
                TilingKind::Penrose => {
                    let (patch, retries) = tiling::penrose_patch(radius.or(size).unwrap_or(8), seed)?;
                    if retries > 0 {
                        eprintln!("note: re-jittered multigrid offsets {retries} time(s)");
                    }
                    patch
                }
            };
            let p = Realization::from_graph(&patch)?;
            let labeling = labeling_from_realization(&patch, &p)?;
            let slopes = SlopeData::from_labeling(&labeling)?;
            TilingDocument::from_graph(&patch, Some(&slopes)).save(&output)?;
            Ok(0)
        }
        Command::Check {
            input,
            tolerance,
            report,
        } => {
            let (_, graph, slopes) = load_patch(&input)?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let weights = weights_from_labeling(&graph, &labeling)?;
            let ks = check_rhombic_embeddable(&graph);
            let (integrable, worst) = check_integrability(&graph, &weights, tolerance);
            let x0 = tiling::base_vertex(&graph)?;
            let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
            let lift_ok = check_lift_faces(&graph, &lift).is_ok();
            let pass = ks.embeddable && integrable && lift_ok;
            match report.format {
                Format::Json => emit_json(
                    json!({
                        "embeddable": ks.embeddable,
                        "defects": ks.defects.len(),
                        "integrable": integrable,
                        "integrability_defect": worst,
                        "lift_faces_ok": lift_ok,
                        "strips": ks.strips.len(),
                    })
                ),
                Format::Text => {
                    println!("embeddable:        {}", ks.embeddable);
                    println!("strips:            {}", ks.strips.len());
                    println!("integrable:        {integrable} (defect {worst:.3e})");
                    println!("lift faces ok:     {lift_ok}");
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Exp {
            input,
            re,
            im,
            output,
        } => {
            let (mut doc, graph, slopes) = load_patch(&input)?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let x0 = tiling::base_vertex(&graph)?;
            let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
            let values = exponential_on_patch(&lift, C64::new(re, im), &slopes)?;
            emit_vertex_map(&mut doc, "exp", &values, &output)?;
            Ok(0)
        }
        Command::Reconstruct {
            input,
            function,
            tolerance,
            report,
        } => {
            let (doc, graph, slopes) = load_patch(&input)?;
            let f = doc.function(&function)?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let x0 = tiling::base_vertex(&graph)?;
            let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
            let known = lift
                .iter()
                .filter_map(|(v, n)| f.get(v).map(|&z| (n.clone(), z)))
                .collect();
            let ext = extend_to_hull(&known, slopes.labels(), 1e-7)?;
            let rec = integral_reconstruct(&ext, &slopes, &QuadratureSpec::default())?;
            match report.format {
                Format::Json => emit_json(
                    json!({
                        "max_error": rec.max_error,
                        "series_terms": rec.series_terms,
                        "growth_rate": rec.growth_rate,
                    })
                ),
                Format::Text => {
                    println!("max reconstruction error: {:.3e}", rec.max_error);
                    println!("series terms:             {:?}", rec.series_terms);
                    println!("growth rate estimate:     {:.4}", rec.growth_rate);
                }
            }
            Ok(if rec.max_error <= tolerance { 0 } else { 1 })
        }
        Command::Green {
            input,
            depth,
            output,
        } => {
            let (mut doc, graph, slopes) = load_patch(&input)?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let x0 = tiling::base_vertex(&graph)?;
            let mut values = greens_function(&graph, &labeling, &slopes, x0)?;
            if let Some(depth) = depth {
                let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
                values.retain(|v, _| lift[v].iter().all(|c| c.abs() <= depth));
            }
            emit_vertex_map(&mut doc, "green", &values, &output)?;
            Ok(0)
        }
        Command::Log {
            input,
            depth,
            output,
        } => {
            let (mut doc, graph, slopes) = load_patch(&input)?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let x0 = tiling::base_vertex(&graph)?;
            let mut values = discrete_log_on_patch(&graph, &labeling, &slopes, x0)?;
            if let Some(depth) = depth {
                let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
                values.retain(|v, _| lift[v].iter().all(|c| c.abs() <= depth));
            }
            emit_vertex_map(&mut doc, "log", &values, &output)?;
            Ok(0)
        }
        Command::Power {
            gamma,
            sector,
            depth,
            input,
            output,
        } => {
            let params = match PowerParameters::new(gamma) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(2);
                }
            };
            let slopes = match input {
                Some(path) => load_patch(&path)?.2,
                None => SlopeData::from_representatives(vec![
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 1.0),
                ])?,
            };
            let eps = slopes.signs(sector);
            let mut power = DiscretePower::new(slopes.clone(), params);
            let w = power.octant_window_w(sector, depth)?;
            let z = power.octant_window_z(sector, depth)?;
            let entries: Vec<serde_json::Value> = w
                .brick()
                .points()
                .map(|u| {
                    let n: Vec<i64> = u.iter().zip(&eps).map(|(&x, &e)| x * e as i64).collect();
                    let wv = w.value(&u);
                    let zv = z.value(&u);
                    json!({ "n": n, "w": [wv.re, wv.im], "z": [zv.re, zv.im] })
                })
                .collect();
            let out = json!({ "gamma": gamma, "sector": sector, "values": entries });
            match output {
                Some(path) => std::fs::write(path, serde_json::to_string_pretty(&out).unwrap())?,
                None => emit(&serde_json::to_string_pretty(&out).unwrap()),
            }
            Ok(0)
        }
        Command::Consistency {
            kind,
            trials,
            seed,
            tolerance,
            report,
        } => {
            let system = match kind {
                EquationKind::CauchyRiemann => SystemKind::CauchyRiemann,
                EquationKind::CrossRatio => SystemKind::CrossRatio,
                EquationKind::Hirota => SystemKind::Hirota,
            };
            let mut rng = SplitMix64::new(seed);
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let vals: Vec<C64> = (0..4)
                    .map(|_| rng.complex_box() + C64::new(2.0, 2.0))
                    .collect();
                let a0 = rng.unit();
                let mut a1 = rng.unit();
                while (a1 - a0).norm() < 0.1 || (a1 + a0).norm() < 0.1 {
                    a1 = rng.unit();
                }
                let l = rng.complex_box() * 3.0 + C64::new(4.0, 0.0);
                let vertical = if matches!(system, SystemKind::CrossRatio) {
                    l * l
                } else {
                    l
                };
                let r = check_3d_consistency(
                    system, vals[0], vals[1], vals[2], vals[3], a0, a1, vertical,
                )?;
                worst = worst.max(r.deviation);
            }
            match report.format {
                Format::Json => emit_json(
                    json!({ "trials": trials, "max_deviation": worst, "tolerance": tolerance })
                ),
                Format::Text => println!("max deviation over {trials} cubes: {worst:.3e}"),
            }
            Ok(if worst <= tolerance { 0 } else { 1 })
        }
        Command::Isomonodromy {
            kind,
            size,
            gamma,
            tolerance,
            report,
        } => {
            let (iso_kind, window, labels) = match kind {
                EquationKind::Hirota => {
                    let params = match PowerParameters::new(gamma) {
                        Ok(p) => p,
                        Err(e) => {
                            eprintln!("error: {e}");
                            return Ok(2);
                        }
                    };
                    let slopes = SlopeData::from_representatives(vec![
                        C64::new(1.0, 0.0),
                        C64::new(0.0, 1.0),
                    ])?;
                    let mut power = DiscretePower::new(slopes.clone(), params);
                    (
                        IsomonodromyKind::Hirota { gamma },
                        power.octant_window_w(1, size + 1)?,
                        slopes.labels().to_vec(),
                    )
                }
                _ => {
                    let slopes = SlopeData::from_representatives(
                        (0..3)
                            .map(|k| {
                                C64::from_polar(
                                    1.0,
                                    (2 * k + 1) as f64 * std::f64::consts::PI / 6.0,
                                )
                            })
                            .collect(),
                    )?;
                    let mut log = DiscreteLog::new(slopes.clone());
                    (
                        IsomonodromyKind::CauchyRiemann,
                        log.octant_window(1, size + 1)?,
                        slopes.labels().to_vec(),
                    )
                }
            };
            let lambdas =
                isoradial::num::lambda_samples(2 * labels.len() + 8, 3.0, 20_260_808);
            let rep = verify_isomonodromy(iso_kind, &window, &labels, &lambdas)?;
            match report.format {
                Format::Json => emit(&serde_json::to_string_pretty(&rep).unwrap()),
                Format::Text => {
                    println!("max deviation:       {:.3e}", rep.max_deviation);
                    println!("constraint residual: {:.3e}", rep.constraint_residual);
                    println!("structure defect:    {:.3e}", rep.structure_defect);
                }
            }
            Ok(if rep.max_deviation <= tolerance && rep.constraint_residual <= 1e-10 {
                0
            } else {
                1
            })
        }
        Command::Tangent {
            gamma,
            h,
            window,
            tolerance,
            report,
        } => {
            if !(gamma > 0.0 && gamma < 1.0) {
                eprintln!("error: gamma must lie strictly inside (0, 1)");
                return Ok(2);
            }
            let slopes =
                SlopeData::from_representatives(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)])?;
            let rep = tangent_check(&slopes, gamma, h, window)?;
            match report.format {
                Format::Json => emit(&serde_json::to_string_pretty(&rep).unwrap()),
                Format::Text => {
                    println!("f residual:     {:.3e}", rep.f_residual);
                    println!("g residual:     {:.3e}", rep.g_residual);
                    println!("pairing defect: {:.3e}", rep.pairing_defect);
                    println!("parity defect:  {:.3e}", rep.parity_defect);
                    if let Some(err) = rep.log_match_error {
                        println!("log match:      {err:.3e}");
                    }
                    println!("h ratio:        {:.2}", rep.richardson_ratio);
                }
            }
            let pass = match rep.log_match_error {
                Some(err) => err <= tolerance,
                None => true,
            };
            Ok(if pass { 0 } else { 1 })
        }
        Command::Render {
            input,
            layer,
            function,
            output,
        } => {
            let doc = TilingDocument::load(&input)?;
            let svg = render_svg(&doc, layer, function.as_deref())?;
            std::fs::write(output, svg)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
