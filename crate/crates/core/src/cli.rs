//! Batch front end behind the `charvar` binary.
//!
//! Every command draws sample `i` from `stream_rng(seed, i)`, runs samples on
//! a rayon pool (capped by `CHARVAR_THREADS`) and writes records in index
//! order. Exit codes: 0 success, 2 usage or validation error, 3 failed
//! property check.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::boundary_maps::{boundary, diagram_check, dim_estimate, SurfaceData};
use crate::error::{Error, Result};
use crate::generic_reduction::{
    eta_into, eta_inverse_into, fingerprint, TorusContext, DEFAULT_DEPTH,
};
use crate::kempf_ness::{kn_flow, KnPoint, PROBE_MAX_ITER, PROBE_TOL};
use crate::matrix_core::spectral::spectrum_defect;
use crate::matrix_core::{
    polar_decompose, random_group_element, random_unitary, stream_rng, GroupElement, StreamRng,
    UnitaryElement, C64,
};
use crate::retraction::{
    build_retraction, evaluate_path, random_compact_tuple, random_regular_torus_element,
    random_rep_tuple, ParabolicData,
};
use crate::trace_coords::{
    fricke_on_traces, sl2_lift, sl2_seven_traces, sl2_trace_triple, sl3_nine_traces,
    sl3_transpose_involution, FrickeVariant, Group,
};

/// Stream index reserved for data shared by all samples of a run.
const SHARED_STREAM: u64 = u64::MAX;
const EXIT_OK: i32 = 0;
const EXIT_INVALID: i32 = 2;
const EXIT_PROPERTY: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Sl2,
    Sl3,
}

impl GroupArg {
    fn n(self) -> usize {
        match self {
            GroupArg::Sl2 => 2,
            GroupArg::Sl3 => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "charvar",
    version,
    about = "Experiments on parabolic character varieties of free groups"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "sl2")]
    group: GroupArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Tolerance of the property check (command-specific default).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of parabolic factors.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Number of free factors.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    genus: usize,
    /// Punctures `b`; defaults to `m + 1`.
    #[arg(long, global = true)]
    punctures: Option<usize>,
    /// Radius of random group elements.
    #[arg(long, global = true, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Random tuples on the orbits of random regular h.
    Sample,
    /// Polar decompositions of random elements.
    Polar,
    /// Retraction paths of random tuples on a t-grid.
    Retract {
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Kempf-Ness descent from conjugated compact tuples.
    KnFlow {
        #[arg(long, default_value_t = PROBE_MAX_ITER)]
        max_iter: usize,
    },
    /// Trace coordinates of random triples (SL2) or pairs (SL3).
    Traces,
    /// Vanishing of both seven-trace cubics on random SL2 triples.
    FrickeCheck,
    /// Round trip of trace triples through the SL2 lift.
    Lift,
    /// Boundary vectors of random tuples on a punctured surface.
    Boundary,
    /// Commutativity of the boundary diagram on random tuples.
    DiagramCheck,
    /// Dimension count for a parabolic character variety.
    Dim {
        /// Use the identity as the first conjugacy class.
        #[arg(long)]
        central_first: bool,
    },
    /// Witnesses for the reduction to torus quotients.
    EtaCheck {
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Effect of the SL3 transpose involution on the nine traces.
    TwoToOne,
}

struct Outcome {
    summary: Value,
    records: Vec<Value>,
    passed: bool,
}

impl Outcome {
    fn new(summary: Value, records: Vec<Value>, passed: bool) -> Self {
        Self {
            summary,
            records,
            passed,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INVALID;
        }
    };
    let outcome = match pool.install(|| execute(&cli)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Err(e) = write_output(&cli, &outcome) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if outcome.passed {
        EXIT_OK
    } else {
        eprintln!("property check failed");
        EXIT_PROPERTY
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CHARVAR_THREADS") {
        let k: usize = v
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| format!("CHARVAR_THREADS must be a positive integer, got {v:?}"))?;
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| e.to_string())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sample => "sample",
        Command::Polar => "polar",
        Command::Retract { .. } => "retract",
        Command::KnFlow { .. } => "kn-flow",
        Command::Traces => "traces",
        Command::FrickeCheck => "fricke-check",
        Command::Lift => "lift",
        Command::Boundary => "boundary",
        Command::DiagramCheck => "diagram-check",
        Command::Dim { .. } => "dim",
        Command::EtaCheck { .. } => "eta-check",
        Command::TwoToOne => "two-to-one",
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    if cli.samples == 0 {
        return Err(Error::ShapeMismatch("--samples must be positive".into()));
    }
    if !(cli.radius.is_finite() && cli.radius >= 0.0) {
        return Err(Error::NonFinite);
    }
    match cli.command {
        Command::Sample => cmd_sample(cli),
        Command::Polar => cmd_polar(cli),
        Command::Retract { steps } => cmd_retract(cli, steps),
        Command::KnFlow { max_iter } => cmd_kn_flow(cli, max_iter),
        Command::Traces => cmd_traces(cli),
        Command::FrickeCheck => cmd_fricke_check(cli),
        Command::Lift => cmd_lift(cli),
        Command::Boundary => cmd_boundary(cli),
        Command::DiagramCheck => cmd_diagram_check(cli),
        Command::Dim { central_first } => cmd_dim(cli, central_first),
        Command::EtaCheck { depth } => cmd_eta_check(cli, depth),
        Command::TwoToOne => cmd_two_to_one(cli),
    }
}

/// Runs `f(i, rng_i)` for every sample in parallel, in index order.
fn per_sample<T, F>(cli: &Cli, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> Result<T> + Sync,
{
    (0..cli.samples as u64)
        .into_par_iter()
        .map(|i| f(i, &mut stream_rng(cli.seed, i)))
        .collect()
}

fn shared_rng(cli: &Cli) -> StreamRng {
    stream_rng(cli.seed, SHARED_STREAM)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn require_group(cli: &Cli, g: GroupArg) -> Result<()> {
    if cli.group != g {
        return Err(Error::InvalidDimension(cli.group.n()));
    }
    Ok(())
}

fn random_pardata(cli: &Cli, m: usize) -> Result<Arc<ParabolicData>> {
    Ok(Arc::new(ParabolicData::random_regular(
        &mut shared_rng(cli),
        cli.group.n(),
        m,
    )?))
}

fn surface(cli: &Cli) -> Result<SurfaceData> {
    let m = cli.m.unwrap_or(2);
    let b = cli.punctures.unwrap_or(m + 1);
    match cli.n {
        Some(n) => SurfaceData::new(cli.genus, b, m, n),
        None => SurfaceData::with_free_count(cli.genus, b, m),
    }
}

fn cmd_sample(cli: &Cli) -> Result<Outcome> {
    let pd = random_pardata(cli, cli.m.unwrap_or(2))?;
    let n = cli.n.unwrap_or(1);
    let records = per_sample(cli, |i, rng| {
        let t = random_rep_tuple(rng, &pd, n, cli.radius);
        Ok(json!({ "index": i, "tuple": to_value(&t) }))
    })?;
    Ok(Outcome::new(
        json!({ "h": to_value(pd.as_ref()), "n": n }),
        records,
        true,
    ))
}

fn cmd_polar(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(1e-10);
    let rows = per_sample(cli, |i, rng| {
        let g = random_group_element(rng, cli.group.n(), cli.radius);
        let (k, p) = polar_decompose(&g)?;
        let back = *k.mat() * crate::matrix_core::exp_hermitian(p.mat());
        let err = back.dist(g.mat()) / g.mat().frobenius_norm();
        Ok((
            err,
            json!({ "index": i, "g": to_value(&g), "k": to_value(&k), "p": to_value(&p), "error": err }),
        ))
    })?;
    let worst = max_of(rows.iter().map(|r| r.0));
    Ok(Outcome::new(
        json!({ "max_error": worst, "tol": tol }),
        rows.into_iter().map(|r| r.1).collect(),
        worst <= tol,
    ))
}

fn cmd_retract(cli: &Cli, steps: usize) -> Result<Outcome> {
    if steps < 2 {
        return Err(Error::ShapeMismatch("--steps must be at least 2".into()));
    }
    let tol = cli.tol.unwrap_or(1e-8);
    let pd = random_pardata(cli, cli.m.unwrap_or(2))?;
    let n = cli.n.unwrap_or(1);
    let grid: Vec<f64> = (0..steps).map(|j| j as f64 / (steps - 1) as f64).collect();
    let rows = per_sample(cli, |i, rng| {
        let t_in = random_rep_tuple(rng, &pd, n, cli.radius);
        let path = build_retraction(&t_in)?;
        let mut points = Vec::with_capacity(grid.len());
        let mut compact_defect = 0.0;
        let mut spectrum = 0.0f64;
        for &t in &grid {
            let p = evaluate_path(&path, t);
            for (y, h) in p.orbit().iter().zip(pd.h()) {
                spectrum = spectrum.max(spectrum_defect(y.mat(), h.mat()));
            }
            if t == 0.0 {
                compact_defect = p.unitary_defect();
            }
            points.push(json!({ "t": t, "tuple": to_value(&p) }));
        }
        let end_error = evaluate_path(&path, 1.0).distance(&t_in);
        let rec = json!({
            "index": i,
            "unitary_defect_at_0": compact_defect,
            "spectrum_defect": spectrum,
            "error_at_1": end_error,
            "path": points,
        });
        Ok(((compact_defect, spectrum, end_error), rec))
    })?;
    let unitary = max_of(rows.iter().map(|r| r.0 .0));
    let spectrum = max_of(rows.iter().map(|r| r.0 .1));
    let end = max_of(rows.iter().map(|r| r.0 .2));
    Ok(Outcome::new(
        json!({ "h": to_value(pd.as_ref()), "n": n, "max_unitary_defect_at_0": unitary,
                "max_spectrum_defect": spectrum, "max_error_at_1": end, "tol": tol }),
        rows.into_iter().map(|r| r.1).collect(),
        unitary <= tol && spectrum <= 1e-7 && end <= 1e-9,
    ))
}

fn cmd_kn_flow(cli: &Cli, max_iter: usize) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(PROBE_TOL);
    let pd = random_pardata(cli, cli.m.unwrap_or(2))?;
    let n = cli.n.unwrap_or(1);
    let rows = per_sample(cli, |i, rng| {
        let compact = random_compact_tuple(rng, &pd, n);
        let g = random_group_element(rng, cli.group.n(), cli.radius);
        let start = KnPoint::from_tuple(&compact.conjugated_by(&g))?;
        let (_, report) = kn_flow(&start, &pd, tol, max_iter)?;
        let monotone = report.f_trace.windows(2).all(|w| w[1] <= w[0]);
        let rec = json!({
            "index": i,
            "F_start": report.f_trace[0],
            "F_end": *report.f_trace.last().expect("trace has the start value"),
            "residual": report.residual_norm,
            "iters": report.iterations,
            "status": to_value(&report.status),
            "monotone": monotone,
        });
        Ok((monotone, rec))
    })?;
    let passed = rows.iter().all(|r| r.0);
    let converged = rows.iter().filter(|r| r.1["status"] == "Converged").count();
    Ok(Outcome::new(
        json!({ "h": to_value(pd.as_ref()), "n": n, "tol": tol, "converged": converged,
                "samples": rows.len() }),
        rows.into_iter().map(|r| r.1).collect(),
        passed,
    ))
}

fn cmd_traces(cli: &Cli) -> Result<Outcome> {
    let records = per_sample(cli, |i, rng| {
        let n = cli.group.n();
        let tv = match cli.group {
            GroupArg::Sl2 => {
                let g: Vec<_> = (0..3)
                    .map(|_| random_group_element(rng, n, cli.radius))
                    .collect();
                sl2_seven_traces(&g[0], &g[1], &g[2])
            }
            GroupArg::Sl3 => {
                let g: Vec<_> = (0..2)
                    .map(|_| random_group_element(rng, n, cli.radius))
                    .collect();
                sl3_nine_traces(&g[0], &g[1])
            }
        };
        Ok(json!({ "index": i, "traces": to_value(&tv) }))
    })?;
    Ok(Outcome::new(json!({}), records, true))
}

fn cmd_fricke_check(cli: &Cli) -> Result<Outcome> {
    require_group(cli, GroupArg::Sl2)?;
    let tol = cli.tol.unwrap_or(1e-8);
    let radius = cli.radius.min(1.5);
    let variants = [
        (FrickeVariant::Corrected, "corrected"),
        (FrickeVariant::Printed, "paper"),
    ];
    let rows = per_sample(cli, |_, rng| {
        let g: Vec<_> = (0..3)
            .map(|_| random_group_element(rng, 2, radius))
            .collect();
        let tv = sl2_seven_traces(&g[0], &g[1], &g[2]);
        let scale = (1.0 + tv.max_abs()).powi(3);
        Ok(variants.map(|(v, _)| {
            let p = fricke_on_traces(&tv, v).norm();
            (p, p / scale)
        }))
    })?;
    let id = GroupElement::identity(2);
    let at_identity = sl2_seven_traces(&id, &id, &id);
    let mut records = Vec::new();
    let mut passed = true;
    for (k, (variant, label)) in variants.iter().enumerate() {
        let max_abs = max_of(rows.iter().map(|r| r[k].0));
        let max_scaled = max_of(rows.iter().map(|r| r[k].1));
        let p0 = fricke_on_traces(&at_identity, *variant);
        if *variant == FrickeVariant::Corrected {
            passed = max_scaled <= tol;
        }
        records.push(json!({
            "variant": label,
            "samples": rows.len(),
            "max_abs": max_abs,
            "max_scaled": max_scaled,
            "at_identity": [p0.re, p0.im],
        }));
    }
    Ok(Outcome::new(
        json!({ "tol": tol, "radius": radius }),
        records,
        passed,
    ))
}

fn cmd_lift(cli: &Cli) -> Result<Outcome> {
    require_group(cli, GroupArg::Sl2)?;
    let tol = cli.tol.unwrap_or(1e-10);
    let rows = per_sample(cli, |i, rng| {
        let mut c = || C64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let v = [c(), c(), c()];
        let (g1, g2) = sl2_lift(v[0], v[1], v[2]);
        let (x, y, z) = sl2_trace_triple(&g1, &g2);
        let err = max_of(
            [x, y, z]
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).norm() / (1.0 + b.norm())),
        );
        let target: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        Ok((err, json!({ "index": i, "target": target, "error": err })))
    })?;
    let worst = max_of(rows.iter().map(|r| r.0));
    Ok(Outcome::new(
        json!({ "max_error": worst, "tol": tol }),
        rows.into_iter().map(|r| r.1).collect(),
        worst <= tol,
    ))
}

fn random_surface_tuple(
    rng: &mut StreamRng,
    n_dim: usize,
    s: &SurfaceData,
    radius: f64,
) -> Vec<GroupElement> {
    (0..s.rank())
        .map(|_| random_group_element(rng, n_dim, radius))
        .collect()
}

fn cmd_boundary(cli: &Cli) -> Result<Outcome> {
    let s = surface(cli)?;
    let records = per_sample(cli, |i, rng| {
        let t = random_surface_tuple(rng, cli.group.n(), &s, cli.radius);
        Ok(json!({ "index": i, "boundary": to_value(&boundary(&t, &s)?) }))
    })?;
    Ok(Outcome::new(
        json!({ "surface": to_value(&s) }),
        records,
        true,
    ))
}

fn cmd_diagram_check(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(1e-12);
    let s = surface(cli)?;
    let rows = per_sample(cli, |i, rng| {
        let t = random_surface_tuple(rng, cli.group.n(), &s, cli.radius);
        let d = diagram_check(&t, &s)?;
        Ok((d, json!({ "index": i, "discrepancy": d })))
    })?;
    let worst = max_of(rows.iter().map(|r| r.0));
    Ok(Outcome::new(
        json!({ "surface": to_value(&s), "max_discrepancy": worst, "tol": tol }),
        rows.into_iter().map(|r| r.1).collect(),
        worst <= tol,
    ))
}

fn cmd_dim(cli: &Cli, central_first: bool) -> Result<Outcome> {
    let m = cli.m.unwrap_or(2);
    let n = cli.n.unwrap_or(0);
    let n_dim = cli.group.n();
    let mut rng = shared_rng(cli);
    let mut h: Vec<UnitaryElement> = (0..m)
        .map(|_| random_regular_torus_element(&mut rng, n_dim, 1e-2))
        .collect();
    if central_first && m > 0 {
        h[0] = UnitaryElement::identity(n_dim);
    }
    let pd = Arc::new(ParabolicData::new(n_dim, h)?);
    let report = dim_estimate(&pd, n, cli.samples, &mut rng)?;
    Ok(Outcome::new(
        json!({ "m": m, "n": n, "central_first": central_first }),
        vec![to_value(&report)],
        central_first || report.matches,
    ))
}

fn cmd_eta_check(cli: &Cli, depth: usize) -> Result<Outcome> {
    if depth == 0 {
        return Err(Error::ShapeMismatch("--depth must be positive".into()));
    }
    let m = cli.m.unwrap_or(1);
    if m == 0 {
        return Err(Error::TooFewFactors(0));
    }
    let n = cli.n.unwrap_or(1);
    let n_dim = cli.group.n();
    let mut rng = shared_rng(cli);
    let ctx = TorusContext::new(random_regular_torus_element(&mut rng, n_dim, 1e-1))?;
    let rest_pd = Arc::new(ParabolicData::random_regular(&mut rng, n_dim, m - 1)?);
    let full = Arc::new(ctx.extend(&rest_pd)?);
    let rows = per_sample(cli, |i, rng| {
        let rest = random_compact_tuple(rng, &rest_pd, n);
        let angles: Vec<f64> = (0..n_dim)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let torus = UnitaryElement::diagonal(&angles).as_group();
        let out = fingerprint(&eta_into(&ctx, &rest, &full)?, None, depth);
        let moved = fingerprint(
            &eta_into(&ctx, &rest.conjugated_by(&torus), &full)?,
            None,
            depth,
        );
        let well_defined = out.max_abs_diff(&moved);

        let w = random_unitary(rng, n_dim).as_group();
        let point = random_compact_tuple(rng, &full, n).conjugated_by(&w);
        let back = eta_into(&ctx, &eta_inverse_into(&ctx, &point, &rest_pd)?, &full)?;
        let round_trip =
            fingerprint(&point, None, depth).max_abs_diff(&fingerprint(&back, None, depth));

        let fin = fingerprint(&rest, Some(&ctx), depth);
        Ok((well_defined, round_trip, fin, out, i))
    })?;
    let mut records = Vec::with_capacity(rows.len());
    let mut injective = true;
    for (k, (wd, rt, fin, fout, i)) in rows.iter().enumerate() {
        let (gap_in, gap_out) = match rows.get(k + 1) {
            Some(next) => (fin.max_abs_diff(&next.2), fout.max_abs_diff(&next.3)),
            None => (0.0, 0.0),
        };
        if gap_in > 1e-4 && gap_out <= 1e-6 {
            injective = false;
        }
        records.push(json!({
            "index": i,
            "well_defined_gap": wd,
            "round_trip_gap": rt,
            "input_gap_to_next": gap_in,
            "output_gap_to_next": gap_out,
        }));
    }
    let wd = max_of(rows.iter().map(|r| r.0));
    let rt = max_of(rows.iter().map(|r| r.1));
    let passed = wd <= cli.tol.unwrap_or(1e-9) && rt <= 1e-6 && injective;
    Ok(Outcome::new(
        json!({ "m": m, "n": n, "x": to_value(ctx.x()), "max_well_defined_gap": wd,
                "max_round_trip_gap": rt, "injective": injective }),
        records,
        passed,
    ))
}

fn cmd_two_to_one(cli: &Cli) -> Result<Outcome> {
    require_group(cli, GroupArg::Sl3)?;
    let tol = cli.tol.unwrap_or(1e-10);
    let rows = per_sample(cli, |i, rng| {
        let g1 = random_group_element(rng, 3, cli.radius);
        let g2 = random_group_element(rng, 3, cli.radius);
        let before = sl3_nine_traces(&g1, &g2);
        let (h1, h2) = sl3_transpose_involution(&g1, &g2);
        let after = sl3_nine_traces(&h1, &h2);
        let fixed = max_of(
            before.values()[..8]
                .iter()
                .zip(&after.values()[..8])
                .map(|(a, b)| (a - b).norm()),
        );
        let t9 = (before.values()[8] - after.values()[8]).norm();
        Ok((
            fixed,
            t9,
            json!({ "index": i, "t1_t8_change": fixed, "t9_change": t9 }),
        ))
    })?;
    let fixed = max_of(rows.iter().map(|r| r.0));
    let moved = rows.iter().filter(|r| r.1 > 1e-4).count() as f64 / rows.len() as f64;
    Ok(Outcome::new(
        json!({ "max_t1_t8_change": fixed, "fraction_t9_changed": moved, "tol": tol }),
        rows.into_iter().map(|r| r.2).collect(),
        fixed <= tol && moved >= 0.99,
    ))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (k, x) in xs.iter().enumerate() {
                flatten(&key(&k.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render_csv(records: &[Value]) -> io::Result<Vec<u8>> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        let map: Map<String, Value> = row
            .into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect();
        w.write_record(
            header
                .iter()
                .map(|k| map.get(k).and_then(Value::as_str).unwrap_or("")),
        )?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

fn write_output(cli: &Cli, outcome: &Outcome) -> io::Result<()> {
    let bytes = match cli.format {
        Format::Json => {
            let doc = json!({
                "command": command_name(&cli.command),
                "group": to_value(&Group::from_dim(cli.group.n()).expect("2 or 3")),
                "seed": cli.seed,
                "samples": cli.samples,
                "passed": outcome.passed,
                "summary": outcome.summary,
                "records": outcome.records,
            });
            let mut s = serde_json::to_vec_pretty(&doc).map_err(io::Error::other)?;
            s.push(b'\n');
            s
        }
        Format::Csv => render_csv(&outcome.records)?,
    };
    match &cli.output {
        Some(path) => File::create(path)?.write_all(&bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()
        }
    }
}
