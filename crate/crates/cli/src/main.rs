use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use zeroset::approx::{approximate_with_certificate, DEFAULT_DMAX, DEFAULT_SAFETY};
use zeroset::condition::{self, SingularityKind};
use zeroset::families::{circle_base, growth_scan};
use zeroset::globalize::{globalize_pipeline, GROWTH_SAMPLES};
use zeroset::reach::{defining_function, verify_condition_bounds, Hypersurface};
use zeroset::report::{to_json, with_provenance, Provenance};
use zeroset::topology::{
    critical_signature, extract_zero_set, isotopy_signature_equal, perturbation_stability_test, to_csv,
    to_svg, zero_set_signature, SvgLayer,
};
use zeroset::{Disk, Error, ScalarField};

/// Condition numbers, certified polynomial approximation and zero-set
/// topology for smooth fields on a disk.
#[derive(Parser)]
#[command(name = "zeroset", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant distance delta and condition number kappa.
    Condition {
        #[command(flatten)]
        field: FieldArgs,
        /// Norm order; defaults to r + 1.
        #[arg(long)]
        ell: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Certified polynomial approximation with a topology comparison.
    Approximate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = DEFAULT_SAFETY)]
        safety: f64,
        #[arg(long, default_value_t = DEFAULT_DMAX)]
        dmax: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Reach-based defining function of a primitive hypersurface.
    ReachEq {
        /// circle:cx,cy,r | ellipse:a,b | torus:r,R
        #[arg(long)]
        surface: String,
        /// cx,cy[,cz],R
        #[arg(long)]
        disk: String,
        #[arg(long)]
        resolution: Option<f64>,
        /// Skip the second-order condition number.
        #[arg(long)]
        skip_kappa2: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Extend a disk-certified polynomial to a global one.
    Globalize {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = DEFAULT_DMAX)]
        dmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Betti growth of replicated circle bumps.
    FamilyScan {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 8])]
        m: Vec<usize>,
        #[arg(long, default_value = "0,0,2")]
        disk: String,
        #[command(flatten)]
        out: Output,
    },
    /// Random bump perturbations below delta.
    StabilityTest {
        #[command(flatten)]
        field: FieldArgs,
        /// C^{r+1} size of each bump; defaults to delta / 2.
        #[arg(long)]
        magnitude: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Expression in x1..xn, or a primitive such as circle:0,0,0.5.
    #[arg(long)]
    field: String,
    /// cx,cy[,cz],R
    #[arg(long)]
    disk: String,
    #[arg(long, default_value = "hypersurface")]
    kind: String,
    #[arg(long)]
    resolution: Option<f64>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Degenerate => 2,
            Error::BudgetExhausted { .. } => 3,
            Error::CheckFailed { .. } => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn parse_disk(text: &str) -> Result<Disk, Failure> {
    let parts = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("bad --disk `{text}`: {e}")))?;
    if !(2..=4).contains(&parts.len()) {
        return Err(usage(format!("--disk expects cx[,cy[,cz]],R, got `{text}`")));
    }
    let (center, radius) = parts.split_at(parts.len() - 1);
    Ok(Disk::new(center, radius[0])?)
}

fn parse_field(text: &str, n: usize) -> Result<ScalarField, Failure> {
    if let Some((head, _)) = text.split_once(':') {
        if matches!(head, "circle" | "ellipse" | "torus") {
            let surface: Hypersurface = text.parse()?;
            if surface.n() != n {
                return Err(usage(format!("{text} lives in dimension {}, disk in {n}", surface.n())));
            }
            return Ok(defining_function(surface));
        }
    }
    Ok(ScalarField::parse(text, n)?)
}

struct Setup {
    f: ScalarField,
    disk: Disk,
    kind: SingularityKind,
    h: f64,
}

fn setup(a: &FieldArgs) -> Result<Setup, Failure> {
    let disk = parse_disk(&a.disk)?;
    let f = parse_field(&a.field, disk.n)?;
    let kind: SingularityKind = a.kind.parse()?;
    let h = a.resolution.unwrap_or_else(|| disk.default_resolution());
    if h.is_nan() || h <= 0.0 {
        return Err(usage("--resolution must be positive"));
    }
    Ok(Setup { f, disk, kind, h })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(value: Value, out: &Output) -> Result<(), Failure> {
    let text = to_json(&value).map_err(|e| usage(e.to_string()))?;
    // A closed pipe (e.g. `| head`) is not an error for a report writer.
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = &out.json {
        write(path, &format!("{text}\n"))?;
    }
    Ok(())
}

fn attach<T: serde::Serialize>(value: &T, p: &Provenance) -> Result<Value, Failure> {
    with_provenance(value, p).map_err(|e| usage(e.to_string()))
}

fn cmd_condition(a: &FieldArgs, ell: Option<usize>, out: &Output) -> Outcome {
    let s = setup(a)?;
    let ell = ell.unwrap_or(s.kind.r() + 1);
    let report = condition::kappa(&s.f, &s.disk, ell, s.kind, s.h)?;
    let prov = Provenance::new().resolution("grid", s.h);
    emit(attach(&report, &prov)?, out)?;
    if let Some(path) = &out.svg {
        let c = extract_zero_set(&s.f, &s.disk, s.h)?;
        write(path, &to_svg(&s.disk, &[SvgLayer { contours: &c, color: "black", label: "Z(f)" }]))?;
    }
    Ok(if report.delta > 0.0 { 0 } else { 2 })
}

fn cmd_approximate(a: &FieldArgs, safety: f64, dmax: usize, out: &Output) -> Outcome {
    let s = setup(a)?;
    let (p, cert) = approximate_with_certificate(&s.f, &s.disk, s.kind, safety, dmax, s.h)?;
    let pf = ScalarField::polynomial(p.clone());
    let (equal, sig_f, sig_p) = match s.kind {
        SingularityKind::Hypersurface => {
            let sf = zero_set_signature(&s.f, &s.disk, s.h)?;
            let sp = zero_set_signature(&pf, &s.disk, s.h)?;
            (isotopy_signature_equal(&sf, &sp), json!(sf), json!(sp))
        }
        SingularityKind::CriticalPoints => {
            let sf = critical_signature(&s.f, &s.disk, s.h)?;
            let sp = critical_signature(&pf, &s.disk, s.h)?;
            (sf == sp, json!(sf), json!(sp))
        }
    };
    let value = json!({
        "certificate": cert,
        "polynomial": p.to_string(),
        "signature_f": sig_f,
        "signature_p": sig_p,
        "signatures_equal": equal,
    });
    emit(attach(&value, &Provenance::new().resolution("grid", s.h))?, out)?;
    if let Some(path) = &out.svg {
        let cf = extract_zero_set(&s.f, &s.disk, s.h)?;
        let cp = extract_zero_set(&pf, &s.disk, s.h)?;
        let layers = [
            SvgLayer { contours: &cf, color: "black", label: "Z(f)" },
            SvgLayer { contours: &cp, color: "crimson", label: "Z(p)" },
        ];
        write(path, &to_svg(&s.disk, &layers))?;
    }
    if let Some(path) = &out.csv {
        write(path, &to_csv(&extract_zero_set(&pf, &s.disk, s.h)?))?;
    }
    Ok(if equal { 0 } else { 4 })
}

fn cmd_reach_eq(surface: &str, disk: &str, h: Option<f64>, skip_kappa2: bool, out: &Output) -> Outcome {
    let disk = parse_disk(disk)?;
    let z: Hypersurface = surface.parse()?;
    let report = verify_condition_bounds(z, &disk, h, !skip_kappa2)?;
    emit(attach(&report, &Provenance::new().resolution("grid", report.resolution))?, out)?;
    if let Some(path) = &out.svg {
        if disk.n == 2 {
            let c = extract_zero_set(&defining_function(z), &disk, report.resolution)?;
            write(path, &to_svg(&disk, &[SvgLayer { contours: &c, color: "black", label: surface }]))?;
        }
    }
    Ok(if report.passed() { 0 } else { 4 })
}

fn cmd_globalize(a: &FieldArgs, dmax: usize, seed: u64, out: &Output) -> Outcome {
    let s = setup(a)?;
    if s.kind != SingularityKind::Hypersurface {
        return Err(usage("globalize applies to hypersurface zero sets"));
    }
    let (p, report) = globalize_pipeline(&s.f, &s.disk, dmax, GROWTH_SAMPLES, seed)?;
    let value = json!({ "pipeline": report, "polynomial": p.to_string() });
    let prov = Provenance::new()
        .resolution("grid", s.disk.default_resolution())
        .resolution("growth_constant", report.growth.resolution)
        .seed("growth_constant", seed);
    emit(attach(&value, &prov)?, out)?;
    if let Some(path) = &out.svg {
        let wide = s.disk.with_radius(1.5 * s.disk.radius)?;
        let c = extract_zero_set(&ScalarField::polynomial(p), &wide, wide.default_resolution())?;
        write(path, &to_svg(&wide, &[SvgLayer { contours: &c, color: "black", label: "Z(p)" }]))?;
    }
    Ok(if report.passed() { 0 } else { 4 })
}

fn cmd_family_scan(ms: &[usize], disk: &str, out: &Output) -> Outcome {
    let disk = parse_disk(disk)?;
    let base = circle_base(disk.n)?;
    let table = growth_scan(&base, &disk, ms)?;
    let mut prov = Provenance::new();
    for row in &table.rows {
        prov = prov.resolution(&format!("m={}", row.m), row.resolution);
    }
    emit(attach(&table, &prov)?, out)?;
    match &out.csv {
        Some(path) => write(path, &table.to_csv())?,
        None => {
            let _ = write!(std::io::stderr(), "{}", table.to_csv());
        }
    }
    Ok(0)
}

fn cmd_stability(a: &FieldArgs, magnitude: Option<f64>, trials: usize, seed: u64, out: &Output) -> Outcome {
    let s = setup(a)?;
    let magnitude = match magnitude {
        Some(m) => m,
        None => 0.5 * condition::delta(&s.f, &s.disk, s.kind, s.h)?.delta,
    };
    let report = perturbation_stability_test(&s.f, &s.disk, s.kind, magnitude, trials, seed, s.h)?;
    let prov = Provenance::new().resolution("grid", s.h).seed("bumps", seed);
    emit(attach(&report, &prov)?, out)?;
    Ok(if report.failures == 0 { 0 } else { 4 })
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Condition { field, ell, out } => cmd_condition(field, *ell, out),
        Command::Approximate { field, safety, dmax, out } => cmd_approximate(field, *safety, *dmax, out),
        Command::ReachEq { surface, disk, resolution, skip_kappa2, out } => {
            cmd_reach_eq(surface, disk, *resolution, *skip_kappa2, out)
        }
        Command::Globalize { field, dmax, seed, out } => cmd_globalize(field, *dmax, *seed, out),
        Command::FamilyScan { m, disk, out } => cmd_family_scan(m, disk, out),
        Command::StabilityTest { field, magnitude, trials, seed, out } => {
            cmd_stability(field, *magnitude, *trials, *seed, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
