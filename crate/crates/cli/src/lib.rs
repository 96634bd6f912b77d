//! The `cubecrys` command line.
//!
//! [`dispatch`] runs one invocation and returns its exit code and output
//! instead of touching the process, so tests can drive it directly.
//!
//! Exit codes: 0 when the computation finished (a rejected group is a
//! finished computation), 1 for usage and input errors, 2 when an internal
//! consistency check fails.

pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use cubecrys::boundary::{parse_factors, product_boundary, BoundaryDescriptor, BoundaryError};
use cubecrys::crys::{load_catalog, report_for, CrysError, CrystGroup, GroupFile};
use cubecrys::decide::{is_hyperoctahedral, quick_obstructions, verify_witness, DecideError, Verdict};
use cubecrys::dual::{
    cubes_at, dual_complex, duality_check, is_median_graph, orientation_to_string, DualError, FiniteWallspace,
    WallspaceFile,
};
use cubecrys::exactlin::RatMatrix;
use cubecrys::walls::{
    check_linear_separation, direction_class_count, induced_action_on_rn, sample_pairs, stabilize, WallsError,
};
use serde_json::{json, Value};

use crate::report::{digest, Rendered, Report};

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0} has no hyperoctahedral witness, so there is no witness basis")]
    NoWitness(String),
    #[error(transparent)]
    Crys(#[from] CrysError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Walls(#[from] WallsError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_)
            | CliError::Decide(DecideError::NoConjugator { .. } | DecideError::WitnessCorruption(_))
            | CliError::Walls(WallsError::PropertyViolation { .. } | WallsError::ClassNotPreserved { .. })
            | CliError::Dual(DualError::Disconnected) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cubecrys", version, about = "Exact cubulation of crystallographic groups")]
struct Cli {
    /// Print the JSON report.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print a human-readable summary (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Seed for all sampling.
    #[arg(long, global = true, env = "CUBECRYS_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a group file and report point-group data.
    Validate { file: PathBuf },
    /// Decide whether a group is hyperoctahedral.
    Classify { file: PathBuf },
    /// Build the standard cubulation and its stabilization.
    Cubulate {
        file: PathBuf,
        /// Use the hyperoctahedral basis instead of the lattice basis.
        #[arg(long)]
        use_witness_basis: bool,
        /// Write the stabilized group file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of sample pairs for the linear separation check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Build the dual cube complex of a wallspace file.
    Dual {
        file: PathBuf,
        /// Write the complex file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simplicial boundary of a product, e.g. "Line*Line*HalfLine".
    Boundary { expr: String },
    /// Classify every built-in group.
    Catalog {
        /// Also write each group file into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

/// Runs the command line `args` (including the program name).
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (rendered, String::new()) } else { (String::new(), rendered) };
            return Outcome { code, stdout, stderr, report: None };
        }
    };
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(&cli, command) {
        Ok(Rendered { report, text }) => {
            let stdout = if cli.json { report.to_json() + "\n" } else { text };
            Outcome { code: 0, stdout, stderr: String::new(), report: Some(report) }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n"), report: None },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn load_group(path: &Path) -> Result<(CrystGroup, String), CliError> {
    let text = read(path)?;
    let g = CrystGroup::from_file(&GroupFile::parse(&text)?)?;
    Ok((g, digest(text.as_bytes())))
}

fn run(cli: &Cli, command: Vec<String>) -> Result<Rendered, CliError> {
    let (payload, text, input_digest) = match &cli.command {
        Command::Validate { file } => {
            let (g, d) = load_group(file)?;
            let r = report_for(&g);
            let text = format!(
                "{}: dimension {}, point group of order {}, generator orders {:?}\n",
                r.name, r.dimension, r.point_group_order, r.generator_orders
            );
            (serde_json::to_value(&r).expect("serializable"), text, Some(d))
        }
        Command::Classify { file } => {
            let (g, d) = load_group(file)?;
            let (payload, text) = classify(&g)?;
            (payload, text, Some(d))
        }
        Command::Cubulate { file, use_witness_basis, out, samples } => {
            let (g, d) = load_group(file)?;
            let (payload, text, stabilized) = cubulate(&g, *use_witness_basis, *samples, cli.seed)?;
            if let Some(path) = out {
                write(path, &(stabilized.to_json() + "\n"))?;
            }
            (payload, text, Some(d))
        }
        Command::Dual { file, out } => {
            let text_in = read(file)?;
            let (payload, text, complex) = dual(&text_in)?;
            if let Some(path) = out {
                write(path, &(complex + "\n"))?;
            }
            (payload, text, Some(digest(text_in.as_bytes())))
        }
        Command::Boundary { expr } => {
            let factors = parse_factors(expr)?;
            let b = product_boundary(&factors)?;
            let payload = json!({
                "expression": expr,
                "factors": factors,
                "finite": b.is_finite(),
                "boundary": boundary_value(&b),
            });
            (payload, format!("{expr}: {b}\n"), Some(digest(expr.as_bytes())))
        }
        Command::Catalog { export } => {
            let (payload, text) = catalog(export.as_deref())?;
            (payload, text, None)
        }
    };
    Ok(Rendered { report: Report { command, input_digest, seed: cli.seed, payload }, text })
}

fn boundary_value(b: &BoundaryDescriptor) -> Value {
    match b {
        BoundaryDescriptor::Finite(c) => json!({ "kind": "finite", "complex": c }),
        BoundaryDescriptor::InfiniteDiscrete => json!({ "kind": "infinite-discrete" }),
        BoundaryDescriptor::Join(parts) => {
            json!({ "kind": "join", "parts": parts.iter().map(boundary_value).collect::<Vec<_>>() })
        }
    }
}

fn classify(g: &CrystGroup) -> Result<(Value, String), CliError> {
    let verdict = is_hyperoctahedral(g)?;
    let obstructions = quick_obstructions(g)?;
    let mut text = String::new();
    let body = match &verdict {
        Verdict::Accepted(w) => {
            let residuals = verify_witness(g, w)?;
            if residuals.iter().any(|r| !r.is_zero()) {
                return Err(CliError::Internal(format!("conjugation residual is nonzero for {}", g.name())));
            }
            writeln!(text, "{}: accepted (hyperoctahedral)", g.name()).unwrap();
            writeln!(text, "  conjugator A = {}", w.conjugator).unwrap();
            for (k, s) in w.generator_images.iter().enumerate() {
                writeln!(text, "  iota(generator {}) = {s}", k + 1).unwrap();
            }
            writeln!(text, "  all {} conjugation residuals are zero", residuals.len()).unwrap();
            json!({ "witness": w, "residuals": residuals })
        }
        Verdict::Rejected(cert) => {
            writeln!(text, "{}: rejected ({})", g.name(), cert.reason()).unwrap();
            let detail = serde_json::to_value(cert).expect("serializable");
            writeln!(text, "  certificate: {detail}").unwrap();
            json!({ "certificate": cert })
        }
    };
    let mut payload = json!({
        "group": g.name(),
        "dimension": g.dimension(),
        "point_group_order": g.point_group().order(),
        "verdict": if verdict.is_accepted() { "accepted" } else { "rejected" },
        "obstructions": obstructions,
    });
    payload.as_object_mut().unwrap().extend(body.as_object().unwrap().clone());
    Ok((payload, text))
}

fn cubulate(
    g: &CrystGroup,
    use_witness: bool,
    samples: usize,
    seed: u64,
) -> Result<(Value, String, GroupFile), CliError> {
    let (basis, source) = if use_witness {
        let verdict = is_hyperoctahedral(g)?;
        let w = verdict.witness().ok_or_else(|| CliError::NoWitness(g.name().to_string()))?;
        (w.basis.clone(), "witness")
    } else {
        (g.lattice_vectors(), "lattice")
    };
    let fam = direction_class_count(g, &basis)?;
    let action = induced_action_on_rn(g, &fam)?;
    let separation = if samples > 0 {
        Some(check_linear_separation(g, &fam, &sample_pairs(g.dimension(), samples, seed))?)
    } else {
        None
    };
    let stabilized = stabilize(g)?;
    let stabilized_verdict = is_hyperoctahedral(&stabilized)?;
    let Some(sw) = stabilized_verdict.witness() else {
        return Err(CliError::Internal(format!("stabilization of {} was not accepted", g.name())));
    };
    if !sw.conjugator.is_identity() {
        return Err(CliError::Internal(format!("stabilization of {} needs a nontrivial conjugator", g.name())));
    }
    let generator_images: Vec<_> = g.point_group().generator_indices().iter().map(|&k| action[k].clone()).collect();
    let file = stabilized.to_file();

    let mut text = String::new();
    writeln!(text, "{}: n = {}, N = {} wall classes ({} basis)", g.name(), g.dimension(), fam.class_count(), source)
        .unwrap();
    for (k, c) in fam.classes.iter().enumerate() {
        writeln!(
            text,
            "  class {}: normal {} (base wall {}, point element {})",
            k + 1,
            c.normal,
            c.base + 1,
            c.element
        )
        .unwrap();
    }
    for (k, s) in generator_images.iter().enumerate() {
        writeln!(text, "  generator {} acts on R_N as {s}", k + 1).unwrap();
    }
    if let Some(r) = &separation {
        writeln!(text, "  linear separation holds on {} pairs, worst ratio {}", r.pairs, r.worst_ratio).unwrap();
    }
    writeln!(text, "  stabilized group {} has dimension {} and is accepted", stabilized.name(), stabilized.dimension())
        .unwrap();

    let payload = json!({
        "group": g.name(),
        "dimension": g.dimension(),
        "basis_source": source,
        "class_count": fam.class_count(),
        "family": fam,
        "induced_action": action,
        "generator_images": generator_images,
        "linear_separation": separation,
        "stabilized": file,
        "stabilized_conjugator": sw.conjugator,
    });
    Ok((payload, text, file))
}

fn dual(text_in: &str) -> Result<(Value, String, String), CliError> {
    let ws = WallspaceFile::parse(text_in)?.to_wallspace()?;
    let c = dual_complex(&FiniteWallspace::Geometric(ws))?;
    let median = is_median_graph(&c);
    let duality = duality_check(&c);
    if !median || !duality {
        return Err(CliError::Internal(format!("median graph: {median}, duality: {duality}")));
    }
    let mut max_cube = 0;
    for &v in c.zero_cubes() {
        max_cube = cubes_at(&c, v)?.iter().map(Vec::len).fold(max_cube, usize::max);
    }
    let file = c.to_file();
    let complex_json = file.to_json();
    let text = format!(
        "{} 0-cubes, {} edges, {} hyperplanes, cubes up to dimension {max_cube}; median graph and duality checks pass\n  base 0-cube {}\n",
        c.vertex_count(),
        c.edges().len(),
        c.hyperplanes().len(),
        orientation_to_string(c.zero_cubes()[0], c.wall_count()),
    );
    let payload = json!({
        "zero_cubes": c.vertex_count(),
        "edges": c.edges().len(),
        "hyperplanes": c.hyperplanes(),
        "max_cube_dimension": max_cube,
        "is_median_graph": median,
        "duality_check": duality,
        "complex": file,
    });
    Ok((payload, text, complex_json))
}

fn catalog(export: Option<&Path>) -> Result<(Value, String), CliError> {
    let groups = load_catalog()?;
    if let Some(dir) = export {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    }
    let mut rows = Vec::new();
    let mut text = format!(
        "{:<14} {:>3} {:>5}  {:<9} {:<20} {:>3} {:>4}\n",
        "group", "n", "|P|", "verdict", "certificate", "N", "dim"
    );
    for g in &groups {
        if let Some(dir) = export {
            write(&dir.join(format!("{}.json", g.name())), &(g.to_file().to_json() + "\n"))?;
        }
        let verdict = is_hyperoctahedral(g)?;
        let fam = direction_class_count(g, &g.lattice_vectors())?;
        let stabilized = stabilize(g)?;
        let reason = verdict.certificate().map(|c| c.reason());
        let accepted = verdict.is_accepted();
        writeln!(
            text,
            "{:<14} {:>3} {:>5}  {:<9} {:<20} {:>3} {:>4}",
            g.name(),
            g.dimension(),
            g.point_group().order(),
            if accepted { "accepted" } else { "rejected" },
            reason.unwrap_or("-"),
            fam.class_count(),
            stabilized.dimension()
        )
        .unwrap();
        rows.push(json!({
            "group": g.name(),
            "dimension": g.dimension(),
            "point_group_order": g.point_group().order(),
            "verdict": if accepted { "accepted" } else { "rejected" },
            "certificate": reason,
            "class_count": fam.class_count(),
            "stabilized_dimension": stabilized.dimension(),
            "conjugator": verdict.witness().map(|w| w.conjugator.clone()).unwrap_or_else(|| RatMatrix::zeros(0, 0)),
        }));
    }
    Ok((json!({ "groups": rows }), text))
}
