//! Command-line surface for the thermoshift library.
//!
//! Loads a graph (and usually a potential) from JSON, runs one pipeline
//! stage, and emits a deterministic machine-readable report: JSON by
//! default, CSV for the tabular subcommands. All reals are serialized
//! with 17 significant digits, so identical inputs produce byte-identical
//! reports.
//!
//! Exit status: 0 on success, 1 on input errors (unreadable or invalid
//! files, bad parameters), 2 when an invariant check fails — the report
//! is still written in that case.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use thermoshift::{
    apply_transfer, build_rotation_factor, certify_one_sided, entropy_identity_check,
    equilibrium_measure, find_k_delta, gibbs_ratio_bounds, load_graph, load_potential,
    parry_measure, power_potential_pressure_check, product_structure_witness, sinai_reduce,
    solve_rpf, truncation_pressure_sequence, weak_bernoulli_report, ConcatCase, DirectedGraph,
    Error, LocallyConstantPotential, MarkovMeasure, PotentialFile, Sidedness, WordFunction,
};

#[derive(Parser)]
#[command(
    name = "thermoshift",
    version,
    about = "Thermodynamic formalism on finite-alphabet Markov shifts"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let value = self.to_possible_value().expect("no skipped variants");
        f.write_str(value.get_name())
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural analysis: pruning, transitivity, period, cyclic classes.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reduce a two-sided potential to a one-sided one by a coboundary;
    /// emits a loadable potential file.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve the transfer-operator eigenproblem and emit the eigendata
    /// and equilibrium chain.
    Equilibrium {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Certify the Gibbs product bounds of the equilibrium (or Parry)
    /// chain with explicit constants.
    GibbsCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Boundary symbol set, comma-separated; defaults to all vertices.
        #[arg(long, value_delimiter = ',')]
        s_star: Option<Vec<String>>,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tabulate the weak Bernoulli statistic and locate the decay
    /// threshold K(delta).
    Mixing {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        /// Vertices keeping their own partition cell, comma-separated;
        /// defaults to all vertices (the full symbol partition).
        #[arg(long, value_delimiter = ',')]
        v_prime: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build the rotation factor over the cyclic classes and verify its
    /// mass, entropy, and pressure identities.
    Factorize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Pressures along a nested sequence of subgraphs listed in a
    /// manifest file.
    Truncate {
        /// JSON manifest {"graphs": [paths]} with paths relative to the
        /// manifest's directory, innermost graph first.
        #[arg(long)]
        manifest: PathBuf,
        /// Potential on the last (largest) graph; zero if omitted.
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Input-level failure: message to stderr, exit 1.
struct CliError(String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(format!("invalid JSON: {e}"))
    }
}

fn main() -> ExitCode {
    if let Err(msg) = validate_thread_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// THERMOSHIFT_THREADS caps internal parallelism. The numeric kernels
/// run sequentially for reproducibility, so the value only needs to be
/// a well-formed positive integer.
fn validate_thread_env() -> Result<(), String> {
    match std::env::var("THERMOSHIFT_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!(
                "THERMOSHIFT_THREADS must be a positive integer, got {raw:?}"
            )),
        },
    }
}

fn run(cmd: Cmd) -> Result<u8, CliError> {
    match cmd {
        Cmd::Analyze { graph, out, format } => {
            json_only(format)?;
            analyze(&graph, out.as_deref())
        }
        Cmd::Reduce { graph, potential, out, format } => {
            json_only(format)?;
            reduce(&graph, &potential, out.as_deref())
        }
        Cmd::Equilibrium { graph, potential, out, format } => {
            json_only(format)?;
            equilibrium(&graph, &potential, out.as_deref())
        }
        Cmd::GibbsCheck { graph, potential, s_star, max_len, out, format } => {
            json_only(format)?;
            gibbs_check(&graph, potential.as_deref(), s_star, max_len, out.as_deref())
        }
        Cmd::Mixing { graph, potential, delta, n_max, k_max, v_prime, out, format } => mixing(
            &graph,
            potential.as_deref(),
            delta,
            n_max,
            k_max,
            v_prime,
            out.as_deref(),
            format,
        ),
        Cmd::Factorize { graph, potential, out, format } => {
            json_only(format)?;
            factorize(&graph, potential.as_deref(), out.as_deref())
        }
        Cmd::Truncate { manifest, potential, out, format } => {
            truncate(&manifest, potential.as_deref(), out.as_deref(), format)
        }
    }
}

fn json_only(format: Format) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError(
            "csv output is available for the mixing and truncate subcommands only".into(),
        ));
    }
    Ok(())
}

/// Serializes JSON with every real at 17 significant digits, so reports
/// are byte-identical across runs and reload without precision loss.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json_17(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serialized JSON is UTF-8")
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

/// The potential itself when one-sided, its coboundary reduction
/// otherwise.
fn ensure_one_sided(psi: &LocallyConstantPotential) -> Result<LocallyConstantPotential, CliError> {
    if psi.sidedness() == Sidedness::OneSided {
        Ok(psi.clone())
    } else {
        Ok(sinai_reduce(psi)?.phi().clone())
    }
}

/// The equilibrium chain of the potential, or the Parry chain when no
/// potential is given.
fn measure_for(
    graph: &Arc<DirectedGraph>,
    potential: Option<&Path>,
) -> Result<MarkovMeasure, CliError> {
    match potential {
        Some(path) => {
            let psi = load_potential(path, graph)?;
            let phi = ensure_one_sided(&psi)?;
            Ok(equilibrium_measure(&solve_rpf(&phi)?))
        }
        None => Ok(parry_measure(graph)?.0),
    }
}

fn all_vertices(g: &DirectedGraph) -> Vec<String> {
    (0..g.vertex_count() as u32)
        .map(|v| g.name(v).to_string())
        .collect()
}

fn analyze(graph: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let mut report = json!({
        "vertices": g.vertex_count(),
        "edges": g.edges().count(),
        "pruned": g.pruned(),
    });
    match g.spectral_decomposition() {
        Ok(dec) => {
            report["transitive"] = json!(true);
            report["period"] = json!(dec.period());
            let classes: Vec<Vec<String>> = dec
                .classes()
                .iter()
                .map(|class| class.iter().map(|&v| g.name(v).to_string()).collect())
                .collect();
            report["classes"] = json!(classes);
        }
        Err(Error::NotTransitive) => {
            report["transitive"] = json!(false);
            let components: Vec<Vec<String>> = g
                .transitive_components()
                .iter()
                .map(all_vertices)
                .collect();
            report["components"] = json!(components);
        }
        Err(e) => return Err(e.into()),
    }
    emit(out, &to_json_17(&report))?;
    Ok(0)
}

fn reduce(graph: &Path, potential: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let psi = load_potential(potential, &g)?;
    let reduction = sinai_reduce(&psi)?;
    let phi = reduction.phi();
    let file = serde_json::to_value(PotentialFile::from_potential(phi))?;
    emit(out, &to_json_17(&file))?;
    eprintln!(
        "reduced window {:?} -> {:?}, lookback {}",
        psi.window(),
        phi.window(),
        reduction.lookback()
    );
    if certify_one_sided(phi) {
        Ok(0)
    } else {
        Ok(2)
    }
}

fn equilibrium(graph: &Path, potential: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let psi = load_potential(potential, &g)?;
    let phi = ensure_one_sided(&psi)?;
    let sol = solve_rpf(&phi)?;
    let mu = equilibrium_measure(&sol);
    let report = json!({
        "lambda": sol.lambda(),
        "pressure": sol.pressure(),
        "iterations": sol.iterations(),
        "residual": sol.residual(),
        "h": sol.h_map(),
        "nu": sol.nu_map(),
        "pi": mu.pi_map(),
        "P": mu.p_map(),
    });
    emit(out, &to_json_17(&report))?;

    // The normalized potential must transfer constants to constants.
    let one = WordFunction::constant(sol.phi_star().graph(), 1, 1.0)?;
    let transferred = apply_transfer(sol.phi_star(), &one, 1)?;
    let max_dev = transferred
        .entries()
        .iter()
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    if max_dev <= 1e-10 {
        Ok(0)
    } else {
        eprintln!("invariant violation: |L 1 - 1| = {max_dev:e} exceeds 1e-10");
        Ok(2)
    }
}

fn gibbs_check(
    graph: &Path,
    potential: Option<&Path>,
    s_star: Option<Vec<String>>,
    max_len: usize,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let mu = measure_for(&g, potential)?;
    let star = s_star.unwrap_or_else(|| all_vertices(&g));
    let cert = gibbs_ratio_bounds(&mu, &star, max_len)?;
    let case = match cert.worst_pair().case {
        ConcatCase::SuffixInStar => "suffix-in-star",
        ConcatCase::PrefixInStar => "prefix-in-star",
    };
    let report = json!({
        "s_star": cert.s_star(),
        "m": cert.m_const(),
        "c1": cert.c1(),
        "c2": cert.c2(),
        "c_star": cert.c_star(),
        "observed_min": cert.observed_min(),
        "observed_max": cert.observed_max(),
        "worst_pair": {
            "case": case,
            "a": cert.worst_pair().a,
            "c": cert.worst_pair().c,
            "ratio": cert.worst_pair().ratio,
        },
        "pairs_checked": cert.pairs_checked(),
        "max_len": cert.max_len(),
        "within_bounds": cert.within_bounds(),
    });
    emit(out, &to_json_17(&report))?;
    if cert.within_bounds() {
        Ok(0)
    } else {
        eprintln!("invariant violation: an observed ratio escapes [1/C*, C*]");
        Ok(2)
    }
}

#[allow(clippy::too_many_arguments)]
fn mixing(
    graph: &Path,
    potential: Option<&Path>,
    delta: f64,
    n_max: usize,
    k_max: usize,
    v_prime: Option<Vec<String>>,
    out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let mu = measure_for(&g, potential)?;
    let cells = v_prime.unwrap_or_else(|| all_vertices(&g));
    let report = weak_bernoulli_report(&mu, &cells, n_max, k_max, delta)?;

    // Threshold pipeline with the full vertex set as boundary set: its
    // mass is 1, so it always meets the mass requirement.
    let cert = gibbs_ratio_bounds(&mu, &all_vertices(&g), 1)?;
    let c_star = cert.c_star();
    let target = (-delta / (2.0 * c_star * c_star)).exp();
    let (k_delta, non_mixing) = match find_k_delta(&mu, delta, target) {
        Ok(kd) => (Some(kd.k()), false),
        Err(Error::NotMixing { .. }) => (None, true),
        Err(e) => return Err(e.into()),
    };
    let mut violated = non_mixing;
    if let Some(threshold) = k_delta {
        for (_, k, wb, _) in report.rows() {
            if k > threshold && wb >= report.bound() {
                violated = true;
            }
        }
    }

    let content = match format {
        Format::Json => {
            let table: Vec<Value> = report
                .rows()
                .into_iter()
                .map(|(n, k, wb, pass)| json!({"n": n, "k": k, "wb": wb, "pass": pass}))
                .collect();
            to_json_17(&json!({
                "v_prime": report.v_prime(),
                "full_partition": report.is_full_partition(),
                "delta": report.delta(),
                "bound": report.bound(),
                "n_max": report.n_max(),
                "k_max": report.k_max(),
                "k_threshold": report.k_threshold(),
                "k_delta": k_delta,
                "non_mixing": non_mixing,
                "table": table,
            }))
        }
        Format::Csv => {
            let mut csv = String::from("n,k,wb,bound,pass\n");
            for (n, k, wb, pass) in report.rows() {
                csv.push_str(&format!(
                    "{n},{k},{},{},{pass}\n",
                    f17(wb),
                    f17(report.bound())
                ));
            }
            csv
        }
    };
    emit(out, &content)?;
    if violated {
        if non_mixing {
            eprintln!("invariant violation: no mixing threshold below 10000 at delta = {delta}");
        } else {
            eprintln!("invariant violation: the statistic misses the bound beyond K(delta)");
        }
        Ok(2)
    } else {
        Ok(0)
    }
}

fn factorize(graph: &Path, potential: Option<&Path>, out: Option<&Path>) -> Result<u8, CliError> {
    let g = load_graph(graph)?;
    let mu = measure_for(&g, potential)?;
    let rf = build_rotation_factor(&g, &mu)?;
    let (entropy_lhs, entropy_rhs) = entropy_identity_check(&rf, &mu)?;
    let psi = match potential {
        Some(path) => load_potential(path, &g)?,
        None => LocallyConstantPotential::zero(&g),
    };
    let (p_times, power) = power_potential_pressure_check(&g, &psi)?;
    let witness = product_structure_witness(&rf, &mu)?;

    let entropy_ok = entropy_lhs.iter().all(|h| (h - entropy_rhs).abs() <= 1e-9);
    let pressure_ok = power.iter().all(|p| (p - p_times).abs() <= 1e-9);
    let ok = entropy_ok && pressure_ok && witness.pass();

    let report = json!({
        "p": rf.p(),
        "classes": rf.classes(),
        "mu_Xi": rf.class_masses(),
        "entropy_check": {"lhs": entropy_lhs, "rhs": entropy_rhs},
        "pressure_check": {"p_times_base": p_times, "power": power},
        "witness": {
            "shift_advances_classes": witness.shift_advances_classes(),
            "max_mass_deviation": witness.max_mass_deviation(),
            "return_entropy": witness.return_entropy(),
            "target_entropy": witness.target_entropy(),
            "pass": witness.pass(),
        },
    });
    emit(out, &to_json_17(&report))?;
    if ok {
        Ok(0)
    } else {
        eprintln!("invariant violation: a rotation-factor identity exceeded its tolerance");
        Ok(2)
    }
}

#[derive(Deserialize)]
struct Manifest {
    graphs: Vec<PathBuf>,
}

fn truncate(
    manifest: &Path,
    potential: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(manifest)?;
    let listing: Manifest = serde_json::from_str(&text)?;
    if listing.graphs.is_empty() {
        return Err(CliError("the manifest lists no graphs".into()));
    }
    let dir = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut graphs = Vec::with_capacity(listing.graphs.len());
    for rel in &listing.graphs {
        graphs.push(load_graph(dir.join(rel))?);
    }
    let ambient = graphs.last().expect("nonempty manifest");
    let phi = match potential {
        Some(path) => load_potential(path, ambient)?,
        None => LocallyConstantPotential::zero(ambient),
    };
    let pressures = truncation_pressure_sequence(&graphs, &phi)?;

    let content = match format {
        Format::Json => {
            let rows: Vec<Value> = graphs
                .iter()
                .zip(&pressures)
                .enumerate()
                .map(|(i, (g, &pressure))| {
                    json!({
                        "index": i,
                        "vertices": g.vertex_count(),
                        "edges": g.edges().count(),
                        "pressure": pressure,
                    })
                })
                .collect();
            to_json_17(&json!({ "rows": rows }))
        }
        Format::Csv => {
            let mut csv = String::from("index,vertices,edges,pressure\n");
            for (i, (g, &pressure)) in graphs.iter().zip(&pressures).enumerate() {
                csv.push_str(&format!(
                    "{i},{},{},{}\n",
                    g.vertex_count(),
                    g.edges().count(),
                    f17(pressure)
                ));
            }
            csv
        }
    };
    emit(out, &content)?;
    Ok(0)
}
