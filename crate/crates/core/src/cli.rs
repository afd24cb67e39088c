//! The `qeraser` command-line front end.
//!
//! Exit codes: 0 success, 2 validation failure, 3 verification or recovery
//! failure, 4 I/O or parse error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channels::{validate_correlation_with, DensityMatrix, SchurChannel};
use crate::correction::{eraser_scenario, screen_pattern, CorrectionRun, InformationLedger};
use crate::decomposition::{decompose, extremality_test, verify_decomposition, Extremality, SearchConfig, VerificationReport};
use crate::error::Error;
use crate::infometrics::{bounds_report, shannon_entropy, BoundsReport};
use crate::io::{
    decomposition_json, from_json, matrix_json, parse_correlation_matrix, parse_decomposition, parse_state, pattern_csv,
    read_text, sig17, to_json, write_text, DecompositionFile, MatrixEnvelope, MatrixKind,
};
use crate::numerics::ToleranceProfile;
use crate::sampling::{random_correlation, random_correlation_of_rank, random_state, rng_from_seed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNVERIFIED: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Reconstruction tolerance for decompositions produced or read by the CLI.
const CLI_DECOMPOSITION_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "qeraser", version, about = "Schur-product decoherence: dilations, decompositions and quantum erasure")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Machine-readable JSON on stdout instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance profile (JSON with any of herm, eig, psd, trace).
    #[arg(long, global = true, value_name = "PROFILE")]
    pub tol: Option<PathBuf>,
    /// Where to write the command's artifact (a directory for `eraser`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a file holds a correlation matrix and classify it.
    Validate { xi: PathBuf },
    /// Apply the channel n times; --out receives the final state.
    Evolve {
        xi: PathBuf,
        rho: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        steps: u32,
        /// Per-step off-diagonal magnitudes.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Find a random-unitary decomposition; --out receives it.
    Decompose {
        xi: PathBuf,
        /// Number of terms for the numerical search (default d² − d + 1).
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Simulate environment-assisted correction of one input state.
    Correct {
        xi: PathBuf,
        rho: PathBuf,
        /// Decomposition to use instead of computing one.
        #[arg(long, value_name = "PATH")]
        dec: Option<PathBuf>,
    },
    /// The d-slit quantum eraser; --out is a directory for CSVs and the ledger.
    Eraser {
        #[arg(short = 'd', long, default_value_t = 2)]
        d: usize,
        /// `flat` for the uniform superposition, or a state file.
        #[arg(long, default_value = "flat")]
        state: String,
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
    /// Entropy bounds on the information needed for correction.
    Bounds {
        xi: PathBuf,
        #[arg(long, value_name = "PATH")]
        dec: Option<PathBuf>,
    },
    /// Write a random correlation matrix or density matrix.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[arg(short = 'd', long)]
        d: usize,
        /// Rank of a sampled correlation matrix (default full).
        #[arg(long)]
        rank: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Correlation,
    State,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_IO,
        Error::NoDecompositionFound { .. } | Error::VerificationFailure(_) | Error::RecoveryFailure { .. } => {
            EXIT_UNVERIFIED
        }
        _ => EXIT_INVALID,
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "qeraser: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let tol = match &cli.tol {
        Some(p) => from_json::<ToleranceProfile>(&read_text(p)?)?,
        None => ToleranceProfile::default(),
    };
    let ctx = Ctx { cli, tol };
    match &cli.command {
        Command::Validate { xi } => ctx.validate(xi, out),
        Command::Evolve { xi, rho, steps, csv } => ctx.evolve(xi, rho, *steps, csv.as_deref(), out),
        Command::Decompose { xi, terms, restarts } => ctx.decompose(xi, *terms, *restarts, out),
        Command::Correct { xi, rho, dec } => ctx.correct(xi, rho, dec.as_deref(), out),
        Command::Eraser { d, state, samples } => ctx.eraser(*d, state, *samples, out),
        Command::Bounds { xi, dec } => ctx.bounds(xi, dec.as_deref(), out),
        Command::Sample { kind, d, rank } => ctx.sample(*kind, *d, *rank, out),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    tol: ToleranceProfile,
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    dim: Option<usize>,
    complete: Option<bool>,
    extremality: Option<Extremality>,
    rank: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct EvolveReport {
    dim: usize,
    steps: u32,
    /// |ρ_kl| after the final step, k < l, row-major.
    off_diagonal: Vec<f64>,
    populations: Vec<f64>,
    state: MatrixEnvelope,
}

#[derive(Serialize)]
struct DecomposeReport {
    method: &'static str,
    decomposition: DecompositionFile,
    verification: VerificationReport,
}

#[derive(Serialize)]
struct OutcomeJson {
    outcome_index: usize,
    probability: f64,
    conditional_state: MatrixEnvelope,
    corrected_state: MatrixEnvelope,
}

#[derive(Serialize)]
struct CorrectionJson {
    dim: usize,
    terms: usize,
    residual: f64,
    outcome_entropy_bits: f64,
    outcomes: Vec<OutcomeJson>,
    recovered: MatrixEnvelope,
    uncorrected: MatrixEnvelope,
}

impl CorrectionJson {
    fn new(run: &CorrectionRun, terms: usize) -> Result<Self, Error> {
        Ok(Self {
            dim: run.recovered.dim(),
            terms,
            residual: run.residual,
            outcome_entropy_bits: shannon_entropy(&normalized(&run.probabilities()))?,
            outcomes: run
                .records
                .iter()
                .map(|r| OutcomeJson {
                    outcome_index: r.outcome_index,
                    probability: r.probability,
                    conditional_state: MatrixEnvelope::from_matrix(MatrixKind::State, r.conditional_state.matrix()),
                    corrected_state: MatrixEnvelope::from_matrix(MatrixKind::State, r.corrected_state.matrix()),
                })
                .collect(),
            recovered: MatrixEnvelope::from_matrix(MatrixKind::State, run.recovered.matrix()),
            uncorrected: MatrixEnvelope::from_matrix(MatrixKind::State, run.uncorrected.matrix()),
        })
    }
}

#[derive(Serialize)]
struct Visibilities {
    input: f64,
    decohered: f64,
    /// (outcome index, visibility)
    corrected: Vec<(usize, f64)>,
    conditional: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct EraserReport {
    dim: usize,
    samples: usize,
    ledger: InformationLedger,
    outcome_probabilities: Vec<f64>,
    outcome_entropy_bits: f64,
    residual: f64,
    visibility: Visibilities,
    log_base: u32,
}

/// Outcome probabilities summed over the recorded branches only; the
/// dropped ones are below 1e-12, so renormalizing changes nothing visible.
fn normalized(p: &[f64]) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    p.iter().map(|x| x / s).collect()
}

impl Ctx<'_> {
    fn emit_json<T: Serialize>(&self, out: &mut dyn Write, value: &T) -> CmdResult {
        out.write_all(to_json(value).as_bytes())?;
        Ok(())
    }

    fn load_xi(&self, path: &Path) -> Result<SchurChannel, Error> {
        let m = parse_correlation_matrix(&read_text(path)?)?;
        Ok(SchurChannel::new(validate_correlation_with(&m, &self.tol)?))
    }

    fn load_state(&self, path: &Path) -> Result<DensityMatrix, Error> {
        parse_state(&read_text(path)?, &self.tol)
    }

    fn search_config(&self, terms: Option<usize>, restarts: usize) -> SearchConfig {
        SearchConfig {
            terms,
            restarts,
            tol: CLI_DECOMPOSITION_TOL,
            seed: self.cli.seed,
            ..SearchConfig::default()
        }
    }

    fn write_artifact(&self, text: &str) -> CmdResult {
        if let Some(path) = &self.cli.out {
            write_text(path, text)?;
        }
        Ok(())
    }

    fn validate(&self, path: &Path, out: &mut dyn Write) -> CmdResult {
        let m = parse_correlation_matrix(&read_text(path)?)?;
        let xi = match validate_correlation_with(&m, &self.tol) {
            Ok(xi) => xi,
            Err(e) => {
                if self.cli.json {
                    self.emit_json(
                        out,
                        &ValidateReport {
                            valid: false,
                            dim: Some(m.rows()),
                            complete: None,
                            extremality: None,
                            rank: None,
                            error: Some(e.to_string()),
                        },
                    )?;
                } else {
                    writeln!(out, "invalid: {e}")?;
                }
                return Err(e.into());
            }
        };
        let ch = SchurChannel::new(xi);
        let ext = extremality_test(ch.xi());
        if self.cli.json {
            return self.emit_json(
                out,
                &ValidateReport {
                    valid: true,
                    dim: Some(ch.dim()),
                    complete: Some(ch.complete()),
                    extremality: Some(ext.verdict),
                    rank: Some(ext.rank),
                    error: None,
                },
            );
        }
        let complete = if ch.complete() { "complete" } else { "not complete" };
        let verdict = match ext.verdict {
            Extremality::Extremal => "extremal rank-1".to_string(),
            Extremality::RankOneExtremal => "extremal rank-1".to_string(),
            Extremality::NotExtremal => format!("not extremal (rank {})", ext.rank),
            Extremality::Undecided => format!("extremality undecided (rank {})", ext.rank),
        };
        writeln!(out, "valid, {complete}, {verdict}")?;
        writeln!(out, "dim    {}", ch.dim())?;
        Ok(())
    }

    fn evolve(&self, xi: &Path, rho: &Path, steps: u32, csv: Option<&Path>, out: &mut dyn Write) -> CmdResult {
        let ch = self.load_xi(xi)?;
        let rho = self.load_state(rho)?;
        if rho.dim() != ch.dim() {
            return Err(Error::DimensionMismatch {
                expected: ch.dim(),
                found: rho.dim(),
            }
            .into());
        }
        let d = ch.dim();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|k| (k + 1..d).map(move |l| (k, l))).collect();

        let mut table = String::from("step");
        for (k, l) in &pairs {
            let _ = write!(table, ",m_{k}_{l}");
        }
        table.push('\n');
        let mut last = rho.clone();
        for n in 0..=steps {
            last = ch.iterate(&rho, n)?;
            let _ = write!(table, "{n}");
            for &(k, l) in &pairs {
                let _ = write!(table, ",{}", sig17(last.matrix()[(k, l)].norm()));
            }
            table.push('\n');
        }
        if let Some(path) = csv {
            write_text(path, &table)?;
        }
        self.write_artifact(&matrix_json(MatrixKind::State, last.matrix()))?;

        let off_diagonal: Vec<f64> = pairs.iter().map(|&(k, l)| last.matrix()[(k, l)].norm()).collect();
        if self.cli.json {
            return self.emit_json(
                out,
                &EvolveReport {
                    dim: d,
                    steps,
                    off_diagonal,
                    populations: last.populations(),
                    state: MatrixEnvelope::from_matrix(MatrixKind::State, last.matrix()),
                },
            );
        }
        writeln!(out, "dim {d}, {steps} step(s)")?;
        writeln!(out, "{:<8} {:>24} {:>24}", "entry", "|rho_kl| initial", "|rho_kl| final")?;
        for (&(k, l), m) in pairs.iter().zip(&off_diagonal) {
            writeln!(out, "{:<8} {:>24.16e} {:>24.16e}", format!("({k},{l})"), rho.matrix()[(k, l)].norm(), m)?;
        }
        Ok(())
    }

    fn decompose(&self, xi: &Path, terms: Option<usize>, restarts: usize, out: &mut dyn Write) -> CmdResult {
        let ch = self.load_xi(xi)?;
        let method = method_name(ch.dim(), ch.xi().matrix());
        let dec = decompose(ch.xi(), &self.search_config(terms, restarts))?;
        let report = verify_decomposition(ch.xi(), &dec, CLI_DECOMPOSITION_TOL)?;
        if !report.passed {
            return Err(Error::VerificationFailure(format!("reconstruction residual {:e}", report.residual)).into());
        }
        self.write_artifact(&decomposition_json(&dec))?;
        if self.cli.json {
            return self.emit_json(
                out,
                &DecomposeReport {
                    method,
                    decomposition: DecompositionFile::from(&dec),
                    verification: report,
                },
            );
        }
        writeln!(out, "method        {method}")?;
        writeln!(out, "terms         {}", report.terms)?;
        writeln!(out, "residual      {:.3e}", report.residual)?;
        writeln!(out, "H(p)          {:.12} bits", report.entropy_bits)?;
        writeln!(out, "orthogonal    {}", report.orthogonal_family)?;
        writeln!(out, "{:<6} {:>20}  phases (rad)", "term", "weight")?;
        for (i, (p, ph)) in dec.weights().iter().zip(dec.phases()).enumerate() {
            let phases: Vec<String> = ph.iter().map(|t| format!("{t:+.6}")).collect();
            writeln!(out, "{:<6} {:>20.16}  {}", i, p, phases.join(" "))?;
        }
        Ok(())
    }

    fn correct(&self, xi: &Path, rho: &Path, dec: Option<&Path>, out: &mut dyn Write) -> CmdResult {
        let ch = self.load_xi(xi)?;
        let rho = self.load_state(rho)?;
        let dec = match dec {
            Some(p) => parse_decomposition(&read_text(p)?)?,
            None => decompose(ch.xi(), &self.search_config(None, SearchConfig::default().restarts))?,
        };
        let run = crate::correction::run_correction(&ch, &dec, &rho)?;
        let report = CorrectionJson::new(&run, dec.num_terms())?;
        self.write_artifact(&to_json(&report))?;
        if self.cli.json {
            return self.emit_json(out, &report);
        }
        writeln!(out, "recovered, residual {:.3e}", run.residual)?;
        writeln!(out, "H(outcomes)   {:.12} bits", report.outcome_entropy_bits)?;
        writeln!(out, "{:<8} {:>20}", "outcome", "probability")?;
        for r in &run.records {
            writeln!(out, "{:<8} {:>20.16}", r.outcome_index, r.probability)?;
        }
        Ok(())
    }

    fn eraser(&self, d: usize, state: &str, samples: usize, out: &mut dyn Write) -> CmdResult {
        let scenario = eraser_scenario(d)?;
        let rho = if state == "flat" {
            DensityMatrix::flat_superposition(d)
        } else {
            self.load_state(Path::new(state))?
        };
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.dim() }.into());
        }
        let run = scenario.run(&rho)?;

        let input = screen_pattern(&rho, samples)?;
        let decohered = screen_pattern(&run.uncorrected, samples)?;
        let mut corrected = Vec::new();
        let mut conditional = Vec::new();
        for r in &run.records {
            corrected.push((r.outcome_index, screen_pattern(&r.corrected_state, samples)?));
            conditional.push((r.outcome_index, screen_pattern(&r.conditional_state, samples)?));
        }

        let probabilities = run.probabilities();
        let report = EraserReport {
            dim: d,
            samples,
            ledger: scenario.ledger,
            outcome_entropy_bits: shannon_entropy(&normalized(&probabilities))?,
            outcome_probabilities: probabilities,
            residual: run.residual,
            visibility: Visibilities {
                input: input.visibility,
                decohered: decohered.visibility,
                corrected: corrected.iter().map(|(j, p)| (*j, p.visibility)).collect(),
                conditional: conditional.iter().map(|(j, p)| (*j, p.visibility)).collect(),
            },
            log_base: 2,
        };

        if let Some(dir) = &self.cli.out {
            std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
            write_text(&dir.join("input.csv"), &pattern_csv(&input))?;
            write_text(&dir.join("decohered.csv"), &pattern_csv(&decohered))?;
            for (j, p) in &corrected {
                write_text(&dir.join(format!("corrected_{j}.csv")), &pattern_csv(p))?;
            }
            for (j, p) in &conditional {
                write_text(&dir.join(format!("conditional_{j}.csv")), &pattern_csv(p))?;
            }
            write_text(&dir.join("ledger.json"), &to_json(&report))?;
        }

        if self.cli.json {
            return self.emit_json(out, &report);
        }
        writeln!(out, "d-slit eraser, d = {d}, entropies in bits (log base 2)")?;
        writeln!(out, "which-way information stored   {:.12}", report.ledger.stored_bits)?;
        writeln!(out, "information extracted          {:.12}", report.ledger.extracted_bits)?;
        writeln!(out, "recovery residual              {:.3e}", report.residual)?;
        writeln!(out, "{:<14} {:>12} {:>12}", "pattern", "probability", "visibility")?;
        writeln!(out, "{:<14} {:>12} {:>12.9}", "input", "-", report.visibility.input)?;
        writeln!(out, "{:<14} {:>12} {:>12.9}", "decohered", "-", report.visibility.decohered)?;
        for ((j, v), p) in report.visibility.corrected.iter().zip(&report.outcome_probabilities) {
            writeln!(out, "{:<14} {:>12.9} {:>12.9}", format!("corrected_{j}"), p, v)?;
        }
        Ok(())
    }

    fn bounds(&self, xi: &Path, dec: Option<&Path>, out: &mut dyn Write) -> CmdResult {
        let ch = self.load_xi(xi)?;
        let dec = dec.map(|p| read_text(p).and_then(|t| parse_decomposition(&t))).transpose()?;
        let report = bounds_report(&ch, dec.as_ref())?;
        if self.cli.json {
            return self.emit_json(out, &report);
        }
        print_bounds(&report, out)?;
        Ok(())
    }

    fn sample(&self, kind: SampleKind, d: usize, rank: Option<usize>, out: &mut dyn Write) -> CmdResult {
        if d == 0 {
            return Err(Error::BadDimension(d).into());
        }
        let mut rng = rng_from_seed(self.cli.seed);
        let text = match kind {
            SampleKind::Correlation => {
                let xi = match rank {
                    Some(r) if r == 0 || r > d => {
                        return Err(Error::InvalidArgument(format!("rank {r} outside 1..={d}")).into())
                    }
                    Some(r) => random_correlation_of_rank(d, r, &mut rng),
                    None => random_correlation(d, &mut rng),
                };
                matrix_json(MatrixKind::Correlation, xi.matrix())
            }
            SampleKind::State => matrix_json(MatrixKind::State, random_state(d, &mut rng).matrix()),
        };
        match &self.cli.out {
            Some(path) => write_text(path, &text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn method_name(d: usize, xi: &crate::numerics::ComplexMatrix) -> &'static str {
    if d == 2 {
        "closed-form qubit"
    } else if d > 2 && xi.max_abs_diff(&crate::numerics::ComplexMatrix::identity(d)) <= CLI_DECOMPOSITION_TOL {
        "closed-form clock"
    } else {
        "numerical search"
    }
}

fn print_bounds(r: &BoundsReport, out: &mut dyn Write) -> std::io::Result<()> {
    let flag = |b: Option<bool>| match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    };
    writeln!(out, "entropies in bits (log base {})", r.log_base)?;
    writeln!(out, "{:<28} {}", "dim", r.dim)?;
    writeln!(out, "{:<28} {}", "rank xi", r.rank)?;
    writeln!(out, "{:<28} {:.12}", "S(xi/d)", r.s_xi_over_d)?;
    writeln!(out, "{:<28} {:.12}", "S_ex(I/d)", r.s_ex_maximal)?;
    writeln!(out, "{:<28} {:.12}", "2 log rank", r.two_log_rank)?;
    match r.h_p {
        Some(h) => writeln!(out, "{:<28} {:.12}", "H(p)", h)?,
        None => writeln!(out, "{:<28} -", "H(p)")?,
    }
    writeln!(out, "{:<28} {}", "S(xi/d) <= H(p)", flag(r.lower_bound_satisfied))?;
    writeln!(out, "{:<28} {}", "H(p) <= 2 log rank", flag(r.upper_bound_satisfied))?;
    writeln!(out, "{:<28} {}", "orthogonal family", flag(r.orthogonal_family))?;
    Ok(())
}
