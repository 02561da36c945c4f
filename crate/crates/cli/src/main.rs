use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cm_torsion::parse::{parse_int, parse_uint, ScanMode, Suite};

mod commands;

use commands::Report;

const EXIT_USAGE: u8 = 1;
const EXIT_CONSISTENCY: u8 = 2;
const EXIT_VIOLATIONS: u8 = 3;

#[derive(Parser)]
#[command(name = "cm-torsion", version, about = "Torsion of CM elliptic curves in degree 2p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit a JSON envelope instead of text.
    #[arg(long)]
    json: bool,

    /// Write output to this file instead of stdout. For `scan` this is the CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn int_arg(s: &str) -> Result<i64, String> {
    parse_int(s).map_err(|e| e.to_string())
}

fn uint_arg(s: &str) -> Result<u64, String> {
    parse_uint(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of the order of discriminant DISC.
    Order {
        #[arg(value_parser = int_arg, allow_hyphen_values = true)]
        disc: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// T(O, M, N) with its local factors, and T° with --circ.
    Tdeg {
        #[arg(value_parser = int_arg, allow_hyphen_values = true)]
        disc: i64,
        #[arg(value_parser = uint_arg)]
        n: u64,
        #[arg(long, value_parser = uint_arg, default_value = "1")]
        m: u64,
        /// Also compute the least degree over Q(j).
        #[arg(long)]
        circ: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// New torsion groups of CM curves in degree 2p.
    Classify {
        #[arg(value_parser = uint_arg)]
        p: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan primes up to MAX_P and write one CSV row per prime.
    ///
    /// CSV columns by mode:
    ///   classify: p,new_group_count,is_olson
    ///   olson:    p,is_olson,cumulative_olson
    ///   germain:  p,chain        (chain: a*p+1 is prime)
    #[command(verbatim_doc_comment)]
    Scan {
        #[arg(value_parser = uint_arg)]
        max_p: u64,
        #[arg(value_parser = str::parse::<ScanMode>)]
        mode: ScanMode,
        /// Multiplier for germain mode: 2, 4 or 6.
        #[arg(long, value_parser = uint_arg, default_value = "2")]
        a: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a verification suite; exits 3 if it finds violations.
    ///
    /// BOUND is |Δ| for baby-lemma and class-number, and max p otherwise.
    Verify {
        #[arg(value_parser = str::parse::<Suite>)]
        suite: Suite,
        #[arg(value_parser = uint_arg)]
        bound: u64,
        /// Largest N for baby-lemma.
        #[arg(long, value_parser = uint_arg, default_value = "500")]
        n_bound: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CM_TORSION_THREADS") else {
        return Ok(());
    };
    let threads = parse_uint(&raw)
        .ok()
        .filter(|&n| n > 0 && n <= 4096)
        .ok_or_else(|| format!("CM_TORSION_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads as usize)
        .build_global()
        .map_err(|e| e.to_string())
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn emit(report: &Report, output: &OutputArgs) -> io::Result<()> {
    let main = if output.json { report.envelope() } else { report.text.clone() };
    match &report.csv {
        // the CSV owns --out; the envelope or summary goes to stdout
        Some(csv) => {
            match &output.out {
                Some(path) => fs::write(path, csv)?,
                None if !output.json => return write_to(None, csv.as_bytes()),
                None => {}
            }
            write_to(None, main.as_bytes())
        }
        None => write_to(output.out.as_deref(), main.as_bytes()),
    }
}

fn run(command: Command) -> Result<(Report, OutputArgs), cm_torsion::Error> {
    Ok(match command {
        Command::Order { disc, output } => (commands::order(disc)?, output),
        Command::Tdeg { disc, n, m, circ, output } => (commands::tdeg(disc, n, m, circ)?, output),
        Command::Classify { p, output } => (commands::classify(p)?, output),
        Command::Scan { max_p, mode, a, output } => (commands::scan(max_p, mode, a)?, output),
        Command::Verify { suite, bound, n_bound, output } => {
            (commands::verify(suite, bound, n_bound)?, output)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let (report, output) = match run(cli.command) {
        Ok(done) => done,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_internal() { EXIT_CONSISTENCY } else { EXIT_USAGE };
            return ExitCode::from(code);
        }
    };
    if let Err(e) = emit(&report, &output) {
        match &output.out {
            Some(path) => eprintln!("error: cannot write {}: {e}", path.display()),
            None => eprintln!("error: {e}"),
        }
        return ExitCode::from(EXIT_USAGE);
    }
    if report.violations > 0 {
        ExitCode::from(EXIT_VIOLATIONS)
    } else {
        ExitCode::SUCCESS
    }
}
