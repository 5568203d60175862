use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use kaehler::algebra::truncation_algebra;
use kaehler::corpus;
use kaehler::dsl;
use kaehler::field::Field;
use kaehler::hochschild;
use kaehler::omega::kaehler;

#[derive(Parser)]
#[command(name = "kaehler", version, about = "Exact differentials, Hochschild homology and torsion bounds for finite-dimensional commutative algebras")]
struct Cli {
    /// Override the tensor-space size cap for homology computations.
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    /// Seed for the randomized spot checks run by verify-paper.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a script and print its results.
    Run {
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the embedded verification corpus.
    VerifyPaper {
        /// Only run cases whose id contains this string.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Hochschild homology dimensions of the last algebra bound in a script.
    Hh {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        degree: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.max_dim {
        hochschild::set_cap_override(n);
    }
    match cli.command {
        Command::Run { file, json } => cmd_run(&file, json),
        Command::VerifyPaper { case, json } => cmd_verify(case.as_deref(), json, cli.seed),
        Command::Hh { algebra, degree } => cmd_hh(&algebra, degree),
    }
}

fn cmd_run(file: &str, json: bool) -> ExitCode {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", file, e);
            return ExitCode::from(2);
        }
    };
    let out = match dsl::run_text(&text) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    if json {
        println!("{}", out.to_json());
    } else {
        for r in &out.results {
            println!("{} => {}", r.name, r.payload);
        }
        for d in &out.diagnostics {
            eprintln!("error: {}", d);
        }
    }
    if out.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_verify(filter: Option<&str>, json: bool, seed: u64) -> ExitCode {
    let outcomes = corpus::run_corpus(filter);
    if outcomes.is_empty() {
        if let Some(f) = filter {
            eprintln!("warning: no corpus case matches `{}`", f);
        }
    }
    let spot = spot_check(seed);
    let mut failed = 0usize;
    if json {
        let entries: Vec<serde_json::Value> = outcomes
            .iter()
            .map(|o| {
                if !o.passed() {
                    failed += 1;
                }
                serde_json::json!({
                    "id": o.id,
                    "passed": o.passed(),
                    "failures": o.failures,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "version": 1,
            "cases": entries,
            "spot_check": { "seed": seed, "passed": spot.is_ok() },
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        for o in &outcomes {
            if o.passed() {
                println!("PASS {}", o.id);
            } else {
                failed += 1;
                println!("FAIL {}", o.id);
                for f in &o.failures {
                    println!("     {}", f);
                }
            }
        }
        match &spot {
            Ok(n) => println!("PASS spot-check ({} random algebras, seed {})", n, seed),
            Err(msg) => println!("FAIL spot-check: {}", msg),
        }
    }
    if failed == 0 && spot.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Compares dim Omega with dim HH_1 on randomly chosen small truncated
/// polynomial algebras; the two must always agree.
fn spot_check(seed: u64) -> Result<usize, String> {
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut next = move |bound: u64| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % bound
    };
    let fields = [
        Field::Rationals,
        Field::prime(2).expect("prime"),
        Field::prime(3).expect("prime"),
        Field::prime(5).expect("prime"),
    ];
    let count = 8;
    for i in 0..count {
        let f = fields[next(4) as usize];
        let n = 2 + next(4) as u32;
        let a = Arc::new(
            truncation_algebra(f, &["s".to_string()], n).map_err(|e| e.to_string())?,
        );
        let omega_dim = kaehler(&a).kdim;
        let hh1 = hochschild::hh(&a, 1).map_err(|e| e.to_string())?;
        if omega_dim != hh1.dim {
            return Err(format!(
                "instance {}: dim Omega = {} but dim HH_1 = {}",
                i, omega_dim, hh1.dim
            ));
        }
    }
    Ok(count)
}

fn cmd_hh(file: &str, degree: usize) -> ExitCode {
    if degree > 2 {
        eprintln!("error: homology is supported in degrees 0..=2");
        return ExitCode::from(2);
    }
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", file, e);
            return ExitCode::from(2);
        }
    };
    let script = match dsl::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    let algebras = match dsl::bound_algebras(&script) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    let Some((name, a)) = algebras.last() else {
        eprintln!("error: the script binds no algebra");
        return ExitCode::from(2);
    };
    for d in 0..=degree {
        match hochschild::hh(a, d) {
            Ok(h) => println!("HH_{}({}) dim {}", d, name, h.dim),
            Err(e) => {
                eprintln!("error: {}", e);
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
