use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use spamkern::cli::{run, ExperimentConfig, Mode};

/// Sparse additive model experiments: theory-driven fits, rate sweeps,
/// packing constructions, Gaussian complexities and norm-sandwich checks.
///
/// Mode-specific CSV schemas:
///   fit / sweep-n / sweep-d / sweep-s:
///     n,d,s,replicate,l2p_error,l2pn_error,active_set_size,lambda_n,rho_n,
///     nu_n,sweeps_used,wall_time_seconds,failed
///     (error columns are empty and `failed` is 1 when the solver did not
///     converge; wall times are zero unless the config sets record_timing)
///   lower-bound: n,d,s,alpha|m,lower_rate
///   packing:     d,s,alphabet,n_star,target_size,achieved_size,
///                min_hamming_distance
///   complexity:  n,t,mean,std_err,q_sigma,ratio
///   sandwich:    n,t_mult,t,trials,frequency
#[derive(Parser, Debug)]
#[command(name = "spamkern", version, about, verbatim_doc_comment)]
struct Args {
    /// One of: fit, sweep-n, sweep-d, sweep-s, lower-bound, packing,
    /// complexity, sandwich.
    mode: String,
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (falls back to the config's `out` field).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the run (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();

    let mode = match Mode::parse(&args.mode) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("spamkern: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("spamkern: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let config = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("spamkern: {e}");
            return ExitCode::from(2);
        }
    };
    let out_path = match args.out.or_else(|| config.out.clone().map(PathBuf::from)) {
        Some(p) => p,
        None => {
            eprintln!("spamkern: no output path (pass --out or set `out` in the config)");
            return ExitCode::from(2);
        }
    };

    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = args.threads {
            builder = builder.num_threads(k);
        }
        match builder.build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("spamkern: cannot build thread pool: {e}");
                return ExitCode::from(3);
            }
        }
    };

    let outcome = pool.install(|| run(mode, &config));
    match outcome {
        Ok(output) => {
            if let Err(e) = std::fs::write(&out_path, output.to_csv()) {
                eprintln!("spamkern: cannot write {}: {e}", out_path.display());
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e @ spamkern::Error::Config(_)) | Err(e @ spamkern::Error::InvalidParameter(_)) => {
            eprintln!("spamkern: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("spamkern: {e}");
            ExitCode::from(3)
        }
    }
}
