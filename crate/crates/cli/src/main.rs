use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spencer_cli::{emit_report, parse_scenario, plan, run_scenario, Format, RunOptions};
use spencer_core::jet::delta_sequence_report;
use spencer_core::nonlinear::SophQuotient;

#[derive(Parser)]
#[command(name = "spencer", version, about = "Exact checks for jet groupoids and Spencer operators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks of a scenario file.
    Check {
        file: String,
        /// Only this suite, or a single check id as printed by --list-checks.
        #[arg(long)]
        suite: Option<String>,
        /// Run only at this order (overrides k and K).
        #[arg(long, value_parser = clap::value_parser!(i64).range(0..=4))]
        k: Option<i64>,
        /// Replace the scenario seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Fmt>,
        /// Print check ids and exit.
        #[arg(long)]
        list_checks: bool,
        /// Add per-check wall time to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Ranks and homology of the δ-sequence, or with --p the dimension of the
    /// quotient of p-forms by the δ̄-image.
    Ranks {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
        r: u64,
        #[arg(long, value_parser = clap::value_parser!(i64).range(0..=6))]
        k: i64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..=4))]
        p: Option<u64>,
    },
}

fn main() -> ExitCode {
    // Suites catch their own panics; keep stderr clean.
    std::panic::set_hook(Box::new(|_| {}));
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check { file, suite, k, seed, format, list_checks, timing } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{file}: {e}");
                    return ExitCode::from(2);
                }
            };
            let sc = match parse_scenario(&src) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{file}:{e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { suite, k, seed, timing };
            if list_checks {
                for p in plan(&sc, &opts) {
                    println!("{}", p.id);
                }
                return ExitCode::SUCCESS;
            }
            if let Some(f) = &opts.suite {
                if plan(&sc, &opts).is_empty() && !sc.checks.is_empty() {
                    eprintln!("no check matches `{f}`");
                    return ExitCode::from(2);
                }
            }
            let fmt = match format {
                Some(Fmt::Text) => Format::Text,
                Some(Fmt::Json) => Format::Json,
                None => sc.format.unwrap_or(Format::Text),
            };
            let rep = run_scenario(&sc, &opts);
            print!("{}", emit_report(&rep, fmt));
            ExitCode::from(rep.exit_code() as u8)
        }
        Cmd::Ranks { m, r, k, p } => {
            let (m, r) = (m as usize, r as usize);
            match p {
                None => {
                    if k < 1 {
                        eprintln!("the δ-sequence needs k ≥ 1");
                        return ExitCode::from(2);
                    }
                    println!("{:>8} {:>6} {:>8} {:>9} {:>9}", "position", "dim", "rank_in", "rank_out", "homology");
                    for row in delta_sequence_report(m, r, k) {
                        println!(
                            "{:>8} {:>6} {:>8} {:>9} {:>9}",
                            row.position, row.dim, row.rank_in, row.rank_out, row.homology
                        );
                    }
                }
                Some(p) => match SophQuotient::new(m, r, k, p as usize) {
                    Ok(sq) => {
                        println!("ambient {}", sq.space.ambient_dim());
                        println!("image {}", sq.image_rank);
                        println!("quotient {}", sq.dim());
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                },
            }
            ExitCode::SUCCESS
        }
    }
}
