use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mq_helmholtz::experiment::{
    run_experiment, run_validation, solve_once, DumpFlags, ExperimentConfig, ValidationLevel,
    CSV_HEADER,
};
use mq_helmholtz::points::{generate_cube, generate_sphere, write_point_cloud, Distribution};
use mq_helmholtz::Error;

#[derive(Parser)]
#[command(version, about = "MQ collocation for the 3D Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write results.csv into the configured output_dir.
    Run { config: PathBuf },
    /// Single method, single ε.
    Solve {
        config: PathBuf,
        /// Write A.txt, f.txt and alpha.txt.
        #[arg(long)]
        dump_matrix: bool,
        /// Write gcv.csv.
        #[arg(long)]
        dump_gcv: bool,
    },
    /// Run the built-in invariant checks.
    Validate {
        #[arg(long)]
        full: bool,
    },
    /// Generate a node set and write it in the native point-cloud format.
    GenPoints {
        /// cube or sphere
        geometry: String,
        n: usize,
        /// random[:seed], uniform or halton[:start]
        distribution: Distribution,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidPointSet(_)
        | Error::Parse { .. }
        | Error::Msh { .. } => 2,
        _ => 1,
    }
}

fn report(e: &Error) -> ExitCode {
    match e {
        Error::Config(list) => {
            eprintln!("configuration errors:");
            for m in list {
                eprintln!("  - {m}");
            }
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config).and_then(|cfg| {
            let out = run_experiment(&cfg)?;
            println!("{CSV_HEADER}");
            for r in &out.rows {
                println!("{}", r.to_csv());
            }
            eprintln!("wrote {}", out.csv_path.display());
            Ok(())
        }),
        Command::Solve {
            config,
            dump_matrix,
            dump_gcv,
        } => ExperimentConfig::load(&config).and_then(|cfg| {
            let dump = DumpFlags {
                matrix: dump_matrix,
                gcv: dump_gcv,
            };
            let out = solve_once(&cfg, dump)?;
            let r = &out.row;
            println!("method        {}", r.method.name());
            println!("N             {}", r.n);
            println!("epsilon       {}", r.epsilon);
            println!("kappa_A       {:e}", r.kappa);
            println!("param         {}", out.report.param.value());
            println!("Re_nodes      {:e}", r.re_nodes);
            println!("Re_offnodes   {:e}", r.re_offnodes);
            println!("rho           {:e}", r.rho);
            println!("eta           {:e}", r.eta);
            println!("iterations    {}", r.iterations);
            println!("interior res  {:e}", r.interior_residual);
            println!("cpu_seconds   {:.3}", r.cpu_seconds);
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }),
        Command::Validate { full } => {
            let level = if full { ValidationLevel::Full } else { ValidationLevel::Fast };
            let r = run_validation(level);
            print!("{r}");
            if r.passed() {
                Ok(())
            } else {
                let names: Vec<_> = r.failures().map(|c| c.name).collect();
                eprintln!("failed: {}", names.join(", "));
                return ExitCode::from(1);
            }
        }
        Command::GenPoints {
            geometry,
            n,
            distribution,
            output,
        } => {
            let pts = match geometry.as_str() {
                "cube" => generate_cube(n, distribution),
                "sphere" => generate_sphere(n, distribution),
                g => Err(Error::Config(vec![format!(
                    "geometry must be cube or sphere, got `{g}`"
                )])),
            };
            pts.and_then(|p| {
                write_point_cloud(&p, &output)?;
                eprintln!(
                    "wrote {} nodes ({} interior, {} boundary) to {}",
                    p.len(),
                    p.n_interior(),
                    p.n_boundary(),
                    output.display()
                );
                Ok(())
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
