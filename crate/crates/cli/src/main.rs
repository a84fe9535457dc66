mod args;

use std::io::Write;
use std::process::ExitCode;

use args::{isquare, square, Cli, Command, Format};
use clap::Parser;
use num_complex::Complex64 as C;
use serde_json::{json, Value};
use torus_greens::lattice::Twist;
use torus_greens::lattice_sum::{self, EvalConfig, SeriesValue};
use torus_greens::monopole::{self, AbelianField, Grid, MonopoleConfig};
use torus_greens::verify::{self, ResidualReport};
use torus_greens::Error;

const VERIFY_FAILED: u8 = 1;
const USAGE: u8 = 2;
const EVALUATOR: u8 = 3;

enum Failure {
    Usage(String),
    Evaluator(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::DegenerateLattice(_) => Failure::Usage(e.to_string()),
            _ => Failure::Evaluator(e.to_string()),
        }
    }
}

/// What a command produced: the rendered document and whether every check in
/// it passed.
struct Output {
    body: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(jobs) = cli.output.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: cannot start {jobs} worker threads: {e}");
            return ExitCode::from(EVALUATOR);
        }
    }
    let result = run(&cli.command, cli.output.format).and_then(|out| {
        write_output(cli.output.output.as_deref(), &out.body)?;
        Ok(out.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed: see rows with passed = false");
            ExitCode::from(VERIFY_FAILED)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Evaluator(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EVALUATOR)
        }
    }
}

fn write_output(path: Option<&std::path::Path>, body: &str) -> Result<(), Failure> {
    let res = match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    };
    res.map_err(|e| Failure::Evaluator(format!("cannot write output: {e}")))
}

fn run(command: &Command, format: Format) -> Result<Output, Failure> {
    match command {
        Command::Eval2(a) => {
            let cfg = a.series.config(a.mode);
            let twist = Twist::new(a.xi, isquare::<2, 4>(&a.w))?;
            let v = lattice_sum::r2(a.series.s, &square::<2, 4>(&a.metric), &a.x, &twist, &a.lattice, &cfg)?;
            series_output(complete(a.series.complete, a.series.s, v)?, format)
        }
        Command::Eval3(a) => {
            let cfg = a.series.config(a.mode);
            let twist = Twist::new(a.xi, isquare::<3, 9>(&a.w))?;
            let v = lattice_sum::r3(a.series.s, &square::<3, 9>(&a.metric), &a.x, &twist, &a.lattice, &cfg)?;
            series_output(complete(a.series.complete, a.series.s, v)?, format)
        }
        Command::Green(a) => {
            let mut cfg = EvalConfig::default().with_tol(a.tol).with_c0(a.c0);
            cfg.fourier_cutoff = a.cutoff;
            let twist = Twist::new(a.xi, isquare::<3, 9>(&a.w))?;
            series_output(lattice_sum::green3(&a.x, &twist, &a.lattice, a.mode.into(), &cfg)?, format)
        }
        Command::Icont(a) => {
            let cfg = a.series.config(a.mode);
            let v = lattice_sum::icont(a.series.s, &a.xi, &a.x, a.y, &a.lattice, &cfg)?;
            series_output(complete(a.series.complete, a.series.s, v)?, format)
        }
        Command::Verify(a) => {
            let rows = verify::run_suite(&a.suite, a.count as usize, a.seed, &EvalConfig::default(), a.tol)?;
            let meta = json!({"suite": a.suite, "count": a.count, "seed": a.seed});
            Ok(report_output(meta, &rows, format))
        }
        Command::Limit(a) => {
            let rows = verify::check_limit_c(a.s, &a.xi, &a.x, a.y, a.zeta, &a.c, &a.lattice, &EvalConfig::default(), a.tol)?;
            let meta = json!({"s": complex_json(a.s), "c": a.c, "final_tol": a.tol});
            Ok(report_output(meta, &rows, format))
        }
        Command::Monopole(a) => monopole_output(a, format),
    }
}

fn complete(on: bool, s: C, v: SeriesValue) -> Result<SeriesValue, Failure> {
    if on {
        Ok(lattice_sum::i_from_r(s, &v)?)
    } else {
        Ok(v)
    }
}

fn complex_json(z: C) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn series_output(v: SeriesValue, format: Format) -> Result<Output, Failure> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&v).expect("series value serializes") + "\n",
        Format::Csv => {
            let mut out = String::from("value_re,value_im,shells_used,last_shell_magnitude,strategy,pole_flag\n");
            out += &format!(
                "{:e},{:e},{},{:e},{},{}\n",
                v.value.re,
                v.value.im,
                v.shells_used,
                v.last_shell_magnitude,
                v.strategy.as_str(),
                v.pole_flag
            );
            out
        }
    };
    if let Some(d) = &v.diagnostic {
        eprintln!("note: {d}");
    }
    Ok(Output { body, passed: true })
}

fn report_output(mut meta: Value, rows: &[ResidualReport], format: Format) -> Output {
    let passed = rows.iter().all(|r| !r.failed());
    let body = match format {
        Format::Json => {
            meta["passed"] = json!(passed);
            meta["reports"] = serde_json::to_value(rows).expect("reports serialize");
            serde_json::to_string_pretty(&meta).expect("json") + "\n"
        }
        Format::Csv => verify::reports_to_csv(rows),
    };
    Output { body, passed }
}

fn monopole_output(a: &args::MonopoleArgs, format: Format) -> Result<Output, Failure> {
    let mut cfg = MonopoleConfig::quantized(a.m);
    cfg.g = a.g;
    if let Some(c0) = a.c0 {
        cfg.c0 = c0;
    }
    let grid = Grid::new(a.lo, a.hi, a.h)?;
    let field = AbelianField::dirac(grid, &cfg, true)?;
    if format == Format::Csv {
        return Ok(Output { body: field.to_csv(&cfg), passed: true });
    }
    let residual = monopole::bogomolny_residual(&field, a.h, cfg.g)?;
    let probe = C::new(0.5 * (a.lo[0] + a.hi[0]), 0.5 * (a.lo[1] + a.hi[1]));
    let jump = monopole::jump(probe, &cfg)?;
    let mut doc = json!({
        "config": {"m": cfg.m, "c0": complex_json(cfg.c0), "g": cfg.g, "quantized": cfg.is_quantized()},
        "grid": grid,
        "nodes": grid.len(),
        "bogomolny": residual,
        "jump": {"z": complex_json(probe), "value": complex_json(jump), "times_z": complex_json(jump * probe)},
    });
    let mut passed = true;
    if let Some(tau) = a.tau {
        let rep = monopole::modular_field_check(tau, &grid, &cfg, true)?;
        passed = !rep.failed();
        doc["modular"] = serde_json::to_value(&rep).expect("report serializes");
    }
    Ok(Output { body: serde_json::to_string_pretty(&doc).expect("json") + "\n", passed })
}
