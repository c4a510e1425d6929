#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockess::analysis::{
    self, max_diff, min_eff, monotonicity_report, oracle_check, sweep, table1, table2,
    table2_layout, with_workers, write_csv, RhoGrid, SweepRow, MONOTONICITY_CAP,
};
use blockess::{
    ess_block_auto, ess_full_auto, Arrangement, Blocking, BlockingSpec, CorrelationModel, EssError,
    PointGeometry,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Effective sample size under full and block likelihood.
#[derive(Parser, Debug)]
#[command(name = "blockess", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model spec, e.g. `ar1:rho=0.6`, `matern-l2-1.5:rho=0.8`,
    /// `ar1pos:rho=0.6,positions=FILE`, `kron:(ar1:rho=0.5)x(invlin:rho=1)`
    #[arg(long)]
    model: String,

    /// Points on a line
    #[arg(long)]
    n: Option<usize>,

    /// Grid rows
    #[arg(long, requires = "n2")]
    n1: Option<usize>,

    /// Grid columns
    #[arg(long, requires = "n1")]
    n2: Option<usize>,

    /// Predictor vector, one value per line, in place of the vector of ones
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,

    /// Decimals for displayed values (full precision otherwise)
    #[arg(long, value_name = "D")]
    round: Option<usize>,

    /// Worker threads (default: available parallelism)
    #[arg(long, value_name = "K")]
    workers: Option<usize>,

    /// Emit CSV rows instead of plain text
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// ρ grid `a:b:step`
    #[arg(long, value_name = "a:b:step")]
    rho_grid: Option<String>,

    /// Read grid values as `(n-1)ρ` (linear model only)
    #[arg(long)]
    scaled_rho: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full-likelihood ESS
    Ess {
        #[command(flatten)]
        common: Common,
    },
    /// Block-likelihood ESS for each blocking
    Essb {
        #[command(flatten)]
        common: Common,
        /// Blocking spec, e.g. `rw:m=30`, `cw2d:m1=2,m2=3`, `custom:file=PATH`
        #[arg(long, required = true)]
        blocking: Vec<String>,
    },
    /// Efficiency ESS_B / ESS for each blocking, on one line
    Eff {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true)]
        blocking: Vec<String>,
    },
    /// Full sweep over a ρ grid, written as CSV
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true)]
        blocking: Vec<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Smallest efficiency over the ρ grid (default 0.001..0.999)
    Mineff {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true)]
        blocking: Vec<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Largest ESS - ESS_B over the ρ grid (default 0.001..0.999)
    Maxdiff {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true)]
        blocking: Vec<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Whether ESS_B is nondecreasing in b over the divisors of n
    Mono {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: Kind,
        #[command(flatten)]
        grid: GridArgs,
        /// Largest n accepted
        #[arg(long, default_value_t = MONOTONICITY_CAP)]
        cap: usize,
    },
    /// Efficiency pairs on the three small grids
    Table1 {
        #[arg(long, value_name = "D", default_value_t = 3)]
        round: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        csv: bool,
    },
    /// Percentage gains of CW over RW blocking on the 4056 x 5184 grid
    Table2 {
        /// Shrink the block counts by this factor
        #[arg(long, value_name = "S", default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_name = "D", default_value_t = 2)]
        round: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        csv: bool,
    },
    /// Random comparison of the fast paths against the dense definition
    OracleCheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kind {
    Rw,
    Cw,
}

enum Failure {
    Usage(String),
    Engine(EssError),
    Io(io::Error),
}

impl From<EssError> for Failure {
    fn from(e: EssError) -> Self {
        Failure::Engine(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn exit_code(e: &EssError) -> u8 {
    match e {
        EssError::NotPositiveDefinite { .. }
        | EssError::NotSymmetric { .. }
        | EssError::Numerical(_)
        | EssError::Unsupported(_) => 2,
        EssError::CapExceeded(_) => 3,
        _ => 1,
    }
}

fn fmt_value(x: f64, round: Option<usize>) -> String {
    match round {
        Some(d) => format!("{x:.d$}"),
        None => format!("{x}"),
    }
}

fn read_weights(path: &Path) -> Out<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("invalid weight {l:?} in {}", path.display())))
        })
        .collect()
}

struct Setup {
    model: CorrelationModel,
    geom: PointGeometry,
    weights: Option<Vec<f64>>,
}

fn setup(c: &Common, family_only: bool) -> Out<Setup> {
    let model = if family_only {
        CorrelationModel::parse_family(&c.model)?
    } else {
        CorrelationModel::parse(&c.model)?
    };
    let geom = match (c.n, c.n1, c.n2, &model) {
        (None, Some(n1), Some(n2), _) => PointGeometry::grid(n1, n2)?,
        (Some(n), None, None, _) => PointGeometry::Line(n),
        (None, None, None, CorrelationModel::Ar1Positions { positions, .. }) => {
            PointGeometry::Line(positions.len())
        }
        (Some(_), Some(_), _, _) => {
            return Err(Failure::Usage(
                "give either --n or --n1/--n2, not both".into(),
            ))
        }
        _ => {
            return Err(Failure::Usage(
                "missing geometry: --n or --n1 and --n2".into(),
            ))
        }
    };
    if !family_only {
        model.validate(&geom)?;
    }
    let weights = c.weights.as_deref().map(read_weights).transpose()?;
    Ok(Setup {
        model,
        geom,
        weights,
    })
}

fn blockings(specs: &[String], geom: &PointGeometry) -> Out<Vec<Blocking>> {
    specs
        .iter()
        .map(|s| Ok(BlockingSpec::parse(s)?.build(geom)?))
        .collect()
}

/// The grid in model units, plus the factor that maps ρ back to what the user typed.
fn grid_for(
    g: &GridArgs,
    family: &CorrelationModel,
    n: usize,
    default: RhoGrid,
) -> Out<(RhoGrid, f64)> {
    let grid = match &g.rho_grid {
        Some(spec) => RhoGrid::parse(spec)?,
        None => default,
    };
    let (grid, factor) = if g.scaled_rho {
        if !matches!(family, CorrelationModel::Linear { .. }) {
            return Err(Failure::Usage(
                "--scaled-rho applies to the linear model only".into(),
            ));
        }
        (
            RhoGrid::linear_scaled(n, grid.values())?,
            n.saturating_sub(1) as f64,
        )
    } else {
        (grid, 1.0)
    };
    grid.validate_for(family, n)?;
    Ok((grid, factor))
}

fn unscale(rho: f64, factor: f64) -> f64 {
    if factor == 1.0 {
        rho
    } else {
        (rho * factor * 1e12).round() / 1e12
    }
}

fn print_rows(rows: &[SweepRow], round: Option<usize>) -> Out<()> {
    write_csv(rows, io::stdout().lock(), round)?;
    Ok(())
}

fn run(cmd: Command) -> Out<()> {
    let mut out = io::stdout().lock();
    match cmd {
        Command::Ess { common } => {
            let s = setup(&common, false)?;
            let v = with_workers(common.workers, || {
                ess_full_auto(&s.model, &s.geom, s.weights.as_deref())
            })??;
            writeln!(out, "{}", fmt_value(v.value, common.round))?;
        }
        Command::Essb { common, blocking } | Command::Eff { common, blocking } if common.csv => {
            let s = setup(&common, false)?;
            let bl = blockings(&blocking, &s.geom)?;
            let grid = RhoGrid::new(vec![s.model.rho()])?;
            let rows = with_workers(common.workers, || {
                sweep(&s.model, &grid, &s.geom, &bl, s.weights.as_deref())
            })??;
            drop(out);
            print_rows(&rows, common.round)?;
        }
        Command::Essb { common, blocking } => {
            let s = setup(&common, false)?;
            let bl = blockings(&blocking, &s.geom)?;
            let vals = with_workers(common.workers, || {
                bl.iter()
                    .map(|b| Ok(ess_block_auto(&s.model, &s.geom, b, s.weights.as_deref())?.value))
                    .collect::<blockess::Result<Vec<_>>>()
            })??;
            let line: Vec<String> = vals.iter().map(|&v| fmt_value(v, common.round)).collect();
            writeln!(out, "{}", line.join("\t"))?;
        }
        Command::Eff { common, blocking } => {
            let s = setup(&common, false)?;
            let bl = blockings(&blocking, &s.geom)?;
            let effs = with_workers(common.workers, || -> blockess::Result<Vec<f64>> {
                let full = ess_full_auto(&s.model, &s.geom, s.weights.as_deref())?.value;
                bl.iter()
                    .map(|b| {
                        let v = ess_block_auto(&s.model, &s.geom, b, s.weights.as_deref())?.value;
                        analysis::efficiency(v, full)
                    })
                    .collect()
            })??;
            let line: Vec<String> = effs.iter().map(|&v| fmt_value(v, common.round)).collect();
            writeln!(out, "{}", line.join("\t"))?;
        }
        Command::Sweep {
            common,
            blocking,
            grid,
        } => {
            let s = setup(&common, true)?;
            let bl = blockings(&blocking, &s.geom)?;
            let (g, factor) = grid_for(&grid, &s.model, s.geom.len(), RhoGrid::deciles())?;
            let mut rows = with_workers(common.workers, || {
                sweep(&s.model, &g, &s.geom, &bl, s.weights.as_deref())
            })??;
            for r in &mut rows {
                r.rho = unscale(r.rho, factor);
            }
            drop(out);
            print_rows(&rows, common.round)?;
        }
        Command::Mineff {
            common,
            blocking,
            grid,
        }
        | Command::Maxdiff {
            common,
            blocking,
            grid,
        } if common.weights.is_some() => {
            let _ = (blocking, grid);
            return Err(Failure::Usage(
                "--weights is not supported by mineff/maxdiff".into(),
            ));
        }
        Command::Mineff {
            common,
            blocking,
            grid,
        } => {
            scan(&mut out, &common, &blocking, &grid, min_eff)?;
        }
        Command::Maxdiff {
            common,
            blocking,
            grid,
        } => {
            scan(&mut out, &common, &blocking, &grid, max_diff)?;
        }
        Command::Mono {
            common,
            kind,
            grid,
            cap,
        } => {
            let s = setup(&common, true)?;
            let PointGeometry::Line(n) = s.geom else {
                return Err(Failure::Usage("mono needs a 1D geometry (--n)".into()));
            };
            let (g, factor) = grid_for(&grid, &s.model, n, RhoGrid::deciles())?;
            let arr = match kind {
                Kind::Rw => Arrangement::Row,
                Kind::Cw => Arrangement::Col,
            };
            let rows = with_workers(common.workers, || {
                monotonicity_report(&s.model, n, &g, arr, cap)
            })??;
            for r in rows {
                if r.is_monotone() {
                    writeln!(out, "{}\tmonotone", unscale(r.rho, factor))?;
                } else {
                    let v: Vec<String> = r
                        .violations
                        .iter()
                        .map(|v| {
                            format!(
                                "{}->{} ({} > {})",
                                v.b,
                                v.b_next,
                                fmt_value(v.ess, common.round),
                                fmt_value(v.ess_next, common.round)
                            )
                        })
                        .collect();
                    writeln!(
                        out,
                        "{}\tviolations\t{}",
                        unscale(r.rho, factor),
                        v.join("\t")
                    )?;
                }
            }
        }
        Command::Table1 {
            round,
            workers,
            csv,
        } => {
            let rows = with_workers(workers, table1)??;
            if csv {
                writeln!(
                    out,
                    "n,b1,b2,m1,m2,model,rho,ess_full,ess_row,ess_col,eff_row,eff_col"
                )?;
                for r in &rows {
                    let l = r.layout;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        r.n,
                        l.b1,
                        l.b2,
                        l.m1,
                        l.m2,
                        r.model,
                        r.rho,
                        r.ess_full,
                        r.ess_row,
                        r.ess_col,
                        r.eff_row,
                        r.eff_col
                    )?;
                }
            } else {
                writeln!(
                    out,
                    "{:<6} {:<16} {:<14} {:>4}  (Eff_row, Eff_col)",
                    "n", "(b1,b2,m1,m2)", "model", "rho"
                )?;
                for r in &rows {
                    let l = r.layout;
                    writeln!(
                        out,
                        "{:<6} {:<16} {:<14} {:>4}  ({:.d$}, {:.d$})",
                        r.n,
                        format!("({},{},{},{})", l.b1, l.b2, l.m1, l.m2),
                        r.model,
                        r.rho,
                        r.eff_row,
                        r.eff_col,
                        d = round
                    )?;
                }
            }
        }
        Command::Table2 {
            scale,
            round,
            workers,
            csv,
        } => {
            if !(scale >= 1.0) {
                return Err(Failure::Usage(format!("--scale must be >= 1, got {scale}")));
            }
            let layout = table2_layout(scale);
            eprintln!(
                "grid {}x{} = {} points, (b1,b2,m1,m2) = ({},{},{},{})",
                layout.n1(),
                layout.n2(),
                layout.n1() * layout.n2(),
                layout.b1,
                layout.b2,
                layout.m1,
                layout.m2
            );
            let rows = with_workers(workers, || {
                table2(layout, |r| {
                    eprintln!(
                        "{} rho={} gain={:.4} ({:.1}s)",
                        r.model, r.rho, r.gain, r.wall_time
                    )
                })
            })??;
            if csv {
                writeln!(out, "model,rho,n,b1,b2,m1,m2,ess_row,ess_col,gain")?;
                for r in &rows {
                    let l = r.layout;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{:.16e},{:.16e},{:.16e}",
                        r.model,
                        r.rho,
                        l.n1() * l.n2(),
                        l.b1,
                        l.b2,
                        l.m1,
                        l.m2,
                        r.ess_row,
                        r.ess_col,
                        r.gain
                    )?;
                }
            } else {
                let head: Vec<String> = (1..=9)
                    .map(|k| format!("{:>7}", format!("{:.1}", k as f64 / 10.0)))
                    .collect();
                writeln!(out, "{:<14}{}", "model", head.join(""))?;
                for chunk in rows.chunks(9) {
                    let vals: Vec<String> = chunk
                        .iter()
                        .map(|r| format!("{:>7.d$}", r.gain, d = round))
                        .collect();
                    writeln!(out, "{:<14}{}", chunk[0].model, vals.join(""))?;
                }
            }
        }
        Command::OracleCheck {
            seed,
            cases,
            workers,
        } => {
            let s = with_workers(workers, || oracle_check(seed, cases))??;
            for f in &s.failures {
                eprintln!("mismatch: {f}");
            }
            writeln!(out, "{}/{} passed", s.passed, s.total)?;
            if s.passed != s.total {
                out.flush()?;
                return Err(Failure::Engine(EssError::Numerical(format!(
                    "{} oracle mismatches",
                    s.total - s.passed
                ))));
            }
        }
    }
    Ok(())
}

type ScanFn =
    fn(&CorrelationModel, &PointGeometry, &Blocking, &RhoGrid) -> blockess::Result<(f64, f64)>;

fn scan(out: &mut impl Write, c: &Common, specs: &[String], g: &GridArgs, f: ScanFn) -> Out<()> {
    let s = setup(c, true)?;
    let bl = blockings(specs, &s.geom)?;
    let (grid, factor) = grid_for(g, &s.model, s.geom.len(), RhoGrid::fine())?;
    let res = with_workers(c.workers, || {
        bl.iter()
            .map(|b| f(&s.model, &s.geom, b, &grid))
            .collect::<blockess::Result<Vec<_>>>()
    })??;
    for (b, (rho, v)) in bl.iter().zip(res) {
        writeln!(
            out,
            "{}\t{}\t{}",
            b.tag(),
            unscale(rho, factor),
            fmt_value(v, c.round)
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
