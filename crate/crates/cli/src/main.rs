use std::path::{Path, PathBuf};
use std::process::ExitCode;

use birkhoff::coeffs::{BetaNormalization, BetaTable, ParamCoeffs, ParamSpec, SystemSpec};
use birkhoff::io::{emit_csv, load_spec, spec_to_json, Cell, LoadedSpec, Table};
use birkhoff::nth::{solve_fss, AnchorMode, SolveOptions};
use birkhoff::par::Execution;
use birkhoff::spectra::{roots_of_unity, sector_ordering, SectorFrame};
use birkhoff::system::{prepare, solve_system_all, SystemOptions};
use birkhoff::verify::{
    dyadic, expansion_errors, oracle_errors, run_criterion, slope_fit, system_oracle_errors,
    system_remainders, wronskian_errors, SweepReport, CRITERIA,
};
use birkhoff::{Error, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_SPEC: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Birkhoff-type fundamental systems of solutions for ODEs with a large spectral parameter.
#[derive(Parser)]
#[command(name = "birkhoff", version)]
struct Cli {
    /// Run every solve on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic roots, their order in a sector, and the eigenvector matrix.
    Roots {
        #[command(flatten)]
        common: Common,
    },
    /// Expansion coefficients sampled on a uniform grid.
    Coeffs {
        #[command(flatten)]
        common: Common,
        /// Number of grid intervals.
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Integrate the beta recurrence with zero value at alpha instead of the anchored constants.
        #[arg(long)]
        zero_at_anchor: bool,
    },
    /// Fundamental system of an n-th order equation at one rho.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
        /// Use endpoint-cancelling constants instead of C_j = delta_jk.
        #[arg(long)]
        anchored: bool,
    },
    /// Fundamental system of a first-order system (or companion-reduced equation) at one rho.
    SolveSystem {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
    /// Companion reduction of an n-th order equation to a first-order system (JSON).
    Reduce {
        #[command(flatten)]
        common: Common,
    },
    /// Error of one asymptotic claim along a dyadic |rho| sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        claim: Claim,
        #[arg(long, default_value_t = 16.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 2.0)]
        factor: f64,
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Offset of the ray from the sector midpoint, in radians.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle_offset: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Number of beta terms for the expansion claim.
        #[arg(long, default_value_t = 1)]
        terms: usize,
        #[arg(long)]
        anchored: bool,
        /// Slope bound reported in the pass column of stderr.
        #[arg(long, default_value_t = -0.8, allow_hyphen_values = true)]
        bound: f64,
    },
    /// Acceptance suite: pass/fail table on stdout, sweep data as CSV.
    Verify {
        /// Criteria to run (default all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
        /// Where to write the sweep CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Problem description (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Sector index mu, arg rho in (mu pi / n, (mu + 1) pi / n).
    #[arg(long, default_value_t = 0)]
    sector: usize,
    /// Override the expansion order N of the spec.
    #[arg(long = "order")]
    big_n: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Point {
    /// Complex rho as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "modulus")]
    rho: Option<C64>,
    /// |rho| on the sector midpoint ray.
    #[arg(long)]
    modulus: Option<f64>,
    /// Branch, 1-based (all branches when omitted).
    #[arg(long)]
    k: Option<usize>,
    /// Number of quadrature cells.
    #[arg(long, default_value_t = 512)]
    grid: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    /// `|z - partial sum|` of the beta expansion (n-th order).
    Expansion,
    /// `|W / (rho^{n(n-1)/2} V) - 1|` (n-th order).
    Wronskian,
    /// Relative discrepancy against the adaptive integrator.
    Oracle,
    /// `|W_k - W_k^0|` (systems).
    Remainder,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_spec_error() {
                ExitCode::from(EXIT_SPEC)
            } else if e.is_convergence_error() {
                ExitCode::from(EXIT_CONVERGENCE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(command: Command, exec: Execution) -> Outcome<()> {
    match command {
        Command::Roots { common } => {
            let spec = load(&common)?;
            write(
                &roots_table(&spec, common.sector)?,
                common.output.as_deref(),
            )
        }
        Command::Coeffs {
            common,
            points,
            zero_at_anchor,
        } => {
            let spec = load(&common)?;
            let norm = if zero_at_anchor {
                BetaNormalization::ZeroAtAnchor
            } else {
                BetaNormalization::Anchored
            };
            write(
                &coeffs_table(&spec, common.sector, points, norm)?,
                common.output.as_deref(),
            )
        }
        Command::Solve {
            common,
            point,
            anchored,
        } => {
            let LoadedSpec::Nth(spec) = load(&common)? else {
                return Err(Error::InvalidSpec(
                    "solve expects an nth_order spec; use solve-system".into(),
                )
                .into());
            };
            let frame = sector_ordering(&roots_of_unity(spec.n)?, common.sector)?;
            let rho = point_rho(&point, &frame)?;
            let anchors = if anchored {
                AnchorMode::Anchored
            } else {
                AnchorMode::Plain
            };
            let opts = SolveOptions {
                anchors,
                cells: point.grid,
                ..SolveOptions::default()
            };
            let fss = solve_fss(&spec, &frame, rho, &opts, exec)?;
            let mut table = Table::new(&["x", "k", "nu", "z_re", "z_im", "y_re", "y_im"]);
            for b in fss.iter().filter(|b| selected(&point, b.k)) {
                for (i, &x) in b.nodes.iter().enumerate() {
                    for nu in 0..spec.n {
                        table.push(row(x, b.k + 1, nu, b.z[nu][i], b.y(nu, i)));
                    }
                }
            }
            write(&table, common.output.as_deref())
        }
        Command::SolveSystem { common, point } => {
            let spec = as_system(load(&common)?)?;
            let frame = sector_ordering(&spec.root_system()?.roots, common.sector)?;
            let rho = point_rho(&point, &frame)?;
            let opts = SystemOptions {
                cells: point.grid,
                ..SystemOptions::default()
            };
            let fss = solve_system_all(&spec, &frame, rho, &opts, exec)?;
            let mut table = Table::new(&["x", "k", "nu", "z_re", "z_im", "y_re", "y_im"]);
            for b in fss.iter().filter(|b| selected(&point, b.k)) {
                for (i, &x) in b.nodes.iter().enumerate() {
                    let y = b.y(i);
                    for nu in 0..spec.n {
                        table.push(row(x, b.k + 1, nu, b.w[i][nu], y[nu]));
                    }
                }
            }
            write(&table, common.output.as_deref())
        }
        Command::Reduce { common } => {
            let param = match load(&common)? {
                LoadedSpec::Nth(s) => ParamSpec::from_nth(&s)?,
                LoadedSpec::Param(s) => s,
                LoadedSpec::System(_) => {
                    return Err(Error::InvalidSpec(
                        "reduce expects nth_order or nth_order_param".into(),
                    )
                    .into())
                }
            };
            let json = spec_to_json(&LoadedSpec::System(param.companion_reduce()?))?;
            match &common.output {
                Some(p) => std::fs::write(p, json + "\n").map_err(Error::from)?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Sweep {
            common,
            claim,
            rho_min,
            factor,
            count,
            angle_offset,
            grid,
            terms,
            anchored,
            bound,
        } => {
            if factor.is_nan() || factor <= 1.0 || count < 2 {
                return Err(
                    Error::InvalidSpec("sweep needs factor > 1 and count >= 2".into()).into(),
                );
            }
            let moduli = dyadic(rho_min, factor, count)?;
            let anchors = if anchored {
                AnchorMode::Anchored
            } else {
                AnchorMode::Plain
            };
            let spec = load(&common)?;
            let (name, errors) = match (&spec, claim) {
                (LoadedSpec::Nth(s), Claim::Expansion) => {
                    let frame = offset_frame(
                        sector_ordering(&roots_of_unity(s.n)?, common.sector)?,
                        angle_offset,
                    )?;
                    (
                        "expansion",
                        expansion_errors(s, &frame, &moduli, terms, anchors, grid, exec)?,
                    )
                }
                (LoadedSpec::Nth(s), Claim::Wronskian) => {
                    let frame = offset_frame(
                        sector_ordering(&roots_of_unity(s.n)?, common.sector)?,
                        angle_offset,
                    )?;
                    (
                        "wronskian",
                        wronskian_errors(s, &frame, &moduli, anchors, grid, exec)?,
                    )
                }
                (LoadedSpec::Nth(s), Claim::Oracle) => {
                    let frame = offset_frame(
                        sector_ordering(&roots_of_unity(s.n)?, common.sector)?,
                        angle_offset,
                    )?;
                    ("oracle", oracle_errors(s, &frame, &moduli, grid, exec)?)
                }
                (_, Claim::Remainder | Claim::Oracle) => {
                    let sys = as_system(spec)?;
                    let frame = offset_frame(
                        sector_ordering(&sys.root_system()?.roots, common.sector)?,
                        angle_offset,
                    )?;
                    match claim {
                        Claim::Remainder => (
                            "remainder",
                            system_remainders(&sys, &frame, &moduli, grid, exec)?,
                        ),
                        _ => (
                            "oracle",
                            system_oracle_errors(&sys, &frame, &moduli, grid, exec)?,
                        ),
                    }
                }
                _ => return Err(Error::InvalidSpec("claim needs an nth_order spec".into()).into()),
            };
            let mut table = sweep_header();
            if count >= 5 {
                let report = slope_fit(name, &moduli, &errors, bound)?;
                if let Some(s) = report.fitted_slope {
                    eprintln!(
                        "{name}: fitted slope {s:.3} (bound {bound}) {}",
                        if report.pass { "pass" } else { "fail" }
                    );
                }
                push_sweep(&mut table, &report);
            } else {
                for (i, (&m, &e)) in moduli.iter().zip(&errors).enumerate() {
                    let slope =
                        (i > 0).then(|| (e / errors[i - 1]).ln() / (m / moduli[i - 1]).ln());
                    table.push(vec![
                        Cell::Real(m),
                        Cell::Text(name.into()),
                        Cell::Real(e),
                        slope_cell(slope),
                    ]);
                }
            }
            write(&table, common.output.as_deref())
        }
        Command::Verify { criteria, output } => {
            let ids: Vec<usize> = if criteria.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                criteria
            };
            let mut table = sweep_header();
            let mut failed = Vec::new();
            for id in ids {
                let r = run_criterion(id, exec)?;
                println!(
                    "[{}] {:>2} {:<36} {:>7.2}s  {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.seconds,
                    r.detail
                );
                for s in &r.sweeps {
                    push_sweep(&mut table, s);
                }
                if !r.pass {
                    failed.push(r.id.to_string());
                }
            }
            if let Some(p) = &output {
                if table.rows.is_empty() {
                    eprintln!(
                        "no sweep data for the selected criteria; {} not written",
                        p.display()
                    );
                } else {
                    emit_csv(&table, p)?;
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verify(format!("criteria {}", failed.join(", "))))
            }
        }
    }
}

fn load(common: &Common) -> Outcome<LoadedSpec> {
    let spec = load_spec(&common.spec).map_err(|e| match e {
        Error::Io(io) => Error::InvalidSpec(format!("{}: {io}", common.spec.display())),
        other => other,
    })?;
    let Some(n) = common.big_n else {
        return Ok(spec);
    };
    Ok(match spec {
        LoadedSpec::Nth(s) => LoadedSpec::Nth(birkhoff::coeffs::ProblemSpecN::new(
            s.n, s.t, s.alpha, n, s.p,
        )?),
        LoadedSpec::System(s) => LoadedSpec::System(s.with_big_n(n)?),
        LoadedSpec::Param(s) => LoadedSpec::Param(ParamSpec::new(s.t, n, s.p_diag, s.p)?),
    })
}

fn as_system(spec: LoadedSpec) -> Outcome<SystemSpec> {
    Ok(match spec {
        LoadedSpec::System(s) => s,
        LoadedSpec::Param(s) => s.companion_reduce()?,
        LoadedSpec::Nth(s) => ParamSpec::from_nth(&s)?.companion_reduce()?,
    })
}

fn point_rho(point: &Point, frame: &SectorFrame) -> Outcome<C64> {
    match (point.rho, point.modulus) {
        (Some(r), _) => Ok(r),
        (None, Some(m)) => Ok(frame.rho(m)),
        (None, None) => Err(Error::InvalidSpec("give --rho re,im or --modulus".into()).into()),
    }
}

fn offset_frame(mut frame: SectorFrame, offset: f64) -> Outcome<SectorFrame> {
    let (lo, hi) = frame.bounds();
    let angle = frame.ray_angle + offset;
    if !(angle > lo && angle < hi) {
        return Err(Error::InvalidSpec(format!(
            "ray angle {angle} outside the open sector ({lo}, {hi})"
        ))
        .into());
    }
    frame.ray_angle = angle;
    Ok(frame)
}

fn selected(point: &Point, k: usize) -> bool {
    point.k.is_none_or(|want| want == k + 1)
}

fn row(x: f64, k: usize, nu: usize, z: C64, y: C64) -> Vec<Cell> {
    let [zr, zi] = Table::complex(z);
    let [yr, yi] = Table::complex(y);
    vec![
        Cell::Real(x),
        Cell::Int(k as i64),
        Cell::Int(nu as i64),
        zr,
        zi,
        yr,
        yi,
    ]
}

fn sweep_header() -> Table {
    Table::new(&["rho_mod", "claim", "error", "slope_partial"])
}

fn slope_cell(s: Option<f64>) -> Cell {
    s.map_or(Cell::Text(String::new()), Cell::Real)
}

fn push_sweep(table: &mut Table, report: &SweepReport) {
    for (i, (&m, &e)) in report.rho_moduli.iter().zip(&report.errors).enumerate() {
        let slope = i
            .checked_sub(1)
            .and_then(|j| report.partial_slopes.get(j).copied());
        table.push(vec![
            Cell::Real(m),
            Cell::Text(report.claim.clone()),
            Cell::Real(e),
            slope_cell(slope),
        ]);
    }
}

fn roots_table(spec: &LoadedSpec, sector: usize) -> Outcome<Table> {
    let rs = match spec {
        LoadedSpec::Nth(s) => birkhoff::spectra::RootSystem {
            roots: roots_of_unity(s.n)?,
            derivative_values: None,
            eigenvectors: None,
        },
        LoadedSpec::System(s) => s.root_system()?,
        LoadedSpec::Param(s) => s.companion_reduce()?.root_system()?,
    };
    let frame = sector_ordering(&rs.roots, sector)?;
    let mut table = Table::new(&["table", "row", "col", "re", "im"]);
    let mut push = |name: &str, r: usize, c: usize, z: C64| {
        let [re, im] = Table::complex(z);
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Int(r as i64),
            Cell::Int(c as i64),
            re,
            im,
        ]);
    };
    for (i, &r) in rs.roots.iter().enumerate() {
        push("roots", i, 0, r);
    }
    // col holds the unordered index of R_{row+1}
    for (i, &j) in frame.ordering.iter().enumerate() {
        push("ordered", i, j, rs.roots[j]);
    }
    if let Some(om) = &rs.eigenvectors {
        for r in 0..om.nrows() {
            for c in 0..om.ncols() {
                push("omega", r, c, om[(r, c)]);
            }
        }
    }
    Ok(table)
}

fn coeffs_table(
    spec: &LoadedSpec,
    sector: usize,
    points: usize,
    norm: BetaNormalization,
) -> Outcome<Table> {
    if points == 0 {
        return Err(Error::InvalidSpec("--points must be positive".into()).into());
    }
    let mut table = Table::new(&["x", "s_or_mu", "k", "nu", "re", "im"]);
    let mut push = |x: f64, s: Cell, k: usize, nu: usize, z: C64| {
        let [re, im] = Table::complex(z);
        table.push(vec![
            Cell::Real(x),
            s,
            Cell::Int(k as i64),
            Cell::Int(nu as i64),
            re,
            im,
        ]);
    };
    let grid = |t: f64| (0..=points).map(move |i| t * i as f64 / points as f64);
    match spec {
        LoadedSpec::Nth(s) => {
            // beta_s does not depend on the branch; k is reported as 0.
            let beta = BetaTable::new(s, norm)?;
            for step in 1..=beta.count() {
                for nu in 0..s.n {
                    let poly = beta.beta_nu(step, nu)?;
                    for x in grid(s.t) {
                        push(x, Cell::Int(step as i64), 0, nu, poly.value(x));
                    }
                }
            }
        }
        LoadedSpec::System(s) => {
            let frame = sector_ordering(&s.root_system()?.roots, sector)?;
            let prep = prepare(s, &frame)?;
            for mu in 0..=s.big_n {
                for k in 0..s.n {
                    for x in grid(s.t) {
                        let g = prep.gtable.value(mu, k, x);
                        for (nu, &v) in g.iter().enumerate() {
                            push(x, Cell::Int(mu as i64), k + 1, nu, v);
                        }
                    }
                }
            }
        }
        LoadedSpec::Param(s) => {
            let pc = ParamCoeffs::new(s)?;
            for k in 0..s.n {
                for x in grid(s.t) {
                    push(
                        x,
                        Cell::Text("omega".into()),
                        k + 1,
                        0,
                        pc.omega(k).value(x),
                    );
                }
            }
            for mu in 0..=s.big_n {
                for k in 0..s.n {
                    for x in grid(s.t) {
                        for nu in 0..s.n {
                            push(x, Cell::Int(mu as i64), k + 1, nu, pc.big_g(mu, nu, k, x)?);
                        }
                    }
                }
            }
        }
    }
    Ok(table)
}

fn write(table: &Table, path: Option<&Path>) -> Outcome<()> {
    match path {
        Some(p) => emit_csv(table, p)?,
        None => table.write_to(std::io::stdout().lock())?,
    }
    Ok(())
}
