use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use steady_core::bench::{self, parse_list, parse_sizes, Format, Status, SweepSpec};
use steady_core::factor::{lu_with, LuOptions};
use steady_core::sparse::mtx;
use steady_core::steady::{reorder, solve, validate, Method, Ordering, SolverOptions, ValidationOptions};
use steady_core::{band_profile, ModelSpec, Result, SparseComplexMatrix, System};

#[derive(Parser)]
#[command(name = "steady", version, about = "Steady states of Lindblad master equations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep sizes, methods and orderings and write one record per run.
    Bench(BenchArgs),
    /// Solve one model and print the validation report.
    Solve(SolveArgs),
    /// Print bandwidth and profile of a Matrix Market file.
    Inspect(InspectArgs),
    /// Write a model Liouvillian, and optionally its LU factors, as Matrix Market files.
    Export(ExportArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// jc, spin or optomech.
    #[arg(long)]
    system: Option<String>,
    /// Parameter override, repeatable: --param g=0.3
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// key = value parameter file; `system` and `size` may be given there.
    #[arg(long = "params-file")]
    params_file: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    #[arg(long = "drop-tol", default_value_t = 1e-4)]
    drop_tol: f64,
    #[arg(long, default_value_t = 300.0)]
    fill: f64,
    #[arg(long, default_value_t = 20)]
    restart: usize,
    #[arg(long = "max-iter", default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-15)]
    sigma: f64,
    /// Trace weight; derived from the Liouvillian diagonal when omitted.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long, default_value_t = 12345)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self, ordering: Ordering) -> SolverOptions {
        SolverOptions {
            ordering,
            tol: self.tol,
            drop_tol: self.drop_tol,
            fill: self.fill,
            restart: self.restart,
            max_iter: self.max_iter,
            sigma: self.sigma,
            weight: self.weight,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Sizes as a:b:step, a:b or a comma list.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value = "direct,gmres,bicgstab,power,power-gmres,power-bicgstab")]
    methods: String,
    #[arg(long, default_value = "natural,rcm,cmd")]
    orderings: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Run combinations in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value = "direct")]
    method: String,
    #[arg(long, default_value = "rcm")]
    ordering: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the per-iteration residual history as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the density matrix as a Matrix Market file.
    #[arg(long)]
    rho: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    path: PathBuf,
    /// Also report the profile after reverse Cuthill-McKee.
    #[arg(long)]
    rcm: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Shifted,
    Modified,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Modified)]
    variant: VariantArg,
    #[arg(long, default_value = "natural")]
    ordering: String,
    /// Also factor the (reordered) matrix and write L, U and the permutations.
    #[arg(long)]
    lu: bool,
    #[arg(long, default_value_t = 1e-15)]
    sigma: f64,
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long, default_value = "export")]
    out: PathBuf,
}

fn model_spec(args: &ModelArgs, size: Option<usize>) -> Result<ModelSpec> {
    let mut spec = match &args.params_file {
        Some(p) => ModelSpec::read_params(p)?,
        None => {
            let system: System = args
                .system
                .as_deref()
                .ok_or_else(|| steady_core::Error::InvalidArgument("--system is required".into()))?
                .parse()?;
            ModelSpec::new(system, size.unwrap_or(0))
        }
    };
    if let Some(s) = &args.system {
        spec.system = s.parse()?;
    }
    if let Some(n) = size {
        spec.size = n;
    }
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| steady_core::Error::InvalidArgument(format!("expected NAME=VALUE, got '{kv}'")))?;
        let v: f64 =
            v.trim().parse().map_err(|_| steady_core::Error::InvalidArgument(format!("bad value in '{kv}'")))?;
        spec.overrides.insert(k.trim().to_string(), v);
    }
    if spec.size == 0 {
        return Err(steady_core::Error::InvalidArgument("a positive --size is required".into()));
    }
    spec.params()?;
    Ok(spec)
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let sizes = parse_sizes(&a.sizes)?;
    // The size in a parameter file is replaced by the sweep sizes.
    let spec = model_spec(&a.model, sizes.first().copied())?;
    let sweep = SweepSpec {
        system: spec.system,
        sizes,
        methods: parse_list::<Method>(&a.methods)?,
        orderings: parse_list::<Ordering>(&a.orderings)?,
        overrides: spec.overrides.clone(),
        options: a.solver.options(Ordering::Natural),
        parallel: a.parallel,
    };
    let o = &sweep.options;
    eprintln!(
        "system={} sizes={:?} d={:e} p={} tol={:e} m={} max_iter={} sigma={:e} seed={} w={}",
        sweep.system,
        sweep.sizes,
        o.drop_tol,
        o.fill,
        o.tol,
        o.restart,
        o.max_iter,
        o.sigma,
        o.seed,
        o.weight.map_or("auto".to_string(), |w| format!("{w:e}")),
    );
    let records = bench::run_bench(&sweep)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        *counts.entry(r.status.as_str()).or_default() += 1;
        let note = if r.status == Status::Failed { format!(" ({})", r.error) } else { String::new() };
        eprintln!("{:>4} {:<15} {:<8} {}{}", r.size, r.method, r.ordering, r.status.as_str(), note);
    }
    let format = match a.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    bench::write_results(&records, &a.out, format)?;
    eprintln!("{} records written to {} {:?}", records.len(), a.out.display(), counts);
    Ok(())
}

fn run_solve(a: SolveArgs) -> Result<bool> {
    let spec = model_spec(&a.model, a.size)?;
    let method: Method = a.method.parse()?;
    let mut opts = a.solver.options(a.ordering.parse()?);
    opts.trace = a.trace.is_some();
    let l = spec.build()?.liouvillian()?;
    let r = solve(&l, method, &opts)?;
    println!("system      {} size {} (Hilbert dim {}, {} unknowns)", spec.system, spec.size, l.hilbert_dim(), l.size());
    println!("method      {} / {}", r.method, r.ordering);
    println!("converged   {} (breakdown {})", r.converged, r.breakdown);
    println!("iterations  {} inner, {} outer", r.iterations, r.outer_iterations);
    println!("residual    {:.3e}", r.residual);
    println!(
        "bandwidth   {} -> {}   profile {} -> {}",
        r.band_before.bandwidth, r.band_after.bandwidth, r.band_before.profile, r.band_after.profile
    );
    println!("fill factor {:.4}  ({} stored entries)", r.fill_factor, r.factor_nnz);
    if let Some(c) = r.condest {
        println!("condest     {c:.3e}");
    }
    println!(
        "parameters  d={:e} p={} tol={:e} m={} sigma={:e} w={} seed={}",
        opts.drop_tol,
        opts.fill,
        opts.tol,
        opts.restart,
        opts.sigma,
        r.weight.map_or("-".into(), |w| format!("{w:e}")),
        opts.seed
    );
    println!("times       build {:.3}s factor {:.3}s solve {:.3}s", r.build_time, r.factor_time, r.solve_time);
    let report = validate(&r.rho, &l, &ValidationOptions::default())?;
    println!("{report}");
    if let (Some(path), Some(trace)) = (&a.trace, &r.trace) {
        steady_core::krylov::write_trace(trace, std::fs::File::create(path)?)?;
    }
    if let Some(path) = &a.rho {
        mtx::write_path(&SparseComplexMatrix::from_dense(&r.rho), path)?;
    }
    Ok(report.passed())
}

fn run_inspect(a: InspectArgs) -> Result<()> {
    let m = mtx::read_path(&a.path)?;
    let bp = band_profile(&m)?;
    println!("{}: {}x{} with {} stored entries", a.path.display(), m.nrows(), m.ncols(), m.nnz());
    println!("bandwidth {} (upper {}, lower {})", bp.bandwidth, bp.ub, bp.lb);
    println!("profile   {} (upper {}, lower {})", bp.profile, bp.up, bp.lp);
    if a.rcm {
        let r = reorder(&m, Ordering::Rcm)?;
        println!(
            "rcm       bandwidth {} profile {} (reductions {:.4} / {:.4})",
            r.after.bandwidth,
            r.after.profile,
            bp.bandwidth as f64 / r.after.bandwidth as f64,
            bp.profile as f64 / r.after.profile as f64
        );
    }
    Ok(())
}

fn run_export(a: ExportArgs) -> Result<()> {
    let spec = model_spec(&a.model, a.size)?;
    let l = spec.build()?.liouvillian()?;
    let sys = match a.variant {
        VariantArg::Plain => l,
        VariantArg::Shifted => l.shift(Complex64::new(a.sigma, 0.0))?,
        VariantArg::Modified => {
            let w = a.weight.unwrap_or_else(|| l.default_weight(Default::default()));
            l.modified(w)?
        }
    };
    std::fs::create_dir_all(&a.out)?;
    mtx::write_path(sys.matrix(), a.out.join("liouvillian.mtx"))?;
    let ordering: Ordering = a.ordering.parse()?;
    let r = reorder(sys.matrix(), ordering)?;
    mtx::write_path(&r.matrix, a.out.join(format!("liouvillian_{ordering}.mtx")))?;
    println!("wrote {} ({} unknowns, {} stored entries)", a.out.display(), sys.size(), sys.matrix().nnz());
    if a.lu {
        let f = lu_with(&r.matrix, &r.col_order, LuOptions::default())?;
        f.export(&a.out)?;
        println!("LU fill factor {:.4} ({} stored entries)", f.fill_factor(), f.nnz());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Bench(a) => run_bench(a).map(|_| true),
        Cmd::Solve(a) => run_solve(a),
        Cmd::Inspect(a) => run_inspect(a).map(|_| true),
        Cmd::Export(a) => run_export(a).map(|_| true),
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
