//! Benchmark sweeps over model sizes, methods and orderings, and the
//! CSV/JSON result files they produce.
//!
//! A failed combination is data: it becomes a record with `status` set and
//! the error message attached, and the sweep carries on.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::liouvillian::LiouvillianSystem;
use crate::models::{ModelSpec, System};
use crate::ordering::band_profile;
use crate::steady::{solve, Method, Ordering, SolverOptions};

/// Bytes per stored factor entry: a complex value plus a column index.
pub const ENTRY_BYTES: usize = 24;

/// Columns that hold wall-clock timings and are excluded from determinism
/// comparisons.
pub const TIMING_COLUMNS: [&str; 3] = ["build_time", "factor_time", "solve_time"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    NotConverged,
    Breakdown,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NotConverged => "not-converged",
            Status::Breakdown => "breakdown",
            Status::Failed => "error",
        }
    }
}

impl FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(Status::Converged),
            "not-converged" => Ok(Status::NotConverged),
            "breakdown" => Ok(Status::Breakdown),
            "error" => Ok(Status::Failed),
            _ => Err(Error::invalid(format!("unknown status '{s}'"))),
        }
    }
}

/// Which Liouvillian variant a solver factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `L - sigma I`, used by inverse power.
    Shifted,
    /// The trace-modified system.
    Modified,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Shifted => "shifted",
            Variant::Modified => "modified",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted" => Ok(Variant::Shifted),
            "modified" => Ok(Variant::Modified),
            _ => Err(Error::invalid(format!("unknown variant '{s}'"))),
        }
    }
}

/// One method/ordering combination at one model size.
///
/// Fields that only exist after a successful solve are `None` when the
/// solver returned an error.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub system: System,
    pub size: usize,
    pub hilbert_dim: usize,
    /// `Shifted` for inverse power, `Modified` otherwise.
    pub variant: Variant,
    pub ordering: Ordering,
    pub method: Method,
    /// Stored entries of the solver's system matrix.
    pub nnz: usize,
    pub bandwidth_before: usize,
    pub bandwidth_after: Option<usize>,
    pub profile_before: usize,
    pub profile_after: Option<usize>,
    pub bandwidth_reduction: Option<f64>,
    pub profile_reduction: Option<f64>,
    pub fill_factor: Option<f64>,
    pub factor_nnz: Option<usize>,
    pub factor_bytes: Option<usize>,
    pub condest: Option<f64>,
    pub status: Status,
    pub converged: bool,
    pub breakdown: bool,
    pub iterations: Option<usize>,
    pub outer_iterations: Option<usize>,
    pub residual: Option<f64>,
    pub build_time: Option<f64>,
    pub factor_time: Option<f64>,
    pub solve_time: Option<f64>,
    pub drop_tol: f64,
    pub fill_limit: f64,
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub sigma: f64,
    /// Trace weight of the modified system; `None` for inverse power.
    pub weight: Option<f64>,
    pub seed: u64,
    /// Model parameters as `name=value` pairs separated by `;`.
    pub params: String,
    pub error: String,
}

/// Rounds to four significant digits.
pub fn round4(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.3e}").parse().unwrap_or(x)
}

fn ratio(before: usize, after: usize) -> f64 {
    round4(before as f64 / after as f64)
}

/// A sweep: every size × method × ordering combination for one system.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub system: System,
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub orderings: Vec<Ordering>,
    pub overrides: BTreeMap<String, f64>,
    pub options: SolverOptions,
    /// Run combinations on the rayon pool. Output order is unchanged.
    pub parallel: bool,
}

impl SweepSpec {
    pub fn new(system: System, sizes: Vec<usize>) -> Self {
        SweepSpec {
            system,
            sizes,
            methods: Method::ALL.to_vec(),
            orderings: Ordering::ALL.to_vec(),
            overrides: BTreeMap::new(),
            options: SolverOptions::default(),
            parallel: false,
        }
    }

    fn model(&self, size: usize) -> ModelSpec {
        ModelSpec { system: self.system, size, overrides: self.overrides.clone() }
    }

    fn check(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidSweep("no sizes".into()));
        }
        if let Some(&s) = self.sizes.iter().find(|&&s| s == 0) {
            return Err(Error::InvalidSweep(format!("size {s} is not positive")));
        }
        if !(self.options.tol > 0.0 && self.options.tol.is_finite()) {
            return Err(Error::InvalidSweep("tolerance must be positive".into()));
        }
        for &s in &self.sizes {
            self.model(s).hilbert_dim().map_err(|e| Error::InvalidSweep(e.to_string()))?;
        }
        Ok(())
    }
}

/// Parses `a:b:c` (inclusive range with step), `a:b` (step 1) or a comma list.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::InvalidSweep(format!("bad size '{t}'")));
    let parts: Vec<&str> = s.split(':').collect();
    let sizes = match parts.as_slice() {
        [one] => one.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [a, b] | [a, b, _] => {
            let (a, b) = (num(a)?, num(b)?);
            let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
            if step == 0 || b < a {
                return Err(Error::InvalidSweep(format!("bad range '{s}'")));
            }
            (a..=b).step_by(step).collect()
        }
        _ => return Err(Error::InvalidSweep(format!("bad size range '{s}'"))),
    };
    if sizes.is_empty() {
        return Err(Error::InvalidSweep("no sizes".into()));
    }
    Ok(sizes)
}

/// Parses a comma-separated list of tokens.
pub fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.parse()).collect()
}

fn params_string(p: &BTreeMap<String, f64>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v:e}")).collect::<Vec<_>>().join(";")
}

struct Prepared {
    size: usize,
    dim: usize,
    params: String,
    plain: Result<LiouvillianSystem>,
}

fn prepare(spec: &SweepSpec, size: usize) -> Prepared {
    let model = spec.model(size);
    let params = model.params().map(|p| params_string(&p)).unwrap_or_default();
    let dim = model.hilbert_dim().unwrap_or(0);
    let plain = model.build().and_then(|m| m.liouvillian());
    Prepared { size, dim, params, plain }
}

fn run_one(spec: &SweepSpec, p: &Prepared, method: Method, ordering: Ordering) -> BenchRecord {
    let opts = SolverOptions { ordering, ..spec.options };
    let variant = if method.is_power() { Variant::Shifted } else { Variant::Modified };
    let mut rec = BenchRecord {
        system: spec.system,
        size: p.size,
        hilbert_dim: p.dim,
        variant,
        ordering,
        method,
        nnz: 0,
        bandwidth_before: 0,
        bandwidth_after: None,
        profile_before: 0,
        profile_after: None,
        bandwidth_reduction: None,
        profile_reduction: None,
        fill_factor: None,
        factor_nnz: None,
        factor_bytes: None,
        condest: None,
        status: Status::Failed,
        converged: false,
        breakdown: false,
        iterations: None,
        outer_iterations: None,
        residual: None,
        build_time: None,
        factor_time: None,
        solve_time: None,
        drop_tol: opts.drop_tol,
        fill_limit: opts.fill,
        tol: opts.tol,
        restart: opts.restart,
        max_iter: opts.max_iter,
        sigma: opts.sigma,
        weight: None,
        seed: opts.seed,
        params: p.params.clone(),
        error: String::new(),
    };
    let l = match &p.plain {
        Ok(l) => l,
        Err(e) => {
            rec.error = e.to_string();
            return rec;
        }
    };

    // The unordered system matrix is cheap to form; recording it here keeps
    // failed rows comparable with successful ones.
    let system = if method.is_power() {
        l.shift(num_complex::Complex64::new(opts.sigma, 0.0))
    } else {
        let w = opts.weight.unwrap_or_else(|| l.default_weight(opts.weight_rule));
        rec.weight = Some(w);
        l.modified(w)
    };
    match system.and_then(|s| Ok((s.matrix().nnz(), band_profile(s.matrix())?))) {
        Ok((nnz, bp)) => {
            rec.nnz = nnz;
            rec.bandwidth_before = bp.bandwidth;
            rec.profile_before = bp.profile;
        }
        Err(e) => {
            rec.error = e.to_string();
            return rec;
        }
    }

    match solve(l, method, &opts) {
        Ok(r) => {
            let (b, a) = (r.band_before, r.band_after);
            rec.bandwidth_after = Some(a.bandwidth);
            rec.profile_after = Some(a.profile);
            rec.bandwidth_reduction = Some(ratio(b.bandwidth, a.bandwidth));
            rec.profile_reduction = Some(ratio(b.profile, a.profile));
            rec.fill_factor = Some(r.fill_factor);
            rec.factor_nnz = Some(r.factor_nnz);
            rec.factor_bytes = Some(r.factor_nnz * ENTRY_BYTES);
            rec.condest = r.condest;
            rec.converged = r.converged;
            rec.breakdown = r.breakdown;
            rec.status = if r.breakdown {
                Status::Breakdown
            } else if r.converged {
                Status::Converged
            } else {
                Status::NotConverged
            };
            rec.iterations = Some(r.iterations);
            rec.outer_iterations = Some(r.outer_iterations);
            rec.residual = Some(r.residual);
            rec.build_time = Some(r.build_time);
            rec.factor_time = Some(r.factor_time);
            rec.solve_time = Some(r.solve_time);
        }
        Err(e) => {
            rec.breakdown = matches!(e, Error::PreconditionerBreakdown { .. } | Error::InnerSolverFailure(_));
            if rec.breakdown {
                rec.status = Status::Breakdown;
            }
            rec.error = e.to_string();
        }
    }
    rec
}

/// Runs every combination of the sweep. Only an invalid sweep is an error;
/// solver failures become records.
pub fn run_bench(spec: &SweepSpec) -> Result<Vec<BenchRecord>> {
    spec.check()?;
    if spec.methods.is_empty() || spec.orderings.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for &size in &spec.sizes {
        let p = prepare(spec, size);
        let combos: Vec<(Method, Ordering)> =
            spec.methods.iter().flat_map(|&m| spec.orderings.iter().map(move |&o| (m, o))).collect();
        let recs: Vec<BenchRecord> = if spec.parallel {
            combos.par_iter().map(|&(m, o)| run_one(spec, &p, m, o)).collect()
        } else {
            combos.iter().map(|&(m, o)| run_one(spec, &p, m, o)).collect()
        };
        out.extend(recs);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::invalid(format!("unknown format '{s}'"))),
        }
    }
}

/// Column names in file order.
pub const COLUMNS: [&str; 36] = [
    "system",
    "size",
    "hilbert_dim",
    "variant",
    "ordering",
    "method",
    "nnz",
    "bandwidth_before",
    "bandwidth_after",
    "profile_before",
    "profile_after",
    "bandwidth_reduction",
    "profile_reduction",
    "fill_factor",
    "factor_nnz",
    "factor_bytes",
    "condest",
    "status",
    "converged",
    "breakdown",
    "iterations",
    "outer_iterations",
    "residual",
    "build_time",
    "factor_time",
    "solve_time",
    "drop_tol",
    "fill_limit",
    "tol",
    "restart",
    "max_iter",
    "sigma",
    "weight",
    "seed",
    "params",
    "error",
];

#[derive(Clone, Debug, PartialEq)]
enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Null,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    /// JSON text; non-finite floats become `null`.
    fn json(&self) -> Result<String> {
        Ok(match self {
            Cell::Str(s) => serde_json::to_string(s)?,
            Cell::Float(x) if !x.is_finite() => "null".into(),
            Cell::Null => "null".into(),
            c => c.text(),
        })
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> Cell) -> Cell {
    v.map_or(Cell::Null, f)
}

fn int(v: usize) -> Cell {
    Cell::Int(v as u64)
}

impl BenchRecord {
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.system.as_str().into()),
            int(self.size),
            int(self.hilbert_dim),
            Cell::Str(self.variant.as_str().into()),
            Cell::Str(self.ordering.as_str().into()),
            Cell::Str(self.method.as_str().into()),
            int(self.nnz),
            int(self.bandwidth_before),
            opt(self.bandwidth_after, int),
            int(self.profile_before),
            opt(self.profile_after, int),
            opt(self.bandwidth_reduction, Cell::Float),
            opt(self.profile_reduction, Cell::Float),
            opt(self.fill_factor, Cell::Float),
            opt(self.factor_nnz, int),
            opt(self.factor_bytes, int),
            opt(self.condest, Cell::Float),
            Cell::Str(self.status.as_str().into()),
            Cell::Bool(self.converged),
            Cell::Bool(self.breakdown),
            opt(self.iterations, int),
            opt(self.outer_iterations, int),
            opt(self.residual, Cell::Float),
            opt(self.build_time, Cell::Float),
            opt(self.factor_time, Cell::Float),
            opt(self.solve_time, Cell::Float),
            Cell::Float(self.drop_tol),
            Cell::Float(self.fill_limit),
            Cell::Float(self.tol),
            int(self.restart),
            int(self.max_iter),
            Cell::Float(self.sigma),
            opt(self.weight, Cell::Float),
            Cell::Int(self.seed),
            Cell::Str(self.params.clone()),
            Cell::Str(self.error.clone()),
        ]
    }

    fn from_fields(get: &dyn Fn(&str) -> Result<Field>) -> Result<Self> {
        Ok(BenchRecord {
            system: get("system")?.parse()?,
            size: get("size")?.usize()?,
            hilbert_dim: get("hilbert_dim")?.usize()?,
            variant: get("variant")?.parse()?,
            ordering: get("ordering")?.parse()?,
            method: get("method")?.parse()?,
            nnz: get("nnz")?.usize()?,
            bandwidth_before: get("bandwidth_before")?.usize()?,
            bandwidth_after: get("bandwidth_after")?.opt_usize()?,
            profile_before: get("profile_before")?.usize()?,
            profile_after: get("profile_after")?.opt_usize()?,
            bandwidth_reduction: get("bandwidth_reduction")?.opt_f64()?,
            profile_reduction: get("profile_reduction")?.opt_f64()?,
            fill_factor: get("fill_factor")?.opt_f64()?,
            factor_nnz: get("factor_nnz")?.opt_usize()?,
            factor_bytes: get("factor_bytes")?.opt_usize()?,
            condest: get("condest")?.opt_f64()?,
            status: get("status")?.parse()?,
            converged: get("converged")?.bool()?,
            breakdown: get("breakdown")?.bool()?,
            iterations: get("iterations")?.opt_usize()?,
            outer_iterations: get("outer_iterations")?.opt_usize()?,
            residual: get("residual")?.opt_f64()?,
            build_time: get("build_time")?.opt_f64()?,
            factor_time: get("factor_time")?.opt_f64()?,
            solve_time: get("solve_time")?.opt_f64()?,
            drop_tol: get("drop_tol")?.f64()?,
            fill_limit: get("fill_limit")?.f64()?,
            tol: get("tol")?.f64()?,
            restart: get("restart")?.usize()?,
            max_iter: get("max_iter")?.usize()?,
            sigma: get("sigma")?.f64()?,
            weight: get("weight")?.opt_f64()?,
            seed: get("seed")?.u64()?,
            params: get("params")?.0.unwrap_or_default(),
            error: get("error")?.0.unwrap_or_default(),
        })
    }
}

/// A raw field value; `None` is an empty CSV cell or a JSON null.
struct Field(Option<String>, &'static str);

impl Field {
    fn err(&self, what: &str) -> Error {
        Error::invalid(format!("column '{}': expected {what}, found {:?}", self.1, self.0))
    }
    fn str(&self) -> Result<&str> {
        self.0.as_deref().ok_or_else(|| self.err("a value"))
    }
    fn parse<T: FromStr>(&self) -> Result<T> {
        self.str()?.parse().map_err(|_| self.err("a known token"))
    }
    fn u64(&self) -> Result<u64> {
        self.str()?.parse().map_err(|_| self.err("an integer"))
    }
    fn usize(&self) -> Result<usize> {
        self.str()?.parse().map_err(|_| self.err("an integer"))
    }
    fn opt_usize(&self) -> Result<Option<usize>> {
        self.0.as_ref().map(|_| self.usize()).transpose()
    }
    fn f64(&self) -> Result<f64> {
        self.str()?.parse().map_err(|_| self.err("a number"))
    }
    fn opt_f64(&self) -> Result<Option<f64>> {
        self.0.as_ref().map(|_| self.f64()).transpose()
    }
    fn bool(&self) -> Result<bool> {
        self.str()?.parse().map_err(|_| self.err("true or false"))
    }
}

fn column(name: &str) -> Result<&'static str> {
    COLUMNS.iter().copied().find(|&c| c == name).ok_or_else(|| Error::invalid(format!("unknown column '{name}'")))
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(COLUMNS)?;
    for r in records {
        wr.write_record(r.cells().iter().map(Cell::text))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let get = |name: &str| -> Result<Field> {
            let c = column(name)?;
            let i = header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid(format!("missing column '{name}'")))?;
            let v = row.get(i).unwrap_or("");
            Ok(Field((!v.is_empty()).then(|| v.to_string()), c))
        };
        out.push(BenchRecord::from_fields(&get)?);
    }
    Ok(out)
}

/// Writes a JSON array of objects with keys in column order. Floats are
/// written by hand so they keep seventeen significant digits.
pub fn write_json<W: Write>(records: &[BenchRecord], mut w: W) -> Result<()> {
    write!(w, "[")?;
    for (i, r) in records.iter().enumerate() {
        write!(w, "{}\n  {{", if i == 0 { "" } else { "," })?;
        for (j, (name, cell)) in COLUMNS.iter().zip(r.cells()).enumerate() {
            write!(w, "{}\n    \"{name}\": {}", if j == 0 { "" } else { "," }, cell.json()?)?;
        }
        write!(w, "\n  }}")?;
    }
    writeln!(w, "{}]", if records.is_empty() { "" } else { "\n" })?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<BenchRecord>> {
    let rows: Vec<Map<String, Value>> = serde_json::from_reader(r)?;
    rows.iter()
        .map(|obj| {
            let get = |name: &str| -> Result<Field> {
                let c = column(name)?;
                let v = match obj.get(name) {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.clone()),
                    Some(v) => Some(v.to_string()),
                };
                Ok(Field(v, c))
            };
            BenchRecord::from_fields(&get)
        })
        .collect()
}

pub fn write_results(records: &[BenchRecord], path: impl AsRef<Path>, format: Format) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(records, w),
        Format::Json => write_json(records, w),
    }
}

pub fn read_results(path: impl AsRef<Path>, format: Format) -> Result<Vec<BenchRecord>> {
    let r = BufReader::new(File::open(path)?);
    match format {
        Format::Csv => read_csv(r),
        Format::Json => read_json(r),
    }
}
