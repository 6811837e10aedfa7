//! The three benchmark systems: a driven Jaynes-Cummings cavity, a driven
//! spin chain with dephasing, and a driven optomechanical cavity.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouvillian::{build_liouvillian, LiouvillianSystem};
use crate::quantum::{create, destroy, embed, number, spin_ops, QuantumOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    JaynesCummings,
    SpinChain,
    Optomechanical,
}

impl System {
    pub const ALL: [System; 3] = [System::JaynesCummings, System::SpinChain, System::Optomechanical];

    /// Short name used on the command line and in result files.
    pub fn as_str(self) -> &'static str {
        match self {
            System::JaynesCummings => "jc",
            System::SpinChain => "spin",
            System::Optomechanical => "optomech",
        }
    }

    /// Parameter names and default values.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            System::JaynesCummings => &[
                ("delta", 0.0),
                ("omega_a", 1.0),
                ("g", 0.25),
                ("e", 1.0),
                ("kappa", 5e-3),
                ("gamma", 0.05),
                ("n_th", 1.0),
            ],
            System::SpinChain => &[
                ("delta", 0.0),
                ("omega_n", 2.0 * PI),
                ("jx", 0.2 * PI),
                ("jy", 0.2 * PI),
                ("jz", 0.2 * PI),
                ("omega", PI),
                ("gamma", 0.01),
            ],
            System::Optomechanical => &[
                ("delta", 0.0),
                ("omega_m", 1.0),
                ("g0", 0.4),
                ("e", 0.1),
                ("kappa", 0.3),
                ("gamma", 1e-4),
                ("n_th", 1.0),
                ("n_c", 4.0),
            ],
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for System {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jc" | "jaynes-cummings" => Ok(System::JaynesCummings),
            "spin" | "spin-chain" => Ok(System::SpinChain),
            "optomech" | "optomechanical" => Ok(System::Optomechanical),
            other => Err(Error::invalid(format!("unknown system '{other}'"))),
        }
    }
}

/// A model plus its size (cavity states, spin count or mechanical states)
/// and any parameter overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub system: System,
    pub size: usize,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

/// Hamiltonian and collapse operators of a model.
#[derive(Clone, Debug)]
pub struct Model {
    pub hamiltonian: QuantumOperator,
    pub collapse: Vec<QuantumOperator>,
}

impl Model {
    pub fn liouvillian(&self) -> Result<LiouvillianSystem> {
        build_liouvillian(&self.hamiltonian, &self.collapse)
    }
}

impl ModelSpec {
    pub fn new(system: System, size: usize) -> Self {
        ModelSpec { system, size, overrides: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.overrides.insert(name.to_string(), value);
        self
    }

    /// Every parameter with overrides applied. Fails on unknown names or
    /// non-finite values. The spin-chain drive defaults to half the first
    /// spin's frequency unless set explicitly.
    pub fn params(&self) -> Result<BTreeMap<String, f64>> {
        let defaults = self.system.defaults();
        let mut out: BTreeMap<String, f64> = defaults.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (k, &v) in &self.overrides {
            if !out.contains_key(k) {
                return Err(Error::invalid(format!("unknown parameter '{k}' for {}", self.system)));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("parameter '{k}' must be finite")));
            }
            out.insert(k.clone(), v);
        }
        if self.system == System::SpinChain && !self.overrides.contains_key("omega") {
            let w1 = out["omega_n"];
            out.insert("omega".into(), w1 / 2.0);
        }
        Ok(out)
    }

    /// Hilbert-space dimension without building anything.
    pub fn hilbert_dim(&self) -> Result<usize> {
        let p = self.params()?;
        let d = match self.system {
            System::JaynesCummings => 2usize.checked_mul(self.size),
            System::SpinChain => u32::try_from(self.size).ok().and_then(|n| 2usize.checked_pow(n)),
            System::Optomechanical => usize_param(&p, "n_c")?.checked_mul(self.size),
        };
        d.ok_or_else(|| Error::DimensionOverflow(format!("{} size {}", self.system, self.size)))
    }

    pub fn build(&self) -> Result<Model> {
        let p = self.params()?;
        match self.system {
            System::JaynesCummings => build_jc(self.size, &p),
            System::SpinChain => build_spin_chain(self.size, &p),
            System::Optomechanical => build_optomech(self.size, usize_param(&p, "n_c")?, &p),
        }
    }

    /// Parses `key = value` lines. `system` and `size` are required; every
    /// other key is a parameter override. `#` starts a comment.
    pub fn parse_params(text: &str) -> Result<Self> {
        let mut system = None;
        let mut size = None;
        let mut overrides = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |m: String| Error::Parse { line: n + 1, message: m };
            let (k, v) = line.split_once('=').ok_or_else(|| perr("expected key = value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "system" => system = Some(v.parse::<System>().map_err(|e| perr(e.to_string()))?),
                "size" => size = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                _ => {
                    let x = v.parse::<f64>().map_err(|e| perr(e.to_string()))?;
                    overrides.insert(k.to_string(), x);
                }
            }
        }
        let system = system.ok_or_else(|| Error::invalid("parameter file lacks 'system'"))?;
        let size = size.ok_or_else(|| Error::invalid("parameter file lacks 'size'"))?;
        let spec = ModelSpec { system, size, overrides };
        spec.params()?;
        Ok(spec)
    }

    pub fn read_params(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_params(&std::fs::read_to_string(path)?)
    }

    /// Inverse of [`ModelSpec::parse_params`].
    pub fn to_params_text(&self) -> String {
        let mut s = format!("system = {}\nsize = {}\n", self.system, self.size);
        for (k, v) in &self.overrides {
            s.push_str(&format!("{k} = {v:e}\n"));
        }
        s
    }
}

fn usize_param(p: &BTreeMap<String, f64>, name: &str) -> Result<usize> {
    let v = p[name];
    if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
        return Err(Error::invalid(format!("parameter '{name}' must be a non-negative integer")));
    }
    Ok(v as usize)
}

fn rate_sqrt(rate: f64, name: &str) -> Result<f64> {
    if rate < 0.0 {
        return Err(Error::invalid(format!("rate '{name}' must be non-negative")));
    }
    Ok(rate.sqrt())
}

fn sum(dims: &[usize], terms: &[QuantumOperator]) -> Result<QuantumOperator> {
    let mut acc = QuantumOperator::zero(dims)?;
    for t in terms {
        acc = acc.try_add(t)?;
    }
    Ok(acc)
}

/// Drops collapse operators with zero rate so the generator keeps no empty terms.
fn nonzero(ops: Vec<QuantumOperator>) -> Vec<QuantumOperator> {
    ops.into_iter().filter(|c| c.matrix().nnz() > 0).collect()
}

/// Driven Jaynes-Cummings model without the rotating-wave approximation.
///
/// The cavity is the leftmost tensor factor (`a ⊗ I`, `I ⊗ sigma`); this is
/// the ordering that reproduces the published bandwidths.
pub fn build_jc(n: usize, p: &BTreeMap<String, f64>) -> Result<Model> {
    if n < 2 {
        return Err(Error::invalid("Jaynes-Cummings model needs at least 2 cavity states"));
    }
    let dims = [n, 2];
    let s = spin_ops();
    let a = embed(&destroy(n)?, &dims, 0)?;
    let ad = a.dag();
    let sm = embed(&s.sigma_minus, &dims, 1)?;
    let sp = sm.dag();

    let x_a = a.try_add(&ad)?;
    let x_s = sm.try_add(&sp)?;
    let h = sum(
        &dims,
        &[
            embed(&number(n)?, &dims, 0)?.scaled(-p["delta"]),
            sp.try_mul(&sm)?.scaled(p["omega_a"]),
            x_a.try_mul(&x_s)?.scaled(p["g"]),
            x_a.scaled(p["e"]),
        ],
    )?;
    let (kappa, gamma, nth) = (p["kappa"], p["gamma"], p["n_th"]);
    if nth < 0.0 {
        return Err(Error::invalid("n_th must be non-negative"));
    }
    let collapse = nonzero(vec![
        a.scaled(rate_sqrt(kappa * (1.0 + nth), "kappa")?),
        ad.scaled(rate_sqrt(kappa * nth, "kappa")?),
        sm.scaled(rate_sqrt(gamma * (1.0 + nth), "gamma")?),
    ]);
    Ok(Model { hamiltonian: h, collapse })
}

/// Driven spin chain with nearest-neighbour XYZ coupling and per-spin
/// dephasing. Spin 1 (the driven one) is the leftmost factor.
pub fn build_spin_chain(n: usize, p: &BTreeMap<String, f64>) -> Result<Model> {
    if n < 2 {
        return Err(Error::invalid("spin chain needs at least 2 spins"));
    }
    if n > 16 {
        return Err(Error::DimensionTooLarge { dim: n, limit: 16 });
    }
    let dims = vec![2usize; n];
    let s = spin_ops();
    let site = |op: &QuantumOperator, k: usize| embed(op, &dims, k);
    let sx: Vec<_> = (0..n).map(|k| site(&s.sigma_x, k)).collect::<Result<_>>()?;
    let sy: Vec<_> = (0..n).map(|k| site(&s.sigma_y, k)).collect::<Result<_>>()?;
    let sz: Vec<_> = (0..n).map(|k| site(&s.sigma_z, k)).collect::<Result<_>>()?;

    let mut terms = vec![sz[0].scaled(-0.5 * p["delta"]), sx[0].scaled(-0.5 * p["omega"])];
    for z in &sz[1..] {
        terms.push(z.scaled(-0.5 * p["omega_n"]));
    }
    for k in 0..n - 1 {
        terms.push(sx[k].try_mul(&sx[k + 1])?.scaled(-0.5 * p["jx"]));
        terms.push(sy[k].try_mul(&sy[k + 1])?.scaled(-0.5 * p["jy"]));
        terms.push(sz[k].try_mul(&sz[k + 1])?.scaled(-0.5 * p["jz"]));
    }
    let h = sum(&dims, &terms)?;
    let rate = rate_sqrt(p["gamma"], "gamma")?;
    let collapse = nonzero(sz.iter().map(|z| z.scaled(rate)).collect());
    Ok(Model { hamiltonian: h, collapse })
}

/// Driven optomechanical cavity in the frame rotating with the drive. The
/// cavity (`n_c` states) is the leftmost factor.
pub fn build_optomech(n_m: usize, n_c: usize, p: &BTreeMap<String, f64>) -> Result<Model> {
    if n_m < 2 || n_c < 2 {
        return Err(Error::invalid("optomechanical model needs at least 2 states per mode"));
    }
    let dims = [n_c, n_m];
    let a = embed(&destroy(n_c)?, &dims, 0)?;
    let ad = a.dag();
    let b = embed(&destroy(n_m)?, &dims, 1)?;
    let bd = embed(&create(n_m)?, &dims, 1)?;
    let na = ad.try_mul(&a)?;

    let h = sum(
        &dims,
        &[
            na.scaled(-p["delta"]),
            bd.try_mul(&b)?.scaled(p["omega_m"]),
            b.try_add(&bd)?.try_mul(&na)?.scaled(p["g0"]),
            a.try_add(&ad)?.scaled(p["e"]),
        ],
    )?;
    let (gamma, nth) = (p["gamma"], p["n_th"]);
    if nth < 0.0 {
        return Err(Error::invalid("n_th must be non-negative"));
    }
    let collapse = nonzero(vec![
        a.scaled(rate_sqrt(p["kappa"], "kappa")?),
        b.scaled(rate_sqrt(gamma * (1.0 + nth), "gamma")?),
        bd.scaled(rate_sqrt(gamma * nth, "gamma")?),
    ]);
    Ok(Model { hamiltonian: h, collapse })
}
