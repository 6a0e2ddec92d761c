//! Figure sweeps, the random-state sampler and the Fock oracle check.
//!
//! Configs are flat JSON objects. Every field is optional and falls back to a
//! per-experiment default; fields an experiment does not read are rejected.
//! Sweeps run on the rayon pool and are collected in input order, so output
//! depends only on the config and seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::closed_form::{equal_weight_is_approximate, equal_weight_state, lambda_state1, t_disentangle_1, XFamilyParams};
use crate::engine::{characteristic_times, density_in_qubit_basis, CatPairState};
use crate::error::{Error, Result};
use crate::fock::{self, FockDensity};
use crate::linalg;
use crate::measures::{concurrence, negativity};
use crate::reservoir::{bipartite_concurrences, ReservoirParams};
use crate::states::Amplitude;

const PLACEMENT: &str = "real, symmetric about the origin: xi1 = sqrt(d)/2, xi2 = -xi1 with d = |xi1 - xi2|^2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Evolve,
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Evolve => "evolve",
            Experiment::OracleCheck => "oracle-check",
        }
    }

    fn allowed_fields(self) -> Vec<&'static str> {
        let mut fields = vec!["experiment", "start", "stop", "points", "seed", "out"];
        fields.extend_from_slice(match self {
            Experiment::Fig1 => &["d_sq", "draws", "gamma"][..],
            Experiment::Fig2 => &["d_sq", "gamma"],
            Experiment::Fig3 => &["d_sq", "ratio", "gamma"],
            Experiment::Fig4 => &["d_sq", "c_pp", "c_mm", "gamma"],
            Experiment::Evolve => &["alphas", "betas", "weights", "gamma_a", "gamma_b"],
            Experiment::OracleCheck => &[
                "d_sq",
                "c_pp",
                "c_mm",
                "gamma",
                "cutoff",
                "step",
                "frobenius_tol",
                "negativity_tol",
                "leakage_tol",
            ],
        });
        fields
    }
}

/// Raw run configuration as read from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    /// Squared distances `|ξ1−ξ2|²`, one sweep per entry.
    pub d_sq: Option<Vec<f64>>,
    /// Random draws per distance (fig1).
    pub draws: Option<usize>,
    /// `|c−−/c++|` (fig3).
    pub ratio: Option<f64>,
    pub c_pp: Option<f64>,
    pub c_mm: Option<f64>,
    /// Common rate `Γ`; physical times are in units of `1/Γ`.
    pub gamma: Option<f64>,
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    /// `[[re, im], [re, im]]` for `(ξ1, ξ2)` (evolve).
    pub alphas: Option<[[f64; 2]; 2]>,
    pub betas: Option<[[f64; 2]; 2]>,
    /// `[re, im]` of `c_1^1, c_1^2, c_2^1, c_2^2` (evolve).
    pub weights: Option<[[f64; 2]; 4]>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cutoff: Option<usize>,
    pub step: Option<f64>,
    pub frobenius_tol: Option<f64>,
    pub negativity_tol: Option<f64>,
    pub leakage_tol: Option<f64>,
}

impl RunConfig {
    /// Parses a config for `experiment`. Syntax and type errors carry the
    /// JSON line and column; semantic errors name the field.
    pub fn parse(text: &str, experiment: Experiment) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)?;
        let allowed = experiment.allowed_fields();
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::config(key, format!("not used by {}", experiment.name())));
        }
        if let Some(e) = cfg.experiment {
            if e != experiment {
                return Err(Error::config(
                    "experiment",
                    format!("config is for {}, not {}", e.name(), experiment.name()),
                ));
            }
        }
        cfg.check(experiment)?;
        Ok(cfg)
    }

    pub fn load(path: &Path, experiment: Experiment) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, experiment)
    }

    fn check(&self, experiment: Experiment) -> Result<()> {
        self.grid(experiment)?;
        for (name, v) in [("gamma", self.gamma), ("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b)] {
            if let Some(g) = v {
                if !(g >= 0.0) || !g.is_finite() {
                    return Err(Error::config(name, format!("rate must be finite and >= 0, got {g}")));
                }
            }
        }
        if let Some(d) = &self.d_sq {
            if d.is_empty() {
                return Err(Error::config("d_sq", "needs at least one distance"));
            }
            if let Some(x) = d.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
                return Err(Error::config("d_sq", format!("distances must be finite and > 0, got {x}")));
            }
        }
        if self.draws == Some(0) {
            return Err(Error::config("draws", "needs at least one draw"));
        }
        if let Some(r) = self.ratio {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::config("ratio", format!("must be finite and > 0, got {r}")));
            }
        }
        for (name, v) in [
            ("step", self.step),
            ("frobenius_tol", self.frobenius_tol),
            ("negativity_tol", self.negativity_tol),
            ("leakage_tol", self.leakage_tol),
        ] {
            if let Some(x) = v {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(Error::config(name, format!("must be finite and > 0, got {x}")));
                }
            }
        }
        Ok(())
    }

    fn grid(&self, experiment: Experiment) -> Result<TimeGrid> {
        let (start, stop, points) = match experiment {
            Experiment::Fig1 | Experiment::Fig2 => (0.0, 3.0, 61),
            Experiment::Fig3 => (0.0, 1.0, 101),
            Experiment::Fig4 => (0.0, 3.0, 301),
            Experiment::Evolve => (0.0, 5.0, 51),
            Experiment::OracleCheck => (0.0, 3.0, 13),
        };
        TimeGrid::new(
            self.start.unwrap_or(start),
            self.stop.unwrap_or(stop),
            self.points.unwrap_or(points),
        )
    }

    fn d_sq_or(&self, default: &[f64]) -> Vec<f64> {
        self.d_sq.clone().unwrap_or_else(|| default.to_vec())
    }
}

/// `points` equally spaced values on `[start, stop]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::config("points", format!("needs >= 2, got {points}")));
        }
        if !(start >= 0.0) || !start.is_finite() {
            return Err(Error::config("start", format!("needs finite start >= 0, got {start}")));
        }
        if !(stop > start) || !stop.is_finite() {
            return Err(Error::config("stop", format!("needs finite stop > start = {start}, got {stop}")));
        }
        Ok(TimeGrid { start, stop, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + h * k as f64
                }
            })
            .collect()
    }
}

/// Random state for the concurrence sweep: real amplitudes at `±√d/2` in both
/// modes and complex standard-normal weights, Gram-normalised.
pub fn sample_random_state(d_avg_sq: f64, seed: u64) -> Result<CatPairState> {
    if !(d_avg_sq > 0.0) || !d_avg_sq.is_finite() {
        return Err(Error::config("d_sq", format!("must be finite and > 0, got {d_avg_sq}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    };
    let c = [[draw(), draw()], [draw(), draw()]];
    let x = Amplitude::real(0.5 * d_avg_sq.sqrt());
    let pair = [x, x.scale(-1.0)];
    CatPairState::new(pair, pair, c, 1.0, 1.0)
}

/// One CSV field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    /// Written as an empty field (the ln of an exact zero).
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(x) => Some(x),
            Cell::Int(n) => Some(n as f64),
            Cell::Missing => None,
        }
    }
}

/// A figure's rows plus metadata for the `.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: serde_json::Value,
}

impl Dataset {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    /// Floats as `{:.16e}`: 17 significant digits, round-trip exact.
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                match cell {
                    Cell::Num(x) => write!(s, "{x:.16e}").expect("write to String"),
                    Cell::Int(n) => write!(s, "{n}").expect("write to String"),
                    Cell::Missing => {}
                }
            }
            s.push('\n');
        }
        s
    }

    /// Writes `path` and `path.meta.json`.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        std::fs::write(meta_path(path), serde_json::to_string_pretty(&self.meta)? + "\n")?;
        Ok(())
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Natural log of a positive ratio, or the dead-row sentinel.
fn ln_cells(ratio: f64) -> [Cell; 2] {
    if ratio > 0.0 {
        [Cell::Num(ratio.ln()), Cell::Int(0)]
    } else {
        [Cell::Missing, Cell::Int(1)]
    }
}

fn flatten(blocks: Vec<Vec<Vec<Cell>>>) -> Vec<Vec<Cell>> {
    blocks.into_iter().flatten().collect()
}

pub fn run_figure(config: &RunConfig, experiment: Experiment) -> Result<Dataset> {
    match experiment {
        Experiment::Fig1 => fig1(config),
        Experiment::Fig2 => fig2(config),
        Experiment::Fig3 => fig3(config),
        Experiment::Fig4 => fig4(config),
        Experiment::Evolve => evolve(config),
        Experiment::OracleCheck => Err(Error::config("experiment", "oracle-check produces a report, not a dataset")),
    }
}

/// `ln C(t)/C(0)` against `t/τ` for random weights.
fn fig1(config: &RunConfig) -> Result<Dataset> {
    let grid = config.grid(Experiment::Fig1)?.values();
    let d_sq = config.d_sq_or(&[0.75, 2.0, 5.0]);
    let draws = config.draws.unwrap_or(3);
    let gamma = config.gamma.unwrap_or(1.0);
    let seed = config.seed.unwrap_or(0);
    // Draw seeds serially so they do not depend on scheduling.
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(f64, usize, u64)> = d_sq
        .iter()
        .flat_map(|&d| (0..draws).map(move |k| (d, k)))
        .map(|(d, k)| (d, k, master.next_u64()))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|&(d, k, s)| -> Result<Vec<Vec<Cell>>> {
            let state = sample_random_state(d, s)?.with_rates(gamma, gamma);
            let tau = characteristic_times(&state).tau;
            let c0 = concurrence(&density_in_qubit_basis(&state, 0.0)?)?;
            if !(c0 > 0.0) {
                return Err(Error::config("seed", format!("draw {k} at d_sq = {d} is a product state")));
            }
            grid.iter()
                .map(|&x| {
                    // With Γ = 0 nothing evolves; τ is infinite and t stays 0.
                    let t = if tau.is_finite() { x * tau } else { 0.0 };
                    let c = concurrence(&density_in_qubit_basis(&state, t)?)?;
                    let [ln, dead] = ln_cells(c / c0);
                    Ok(vec![Cell::Num(x), ln, Cell::Num(d), Cell::Int(k as u64), dead])
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        header: vec!["t_over_tau", "ln_C_ratio", "d_sq", "draw_index", "dead"],
        rows: flatten(blocks),
        meta: json!({
            "experiment": "fig1",
            "seed": seed,
            "amplitude_placement": PLACEMENT,
            "weights": "complex standard normal, Gram-normalised",
            "gamma": gamma,
            "time": "t / tau with 1/tau = (gamma_a |a1-a2|^2 + gamma_b |b1-b2|^2) / 2",
        }),
    })
}

/// `ln λ(t)/λ(0)` of the equal-weight state against `t/τ`.
fn fig2(config: &RunConfig) -> Result<Dataset> {
    let grid = config.grid(Experiment::Fig2)?.values();
    let d_sq = config.d_sq_or(&[0.5, 0.75, 1.5, 2.0, 5.0]);
    let gamma = config.gamma.unwrap_or(1.0);
    let blocks = d_sq
        .par_iter()
        .map(|&d| -> Result<Vec<Vec<Cell>>> {
            // d = (d_α² + d_β²)/2 with d_α² = d_β² = |ξ1−ξ2|²/2.
            let state = equal_weight_state(d, d, gamma, gamma)?;
            let tau = characteristic_times(&state).tau;
            let l0 = negativity(&density_in_qubit_basis(&state, 0.0)?)?.lambda_min;
            grid.iter()
                .map(|&x| {
                    let t = if tau.is_finite() { x * tau } else { 0.0 };
                    let l = negativity(&density_in_qubit_basis(&state, t)?)?.lambda_min;
                    let ratio = if l < 0.0 { l / l0 } else { 0.0 };
                    let [ln, dead] = ln_cells(ratio);
                    Ok(vec![Cell::Num(x), ln, Cell::Num(d), dead])
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let approximate: Vec<bool> = d_sq.iter().map(|&d| equal_weight_is_approximate(d, d)).collect();
    Ok(Dataset {
        header: vec!["scaled_time", "ln_lambda_ratio", "d_sq", "dead"],
        rows: flatten(blocks),
        meta: json!({
            "experiment": "fig2",
            "amplitude_placement": "real, symmetric about the origin: xi = +-sqrt(d_sq/2) in both modes",
            "d_sq": "(d_a^2 + d_b^2)/2 with d_a^2 = d_b^2 = |xi1 - xi2|^2 / 2",
            "lambda_source": "exact engine negativity",
            "closed_form_approximate": approximate,
            "gamma": gamma,
            "time": "t / tau with 1/tau = (gamma_a |a1-a2|^2 + gamma_b |b1-b2|^2) / 2",
        }),
    })
}

/// `λ(t)/λ(0)` of `c++|++⟩ + c−−|−−⟩` against `r = t/t_d`.
fn fig3(config: &RunConfig) -> Result<Dataset> {
    let grid = config.grid(Experiment::Fig3)?.values();
    let d_sq = config.d_sq_or(&[0.5, 2.0, 7.5]);
    let ratio = config.ratio.unwrap_or(std::f64::consts::SQRT_2);
    let gamma = config.gamma.unwrap_or(1.0);
    if !(gamma > 0.0) {
        return Err(Error::config("gamma", "fig3 needs gamma > 0 for a finite death time"));
    }
    let blocks = d_sq
        .par_iter()
        .map(|&d| -> Result<Vec<Vec<Cell>>> {
            let params = XFamilyParams::new(1.0, ratio, d, gamma)?;
            let t_d =
                t_disentangle_1(&params).ok_or_else(|| Error::config("ratio", format!("no finite disentanglement time at d_sq = {d}")))?;
            let l0 = lambda_state1(&params, 0.0);
            Ok(grid
                .iter()
                .map(|&r| {
                    let l = lambda_state1(&params, r * t_d);
                    let value = if l < 0.0 { l / l0 } else { 0.0 };
                    vec![Cell::Num(r), Cell::Num(value), Cell::Num(d), Cell::Num(1.0 - r)]
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        header: vec!["r", "lambda_ratio", "d_sq", "one_minus_r"],
        rows: flatten(blocks),
        meta: json!({
            "experiment": "fig3",
            "amplitude_placement": PLACEMENT,
            "ratio_c_mm_over_c_pp": ratio,
            "lambda_source": "closed form, zero after the death time",
            "gamma": gamma,
        }),
    })
}

/// The six bipartite concurrences of modes and reservoirs against `Γt`.
fn fig4(config: &RunConfig) -> Result<Dataset> {
    let grid = config.grid(Experiment::Fig4)?.values();
    let d_sq = config.d_sq_or(&[0.4, 16.0]);
    let c_pp = config.c_pp.unwrap_or(0.4);
    let c_mm = config.c_mm.unwrap_or_else(|| (1.0 - c_pp * c_pp).max(0.0).sqrt());
    let gamma = config.gamma.unwrap_or(1.0);
    if !(gamma > 0.0) {
        return Err(Error::config("gamma", "fig4 plots against gamma*t and needs gamma > 0"));
    }
    let jobs: Vec<(f64, f64)> = d_sq.iter().flat_map(|&d| grid.iter().map(move |&x| (d, x))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(d, x)| -> Result<Vec<Cell>> {
            let params = ReservoirParams::equal(d, gamma, c_pp, c_mm)?;
            let c = bipartite_concurrences(&params, x / gamma)?;
            let mut row = vec![Cell::Num(x)];
            row.extend(c.as_array().map(Cell::Num));
            row.push(Cell::Num(d));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        header: vec!["gamma_t", "C_ab", "C_rarb", "C_ara", "C_arb", "C_brb", "C_bra", "d_sq"],
        rows,
        meta: json!({
            "experiment": "fig4",
            "amplitude_placement": PLACEMENT,
            "c_pp": c_pp,
            "c_mm": c_mm,
            "gamma": gamma,
        }),
    })
}

/// Engine trajectory of an arbitrary state.
fn evolve(config: &RunConfig) -> Result<Dataset> {
    let grid = config.grid(Experiment::Evolve)?.values();
    let amp = |v: [f64; 2]| Amplitude::new(v[0], v[1]);
    let alphas = config.alphas.unwrap_or([[1.0, 0.0], [-1.0, 0.0]]);
    let betas = config.betas.unwrap_or(alphas);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let w = config.weights.unwrap_or([[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]]);
    let c = |k: usize| Complex64::new(w[k][0], w[k][1]);
    let state = CatPairState::new(
        [amp(alphas[0]), amp(alphas[1])],
        [amp(betas[0]), amp(betas[1])],
        [[c(0), c(1)], [c(2), c(3)]],
        config.gamma_a.unwrap_or(1.0),
        config.gamma_b.unwrap_or(1.0),
    )?;
    let rows = grid
        .par_iter()
        .map(|&t| -> Result<Vec<Cell>> {
            let rho = density_in_qubit_basis(&state, t)?;
            let n = negativity(&rho)?;
            Ok(vec![
                Cell::Num(t),
                Cell::Num(n.lambda_min),
                Cell::Num(n.neg_sum),
                Cell::Num(concurrence(&rho)?),
                Cell::Num(rho.purity()),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        header: vec!["t", "lambda_min", "negativity", "concurrence", "purity"],
        rows,
        meta: json!({
            "experiment": "evolve",
            "alphas": alphas,
            "betas": betas,
            "weights": w,
            "gamma_a": state.gamma_a,
            "gamma_b": state.gamma_b,
            "gram_normalised": true,
        }),
    })
}

/// Fock-space integration against the engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub d_sq: f64,
    pub c_pp: f64,
    pub c_mm: f64,
    pub gamma: f64,
    pub cutoff: usize,
    pub step: f64,
    pub times: Vec<f64>,
    pub max_frobenius: f64,
    pub max_negativity_deviation: f64,
    pub max_leakage: f64,
    pub frobenius_tol: f64,
    pub negativity_tol: f64,
    pub leakage_tol: f64,
    pub pass: bool,
}

impl OracleReport {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Integrates `c++|++⟩ + c−−|−−⟩` in a truncated Fock space and compares the
/// projected 4×4 state with the engine at every grid time.
pub fn run_oracle_check(config: &RunConfig) -> Result<OracleReport> {
    let times = config.grid(Experiment::OracleCheck)?.values();
    let d_sq = match config.d_sq.as_deref() {
        None => 2.0,
        Some([d]) => *d,
        Some(_) => return Err(Error::config("d_sq", "oracle-check takes exactly one distance")),
    };
    let amplitude = 0.5 * d_sq.sqrt();
    if amplitude > 2.0 {
        return Err(Error::config(
            "d_sq",
            format!("amplitude {amplitude} exceeds 2; the Fock cutoff would be intractable"),
        ));
    }
    let c_pp = config.c_pp.unwrap_or(0.6);
    let c_mm = config.c_mm.unwrap_or(0.8);
    let gamma = config.gamma.unwrap_or(1.0);
    let state = XFamilyParams::new(c_pp, c_mm, d_sq, gamma)?.state()?;
    let cutoff = config.cutoff.unwrap_or_else(|| fock::cutoff_for(amplitude));
    let step = config.step.unwrap_or_else(|| fock::default_step(gamma, gamma, cutoff));
    let rho0 = FockDensity::from_cat_state(&state, cutoff)?;
    let (mut frob, mut neg, mut leak) = (0.0f64, 0.0f64, 0.0f64);
    fock::integrate_with(&rho0, gamma, gamma, &times, step, |t, rho| {
        let exact = density_in_qubit_basis(&state, t)?;
        let (basis_a, basis_b) = exact.bases.expect("engine densities carry their bases");
        let proj = fock::project_to_qubit_basis(rho, &basis_a, &basis_b)?;
        frob = frob.max(linalg::frobenius_distance(&proj.density.matrix, &exact.matrix));
        neg = neg.max((negativity(&proj.density)?.lambda_min - negativity(&exact)?.lambda_min).abs());
        leak = leak.max(proj.leakage.abs());
        Ok(())
    })?;
    let frobenius_tol = config.frobenius_tol.unwrap_or(1e-7);
    let negativity_tol = config.negativity_tol.unwrap_or(1e-6);
    let leakage_tol = config.leakage_tol.unwrap_or(1e-8);
    Ok(OracleReport {
        d_sq,
        c_pp: c_pp / c_pp.hypot(c_mm),
        c_mm: c_mm / c_pp.hypot(c_mm),
        gamma,
        cutoff,
        step,
        times,
        max_frobenius: frob,
        max_negativity_deviation: neg,
        max_leakage: leak,
        frobenius_tol,
        negativity_tol,
        leakage_tol,
        pass: frob < frobenius_tol && neg < negativity_tol && leak < leakage_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, e: Experiment) -> Result<RunConfig> {
        RunConfig::parse(text, e)
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(-0.5, 1.0, 5).is_err());
        let g = TimeGrid::new(0.0, 1.0, 11).unwrap().values();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(matches!(parse(r#"{"points": 1}"#, Experiment::Fig2), Err(Error::Config { ref field, .. }) if field == "points"));
        assert!(matches!(parse(r#"{"start": 2, "stop": 1}"#, Experiment::Fig2), Err(Error::Config { ref field, .. }) if field == "stop"));
        assert!(matches!(parse(r#"{"bogus": 1}"#, Experiment::Fig2), Err(Error::Json(_))));
        assert!(matches!(parse(r#"{"draws": 3}"#, Experiment::Fig2), Err(Error::Config { ref field, .. }) if field == "draws"));
        assert!(matches!(
            parse(r#"{"experiment": "fig1"}"#, Experiment::Fig2),
            Err(Error::Config { .. })
        ));
        assert!(matches!(parse(r#"{"d_sq": [1, -2]}"#, Experiment::Fig1), Err(Error::Config { ref field, .. }) if field == "d_sq"));
        match parse("{\n  \"points\": \"ten\"\n}", Experiment::Fig1) {
            Err(Error::Json(e)) => assert_eq!(e.line(), 2),
            other => panic!("expected a JSON error, got {other:?}"),
        }
        assert!(parse(r#"{"experiment": "oracle-check", "cutoff": 30}"#, Experiment::OracleCheck).is_ok());
    }

    #[test]
    fn random_state_is_seeded_and_placed() {
        let a = sample_random_state(5.0, 7).unwrap();
        let b = sample_random_state(5.0, 7).unwrap();
        let c = sample_random_state(5.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.gram_norm() - 1.0).abs() < 1e-12);
        let [a1, a2] = a.alphas();
        let [b1, b2] = a.betas();
        assert!((a1.dist_sq(&a2) - 5.0).abs() < 1e-12);
        assert!((b1.dist_sq(&b2) - 5.0).abs() < 1e-12);
        assert_eq!(a1.re(), -a2.re());
        assert_eq!(a1.im(), 0.0);
    }

    #[test]
    fn figures_are_deterministic() {
        let cfg = parse(r#"{"d_sq": [2.0], "draws": 2, "points": 9, "seed": 11}"#, Experiment::Fig1).unwrap();
        let a = run_figure(&cfg, Experiment::Fig1).unwrap();
        let b = run_figure(&cfg, Experiment::Fig1).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 18);
        assert!(a.to_csv().starts_with("t_over_tau,ln_C_ratio,d_sq,draw_index,dead\n"));
        // rows ordered by draw then time
        let idx = a.column("draw_index").unwrap();
        assert!(idx[..9].iter().all(|x| *x == Some(0.0)));
        assert!(idx[9..].iter().all(|x| *x == Some(1.0)));
    }

    #[test]
    fn dead_rows_use_the_sentinel() {
        let cfg = parse(r#"{"d_sq": [5.0], "stop": 3, "points": 31}"#, Experiment::Fig2).unwrap();
        let data = run_figure(&cfg, Experiment::Fig2).unwrap();
        let csv = data.to_csv();
        assert!(!csv.contains("inf") && !csv.contains("NaN"));
        let last = csv.lines().last().unwrap();
        assert!(last.ends_with(",1"), "{last}");
        assert!(last.split(',').nth(1) == Some(""));
        let first = data.rows[0].clone();
        assert_eq!(first[1], Cell::Num(0.0));
        assert_eq!(first[3], Cell::Int(0));
    }

    #[test]
    fn fig3_columns_and_endpoints() {
        let cfg = parse(r#"{"d_sq": [2.0], "points": 11}"#, Experiment::Fig3).unwrap();
        let data = run_figure(&cfg, Experiment::Fig3).unwrap();
        let ratio = data.column("lambda_ratio").unwrap();
        assert_eq!(ratio[0], Some(1.0));
        assert!(ratio[10].unwrap().abs() < 1e-9);
        assert_eq!(data.column("one_minus_r").unwrap()[4], Some(0.6));
    }

    #[test]
    fn static_oracle_is_exact() {
        let cfg = parse(r#"{"gamma": 0.0, "points": 3, "d_sq": [1.0]}"#, Experiment::OracleCheck).unwrap();
        let report = run_oracle_check(&cfg).unwrap();
        assert!(report.pass);
        assert!(report.max_frobenius < 1e-12, "{}", report.max_frobenius);
    }

    #[test]
    fn small_cutoff_is_an_error() {
        let cfg = parse(r#"{"cutoff": 3, "d_sq": [4.0]}"#, Experiment::OracleCheck).unwrap();
        assert!(matches!(run_oracle_check(&cfg), Err(Error::CutoffTooSmall { .. })));
    }
}
