//! Weighted least-squares fitting of the steady-state transmission model (optionally
//! disorder-averaged) to one or more transmission spectra.
//!
//! Free parameters are mapped to the unit cube through their bounds and
//! searched with a bounded Nelder–Mead simplex started from the best point
//! of a coarse scan. Confidence intervals come from the Jacobian of the
//! weighted residuals at the optimum.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::{CouplingDistribution, DisorderEnsemble, DisorderSpec};
use crate::error::{Error, Result};
use crate::model::{hz_to_rad, rad_to_hz, CavityParams, Couplings, DriveConfig, EnsembleConfig};
use crate::transmission::{Configuration, Eq1Curve, Spectrum};

/// Relative spread of simplex residuals that counts as converged.
pub const F_TOL: f64 = 1e-8;
/// Simplex diameter in unit coordinates that counts as converged.
pub const X_TOL: f64 = 1e-6;
/// Two-sided normal quantile for the reported intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    /// Uniform per-atom coupling, rad/s.
    G,
    OmegaC,
    GammaGs,
    Kappa,
    Gamma,
    DeltaAc,
    TwoPhotonOffset,
    /// Mean of the coupling distribution as a fraction of g₀
    /// (disorder-averaged model only).
    CouplingMean,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::G,
        Param::OmegaC,
        Param::GammaGs,
        Param::Kappa,
        Param::Gamma,
        Param::DeltaAc,
        Param::TwoPhotonOffset,
        Param::CouplingMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::G => "g",
            Param::OmegaC => "omega_c",
            Param::GammaGs => "gamma_gs",
            Param::Kappa => "kappa",
            Param::Gamma => "gamma",
            Param::DeltaAc => "delta_ac",
            Param::TwoPhotonOffset => "two_photon_offset",
            Param::CouplingMean => "coupling_mean",
        }
    }

    /// Whether the parameter is a frequency (and so changes with units).
    pub fn is_frequency(self) -> bool {
        self != Param::CouplingMean
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown fit parameter '{s}'")))
    }
}

/// Units of frequency-valued parameters, bounds and data detunings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    RadPerSecond,
    Hertz,
}

impl Units {
    fn to_rad(self, v: f64) -> f64 {
        match self {
            Units::RadPerSecond => v,
            Units::Hertz => hz_to_rad(v),
        }
    }

    fn from_rad(self, v: f64) -> f64 {
        match self {
            Units::RadPerSecond => v,
            Units::Hertz => rad_to_hz(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub param: Param,
    pub lower: f64,
    pub upper: f64,
    /// Start value; when absent the start comes from a coarse scan.
    pub initial: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitData {
    pub configuration: Configuration,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    cavity: CavityParams,
    ensemble: EnsembleConfig,
    drive: DriveConfig,
    disorder: Option<DisorderSpec>,
    data: Vec<FitData>,
    free: Vec<FreeParam>,
    units: Units,
}

impl FitProblem {
    /// A problem whose fixed parameters are taken from the given model.
    pub fn new(cavity: CavityParams, ensemble: EnsembleConfig, drive: DriveConfig) -> Self {
        Self {
            cavity,
            ensemble,
            drive,
            disorder: None,
            data: Vec::new(),
            free: Vec::new(),
            units: Units::RadPerSecond,
        }
    }

    /// Use the disorder-averaged model with a fixed seed (common random
    /// numbers across evaluations).
    pub fn with_disorder(mut self, disorder: DisorderSpec) -> Self {
        self.disorder = Some(disorder);
        self
    }

    /// Express data detunings, bounds and estimates in `units`.
    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }

    /// Add a data set with unit weights.
    pub fn with_data(self, configuration: Configuration, deltas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; deltas.len()];
        self.with_weighted_data(FitData {
            configuration,
            deltas,
            values,
            weights,
        })
    }

    pub fn with_weighted_data(mut self, data: FitData) -> Result<Self> {
        let n = data.deltas.len();
        if n == 0 || data.values.len() != n || data.weights.len() != n {
            return Err(Error::invalid("fit data needs matching, non-empty columns"));
        }
        if data.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("fit weights must be positive and finite"));
        }
        if data.deltas.iter().chain(&data.values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("fit data must be finite"));
        }
        self.data.push(data);
        Ok(self)
    }

    /// Add a spectrum; detunings are converted from rad/s into the problem
    /// units. The configuration comes from the spectrum metadata.
    pub fn with_spectrum(self, spectrum: &Spectrum) -> Result<Self> {
        let cfg = spectrum.meta().configuration.ok_or_else(|| {
            Error::invalid("spectrum metadata does not name its configuration")
        })?;
        let units = self.units;
        let deltas = spectrum.deltas().into_iter().map(|d| units.from_rad(d)).collect();
        self.with_data(cfg, deltas, spectrum.transmissions())
    }

    pub fn free(mut self, param: Param, lower: f64, upper: f64) -> Result<Self> {
        self.push_free(FreeParam {
            param,
            lower,
            upper,
            initial: None,
        })?;
        Ok(self)
    }

    pub fn free_from(mut self, param: Param, lower: f64, upper: f64, initial: f64) -> Result<Self> {
        self.push_free(FreeParam {
            param,
            lower,
            upper,
            initial: Some(initial),
        })?;
        Ok(self)
    }

    fn push_free(&mut self, p: FreeParam) -> Result<()> {
        if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
            return Err(Error::invalid(format!(
                "bounds for {} must be finite and ordered, got [{}, {}]",
                p.param, p.lower, p.upper
            )));
        }
        if let Some(x) = p.initial {
            if !(p.lower..=p.upper).contains(&x) {
                return Err(Error::invalid(format!(
                    "initial {} = {x} lies outside [{}, {}]",
                    p.param, p.lower, p.upper
                )));
            }
        }
        if self.free.iter().any(|f| f.param == p.param) {
            return Err(Error::invalid(format!("{} is already free", p.param)));
        }
        match (p.param, self.disorder.is_some()) {
            (Param::G, true) => {
                return Err(Error::invalid("the averaged model draws couplings; fit coupling_mean instead"))
            }
            (Param::CouplingMean, false) => {
                return Err(Error::invalid("coupling_mean needs the disorder-averaged model"))
            }
            _ => {}
        }
        self.free.push(p);
        Ok(())
    }

    pub fn free_params(&self) -> &[FreeParam] {
        &self.free
    }

    pub fn data(&self) -> &[FitData] {
        &self.data
    }

    pub fn units(&self) -> Units {
        self.units
    }

    fn n_points(&self) -> usize {
        self.data.iter().map(|d| d.deltas.len()).sum()
    }

    /// Model with the free parameters set to `values` (problem units).
    pub fn model_at(&self, values: &[f64]) -> Result<(CavityParams, EnsembleConfig, DriveConfig, Option<DisorderSpec>)> {
        if values.len() != self.free.len() {
            return Err(Error::invalid("one value per free parameter is required"));
        }
        let c = &self.cavity;
        let (mut g0, mut kappa, mut gamma) = (c.g0(), c.kappa(), c.gamma());
        let (mut delta_ac, stark) = (c.delta_ac(), c.stark_shift_mean());
        let mut ensemble = self.ensemble.clone();
        let mut drive = self.drive;
        let mut disorder = self.disorder;
        for (fp, &raw) in self.free.iter().zip(values) {
            let v = if fp.param.is_frequency() { self.units.to_rad(raw) } else { raw };
            match fp.param {
                Param::G => {
                    ensemble = EnsembleConfig::uniform(
                        ensemble.n_atoms(),
                        v,
                        ensemble.gamma_gs(),
                        ensemble.branching_to_f1(),
                    )?;
                    // keep the antinode bound consistent with the fitted value
                    g0 = g0.max(v);
                }
                Param::OmegaC => drive = drive.with_omega_c(v)?,
                Param::GammaGs => ensemble = ensemble.with_gamma_gs(v)?,
                Param::Kappa => kappa = v,
                Param::Gamma => gamma = v,
                Param::DeltaAc => delta_ac = v,
                Param::TwoPhotonOffset => drive = drive.with_two_photon_offset(v),
                Param::CouplingMean => {
                    let spec = disorder.as_mut().expect("checked when the parameter was freed");
                    let base = spec
                        .coupling_dist
                        .or(match ensemble.couplings() {
                            Couplings::Distribution { dist, .. } => Some(*dist),
                            Couplings::PerAtom(_) => None,
                        })
                        .unwrap_or(CouplingDistribution::Delta(v));
                    let shifted = match base {
                        CouplingDistribution::Delta(_) => CouplingDistribution::Delta(v),
                        CouplingDistribution::TruncatedNormal { sigma, .. } => {
                            CouplingDistribution::TruncatedNormal { mean: v, sigma }
                        }
                        CouplingDistribution::Uniform { lo, hi } => {
                            let half = 0.5 * (hi - lo);
                            CouplingDistribution::Uniform {
                                lo: (v - half).max(0.0),
                                hi: (v + half).min(1.0),
                            }
                        }
                    };
                    *spec = spec.with_coupling(Some(shifted))?;
                }
            }
        }
        let cavity = CavityParams::new(g0, kappa, gamma)?.with_detunings(delta_ac, stark)?;
        Ok((cavity, ensemble, drive, disorder))
    }

    /// Weighted residuals `√w (T_model − T_data)` in data order.
    pub fn residuals(&self, values: &[f64]) -> Result<Vec<f64>> {
        let (cavity, ensemble, drive, disorder) = self.model_at(values)?;
        let mut out = Vec::with_capacity(self.n_points());
        let draws = match &disorder {
            Some(spec) => Some(DisorderEnsemble::draw(&cavity, &ensemble, spec)?),
            None => None,
        };
        for d in &self.data {
            let to_rad = |x: f64| self.units.to_rad(x);
            match &draws {
                Some(draws) => {
                    let curve = draws.curve(&cavity, &ensemble, &drive, d.configuration)?;
                    for i in 0..d.deltas.len() {
                        let t = curve.transmission(to_rad(d.deltas[i]))?;
                        out.push(d.weights[i].sqrt() * (t - d.values[i]));
                    }
                }
                None => {
                    let curve = Eq1Curve::new(&cavity, &ensemble, &drive, d.configuration)?;
                    for i in 0..d.deltas.len() {
                        let t = curve.transmission(to_rad(d.deltas[i]));
                        out.push(d.weights[i].sqrt() * (t - d.values[i]));
                    }
                }
            }
        }
        if out.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid("model is not finite at this parameter point"));
        }
        Ok(out)
    }

    /// `√(Σ w r²)` at `values`.
    pub fn residual_norm(&self, values: &[f64]) -> Result<f64> {
        Ok(self.residuals(values)?.iter().map(|r| r * r).sum::<f64>().sqrt())
    }

    fn to_physical(&self, u: &[f64]) -> Vec<f64> {
        self.free
            .iter()
            .zip(u)
            .map(|(f, &x)| f.lower + x.clamp(0.0, 1.0) * (f.upper - f.lower))
            .collect()
    }

    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        self.free
            .iter()
            .zip(x)
            .map(|(f, &v)| (v - f.lower) / (f.upper - f.lower))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamEstimate {
    pub param: Param,
    pub value: f64,
    pub std_error: Option<f64>,
    /// 95% interval, absent when the parameter is unidentifiable.
    pub interval: Option<[f64; 2]>,
    pub identifiable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub estimates: Vec<ParamEstimate>,
    pub units: Units,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub n_evaluations: usize,
    pub converged: bool,
    /// Best residual norm after each simplex iteration.
    pub history: Vec<f64>,
}

impl FitResult {
    pub fn get(&self, param: Param) -> Option<&ParamEstimate> {
        self.estimates.iter().find(|e| e.param == param)
    }

    pub fn value(&self, param: Param) -> Option<f64> {
        self.get(param).map(|e| e.value)
    }

    pub fn unidentifiable(&self) -> Vec<Param> {
        self.estimates.iter().filter(|e| !e.identifiable).map(|e| e.param).collect()
    }
}

struct Objective<'a> {
    problem: &'a FitProblem,
    evaluations: usize,
    budget: usize,
}

impl Objective<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    fn eval(&mut self, u: &[f64]) -> f64 {
        self.evaluations += 1;
        let x = self.problem.to_physical(u);
        // points where the model is undefined are simply uphill
        self.problem.residual_norm(&x).unwrap_or(f64::INFINITY)
    }
}

/// Minimise the weighted residual norm with at most `budget` model
/// evaluations. Results depend only on the problem, budget and seed.
pub fn fit(problem: &FitProblem, budget: usize, seed: u64) -> Result<FitResult> {
    if problem.data.is_empty() {
        return Err(Error::invalid("fit problem has no data"));
    }
    let k = problem.free.len();
    if k == 0 {
        let r = problem.residual_norm(&[])?;
        return Ok(FitResult {
            estimates: vec![],
            units: problem.units,
            residual_norm: r,
            initial_residual_norm: r,
            n_evaluations: 1,
            converged: true,
            history: vec![r],
        });
    }
    if budget < k + 2 {
        return Err(Error::invalid(format!("budget {budget} is too small for {k} parameters")));
    }

    let mut obj = Objective {
        problem,
        evaluations: 0,
        budget,
    };

    let explicit = problem.free.iter().all(|f| f.initial.is_some());
    let (start, f_start) = if explicit {
        let x: Vec<f64> = problem.free.iter().map(|f| f.initial.unwrap()).collect();
        let u = problem.to_unit(&x);
        let f = obj.eval(&u);
        if !f.is_finite() {
            return Err(Error::invalid("model is not finite at the initial guess"));
        }
        (u, f)
    } else {
        coarse_start(problem, &mut obj, seed)?
    };

    let mut history = vec![f_start];
    let (mut best, mut f_best) = (start, f_start);
    let mut converged = false;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // restarts from the incumbent guard against simplex collapse
    for round in 0..3 {
        let step = if round == 0 { 0.1 } else { 0.05 };
        let (u, f, ok) = nelder_mead(&mut obj, &best, f_best, step, &mut rng, &mut history);
        let improved = f < f_best * (1.0 - F_TOL);
        if f <= f_best {
            best = u;
            f_best = f;
        }
        converged = ok;
        if !ok || !improved {
            break;
        }
    }

    let x = problem.to_physical(&best);
    let estimates = confidence(problem, &x, f_best)?;
    Ok(FitResult {
        estimates,
        units: problem.units,
        residual_norm: f_best,
        initial_residual_norm: f_start,
        n_evaluations: obj.evaluations,
        converged,
        history,
    })
}

fn coarse_start(problem: &FitProblem, obj: &mut Objective, seed: u64) -> Result<(Vec<f64>, f64)> {
    let k = problem.free.len();
    let levels: usize = match k {
        1 => 9,
        2 => 7,
        3 => 5,
        4 | 5 => 3,
        _ => 0,
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if levels > 0 {
        let total = levels.pow(k as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut u = Vec::with_capacity(k);
            for f in &problem.free {
                let level = rem % levels;
                rem /= levels;
                u.push(match f.initial {
                    Some(x) => (x - f.lower) / (f.upper - f.lower),
                    None => (level as f64 + 0.5) / levels as f64,
                });
            }
            candidates.push(u);
        }
        candidates.dedup();
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        for _ in 0..256 {
            candidates.push(
                problem
                    .free
                    .iter()
                    .map(|f| match f.initial {
                        Some(x) => (x - f.lower) / (f.upper - f.lower),
                        None => rng.random::<f64>(),
                    })
                    .collect(),
            );
        }
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for u in candidates {
        if obj.exhausted() && best.is_some() {
            break;
        }
        let f = obj.eval(&u);
        if f.is_finite() && best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((u, f));
        }
    }
    best.ok_or_else(|| Error::invalid("model is not finite anywhere on the start grid"))
}

fn nelder_mead(
    obj: &mut Objective,
    start: &[f64],
    f_start: f64,
    step: f64,
    rng: &mut ChaCha8Rng,
    history: &mut Vec<f64>,
) -> (Vec<f64>, f64, bool) {
    let k = start.len();
    let clip = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect() };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), f_start)];
    for j in 0..k {
        let mut v = start.to_vec();
        // step inward, with a little seeded jitter so restarts differ
        let s = step * (1.0 + 0.1 * rng.random::<f64>());
        v[j] = if v[j] + s <= 1.0 { v[j] + s } else { v[j] - s };
        let v = clip(v);
        let f = obj.eval(&v);
        simplex.push((v, f));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best_f = simplex[0].1;
        if history.last().is_none_or(|&h| best_f < h) {
            history.push(best_f);
        } else {
            let last = *history.last().unwrap();
            history.push(last);
        }
        let worst_f = simplex[k].1;
        let spread_ok = (worst_f - best_f).abs() <= F_TOL * best_f.abs() + 1e-300;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread_ok || diameter < X_TOL {
            return (simplex[0].0.clone(), best_f, true);
        }
        if obj.exhausted() {
            return (simplex[0].0.clone(), best_f, false);
        }

        let centroid: Vec<f64> = (0..k)
            .map(|i| simplex[..k].iter().map(|(v, _)| v[i]).sum::<f64>() / k as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            clip(centroid
                .iter()
                .zip(&simplex[k].0)
                .map(|(c, w)| c + t * (c - w))
                .collect())
        };

        let xr = along(1.0);
        let fr = obj.eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = obj.eval(&xe);
            simplex[k] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[k - 1].1 {
            simplex[k] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[k].1 {
            let x = along(0.5);
            let f = obj.eval(&x);
            (x, f)
        } else {
            let x = along(-0.5);
            let f = obj.eval(&x);
            (x, f)
        };
        if fc < simplex[k].1.min(fr) {
            simplex[k] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_v = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best_v.iter().zip(&vertex.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
            let f = obj.eval(&v);
            *vertex = (v, f);
        }
    }
}

/// Jacobian-based standard errors and 95% intervals at `x`.
fn confidence(problem: &FitProblem, x: &[f64], norm: f64) -> Result<Vec<ParamEstimate>> {
    let k = x.len();
    let n = problem.n_points();
    let r0 = problem.residuals(x)?;
    let mut jac = DMatrix::<f64>::zeros(n, k);
    for (j, f) in problem.free.iter().enumerate() {
        let h = 1e-5 * (f.upper - f.lower);
        let (lo, hi) = ((x[j] - h).max(f.lower), (x[j] + h).min(f.upper));
        let mut xp = x.to_vec();
        xp[j] = hi;
        let rp = problem.residuals(&xp)?;
        let mut xm = x.to_vec();
        xm[j] = lo;
        let rm = if lo == x[j] { r0.clone() } else { problem.residuals(&xm)? };
        for i in 0..n {
            jac[(i, j)] = (rp[i] - rm[i]) / (hi - lo);
        }
    }

    // a column that barely moves the residuals, on the scale of its bound
    // range, carries no information about that parameter
    let col_scale: Vec<f64> = (0..k)
        .map(|j| jac.column(j).norm() * (problem.free[j].upper - problem.free[j].lower))
        .collect();
    let max_scale = col_scale.iter().copied().fold(0.0, f64::max);
    let identifiable: Vec<bool> = col_scale
        .iter()
        .map(|&s| s > 1e-9 * max_scale.max(f64::MIN_POSITIVE) && s > 0.0)
        .collect();

    let idx: Vec<usize> = (0..k).filter(|&j| identifiable[j]).collect();
    let dof = n.saturating_sub(idx.len()).max(1) as f64;
    let sigma2 = norm * norm / dof;
    let mut std_errors = vec![None; k];
    if !idx.is_empty() {
        let sub = DMatrix::from_fn(n, idx.len(), |i, j| jac[(i, idx[j])]);
        let jtj = sub.transpose() * &sub;
        if let Some(inv) = jtj.try_inverse() {
            for (a, &j) in idx.iter().enumerate() {
                let var = sigma2 * inv[(a, a)];
                if var.is_finite() && var >= 0.0 {
                    std_errors[j] = Some(var.sqrt());
                }
            }
        }
    }

    Ok(problem
        .free
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let se = std_errors[j];
            ParamEstimate {
                param: f.param,
                value: x[j],
                std_error: se,
                interval: se.map(|s| [x[j] - Z_95 * s, x[j] + Z_95 * s]),
                identifiable: identifiable[j] && se.is_some(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetuningGrid, Preset};
    use crate::transmission::sweep_triple;

    fn truth_problem(grid_n: usize) -> (FitProblem, [f64; 3]) {
        let p = Preset::canonical();
        let g = 0.4 * p.cavity.g0();
        let oc = p.omega_c_kappa(0.78);
        let gs = hz_to_rad(65e3);
        let ens = EnsembleConfig::uniform(1, g, gs, 0.5).unwrap();
        let drive = p.drive.with_omega_c(oc).unwrap();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), grid_n).unwrap();
        let triple = sweep_triple(&grid, &p.cavity, &ens, &drive).unwrap();
        let problem = FitProblem::new(p.cavity, ens, drive)
            .with_spectrum(&triple.empty)
            .unwrap()
            .with_spectrum(&triple.two_level)
            .unwrap()
            .with_spectrum(&triple.eit)
            .unwrap();
        (problem, [g, oc, gs])
    }

    #[test]
    fn noiseless_round_trip() {
        let (problem, truth) = truth_problem(201);
        let problem = problem
            .free(Param::G, 0.1 * truth[0], 3.0 * truth[0])
            .unwrap()
            .free(Param::OmegaC, 0.2 * truth[1], 2.0 * truth[1])
            .unwrap()
            .free(Param::GammaGs, 0.0, 5.0 * truth[2])
            .unwrap();
        let res = fit(&problem, 4000, 1).unwrap();
        for (p, t) in [Param::G, Param::OmegaC, Param::GammaGs].iter().zip(truth) {
            let v = res.value(*p).unwrap();
            assert!((v - t).abs() < 0.01 * t, "{p}: {v} vs {t}");
        }
        assert!(res.residual_norm <= res.initial_residual_norm);
        assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn fit_is_deterministic_and_units_invariant() {
        let (problem, truth) = truth_problem(61);
        let rad = problem
            .clone()
            .free(Param::G, 0.2 * truth[0], 2.0 * truth[0])
            .unwrap()
            .free(Param::OmegaC, 0.5 * truth[1], 1.5 * truth[1])
            .unwrap();
        let a = fit(&rad, 600, 7).unwrap();
        let b = fit(&rad, 600, 7).unwrap();
        assert_eq!(a, b);

        let p = Preset::canonical();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 61).unwrap();
        let ens = EnsembleConfig::uniform(1, truth[0], truth[2], 0.5).unwrap();
        let drive = p.drive.with_omega_c(truth[1]).unwrap();
        let triple = sweep_triple(&grid, &p.cavity, &ens, &drive).unwrap();
        let hz = FitProblem::new(p.cavity, ens, drive)
            .with_units(Units::Hertz)
            .with_spectrum(&triple.empty)
            .unwrap()
            .with_spectrum(&triple.two_level)
            .unwrap()
            .with_spectrum(&triple.eit)
            .unwrap()
            .free(Param::G, rad_to_hz(0.2 * truth[0]), rad_to_hz(2.0 * truth[0]))
            .unwrap()
            .free(Param::OmegaC, rad_to_hz(0.5 * truth[1]), rad_to_hz(1.5 * truth[1]))
            .unwrap();
        let c = fit(&hz, 600, 7).unwrap();
        for param in [Param::G, Param::OmegaC] {
            let r = a.value(param).unwrap();
            let h = hz_to_rad(c.value(param).unwrap());
            assert!((r - h).abs() <= 1e-6 * r, "{param}: {r} vs {h}");
        }
    }

    #[test]
    fn control_is_unidentifiable_without_eit_data() {
        let p = Preset::canonical();
        let ens = EnsembleConfig::uniform(1, 0.4 * p.cavity.g0(), hz_to_rad(65e3), 0.5).unwrap();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 81).unwrap();
        let triple = sweep_triple(&grid, &p.cavity, &ens, &p.drive).unwrap();
        let g = 0.4 * p.cavity.g0();
        let problem = FitProblem::new(p.cavity, ens, p.drive)
            .with_spectrum(&triple.two_level)
            .unwrap()
            .free(Param::G, 0.2 * g, 2.0 * g)
            .unwrap()
            .free(Param::OmegaC, 0.1 * p.cavity.kappa(), 2.0 * p.cavity.kappa())
            .unwrap();
        let res = fit(&problem, 800, 3).unwrap();
        assert_eq!(res.unidentifiable(), vec![Param::OmegaC]);
        assert!(res.get(Param::OmegaC).unwrap().interval.is_none());
        assert!(res.get(Param::G).unwrap().identifiable);
    }

    #[test]
    fn zero_free_parameters_echo_the_fixed_residual() {
        let (problem, _) = truth_problem(31);
        let res = fit(&problem, 10, 0).unwrap();
        assert!(res.estimates.is_empty());
        assert!(res.residual_norm < 1e-12);
        assert!(res.converged);
    }

    #[test]
    fn small_budget_reports_not_converged() {
        let (problem, truth) = truth_problem(61);
        let problem = problem
            .free(Param::G, 0.1 * truth[0], 3.0 * truth[0])
            .unwrap()
            .free(Param::OmegaC, 0.2 * truth[1], 2.0 * truth[1])
            .unwrap();
        let res = fit(&problem, 60, 0).unwrap();
        assert!(!res.converged);
        assert!(res.residual_norm <= res.initial_residual_norm);
    }

    #[test]
    fn invalid_problems_are_rejected() {
        let (problem, truth) = truth_problem(11);
        assert!(problem.clone().free(Param::G, 2.0, 1.0).is_err());
        assert!(problem.clone().free_from(Param::G, 0.0, 1.0, 2.0).is_err());
        assert!(problem.clone().free(Param::CouplingMean, 0.0, 1.0).is_err());
        let twice = problem.clone().free(Param::G, 0.0, truth[0]).unwrap();
        assert!(twice.free(Param::G, 0.0, truth[0]).is_err());
        assert!("bogus".parse::<Param>().is_err());
        assert_eq!("omega_c".parse::<Param>().unwrap(), Param::OmegaC);
    }
}
