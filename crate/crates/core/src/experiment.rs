//! Configuration-driven verification runs: JSON configs, staged checks,
//! reports and CSV grids.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphy::{chain_rule_residual, check_integrality, IntegralityReport};
use crate::complex::{cis, from_pair, to_pair, ZERO};
use crate::equivariant::{check_equivariance, compute_b, AffineTau, WeightReport, Weights};
use crate::forms::{
    apply_gauge, cell_grid, landau_residual, mixed_residual, nontriviality_scan, poincare_landau,
    probe_pairs, FormEvaluator, FormMetadata, GaugeDirection, SeriesConfig,
};
use crate::group::GroupElement;
use crate::lattice::Lattice;
use crate::phi::{
    chi_hat_residual, pde_residual, phi_affine, phi_quadrature, pseudo_char_residual,
    psi_reduction_residual, CharacterTable, PhiSolution, QuadratureConfig,
};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_RADIUS: f64 = 50.0;
pub const DEFAULT_PROBES: usize = 50;
pub const DEFAULT_BOX: f64 = 3.0;
pub const DEFAULT_GRID: usize = 32;
pub const MAX_TOL: f64 = 1e-4;

/// Per-check limits.
pub mod limits {
    pub const CHAIN_RULE: f64 = 1e-12;
    pub const WEIGHT_CONSTANCY: f64 = 1e-8;
    pub const EQUIVARIANCE: f64 = 1e-12;
    pub const PHI_AGREEMENT: f64 = 1e-10;
    pub const PATH_INDEPENDENCE: f64 = 1e-10;
    pub const PDE: f64 = 1e-6;
    pub const PSI_REDUCTION: f64 = 1e-6;
    pub const CHI_HAT_SPREAD: f64 = 1e-11;
    pub const CHI_HAT_ANCHOR: f64 = 1e-12;
    pub const PSEUDO_CHARACTER: f64 = 1e-11;
    pub const FORM_RESIDUAL: f64 = 1e-8;
    pub const NONTRIVIALITY: f64 = 1e-6;
}

pub const CHAIN_RULE_SAMPLES: usize = 1000;
pub const CHI_HAT_SAMPLES: usize = 100;
pub const PSEUDO_CHARACTER_RANGE: i64 = 5;

/// A real given either as a number or as an expression such as `"pi/2"`,
/// `"3*pi/4"`, `"2pi"` or `"-0.5"`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl Scalar {
    pub fn resolve(&self, field: &str) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expr(s) => parse_pi_expression(s).ok_or_else(|| Error::Validation {
                field: field.into(),
                message: format!("cannot parse `{s}` (expected e.g. 1.5, pi, pi/2, 3*pi/4)"),
            }),
        }
    }
}

/// Evaluates `[-]factor[*factor...][/denominator]` where each factor is a
/// number or `pi` (`2pi` is accepted). A coefficient is formed first and then
/// multiplied once by `π`, so `pi/2` is exactly `π/2`.
pub fn parse_pi_expression(s: &str) -> Option<f64> {
    let s: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), Some(d.parse::<f64>().ok()?)),
        None => (s.clone(), None),
    };
    let (negative, num) = match num.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, num),
    };
    if num.is_empty() {
        return None;
    }
    let mut coeff = 1.0;
    let mut pi_power = 0;
    for factor in num.split('*') {
        if factor == "pi" || factor == "π" {
            pi_power += 1;
        } else if let Some(n) = factor.strip_suffix("pi") {
            coeff *= n.parse::<f64>().ok()?;
            pi_power += 1;
        } else {
            coeff *= factor.parse::<f64>().ok()?;
        }
    }
    if let Some(d) = den {
        if d == 0.0 {
            return None;
        }
        coeff /= d;
    }
    if negative {
        coeff = -coeff;
    }
    let v = coeff * std::f64::consts::PI.powi(pi_power);
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    nu: Scalar,
    mu: Scalar,
    lattice: RawLattice,
    tau: RawTau,
    #[serde(default)]
    series: RawSeries,
    #[serde(default)]
    probes: RawProbes,
    #[serde(default)]
    grid: GridConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    omega1: [f64; 2],
    omega2: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTau {
    c: [f64; 2],
    #[serde(default)]
    d: [f64; 2],
    #[serde(default)]
    e: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_max_radius")]
    max_radius: f64,
}

impl Default for RawSeries {
    fn default() -> Self {
        RawSeries {
            tol: DEFAULT_TOL,
            max_radius: DEFAULT_MAX_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbes {
    #[serde(default = "default_probes")]
    count: usize,
    #[serde(default)]
    rng_seed: u64,
    #[serde(default = "default_box", rename = "box")]
    half_box: f64,
}

impl Default for RawProbes {
    fn default() -> Self {
        RawProbes {
            count: DEFAULT_PROBES,
            rng_seed: 0,
            half_box: DEFAULT_BOX,
        }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_radius() -> f64 {
    DEFAULT_MAX_RADIUS
}
fn default_probes() -> usize {
    DEFAULT_PROBES
}
fn default_box() -> f64 {
    DEFAULT_BOX
}
fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid")]
    pub nx: usize,
    #[serde(default = "default_grid")]
    pub ny: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nx: DEFAULT_GRID,
            ny: DEFAULT_GRID,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub count: usize,
    pub rng_seed: u64,
    #[serde(rename = "box")]
    pub half_box: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSettings {
    pub tol: f64,
    pub max_radius: f64,
}

/// A validated experiment; serializes with all expressions resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub nu: f64,
    pub mu: f64,
    pub lattice: Lattice,
    pub tau: AffineTau,
    pub series: SeriesSettings,
    pub probes: ProbeConfig,
    pub grid: GridConfig,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: {
                let full = e.to_string();
                full.rsplit_once(" at line ")
                    .map_or(full.clone(), |(m, _)| m.to_string())
            },
        })?;
        Self::validate(raw)
    }

    fn validate(raw: RawConfig) -> Result<Self> {
        let nu = raw.nu.resolve("nu")?;
        let mu = raw.mu.resolve("mu")?;
        for (field, v) in [("nu", nu), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(
                    field,
                    format!("must be a finite positive real, got {v}"),
                ));
            }
        }
        let lattice = Lattice::new(from_pair(raw.lattice.omega1), from_pair(raw.lattice.omega2))
            .map_err(|e| invalid("lattice", e.to_string()))?;
        let tau = AffineTau::new(
            from_pair(raw.tau.c),
            from_pair(raw.tau.d),
            from_pair(raw.tau.e),
        )
        .map_err(|e| invalid("tau", e.to_string()))?;
        let tol = raw.series.tol;
        if !(tol > 0.0 && tol <= MAX_TOL) {
            return Err(invalid(
                "series.tol",
                format!("must lie in (0, {MAX_TOL:e}], got {tol}"),
            ));
        }
        if !(raw.series.max_radius.is_finite() && raw.series.max_radius > 0.0) {
            return Err(invalid(
                "series.max_radius",
                "must be a finite positive real",
            ));
        }
        if raw.probes.count < 1 {
            return Err(invalid("probes.count", "must be at least 1"));
        }
        if !(raw.probes.half_box.is_finite() && raw.probes.half_box > 0.0) {
            return Err(invalid("probes.box", "must be a finite positive real"));
        }
        if raw.grid.nx < 1 || raw.grid.ny < 1 {
            return Err(invalid("grid", "nx and ny must be at least 1"));
        }
        Ok(ExperimentConfig {
            nu,
            mu,
            lattice,
            tau,
            series: SeriesSettings {
                tol,
                max_radius: raw.series.max_radius,
            },
            probes: ProbeConfig {
                count: raw.probes.count,
                rng_seed: raw.probes.rng_seed,
                half_box: raw.probes.half_box,
            },
            grid: raw.grid,
        })
    }

    /// Applies command-line overrides, re-validating them.
    pub fn with_overrides(mut self, tol: Option<f64>, seed: Option<u64>) -> Result<Self> {
        if let Some(tol) = tol {
            if !(tol > 0.0 && tol <= MAX_TOL) {
                return Err(invalid(
                    "tol",
                    format!("must lie in (0, {MAX_TOL:e}], got {tol}"),
                ));
            }
            self.series.tol = tol;
        }
        if let Some(seed) = seed {
            self.probes.rng_seed = seed;
        }
        Ok(self)
    }

    pub fn weights(&self) -> Result<Weights> {
        Weights::new(&self.tau, self.nu, self.mu)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text)
}

/// One named comparison against a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `true` when `value ≥ limit` is required instead of `value ≤ limit`.
    pub lower_bound: bool,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            lower_bound: false,
            pass: value.is_finite() && value >= 0.0 && value <= limit,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            lower_bound: true,
            pass: value.is_finite() && value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceStage {
    pub translation_residual: f64,
    /// Rotation parts compatible with `τ`: `"all"` or `"sign"` (only ±1).
    pub admissible_rotations: String,
    pub integrality: IntegralityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiStage {
    pub kappa: [f64; 2],
    pub closed_vs_quadrature: f64,
    pub path_independence: f64,
    pub pde_residual: f64,
    pub psi_reduction_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterStage {
    pub generator_values: [[f64; 2]; 2],
    pub chi_hat_spread: f64,
    pub chi_hat_anchor_mismatch: f64,
    pub pseudo_character_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormsStage {
    pub landau: FormMetadata,
    pub mixed: FormMetadata,
    pub landau_residual: f64,
    pub mixed_residual: f64,
    /// Mixed residual of the Landau form itself (no gauge factor).
    pub ungauged_mixed_residual: f64,
    pub nontriviality: f64,
}

/// Full result of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config: ExperimentConfig,
    pub weight: WeightReport,
    pub equivariance: EquivarianceStage,
    pub chain_rule_residual: f64,
    pub phi: PhiStage,
    pub character: CharacterStage,
    pub forms: Option<FormsStage>,
    pub forms_error: Option<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Why a run did not succeed; drives the CLI exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    IntegralityViolated,
    NumericalFailure,
    ResidualOverTolerance,
}

/// A loaded configuration with its derived objects and probe sets.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub weights: Weights,
    pub phi: PhiSolution,
    pub character: CharacterTable,
    timings: BTreeMap<String, f64>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let weights = config.weights()?;
        let phi = phi_affine(&config.tau, &weights);
        let character = CharacterTable::new(&config.tau, &weights, &phi, &config.lattice);
        Ok(Experiment {
            config,
            weights,
            phi,
            character,
            timings: BTreeMap::new(),
        })
    }

    /// Wall-clock seconds per stage, in stage-name order.
    pub fn timings(&self) -> &BTreeMap<String, f64> {
        &self.timings
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        *self.timings.entry(stage.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.probes.rng_seed);
        rng.set_stream(stream);
        rng
    }

    /// Probe points in the configured box.
    pub fn sample_points(&self, stream: u64, count: usize) -> Vec<Complex64> {
        let mut rng = self.rng(stream);
        let h = self.config.probes.half_box;
        (0..count)
            .map(|_| Complex64::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h)))
            .collect()
    }

    fn tau_admits_all_rotations(&self) -> bool {
        self.config.tau.c == ZERO || self.config.tau.d == ZERO
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> GroupElement {
        let h = self.config.probes.half_box;
        let b = Complex64::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h));
        if rng.gen_bool(0.5) {
            return GroupElement::translation(b);
        }
        let a = if self.tau_admits_all_rotations() {
            cis(rng.gen_range(0.0..std::f64::consts::TAU))
        } else {
            Complex64::new(-1.0, 0.0)
        };
        GroupElement::new(a, b).expect("unit rotation")
    }

    pub fn equivariance(&mut self) -> Result<EquivarianceStage> {
        self.timed("validate", |ex| {
            let cfg = &ex.config;
            let mut rng = ex.rng(1);
            let mut elements: Vec<GroupElement> = cfg
                .lattice
                .generators()
                .iter()
                .map(|&g| GroupElement::translation(g))
                .collect();
            elements.extend((0..16).map(|_| ex.random_element(&mut rng)));
            let samples = ex.sample_points(2, cfg.probes.count);
            let translation_residual = check_equivariance(&cfg.tau, &elements, &samples)?;
            Ok(EquivarianceStage {
                translation_residual,
                admissible_rotations: if ex.tau_admits_all_rotations() {
                    "all"
                } else {
                    "sign"
                }
                .into(),
                integrality: check_integrality(&cfg.tau, &ex.weights, &cfg.lattice),
            })
        })
    }

    pub fn weight(&mut self) -> Result<WeightReport> {
        self.timed("weight", |ex| {
            let samples = ex.sample_points(3, CHAIN_RULE_SAMPLES);
            compute_b(&ex.config.tau, ex.config.nu, ex.config.mu, &samples)
        })
    }

    pub fn chain_rule(&mut self) -> Result<f64> {
        self.timed("chain_rule", |ex| {
            let mut rng = ex.rng(4);
            let mut worst = 0.0f64;
            for _ in 0..CHAIN_RULE_SAMPLES {
                let g = ex.random_element(&mut rng);
                let h = ex.random_element(&mut rng);
                let hb = ex.config.probes.half_box;
                let z = Complex64::new(rng.gen_range(-hb..=hb), rng.gen_range(-hb..=hb));
                worst = worst.max(chain_rule_residual(&ex.config.tau, &ex.weights, &g, &h, z)?);
            }
            Ok(worst)
        })
    }

    pub fn phi_stage(&mut self) -> Result<PhiStage> {
        self.timed("phi", |ex| {
            let tau = &ex.config.tau;
            let qcfg = QuadratureConfig::default();
            let samples = ex.sample_points(5, 100);
            let mut agreement = 0.0f64;
            let mut path = 0.0f64;
            for &z in &samples {
                let straight = phi_quadrature(tau, &ex.weights, z, &[ZERO, z], &qcfg)?;
                let bent = phi_quadrature(
                    tau,
                    &ex.weights,
                    z,
                    &[ZERO, Complex64::new(z.re, 0.0), z],
                    &qcfg,
                )?;
                agreement = agreement.max((straight - ex.phi.eval(z)).abs());
                path = path.max((straight - bent).abs());
            }
            let kappa = ex.phi.kappa().unwrap_or(ZERO);
            Ok(PhiStage {
                kappa: to_pair(kappa),
                closed_vs_quadrature: agreement,
                path_independence: path,
                pde_residual: pde_residual(tau, &ex.phi, &samples),
                psi_reduction_residual: psi_reduction_residual(tau, &ex.weights, &ex.phi, &samples),
            })
        })
    }

    pub fn character_stage(&mut self) -> CharacterStage {
        self.timed("character", |ex| {
            let tau = &ex.config.tau;
            let l = &ex.config.lattice;
            let zs = ex.sample_points(6, CHI_HAT_SAMPLES);
            let mut spread = 0.0f64;
            let mut anchor = 0.0f64;
            for gamma in [l.omega1(), l.omega2(), l.omega1() + l.omega2()] {
                let check = chi_hat_residual(tau, &ex.weights, &ex.phi, gamma, &zs);
                spread = spread.max(check.spread);
                anchor = anchor.max(check.anchor_mismatch);
            }
            CharacterStage {
                generator_values: ex.character.values.map(to_pair),
                chi_hat_spread: spread,
                chi_hat_anchor_mismatch: anchor,
                pseudo_character_residual: pseudo_char_residual(
                    tau,
                    &ex.weights,
                    &ex.phi,
                    l,
                    PSEUDO_CHARACTER_RANGE,
                ),
            }
        })
    }

    fn series_config(&self) -> SeriesConfig {
        SeriesConfig {
            tol: self.config.series.tol,
            max_radius: self.config.series.max_radius,
            probe_seed: self.config.probes.rng_seed,
        }
    }

    /// The Poincaré Landau form and its gauge-inverse (mixed) image.
    pub fn build_forms(&mut self) -> Result<(FormEvaluator, FormEvaluator)> {
        self.timed("build", |ex| {
            let landau = poincare_landau(
                &ex.config.tau,
                &ex.weights,
                &ex.character,
                &ex.config.lattice,
                &ex.series_config(),
            )?;
            let mixed = apply_gauge(&ex.phi, &landau, GaugeDirection::Inverse);
            Ok((landau, mixed))
        })
    }

    /// Probe residuals for a pair of constructed forms.
    pub fn forms_stage(&mut self, landau: &FormEvaluator, mixed: &FormEvaluator) -> FormsStage {
        self.timed("forms", |ex| {
            let cfg = &ex.config;
            let probes = probe_pairs(
                &cfg.lattice,
                cfg.probes.rng_seed,
                cfg.probes.count,
                cfg.probes.half_box,
                3,
            );
            let (mut lr, mut mr, mut ur) = (0.0f64, 0.0f64, 0.0f64);
            for &(z, gamma) in &probes {
                lr = lr.max(landau_residual(
                    landau,
                    &ex.character,
                    ex.weights.b,
                    z,
                    gamma,
                ));
                mr = mr.max(mixed_residual(mixed, &cfg.tau, &ex.weights, z, gamma));
                ur = ur.max(mixed_residual(landau, &cfg.tau, &ex.weights, z, gamma));
            }
            FormsStage {
                landau: landau.metadata(),
                mixed: mixed.metadata(),
                landau_residual: lr,
                mixed_residual: mr,
                ungauged_mixed_residual: ur,
                nontriviality: nontriviality_scan(
                    landau,
                    &cfg.lattice,
                    cfg.grid.nx.max(cfg.grid.ny),
                ),
            }
        })
    }

    fn form_limit(&self) -> f64 {
        limits::FORM_RESIDUAL.max(10.0 * self.config.series.tol)
    }

    pub fn verify(&mut self) -> Result<VerificationReport> {
        let equivariance = self.equivariance()?;
        let weight = self.weight()?;
        let chain = self.chain_rule()?;
        let phi = self.phi_stage()?;
        let character = self.character_stage();
        let (forms, forms_error) = match self.build_forms() {
            Ok((landau, mixed)) => (Some(self.forms_stage(&landau, &mixed)), None),
            Err(e) => (None, Some(e.to_string())),
        };

        let mut checks = vec![
            Check::at_most(
                "equivariance",
                equivariance.translation_residual,
                limits::EQUIVARIANCE,
            ),
            Check::at_most(
                "integrality_defect",
                equivariance.integrality.max_defect(),
                crate::automorphy::INTEGRALITY_TOLERANCE,
            ),
            Check::at_most(
                "weight_constancy",
                weight.constancy,
                limits::WEIGHT_CONSTANCY,
            ),
            Check::at_most("chain_rule", chain, limits::CHAIN_RULE),
            Check::at_most(
                "phi_closed_vs_quadrature",
                phi.closed_vs_quadrature,
                limits::PHI_AGREEMENT,
            ),
            Check::at_most(
                "phi_path_independence",
                phi.path_independence,
                limits::PATH_INDEPENDENCE,
            ),
            Check::at_most("phi_pde", phi.pde_residual, limits::PDE),
            Check::at_most(
                "psi_reduction",
                phi.psi_reduction_residual,
                limits::PSI_REDUCTION,
            ),
            Check::at_most(
                "chi_hat_spread",
                character.chi_hat_spread,
                limits::CHI_HAT_SPREAD,
            ),
            Check::at_most(
                "chi_hat_anchor",
                character.chi_hat_anchor_mismatch,
                limits::CHI_HAT_ANCHOR,
            ),
        ];
        if equivariance.integrality.ok {
            checks.push(Check::at_most(
                "pseudo_character",
                character.pseudo_character_residual,
                limits::PSEUDO_CHARACTER,
            ));
        }
        if let Some(f) = &forms {
            let limit = self.form_limit();
            checks.push(Check::at_most("landau_residual", f.landau_residual, limit));
            checks.push(Check::at_most("mixed_residual", f.mixed_residual, limit));
            checks.push(Check::at_least(
                "nontriviality",
                f.nontriviality,
                limits::NONTRIVIALITY,
            ));
        }
        let passed = forms.is_some() && checks.iter().all(|c| c.pass);
        Ok(VerificationReport {
            config: self.config.clone(),
            weight,
            equivariance,
            chain_rule_residual: chain,
            phi,
            character,
            forms,
            forms_error,
            checks,
            passed,
        })
    }
}

impl VerificationReport {
    pub fn outcome(&self) -> Outcome {
        if !self.equivariance.integrality.ok {
            Outcome::IntegralityViolated
        } else if self.forms.is_none() {
            Outcome::NumericalFailure
        } else if self.passed {
            Outcome::Ok
        } else {
            Outcome::ResidualOverTolerance
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `x,y,phi` over the fundamental-cell grid.
pub fn phi_grid_csv(ex: &Experiment) -> String {
    let mut out = String::from("x,y,phi\n");
    for z in cell_grid(&ex.config.lattice, ex.config.grid.nx, ex.config.grid.ny) {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(ex.phi.eval(z))
        ));
    }
    out
}

/// `x,y,re,im,abs` of `f` over the fundamental-cell grid.
pub fn sample_csv(f: &FormEvaluator, lattice: &Lattice, grid: GridConfig) -> String {
    use rayon::prelude::*;
    let points = cell_grid(lattice, grid.nx, grid.ny);
    let values: Vec<Complex64> = points.par_iter().map(|&z| f.eval(z)).collect();
    let mut out = String::from("x,y,re,im,abs\n");
    for (z, v) in points.iter().zip(values) {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm())
        ));
    }
    out
}
