//! The CS-STD sigmoid: a difference-of-convex outer loop whose convex step is
//! the regularized sigmoid, followed by the convex-shape pseudo projection.
//!
//! Each outer iteration linearizes the concave TD energy at the current
//! iterate (`p = ∇R(u)`), takes the closed-form minimizer
//! `u½ = S((o - λp) / ε)`, and projects with [`project_convex`]. Without
//! the projection this is a plain DCA scheme and the energy
//! `F(u; o) + λR(u)` never increases.

use std::fmt::Write as _;

use crate::convexity::{project_convex, CurvatureFloor, RadiusSchedule};
use crate::dual::{classic_sigmoid, data_energy, regularized_sigmoid, EntropyParam};
use crate::error::{check_dims, Error, Result};
use crate::field::{gaussian_kernel, gaussian_kernel_with_radius, Field, Kernel, SoftMask};
use crate::regularizer::{td_energy, td_subgradient, EdgeWeight};
use crate::sublevel::{project_nested, SublevelStack};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Regularization weight per channel.
    pub lambdas: Vec<f64>,
    /// Entropic regularization `ε`.
    pub epsilon: f64,
    /// Gaussian standard deviation of the TD kernel, in pixels.
    pub sigma: f64,
    /// TD kernel half-width; `None` means `ceil(3σ)`.
    pub kernel_radius: Option<usize>,
    pub schedule: RadiusSchedule,
    pub delta: CurvatureFloor,
    /// Outer DCA iterations `t₁`.
    pub outer_iters: usize,
    /// Inner projection iterations `t₂`.
    pub inner_iters: usize,
    /// Early exit once `max |u⁺ - u| < outer_tol`.
    pub outer_tol: f64,
    pub enable_convex: bool,
    pub enable_td: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![10.0],
            epsilon: 0.05,
            sigma: DEFAULT_SIGMA,
            kernel_radius: None,
            schedule: RadiusSchedule::default(),
            delta: CurvatureFloor::default(),
            outer_iters: 10,
            inner_iters: 50,
            outer_tol: 1e-4,
            enable_convex: true,
            enable_td: true,
        }
    }
}

/// Default TD kernel width.
pub const DEFAULT_SIGMA: f64 = 2.0;

impl SolverConfig {
    /// Same settings with one `λ` repeated for `channels` channels.
    pub fn with_channels(mut self, channels: usize) -> Self {
        let lambda = self.lambdas.first().copied().unwrap_or(0.0);
        self.lambdas = vec![lambda; channels];
        self
    }

    pub fn validate(&self, channels: usize) -> Result<()> {
        if self.lambdas.len() != channels {
            return Err(Error::InvalidParameter(format!(
                "{} lambdas given for {channels} channels",
                self.lambdas.len()
            )));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !l.is_finite() || **l < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be nonnegative, got {l}"
            )));
        }
        EntropyParam::new(self.epsilon)?;
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.outer_iters == 0 || self.inner_iters == 0 {
            return Err(Error::InvalidParameter(
                "iteration counts must be positive".into(),
            ));
        }
        if self.outer_tol.is_nan() || self.outer_tol < 0.0 {
            return Err(Error::InvalidParameter(
                "outer_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        match self.kernel_radius {
            Some(r) => gaussian_kernel_with_radius(self.sigma, r),
            None => gaussian_kernel(self.sigma),
        }
    }

    fn effective_lambda(&self, channel: usize) -> f64 {
        if self.enable_td {
            self.lambdas[channel]
        } else {
            0.0
        }
    }
}

/// Energy of one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub iter: usize,
    /// `F(u; o)` summed over channels.
    pub data_energy: f64,
    /// `λ R(u)` summed over channels.
    pub td_energy: f64,
    pub total: f64,
    /// `max |u^{t+1} - u^t|`; zero for the initial record.
    pub sup_change: f64,
    /// Total energy of `u½`, before the convex projection (absent for the initial record).
    pub pre_projection_total: Option<f64>,
}

/// One record for the initial state plus one per outer iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTrace {
    pub records: Vec<EnergyRecord>,
}

impl EnergyTrace {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn totals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.total).collect()
    }

    /// `iter,data_energy,td_energy,total,sup_change` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,data_energy,td_energy,total,sup_change\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e}",
                r.iter, r.data_energy, r.td_energy, r.total, r.sup_change
            );
        }
        out
    }
}

/// `F(u; o) + λ R(u)` with `λ = cfg.lambdas[0]` (0 when TD is disabled).
pub fn total_energy(u: &SoftMask, o: &Field, e: &EdgeWeight, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate(1)?;
    let k = cfg.kernel()?;
    let (data, td) = channel_energy(u, o, e, &k, cfg, 0)?;
    Ok(data + td)
}

fn channel_energy(
    u: &SoftMask,
    o: &Field,
    e: &EdgeWeight,
    k: &Kernel,
    cfg: &SolverConfig,
    channel: usize,
) -> Result<(f64, f64)> {
    let eps = EntropyParam::new(cfg.epsilon)?;
    let data = data_energy(u, o, eps)?;
    let lambda = cfg.effective_lambda(channel);
    let td = if lambda == 0.0 {
        0.0
    } else {
        lambda * td_energy(u, e, k)?
    };
    Ok((data, td))
}

fn stack_energy(
    us: &[SoftMask],
    os: &[Field],
    e: &EdgeWeight,
    k: &Kernel,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let mut data = 0.0;
    let mut td = 0.0;
    for (c, (u, o)) in us.iter().zip(os).enumerate() {
        let (d, t) = channel_energy(u, o, e, k, cfg, c)?;
        data += d;
        td += t;
    }
    if !(data + td).is_finite() {
        return Err(Error::NonFinite("energy".into()));
    }
    Ok((data, td))
}

/// `u½ = S((o - λ ∇R(u)) / ε)`.
fn sigmoid_step(
    u: &SoftMask,
    o: &Field,
    e: &EdgeWeight,
    k: &Kernel,
    cfg: &SolverConfig,
    channel: usize,
) -> Result<SoftMask> {
    let eps = EntropyParam::new(cfg.epsilon)?;
    let lambda = cfg.effective_lambda(channel);
    if lambda == 0.0 {
        return regularized_sigmoid(o, &Field::zeros(o.width(), o.height()), 0.0, eps);
    }
    let p = td_subgradient(u, e, k)?;
    regularized_sigmoid(o, &p, lambda, eps)
}

fn check_inputs(os: &[Field], e: &EdgeWeight, cfg: &SolverConfig) -> Result<()> {
    let first = os
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one feature channel".into()))?;
    for o in os {
        check_dims(first.dims(), o.dims())?;
    }
    check_dims(first.dims(), e.dims())?;
    cfg.validate(os.len())?;
    if cfg.enable_convex {
        cfg.schedule.check_fits(first.width(), first.height())?;
    }
    Ok(())
}

/// Two-phase CS-STD segmentation of the feature `o`.
///
/// Starts from `u⁰ = S(o)` and runs at most `cfg.outer_iters` outer steps.
pub fn cs_std_solve(
    o: &Field,
    e: &EdgeWeight,
    cfg: &SolverConfig,
) -> Result<(SoftMask, EnergyTrace)> {
    let os = std::slice::from_ref(o);
    check_inputs(os, e, cfg)?;
    let k = cfg.kernel()?;

    let mut u = classic_sigmoid(o);
    let mut trace = EnergyTrace::default();
    let (data, td) = stack_energy(std::slice::from_ref(&u), os, e, &k, cfg)?;
    trace.records.push(EnergyRecord {
        iter: 0,
        data_energy: data,
        td_energy: td,
        total: data + td,
        sup_change: 0.0,
        pre_projection_total: None,
    });

    for t in 1..=cfg.outer_iters {
        let half = sigmoid_step(&u, o, e, &k, cfg, 0)?;
        let (hd, ht) = stack_energy(std::slice::from_ref(&half), os, e, &k, cfg)?;
        let next = if cfg.enable_convex {
            project_convex(&half, &cfg.schedule, cfg.delta, cfg.inner_iters)?
        } else {
            half
        };
        let change = next.sup_distance(&u)?;
        let (data, td) = stack_energy(std::slice::from_ref(&next), os, e, &k, cfg)?;
        trace.records.push(EnergyRecord {
            iter: t,
            data_energy: data,
            td_energy: td,
            total: data + td,
            sup_change: change,
            pre_projection_total: Some(hd + ht),
        });
        u = next;
        if change < cfg.outer_tol {
            break;
        }
    }
    Ok((u, trace))
}

/// Nested projection used every outer step: for ascending `γ`,
/// `u_γ ← max(u_γ, u_{γ-1})`, then convexify `u_γ` if enabled. Convexification
/// only raises values, so the output is exactly nested.
fn nest_and_convexify(mut us: Vec<SoftMask>, cfg: &SolverConfig) -> Result<Vec<SoftMask>> {
    for g in 0..us.len() {
        if g > 0 {
            let lifted = us[g].zip_map(&us[g - 1], f64::max)?;
            us[g] = SoftMask::new(lifted)?;
        }
        if cfg.enable_convex {
            us[g] = project_convex(&us[g], &cfg.schedule, cfg.delta, cfg.inner_iters)?;
        }
    }
    Ok(us)
}

/// Multi-phase CS-STD over `L - 1` nested sublevel channels.
///
/// `o_stack[γ]` is the difference feature `ô_γ - ô_{γ+1}` of channel `γ`.
pub fn cs_std_solve_multiphase(
    o_stack: &[Field],
    e: &EdgeWeight,
    cfg: &SolverConfig,
) -> Result<(SublevelStack, EnergyTrace)> {
    check_inputs(o_stack, e, cfg)?;
    let k = cfg.kernel()?;

    let init: Vec<Field> = o_stack
        .iter()
        .map(|o| classic_sigmoid(o).into_field())
        .collect();
    let mut us = project_nested(&init)?.into_channels();
    let mut trace = EnergyTrace::default();
    let (data, td) = stack_energy(&us, o_stack, e, &k, cfg)?;
    trace.records.push(EnergyRecord {
        iter: 0,
        data_energy: data,
        td_energy: td,
        total: data + td,
        sup_change: 0.0,
        pre_projection_total: None,
    });

    for t in 1..=cfg.outer_iters {
        let halves = us
            .iter()
            .zip(o_stack)
            .enumerate()
            .map(|(c, (u, o))| sigmoid_step(u, o, e, &k, cfg, c))
            .collect::<Result<Vec<_>>>()?;
        let (hd, ht) = stack_energy(&halves, o_stack, e, &k, cfg)?;
        let next = nest_and_convexify(halves, cfg)?;
        let mut change: f64 = 0.0;
        for (a, b) in next.iter().zip(&us) {
            change = change.max(a.sup_distance(b)?);
        }
        let (data, td) = stack_energy(&next, o_stack, e, &k, cfg)?;
        trace.records.push(EnergyRecord {
            iter: t,
            data_energy: data,
            td_energy: td,
            total: data + td,
            sup_change: change,
            pre_projection_total: Some(hd + ht),
        });
        us = next;
        if change < cfg.outer_tol {
            break;
        }
    }
    Ok((SublevelStack::new(us)?, trace))
}
