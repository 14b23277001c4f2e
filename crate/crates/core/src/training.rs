//! Loss, gradients, AdamW and the epoch loop with best-PRD checkpointing.
//!
//! The hard threshold is differentiated with a straight-through rule:
//! `d out/d Q = 1[|Q| > T]` and `d out/d T = -sign(Q) 1[|Q| > T]`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::model::{calibrate_thresholds, init_params, Activation, LatentVector, Model, ModelConfig, ModelParams, Trace};

/// Clamp applied to activities before taking logarithms.
pub const KL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub eta: f64,
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub xi: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Lower bound enforced on `V` after every step.
    pub v_min: f64,
    /// Learning-rate multiplier for the thresholds `T`.
    pub t_lr_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 100.0,
            gamma: 1e-4,
            lr: 1e-3,
            batch_size: 16,
            epochs: 300,
            xi: 0.5,
            weight_decay: 0.01,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            v_min: 1e-3,
            t_lr_scale: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be >= 0");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return bad("xi must lie in (0, 1]");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        if !(self.weight_decay >= 0.0) {
            return bad("weight_decay must be >= 0");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("betas must lie in [0, 1)");
        }
        if !(self.t_lr_scale >= 0.0 && self.t_lr_scale.is_finite()) {
            return bad("t_lr_scale must be >= 0");
        }
        if !(self.eps > 0.0) || !(self.v_min > 0.0) {
            return bad("eps and v_min must be positive");
        }
        Ok(())
    }
}

/// Softmax of the latent magnitudes.
pub fn sparsity_activity(latent: &[f64]) -> Vec<f64> {
    let peak = latent.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let e: Vec<f64> = latent.iter().map(|v| (v.abs() - peak).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn kl_term(gamma: f64, a: f64) -> f64 {
    let a = a.clamp(KL_EPS, 1.0 - KL_EPS);
    gamma * (gamma / a).ln() + (1.0 - gamma) * ((1.0 - gamma) / (1.0 - a)).ln()
}

/// Sum over components of the Bernoulli KL divergence `KL(gamma || activity_j)`.
pub fn kl_penalty(activity: &[f64], gamma: f64) -> f64 {
    activity.iter().map(|&a| kl_term(gamma, a)).sum()
}

pub fn mse(x: &[f64], x_hat: &[f64]) -> f64 {
    x.iter().zip(x_hat).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64
}

/// The two loss components of one block or the mean over many.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub kl: f64,
    pub mse: f64,
    pub total: f64,
}

pub fn loss_parts(x: &[f64], x_hat: &[f64], latent: &[f64], cfg: &TrainConfig) -> LossParts {
    let kl = kl_penalty(&sparsity_activity(latent), cfg.gamma);
    let mse = mse(x, x_hat);
    LossParts { kl, mse, total: cfg.eta * kl + mse }
}

/// `eta * KL + MSE` for one block.
pub fn loss(x: &[f64], x_hat: &[f64], latent: &[f64], cfg: &TrainConfig) -> f64 {
    loss_parts(x, x_hat, latent, cfg).total
}

/// Gradient tensors with the same layout as [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    pub fn zeros(h: usize, n: usize) -> Self {
        Self {
            w1: vec![0.0; n * h],
            b1: vec![0.0; n],
            v: vec![0.0; n],
            t: vec![0.0; n],
            w2: vec![0.0; h * n],
            b2: vec![0.0; h],
        }
    }

    fn tensors_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [&mut self.w1, &mut self.b1, &mut self.v, &mut self.t, &mut self.w2, &mut self.b2]
    }

    fn tensors(&self) -> [&Vec<f64>; 6] {
        [&self.w1, &self.b1, &self.v, &self.t, &self.w2, &self.b2]
    }

    fn scale(&mut self, k: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= k);
        }
    }
}

fn param_tensors_mut(p: &mut ModelParams) -> [&mut Vec<f64>; 6] {
    [&mut p.w1, &mut p.b1, &mut p.v, &mut p.t, &mut p.w2, &mut p.b2]
}

// Gradient of eta * KL(gamma || softmax(|l|)) with respect to l.
fn kl_grad(latent: &[f64], cfg: &TrainConfig, out: &mut [f64]) {
    let act = sparsity_activity(latent);
    let g = cfg.gamma;
    let u: Vec<f64> = act
        .iter()
        .map(|&a| {
            if a <= KL_EPS || a >= 1.0 - KL_EPS {
                0.0
            } else {
                cfg.eta * (-g / a + (1.0 - g) / (1.0 - a))
            }
        })
        .collect();
    let s: f64 = act.iter().zip(&u).map(|(a, u)| a * u).sum();
    for j in 0..latent.len() {
        let sign = if latent[j] > 0.0 {
            1.0
        } else if latent[j] < 0.0 {
            -1.0
        } else {
            0.0
        };
        out[j] += sign * act[j] * (u[j] - s);
    }
}

fn accumulate(model: &Model, x: &[f64], tr: &Trace, cfg: &TrainConfig, g: &mut Gradients) {
    let p = model.params();
    let (h, n) = (p.h, p.n);
    let dxh: Vec<f64> = tr.x_hat.iter().zip(x).map(|(a, b)| 2.0 * (a - b) / h as f64).collect();
    let mut dlat = vec![0.0; n];
    for r in 0..h {
        let d = dxh[r];
        g.b2[r] += d;
        let row = r * n;
        for k in 0..n {
            g.w2[row + k] += d * tr.y[k];
            dlat[k] += p.w2[row + k] * d;
        }
    }
    // the inverse transform is orthogonal, so its adjoint is the forward transform
    model.spectral_forward(&mut dlat);
    if cfg.eta > 0.0 {
        kl_grad(&tr.latent, cfg, &mut dlat);
    }
    let mut dspec = vec![0.0; n];
    for i in 0..n {
        let q = tr.q[i];
        if q.abs() > p.t[i] {
            let dq = dlat[i];
            g.t[i] -= q.signum() * dq;
            g.v[i] -= dq * tr.spectrum[i] / (p.v[i] * p.v[i]);
            dspec[i] = dq / p.v[i];
        }
    }
    model.spectral_inverse(&mut dspec);
    for k in 0..n {
        let dz = match p.activation {
            Activation::Tanh => dspec[k] * (1.0 - tr.c[k] * tr.c[k]),
            Activation::Identity => dspec[k],
        };
        g.b1[k] += dz;
        let row = k * h;
        for i in 0..h {
            g.w1[row + i] += dz * x[i];
        }
    }
}

/// Mean loss and mean gradients over a batch of blocks.
pub fn backward(model: &Model, batch: &[Vec<f64>], cfg: &TrainConfig) -> Result<(LossParts, Gradients)> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let p = model.params();
    let mut g = Gradients::zeros(p.h, p.n);
    let mut parts = LossParts::default();
    for x in batch {
        let tr = model.trace(x)?;
        let lp = loss_parts(x, &tr.x_hat, &tr.latent, cfg);
        parts.kl += lp.kl;
        parts.mse += lp.mse;
        parts.total += lp.total;
        accumulate(model, x, &tr, cfg, &mut g);
    }
    let k = 1.0 / batch.len() as f64;
    g.scale(k);
    parts.kl *= k;
    parts.mse *= k;
    parts.total *= k;
    Ok((parts, g))
}

/// AdamW moment buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamW {
    pub m: Gradients,
    pub v: Gradients,
    pub step: u64,
}

impl AdamW {
    pub fn new(h: usize, n: usize) -> Self {
        Self { m: Gradients::zeros(h, n), v: Gradients::zeros(h, n), step: 0 }
    }

    /// One update with decoupled weight decay, then `V >= v_min`, `T >= 0`.
    pub fn update(&mut self, params: &mut ModelParams, grads: &Gradients, cfg: &TrainConfig) {
        self.step += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.step as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.step as i32);
        let decay = 1.0 - cfg.lr * cfg.weight_decay;
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        let gs = grads.tensors();
        for (k, (((p, m), v), g)) in param_tensors_mut(params).into_iter().zip(ms).zip(vs).zip(gs).enumerate() {
            let lr = if k == 3 { cfg.lr * cfg.t_lr_scale } else { cfg.lr };
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let mh = m[i] / bc1;
                let vh = v[i] / bc2;
                p[i] = p[i] * decay - lr * mh / (vh.sqrt() + cfg.eps);
            }
        }
        params.v.iter_mut().for_each(|v| *v = v.max(cfg.v_min));
        params.t.iter_mut().for_each(|t| *t = t.max(0.0));
    }
}

/// Fraction of exactly-zero entries across all latents.
pub fn zero_fraction(latents: &[LatentVector]) -> Result<f64> {
    let total: usize = latents.iter().map(|l| l.len()).sum();
    if total == 0 {
        return Err(Error::Empty("latents"));
    }
    let nonzero: usize = latents.iter().map(|l| l.nonzero_count).sum();
    Ok((total - nonzero) as f64 / total as f64)
}

/// Whole-dataset figures after one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub loss: f64,
    pub kl: f64,
    pub mse: f64,
    pub prd: f64,
    pub zero_fraction: f64,
}

impl std::fmt::Display for EpochLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "epoch={} loss={:.6} kl={:.6} mse={:.6e} prd={:.4} zero_fraction={:.4}",
            self.epoch, self.loss, self.kl, self.mse, self.prd, self.zero_fraction
        )
    }
}

/// Evaluates loss terms, PRD and sparsity of `model` over `blocks`.
pub fn evaluate(model: &Model, blocks: &[Vec<f64>], cfg: &TrainConfig, epoch: usize) -> Result<EpochLog> {
    if blocks.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let mut parts = LossParts::default();
    let mut orig = Vec::with_capacity(blocks.len() * model.params().h);
    let mut rec = Vec::with_capacity(orig.capacity());
    let mut zeros = 0usize;
    for x in blocks {
        let tr = model.trace(x)?;
        let lp = loss_parts(x, &tr.x_hat, &tr.latent, cfg);
        parts.kl += lp.kl;
        parts.mse += lp.mse;
        parts.total += lp.total;
        zeros += tr.latent.iter().filter(|v| **v == 0.0).count();
        orig.extend_from_slice(x);
        rec.extend_from_slice(&tr.x_hat);
    }
    let k = blocks.len() as f64;
    Ok(EpochLog {
        epoch,
        loss: parts.total / k,
        kl: parts.kl / k,
        mse: parts.mse / k,
        prd: metrics::prd(&orig, &rec)?,
        zero_fraction: zeros as f64 / (k * model.params().n as f64),
    })
}

/// Optimizer state plus the PRD history and best snapshot.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub model: Model,
    pub opt: AdamW,
    pub epoch: usize,
    pub prd_history: Vec<f64>,
    pub best: Option<ModelParams>,
    rng: ChaCha8Rng,
}

impl TrainState {
    pub fn new(params: ModelParams, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let (h, n) = (params.h, params.n);
        Ok(Self {
            model: Model::new(params)?,
            opt: AdamW::new(h, n),
            epoch: 0,
            prd_history: Vec::new(),
            best: None,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        })
    }

    /// One pass of minibatch updates in a freshly shuffled order, followed by
    /// a full-dataset evaluation and checkpoint.
    pub fn run_epoch(&mut self, blocks: &[Vec<f64>], cfg: &TrainConfig) -> Result<EpochLog> {
        if blocks.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.shuffle(&mut self.rng);
        let mut batch = Vec::with_capacity(cfg.batch_size);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| blocks[i].clone()));
            let (_, grads) = backward(&self.model, &batch, cfg)?;
            self.opt.update(self.model.params_mut(), &grads, cfg);
        }
        self.epoch += 1;
        let log = evaluate(&self.model, blocks, cfg, self.epoch)?;
        let best = self.prd_history.iter().copied().fold(f64::INFINITY, f64::min);
        self.prd_history.push(log.prd);
        if log.prd <= best {
            self.best = Some(self.model.params().clone());
        }
        Ok(log)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Evaluation of the starting parameters, labelled epoch 0.
    pub initial: EpochLog,
    pub history: Vec<EpochLog>,
    pub stopped_early: bool,
}

/// Runs up to `cfg.epochs` epochs from `params`, stopping once the latent
/// zero fraction reaches `cfg.xi`. Returns the lowest-PRD snapshot.
pub fn train_from(params: ModelParams, blocks: &[Vec<f64>], cfg: &TrainConfig) -> Result<TrainOutcome> {
    if blocks.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let mut state = TrainState::new(params, cfg)?;
    let initial = evaluate(&state.model, blocks, cfg, 0)?;
    log::info!("{initial}");
    let mut history = Vec::new();
    let mut stopped_early = false;
    while state.epoch < cfg.epochs {
        let log = state.run_epoch(blocks, cfg)?;
        log::info!("{log}");
        history.push(log);
        if log.zero_fraction <= cfg.xi {
            stopped_early = true;
            break;
        }
    }
    let params = state.best.take().unwrap_or_else(|| state.model.into_params());
    Ok(TrainOutcome { params, initial, history, stopped_early })
}

/// Seeded initialization, threshold warm-up on the first batch, then
/// [`train_from`].
pub fn train(blocks: &[Vec<f64>], model_cfg: &ModelConfig, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if blocks.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    cfg.validate()?;
    let mut params = init_params(cfg.seed, model_cfg)?;
    let warm = &blocks[..cfg.batch_size.min(blocks.len())];
    calibrate_thresholds(&mut params, warm, model_cfg.kappa)?;
    train_from(params, blocks, cfg)
}
