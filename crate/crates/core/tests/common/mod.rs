#![allow(dead_code)]

use aedcst::model::{init_params, Activation, Model, ModelConfig, ModelParams};
use aedcst::training::{backward, loss_parts, Gradients, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-6;
pub const MARGIN: f64 = 1e-3;

pub fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn batch_loss(p: &ModelParams, batch: &[Vec<f64>], cfg: &TrainConfig) -> f64 {
    let m = Model::new(p.clone()).unwrap();
    let total: f64 = batch
        .iter()
        .map(|x| {
            let tr = m.trace(x).unwrap();
            loss_parts(x, &tr.x_hat, &tr.latent, cfg).total
        })
        .sum();
    total / batch.len() as f64
}

/// Smallest `||Q_i| - T_i|` over the batch.
pub fn margin(p: &ModelParams, batch: &[Vec<f64>]) -> f64 {
    let m = Model::new(p.clone()).unwrap();
    let mut best = f64::INFINITY;
    for x in batch {
        for (q, t) in m.scaled(x).unwrap().iter().zip(&p.t) {
            best = best.min((q.abs() - t).abs());
        }
    }
    best
}

/// Random parameters, a random batch and thresholds placed in gaps of the
/// observed `|Q_i|` values, so no coefficient sits near a kink.
pub fn kink_free_point(seed: u64, h: usize, n: usize, batch_len: usize, activation: Activation) -> (ModelParams, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ModelConfig { h, n, activation, jpeg_init: false, ..ModelConfig::default() };
    let mut p = init_params(seed, &cfg).unwrap();
    for w in p.w1.iter_mut().chain(p.w2.iter_mut()) {
        *w *= 3.0;
    }
    p.b1.iter_mut().for_each(|b| *b = rng.gen_range(-0.3..0.3));
    p.b2.iter_mut().for_each(|b| *b = rng.gen_range(-0.3..0.3));
    p.v.iter_mut().for_each(|v| *v = rng.gen_range(0.3..1.5));
    let batch: Vec<Vec<f64>> = (0..batch_len).map(|_| (0..h).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let m = Model::new(p.clone()).unwrap();
    let qs: Vec<Vec<f64>> = batch.iter().map(|x| m.scaled(x).unwrap()).collect();
    for i in 0..n {
        let mut mags: Vec<f64> = qs.iter().map(|q| q[i].abs()).collect();
        mags.push(0.0);
        mags.sort_by(f64::total_cmp);
        let gaps: Vec<(f64, f64)> = mags.windows(2).filter(|w| w[1] - w[0] > 4.0 * MARGIN).map(|w| (w[0], w[1])).collect();
        p.t[i] = if gaps.is_empty() {
            mags.last().unwrap() + 1.0
        } else {
            let (lo, hi) = gaps[rng.gen_range(0..gaps.len())];
            0.5 * (lo + hi)
        };
    }
    (p, batch)
}

fn tensor_mut(p: &mut ModelParams, k: usize) -> &mut Vec<f64> {
    match k {
        0 => &mut p.w1,
        1 => &mut p.b1,
        2 => &mut p.v,
        3 => &mut p.t,
        4 => &mut p.w2,
        _ => &mut p.b2,
    }
}

fn grad_tensor(g: &Gradients, k: usize) -> &Vec<f64> {
    match k {
        0 => &g.w1,
        1 => &g.b1,
        2 => &g.v,
        3 => &g.t,
        4 => &g.w2,
        _ => &g.b2,
    }
}

pub const SMOOTH: [(usize, &str); 5] = [(0, "W1"), (1, "b1"), (2, "V"), (4, "W2"), (5, "b2")];

/// Relative error `|a - f| / max(|a|, |f|)` between analytical and central
/// difference gradients, per smooth tensor. `sample` limits the number of
/// checked entries per tensor.
pub fn fd_rel_errors(p: &ModelParams, batch: &[Vec<f64>], cfg: &TrainConfig, sample: Option<(usize, u64)>) -> Vec<(&'static str, f64)> {
    let (_, g) = backward(&Model::new(p.clone()).unwrap(), batch, cfg).unwrap();
    let mut out = Vec::new();
    for (k, name) in SMOOTH {
        let len = grad_tensor(&g, k).len();
        let idx: Vec<usize> = match sample {
            Some((count, seed)) if count < len => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
                (0..count).map(|_| rng.gen_range(0..len)).collect()
            }
            _ => (0..len).collect(),
        };
        let mut diff = 0.0;
        let mut na = 0.0;
        let mut nf = 0.0;
        for &i in &idx {
            let mut plus = p.clone();
            tensor_mut(&mut plus, k)[i] += FD_STEP;
            let mut minus = p.clone();
            tensor_mut(&mut minus, k)[i] -= FD_STEP;
            let fd = (batch_loss(&plus, batch, cfg) - batch_loss(&minus, batch, cfg)) / (2.0 * FD_STEP);
            let a = grad_tensor(&g, k)[i];
            diff += (a - fd) * (a - fd);
            na += a * a;
            nf += fd * fd;
        }
        let denom = na.sqrt().max(nf.sqrt());
        out.push((name, if denom < 1e-12 { diff.sqrt() } else { diff.sqrt() / denom }));
    }
    out
}
