use aedcst::model::*;
use aedcst::transform::{dcst, idcst};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: usize = 12;
const N: usize = 8;

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_params(seed: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = init_params(seed, &ModelConfig { h: H, n: N, ..ModelConfig::default() }).unwrap();
    p.b1.iter_mut().for_each(|b| *b = rng.gen_range(-0.2..0.2));
    p.b2.iter_mut().for_each(|b| *b = rng.gen_range(-0.2..0.2));
    p.v.iter_mut().for_each(|v| *v = rng.gen_range(0.5..3.0));
    p.t.iter_mut().for_each(|t| *t = rng.gen_range(0.0..0.3));
    p
}

fn random_block(rng: &mut ChaCha8Rng, h: usize) -> Vec<f64> {
    (0..h).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dense(w: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    (0..rows).map(|r| (0..cols).map(|c| w[r * cols + c] * x[c]).sum()).collect()
}

// Gauss-Jordan inverse of a small square matrix.
fn invert(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut inv: Vec<f64> = (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs())).unwrap();
        for k in 0..n {
            m.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                for k in 0..n {
                    m[r * n + k] -= f * m[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    inv
}

#[test]
fn zigzag_init() {
    let p = init_params(1, &ModelConfig::default()).unwrap();
    assert_eq!((p.v[0], p.v[1], p.v[2]), (16.0, 11.0, 12.0));
    assert_eq!(p, init_params(1, &ModelConfig::default()).unwrap());
    assert_ne!(p.w1, init_params(2, &ModelConfig::default()).unwrap().w1);
    let small = init_params(1, &ModelConfig { n: 32, ..ModelConfig::default() }).unwrap();
    assert!(small.v.iter().all(|&v| v == 1.0));
    assert!(p.b1.iter().chain(&p.b2).all(|&b| b == 0.0));
}

#[test]
fn scale_and_threshold_examples() {
    assert_eq!(scale(&[2.0, 4.0], &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    assert_eq!(scale(&[16.0 * 3.0, 11.0 * 2.0], &[16.0, 11.0]).unwrap(), vec![3.0, 2.0]);
    assert!(scale(&[1.0], &[0.0]).is_err());
    let l = hard_threshold(&[0.3, 0.8, -0.8], &[0.5; 3]).unwrap();
    assert_eq!(l.values, vec![0.0, 0.8, -0.8]);
    assert_eq!(l.nonzero_count, 2);
    assert!(hard_threshold(&[1.0], &[-0.1]).is_err());
}

#[test]
fn zero_weights_give_zero_features() {
    let mut p = random_params(4);
    p.w1.iter_mut().for_each(|w| *w = 0.0);
    p.b1.iter_mut().for_each(|b| *b = 0.0);
    assert!(encode_features(&[0.7; H], &p).unwrap().iter().all(|&c| c == 0.0));
}

#[test]
fn identity_features() {
    let mut p = random_params(5);
    p.activation = Activation::Identity;
    p.w1 = (0..N * H).map(|i| if i / H == i % H { 1.0 } else { 0.0 }).collect();
    p.b1 = vec![0.0; N];
    let mut x = vec![0.0; H];
    x[0] = 1.0;
    let c = encode_features(&x, &p).unwrap();
    assert_eq!(c[0], 1.0);
    assert!(c[1..].iter().all(|&v| v == 0.0));
}

#[test]
fn decoder_pseudo_identity() {
    let mut p = random_params(6);
    p.t = vec![0.0; N];
    p.v = vec![1.0; N];
    p.w2 = (0..H * N).map(|i| if i / N == i % N { 1.0 } else { 0.0 }).collect();
    p.b2 = vec![0.0; H];
    let c: Vec<f64> = (0..N).map(|i| 0.1 * i as f64 - 0.3).collect();
    let out = decoder_forward(&LatentVector::new(dcst(&c).unwrap()), &p).unwrap();
    assert!(max_err(&out[..N], &c) < 1e-12);
    assert!(out[N..].iter().all(|v| v.abs() < 1e-12));
    assert!(decoder_forward(&LatentVector::new(vec![0.0; N]), &p).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn threshold_extremes() {
    let mut p = random_params(7);
    let x = random_block(&mut ChaCha8Rng::seed_from_u64(1), H);
    p.t = vec![1e9; N];
    assert_eq!(encoder_forward(&x, &p).unwrap().nonzero_count, 0);
    p.t = vec![0.0; N];
    p.v = vec![1.0; N];
    let want = dcst(&encode_features(&x, &p).unwrap()).unwrap();
    assert!(max_err(&encoder_forward(&x, &p).unwrap().values, &want) < 1e-12);
}

#[test]
fn rejects_bad_params() {
    let mut p = random_params(8);
    p.v[3] = 0.0;
    assert!(Model::new(p.clone()).is_err());
    p.v[3] = 1.0;
    p.t[0] = -1.0;
    assert!(Model::new(p.clone()).is_err());
    p.t[0] = 0.0;
    p.w2.pop();
    assert!(Model::new(p).is_err());
    assert!(encoder_forward(&[0.0; H + 1], &random_params(8)).is_err());
}

proptest! {
    #[test]
    fn feature_oracle(seed in any::<u64>()) {
        let p = random_params(seed);
        let x = random_block(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), H);
        let want: Vec<f64> = dense(&p.w1, N, H, &x).iter().zip(&p.b1).map(|(a, b)| (a + b).tanh()).collect();
        let got = encode_features(&x, &p).unwrap();
        prop_assert!(max_err(&got, &want) < 1e-12);
        prop_assert!(got.iter().all(|c| c.abs() < 1.0));
    }

    #[test]
    fn composition_oracle(seed in any::<u64>()) {
        let p = random_params(seed);
        let x = random_block(&mut ChaCha8Rng::seed_from_u64(seed ^ 2), H);
        let q = scale(&dcst(&encode_features(&x, &p).unwrap()).unwrap(), &p.v).unwrap();
        let want = hard_threshold(&q, &p.t).unwrap();
        let got = encoder_forward(&x, &p).unwrap();
        prop_assert!(max_err(&got.values, &want.values) < 1e-12);
        let y = idcst(&got.values).unwrap();
        let rec: Vec<f64> = dense(&p.w2, H, N, &y).iter().zip(&p.b2).map(|(a, b)| a + b).collect();
        prop_assert!(max_err(&decoder_forward(&got, &p).unwrap(), &rec) < 1e-12);
    }

    #[test]
    fn threshold_idempotent_and_exact(q in prop::collection::vec(-2.0f64..2.0, N), t in prop::collection::vec(0.0f64..1.5, N)) {
        let once = hard_threshold(&q, &t).unwrap();
        let twice = hard_threshold(&once.values, &t).unwrap();
        prop_assert_eq!(&once, &twice);
        for (i, v) in once.values.iter().enumerate() {
            if *v != 0.0 {
                prop_assert_eq!(*v, q[i]);
                prop_assert!(v.abs() > t[i]);
            }
        }
        prop_assert_eq!(once.nonzero_count, once.values.iter().filter(|v| **v != 0.0).count());
    }

    #[test]
    fn larger_thresholds_more_zeros(q in prop::collection::vec(-2.0f64..2.0, N), t in prop::collection::vec(0.0f64..1.0, N), bump in prop::collection::vec(0.0f64..1.0, N)) {
        let t2: Vec<f64> = t.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let z1 = N - hard_threshold(&q, &t).unwrap().nonzero_count;
        let z2 = N - hard_threshold(&q, &t2).unwrap().nonzero_count;
        prop_assert!(z2 >= z1);
    }

    #[test]
    fn doubled_v_halved_t_same_support(seed in any::<u64>()) {
        let p = random_params(seed);
        let x = random_block(&mut ChaCha8Rng::seed_from_u64(seed ^ 3), H);
        let mut p2 = p.clone();
        p2.v.iter_mut().for_each(|v| *v *= 2.0);
        p2.t.iter_mut().for_each(|t| *t *= 0.5);
        let a = encoder_forward(&x, &p).unwrap();
        let b = encoder_forward(&x, &p2).unwrap();
        let sa: Vec<bool> = a.values.iter().map(|v| *v != 0.0).collect();
        let sb: Vec<bool> = b.values.iter().map(|v| *v != 0.0).collect();
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn lossless_path_is_a_projection(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = random_params(seed);
        p.activation = Activation::Identity;
        p.t = vec![0.0; N];
        p.v = vec![1.0; N];
        p.b1 = vec![0.0; N];
        p.b2 = vec![0.0; H];
        // W2 = W1^T (W1 W1^T)^-1
        let w1 = &p.w1;
        let gram: Vec<f64> = (0..N * N)
            .map(|i| (0..H).map(|k| w1[(i / N) * H + k] * w1[(i % N) * H + k]).sum())
            .collect();
        let gi = invert(&gram, N);
        p.w2 = (0..H * N)
            .map(|i| {
                let (r, c) = (i / N, i % N);
                (0..N).map(|k| w1[k * H + r] * gi[k * N + c]).sum()
            })
            .collect();
        let m = Model::new(p).unwrap();
        let x = random_block(&mut rng, H);
        let once = m.reconstruct(&x).unwrap();
        let twice = m.reconstruct(&once).unwrap();
        prop_assert!(max_err(&once, &twice) < 1e-6);
    }
}
