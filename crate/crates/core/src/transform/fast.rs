use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::check_pow2;
use crate::error::{check_finite, check_len, Result};

/// Running tally of real multiplications and additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
}

pub(crate) trait Tally {
    fn mul(&mut self, k: u64);
    fn add(&mut self, k: u64);
}

impl Tally for () {
    #[inline(always)]
    fn mul(&mut self, _: u64) {}
    #[inline(always)]
    fn add(&mut self, _: u64) {}
}

impl Tally for OpCount {
    fn mul(&mut self, k: u64) {
        self.mults += k;
    }
    fn add(&mut self, k: u64) {
        self.adds += k;
    }
}

fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

#[derive(Debug, Clone)]
enum Level {
    // mirror-pair rotations, one (cos, sin) per block of width 2g
    Rotate { g: usize, angles: Vec<(f64, f64)> },
    // final pi/4 stage on the middle quarter
    Quarter,
}

#[derive(Debug, Clone)]
struct OddNet {
    m: usize,
    // s[i] = X[2 * perm[i] + 1]
    perm: Vec<usize>,
    // first rotation stage, already multiplied by the plan gain
    r0: Vec<(f64, f64)>,
    levels: Vec<Level>,
}

#[derive(Debug, Clone)]
enum Node {
    One,
    Two { c: f64 },
    Split { half: Box<Node>, odd: OddNet },
}

/// Precomputed butterfly network for an `N`-point orthonormal DCT-II and its
/// inverse.
///
/// The structure is Chen's factorization: the even half recurses on a half
/// size transform and the odd half is a cascade of plane rotations and
/// butterflies. The orthonormal gain is folded into the first rotation each
/// coefficient meets, which gives `N log2 N - 3N/2 + 4` multiplications
/// for `N >= 4`.
#[derive(Debug, Clone)]
pub struct DctPlan {
    n: usize,
    root: Node,
}

impl DctPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_pow2(n)?;
        let gain = if n == 1 { 1.0 } else { (2.0 / n as f64).sqrt() };
        Ok(Self { n, root: build(n, gain) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.n)?;
        check_finite(x)?;
        let mut out = x.to_vec();
        self.forward_in_place(&mut out);
        Ok(out)
    }

    pub fn inverse(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(c, self.n)?;
        check_finite(c)?;
        let mut out = c.to_vec();
        self.inverse_in_place(&mut out);
        Ok(out)
    }

    /// Forward transform that also reports the operations it performed.
    pub fn forward_counted(&self, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
        check_len(x, self.n)?;
        let mut out = x.to_vec();
        let mut count = OpCount::default();
        forward_node(&self.root, &mut out, &mut count);
        Ok((out, count))
    }

    pub fn inverse_counted(&self, c: &[f64]) -> Result<(Vec<f64>, OpCount)> {
        check_len(c, self.n)?;
        let mut out = c.to_vec();
        let mut count = OpCount::default();
        inverse_node(&self.root, &mut out, &mut count);
        Ok((out, count))
    }

    pub(crate) fn forward_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        forward_node(&self.root, x, &mut ());
    }

    pub(crate) fn inverse_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        inverse_node(&self.root, x, &mut ());
    }

    pub(crate) fn forward_tally<T: Tally>(&self, x: &mut [f64], t: &mut T) {
        forward_node(&self.root, x, t);
    }

    pub(crate) fn inverse_tally<T: Tally>(&self, x: &mut [f64], t: &mut T) {
        inverse_node(&self.root, x, t);
    }
}

fn build(n: usize, gain: f64) -> Node {
    match n {
        1 => Node::One,
        2 => Node::Two { c: FRAC_1_SQRT_2 * gain },
        _ => {
            let m = n / 2;
            Node::Split { half: Box::new(build(m, gain)), odd: build_odd(m, gain) }
        }
    }
}

fn build_odd(m: usize, gain: f64) -> OddNet {
    let p = m.trailing_zeros();
    let perm = (0..m).map(|i| bit_reverse(i, p)).collect();
    let r0 = (0..m / 2)
        .map(|i| {
            let k = bit_reverse(i, p) as f64;
            let theta = (2.0 * k + 1.0) * PI / (4.0 * m as f64);
            // rotation by pi/2 - theta
            (theta.sin() * gain, theta.cos() * gain)
        })
        .collect();
    let mut levels = Vec::new();
    let mut g = 2;
    while g <= m / 2 {
        if g == m / 2 {
            levels.push(Level::Quarter);
        } else {
            let nb = m / (4 * g);
            let bits = nb.trailing_zeros();
            let beta = g as f64 * PI / (2.0 * m as f64);
            let angles = (0..nb)
                .map(|b| {
                    let a = (4 * bit_reverse(b, bits) + 1) as f64 * beta;
                    (a.cos(), a.sin())
                })
                .collect();
            levels.push(Level::Rotate { g, angles });
        }
        g *= 2;
    }
    OddNet { m, perm, r0, levels }
}

fn butterfly<T: Tally>(s: &mut [f64], g: usize, t: &mut T) {
    for (gi, grp) in s.chunks_mut(g).enumerate() {
        for i in 0..g / 2 {
            let j = g - 1 - i;
            let (a, b) = (grp[i], grp[j]);
            if gi % 2 == 0 {
                grp[i] = a + b;
                grp[j] = a - b;
            } else {
                grp[i] = b - a;
                grp[j] = a + b;
            }
        }
    }
    t.add(s.len() as u64);
}

// Both the rotation and quarter stages are symmetric 2x2 blocks, so the same
// routine serves the forward and inverse directions.
fn level_stage<T: Tally>(s: &mut [f64], level: &Level, t: &mut T) {
    let m = s.len();
    match level {
        Level::Quarter => {
            for i in m / 4..m / 2 {
                let j = m - 1 - i;
                let (a, b) = (s[i], s[j]);
                s[i] = FRAC_1_SQRT_2 * (b - a);
                s[j] = FRAC_1_SQRT_2 * (a + b);
                t.mul(2);
                t.add(2);
            }
        }
        Level::Rotate { g, angles } => {
            let g = *g;
            for (blk, &(ca, sa)) in angles.iter().enumerate() {
                let base = blk * 2 * g;
                for i in base + g / 2..base + g {
                    let j = m - 1 - i;
                    let (a, b) = (s[i], s[j]);
                    s[i] = sa * b - ca * a;
                    s[j] = sa * a + ca * b;
                }
                for i in base + g..base + 3 * g / 2 {
                    let j = m - 1 - i;
                    let (a, b) = (s[i], s[j]);
                    s[i] = -sa * a - ca * b;
                    s[j] = sa * b - ca * a;
                }
                t.mul(4 * g as u64);
                t.add(2 * g as u64);
            }
        }
    }
}

fn odd_inverse<T: Tally>(net: &OddNet, s: &mut [f64], t: &mut T) {
    let m = net.m;
    for (i, &(ca, sa)) in net.r0.iter().enumerate() {
        let j = m - 1 - i;
        let (a, b) = (s[i], s[j]);
        s[i] = ca * a - sa * b;
        s[j] = sa * a + ca * b;
        t.mul(4);
        t.add(2);
    }
    let mut g = 2;
    for level in &net.levels {
        butterfly(s, g, t);
        level_stage(s, level, t);
        g *= 2;
    }
}

fn odd_forward<T: Tally>(net: &OddNet, s: &mut [f64], t: &mut T) {
    let m = net.m;
    let mut g = m / 2;
    for level in net.levels.iter().rev() {
        level_stage(s, level, t);
        butterfly(s, g, t);
        g /= 2;
    }
    for (i, &(ca, sa)) in net.r0.iter().enumerate() {
        let j = m - 1 - i;
        let (a, b) = (s[i], s[j]);
        s[i] = ca * a + sa * b;
        s[j] = ca * b - sa * a;
        t.mul(4);
        t.add(2);
    }
}

fn inverse_node<T: Tally>(node: &Node, x: &mut [f64], t: &mut T) {
    match node {
        Node::One => {}
        Node::Two { c } => {
            let (a, b) = (x[0], x[1]);
            x[0] = c * (a + b);
            x[1] = c * (a - b);
            t.mul(2);
            t.add(2);
        }
        Node::Split { half, odd } => {
            let n = x.len();
            let m = n / 2;
            let mut even: Vec<f64> = (0..m).map(|j| x[2 * j]).collect();
            let mut s: Vec<f64> = odd.perm.iter().map(|&p| x[2 * p + 1]).collect();
            inverse_node(half, &mut even, t);
            odd_inverse(odd, &mut s, t);
            for j in 0..m {
                let o = s[m - 1 - j];
                x[j] = even[j] + o;
                x[n - 1 - j] = even[j] - o;
            }
            t.add(n as u64);
        }
    }
}

fn forward_node<T: Tally>(node: &Node, x: &mut [f64], t: &mut T) {
    match node {
        Node::One => {}
        Node::Two { c } => {
            let (a, b) = (x[0], x[1]);
            x[0] = c * (a + b);
            x[1] = c * (a - b);
            t.mul(2);
            t.add(2);
        }
        Node::Split { half, odd } => {
            let n = x.len();
            let m = n / 2;
            let mut even = vec![0.0; m];
            let mut s = vec![0.0; m];
            for j in 0..m {
                even[j] = x[j] + x[n - 1 - j];
                s[m - 1 - j] = x[j] - x[n - 1 - j];
            }
            t.add(n as u64);
            forward_node(half, &mut even, t);
            odd_forward(odd, &mut s, t);
            for j in 0..m {
                x[2 * j] = even[j];
            }
            for (i, &p) in odd.perm.iter().enumerate() {
                x[2 * p + 1] = s[i];
            }
        }
    }
}

/// Orthonormal DCT-II through a freshly built [`DctPlan`].
pub fn dct_fast(x: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(x.len())?.forward(x)
}

/// Orthonormal inverse DCT through a freshly built [`DctPlan`].
pub fn idct_fast(c: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(c.len())?.inverse(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{dct_naive, idct_naive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn matches_naive_all_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in 0..=10 {
            let n = 1 << p;
            let plan = DctPlan::new(n).unwrap();
            for _ in 0..5 {
                let x = random_vec(&mut rng, n);
                let f = plan.forward(&x).unwrap();
                let r = dct_naive(&x).unwrap();
                let err = f.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-12, "dct n={n} err={err}");
                let fi = plan.inverse(&x).unwrap();
                let ri = idct_naive(&x).unwrap();
                let err = fi.iter().zip(&ri).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-12, "idct n={n} err={err}");
            }
        }
    }

    #[test]
    fn chen_counts() {
        for (n, want) in [(4, 6), (8, 16), (16, 44), (32, 116), (64, 292), (1024, 8708)] {
            let plan = DctPlan::new(n).unwrap();
            let x = vec![0.5; n];
            let (_, fwd) = plan.forward_counted(&x).unwrap();
            let (_, inv) = plan.inverse_counted(&x).unwrap();
            assert_eq!(fwd.mults, want, "n={n}");
            assert_eq!(inv.mults, want, "n={n}");
            assert_eq!(fwd.mults as f64, crate::transform::dct_mult_formula(n));
            let adds = 1.5 * n as f64 * (n as f64).log2() - 1.5 * n as f64 + 2.0;
            assert_eq!(fwd.adds as f64, adds, "n={n}");
            assert_eq!(inv.adds, fwd.adds);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(DctPlan::new(0).is_err());
        assert!(DctPlan::new(6).is_err());
        assert!(dct_fast(&[1.0, 2.0, 3.0]).is_err());
        let plan = DctPlan::new(4).unwrap();
        assert!(plan.forward(&[1.0; 8]).is_err());
    }
}
