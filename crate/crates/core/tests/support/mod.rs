//! Test-only reference implementations, kept independent of the library's
//! optimizer code paths.

#![allow(dead_code)]

/// SplitMix64, used only by the reference optimizers below.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Straight-line global-best PSO on the sphere function: init, then
/// evaluate / pick gbest / move, with per-dimension draws and velocity
/// clamping. Returns the final gbest fitness.
#[allow(clippy::too_many_arguments)]
pub fn reference_pso_sphere(
    seed: u64,
    dim: usize,
    particles: usize,
    c1: f64,
    c2: f64,
    vmax: f64,
    iterations: usize,
    bound: f64,
) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut x = vec![vec![0.0; dim]; particles];
    let mut v = vec![vec![0.0; dim]; particles];
    for p in 0..particles {
        for i in 0..dim {
            x[p][i] = -bound + 2.0 * bound * rng.uniform();
            v[p][i] = -vmax + 2.0 * vmax * rng.uniform();
        }
    }
    let f = |pt: &Vec<f64>| pt.iter().map(|a| a * a).sum::<f64>();
    let mut pbest = x.clone();
    let mut pbest_f: Vec<f64> = x.iter().map(f).collect();
    let mut gbest = pbest[0].clone();
    let mut gbest_f = f64::INFINITY;
    for _ in 0..iterations {
        for p in 0..particles {
            let fit = f(&x[p]);
            if fit < pbest_f[p] {
                pbest_f[p] = fit;
                pbest[p] = x[p].clone();
            }
        }
        for p in 0..particles {
            if pbest_f[p] < gbest_f {
                gbest_f = pbest_f[p];
                gbest = pbest[p].clone();
            }
        }
        for p in 0..particles {
            for i in 0..dim {
                let r1 = rng.uniform();
                let r2 = rng.uniform();
                let mut nv =
                    v[p][i] + c1 * r1 * (pbest[p][i] - x[p][i]) + c2 * r2 * (gbest[i] - x[p][i]);
                if nv > vmax {
                    nv = vmax;
                }
                if nv < -vmax {
                    nv = -vmax;
                }
                v[p][i] = nv;
                x[p][i] += nv;
            }
        }
    }
    gbest_f
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
