//! Brute-force optimizers used to cross-check the closed formulas.
//!
//! Nothing here uses the level-function or Amemiya code: each oracle
//! optimizes the defining supremum or infimum directly over small finite
//! vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::orlicz::OrliczFunction;
use crate::scalar;

/// Least-squares projection onto nonincreasing vectors, then onto `>= 0`.
pub fn project_decreasing(y: &[f64]) -> Vec<f64> {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / (n0 as f64) < s1 / (n1 as f64) {
                blocks.pop();
                let last = blocks.last_mut().expect("nonempty");
                last.0 += s1;
                last.1 += n1;
            } else {
                break;
            }
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, n)| std::iter::repeat_n((s / n as f64).max(0.0), n))
        .collect()
}

/// `inf { eps : sum psi(g_i / eps) w_i <= 1 }`.
pub fn seq_gauge(psi: &OrliczFunction, w: &[f64], g: &[f64]) -> f64 {
    let top = g.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let modular = |eps: f64| g.iter().zip(w).map(|(x, wi)| psi.value(x / eps) * wi).sum::<f64>();
    let mut hi = top;
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while modular(lo) <= 1.0 {
        hi = lo;
        lo /= 2.0;
        if lo < f64::MIN_POSITIVE {
            return hi;
        }
    }
    scalar::bisect(lo, hi, 0.0, |eps| modular(eps) <= 1.0).1
}

/// Result of a ratio ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub value: f64,
    pub g: Vec<f64>,
}

/// Maximizes `<c, g> / N(g)` over nonincreasing `g >= 0`, where `N` is the
/// Luxemburg gauge of `psi` against the weights `w`.
///
/// Projected gradient ascent with step halving from several starts; `g` is
/// renormalized to `N(g) = 1` after every accepted step, where the gradient
/// of the gauge is `psi'(g_i) w_i / sum_j psi'(g_j) g_j w_j`.
pub fn ratio_ascent(c: &[f64], psi: &OrliczFunction, w: &[f64], starts: usize, seed: u64) -> Ascent {
    let n = c.len();
    if n == 0 || c.iter().all(|v| *v == 0.0) {
        return Ascent {
            value: 0.0,
            g: vec![0.0; n],
        };
    }
    let dot = |g: &[f64]| g.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    let ratio = |g: &[f64]| {
        let nn = seq_gauge(psi, w, g);
        if nn > 0.0 {
            dot(g) / nn
        } else {
            f64::NEG_INFINITY
        }
    };
    let normalize = |g: Vec<f64>| {
        let nn = seq_gauge(psi, w, &g);
        g.into_iter().map(|x| x / nn).collect::<Vec<f64>>()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Ascent {
        value: f64::NEG_INFINITY,
        g: vec![0.0; n],
    };
    for s in 0..starts.max(1) {
        let g0: Vec<f64> = match s {
            0 => project_decreasing(c),
            1 => vec![1.0; n],
            2 => (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            _ => {
                let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }
        };
        if g0.iter().all(|v| *v <= 0.0) {
            continue;
        }
        let mut g = normalize(g0);
        let mut r = ratio(&g);
        let mut step = 0.1;
        let mut iters = 0;
        while iters < 20_000 && step > 1e-15 {
            iters += 1;
            let dn: Vec<f64> = g.iter().zip(w).map(|(x, wi)| psi.derivative(*x) * wi).collect();
            let denom: f64 = dn.iter().zip(&g).map(|(d, x)| d * x).sum();
            let cg = dot(&g);
            let grad: Vec<f64> = c.iter().zip(&dn).map(|(ci, d)| ci - cg * d / denom).collect();
            let gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(gnorm > 0.0) {
                break;
            }
            let gscale = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let cand: Vec<f64> = g
                .iter()
                .zip(&grad)
                .map(|(x, d)| x + step * gscale * d / gnorm)
                .collect();
            let cand = project_decreasing(&cand);
            let rc = ratio(&cand);
            if rc > r {
                let improved = rc - r;
                g = normalize(cand);
                r = rc;
                step *= 1.5;
                if improved <= 1e-16 * r.abs() {
                    break;
                }
            } else {
                step *= 0.5;
            }
        }
        if r > best.value {
            best = Ascent { value: r, g };
        }
    }
    best
}

/// Result of the direct minimization behind the dual modular.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub value: f64,
    pub v: Vec<f64>,
    pub sweeps: usize,
}

/// `sum phi(h_i / v_i) v_i`.
pub fn perspective_sum(phi: &OrliczFunction, h: &[f64], v: &[f64]) -> f64 {
    h.iter()
        .zip(v)
        .map(|(&hi, &vi)| {
            if hi == 0.0 {
                0.0
            } else if vi <= 0.0 {
                f64::INFINITY
            } else {
                phi.value(hi / vi) * vi
            }
        })
        .sum()
}

/// Minimizes `sum phi(h_i / v_i) v_i` over `v >= 0` with every prefix sum
/// of `v` at most the matching prefix sum of `w`.
///
/// Coordinate descent on the prefix sums `S_k`. Moving `S_k` trades mass
/// between `v_k` and `v_{k+1}`; the two perspective terms balance when
/// `h_k / v_k = h_{k+1} / v_{k+1}` (their derivatives in `v` are
/// `-phi*(p(h/v))`, strictly monotone in `h/v`), and the box `S_k <= W_k`
/// clips that point. The last prefix sum always sits at `W_n` since each
/// term decreases in `v`. Starts from `v = w` and random feasible points.
pub fn p_modular_oracle(phi: &OrliczFunction, h: &[f64], w: &[f64], starts: usize, seed: u64) -> Descent {
    let n = h.len();
    assert_eq!(n, w.len(), "one weight per entry");
    if h.iter().all(|x| *x == 0.0) {
        return Descent {
            value: 0.0,
            v: w.to_vec(),
            sweeps: 0,
        };
    }
    let cap: Vec<f64> = w
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Descent {
        value: f64::INFINITY,
        v: vec![],
        sweeps: 0,
    };
    for s in 0..starts.max(1) {
        let v0: Vec<f64> = if s == 0 {
            w.to_vec()
        } else {
            w.iter().map(|wi| wi * rng.gen_range(0.2..1.0)).collect()
        };
        let mut sums: Vec<f64> = v0
            .iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        sums[n - 1] = cap[n - 1];
        let mut sweeps = 0;
        for _ in 0..200_000 {
            sweeps += 1;
            let mut moved = 0.0f64;
            for k in 0..n.saturating_sub(1) {
                let prev = if k == 0 { 0.0 } else { sums[k - 1] };
                let next = sums[k + 1];
                let (hk, hk1) = (h[k], h[k + 1]);
                let target = if hk1 == 0.0 {
                    next
                } else {
                    prev + (next - prev) * hk / (hk + hk1)
                };
                let new = target.min(cap[k]).max(prev);
                moved = moved.max((new - sums[k]).abs() / cap[k]);
                sums[k] = new;
            }
            if moved <= 1e-16 {
                break;
            }
        }
        let v: Vec<f64> = (0..n)
            .map(|k| sums[k] - if k == 0 { 0.0 } else { sums[k - 1] })
            .collect();
        let value = perspective_sum(phi, h, &v);
        if value < best.value {
            best = Descent { value, v, sweeps };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn projection_is_isotonic_regression() {
        assert_eq!(project_decreasing(&[1.0, 3.0]), vec![2.0, 2.0]);
        assert_eq!(project_decreasing(&[3.0, 1.0, -4.0]), vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn gauge_of_unit_vector() {
        let psi = OrliczFunction::power(2.0, 0.5).unwrap();
        let n = seq_gauge(&psi, &[1.0], &[1.0]);
        assert!((n - 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn ascent_on_unit_vector() {
        // sup { g : g^2/2 <= 1 } = sqrt 2
        let psi = OrliczFunction::power(2.0, 0.5).unwrap();
        let a = ratio_ascent(&[1.0, 0.0, 0.0], &psi, &[1.0, 1.0, 1.0], 8, 7);
        assert!((a.value - SQRT_2).abs() < 1e-9, "{}", a.value);
        assert!(a.g[1].abs() < 1e-6);
        assert_eq!(ratio_ascent(&[0.0, 0.0], &psi, &[1.0, 1.0], 8, 7).value, 0.0);
    }

    #[test]
    fn descent_examples() {
        let phi = OrliczFunction::power(2.0, 0.5).unwrap();
        let d = p_modular_oracle(&phi, &[1.0, 1.0], &[2.0, 1.0], 8, 3);
        assert!((d.value - 2.0 / 3.0).abs() < 1e-12, "{}", d.value);
        assert_eq!(p_modular_oracle(&phi, &[0.0, 0.0], &[1.0, 1.0], 8, 3).value, 0.0);
        // h/w already decreasing: v = w is optimal
        let h = [3.0, 1.0, 0.5];
        let w = [1.0, 1.0, 1.0];
        let d = p_modular_oracle(&phi, &h, &w, 8, 3);
        let direct = perspective_sum(&phi, &h, &w);
        assert!((d.value - direct).abs() < 1e-12 * direct);
    }
}
