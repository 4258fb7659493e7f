//! Tanh-sinh quadrature on `(0, 1)` with level doubling.
//!
//! Nodes carry both `x` and `1 - x` so integrands can resolve endpoint
//! singularities without cancellation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge after {levels} levels (last difference {diff:e})")]
    NoConvergence { levels: u32, diff: f64 },
    #[error("integrand produced a non-finite value")]
    NonFinite,
}

/// A quadrature node: abscissa, its complement, its log, and weight
/// (including the step size).
#[derive(Clone, Debug)]
pub struct Node {
    pub x: Float,
    pub xc: Float,
    pub ln_x: Float,
    pub ln_xc: Float,
    pub w: Float,
}

/// New nodes at one level, ordered outward from the centre, as
/// `(positive side, negative side)` pairs. Level 0 also holds `t = 0`.
struct Level {
    centre: Option<Node>,
    sides: Vec<(Node, Node)>,
}

fn node_at(t: &Float, h: &Float, bits: u32) -> (Node, Node) {
    let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
    let s = Float::with_val(bits, &half_pi * Float::with_val(bits, t.sinh_ref()));
    let e = Float::with_val(bits, -2 * s.clone()).exp();
    let one_e = Float::with_val(bits, 1 + &e);
    // x = 1/(1+e^{-2s}), 1-x = e^{-2s}/(1+e^{-2s})
    let x_big = Float::with_val(bits, one_e.recip_ref());
    let x_small = Float::with_val(bits, &e / &one_e);
    // dx/dt = pi cosh t * e^{-2s} / (1+e^{-2s})^2
    let cosh_t = Float::with_val(bits, t.cosh_ref());
    let w = Float::with_val(bits, &half_pi * cosh_t) * &e / Float::with_val(bits, one_e.square_ref()) * h * 2u32;
    let ln_big = Float::with_val(bits, -one_e.clone().ln());
    let ln_small = Float::with_val(bits, -2 * s) + &ln_big;
    let pos = Node { x: x_big.clone(), xc: x_small.clone(), ln_x: ln_big.clone(), ln_xc: ln_small.clone(), w: w.clone() };
    let neg = Node { x: x_small, xc: x_big, ln_x: ln_small, ln_xc: ln_big, w };
    (pos, neg)
}

fn build_level(bits: u32, level: u32) -> Level {
    let h = Float::with_val(bits, 1) >> level as i32;
    // stop once 1 - x drops below 2^{-4 bits}
    let s_max = f64::from(bits) * 2.0 * std::f64::consts::LN_2;
    let t_max = (2.0 * s_max / std::f64::consts::PI).asinh();
    let step = 0.5f64.powi(level as i32);
    let mut sides = Vec::new();
    let (start, stride) = if level == 0 { (1u64, 1u64) } else { (1u64, 2u64) };
    let mut k = start;
    while (k as f64) * step <= t_max {
        let t = Float::with_val(bits, k) * &h;
        sides.push(node_at(&t, &h, bits));
        k += stride;
    }
    let centre = (level == 0).then(|| node_at(&Float::with_val(bits, 0), &h, bits).0);
    Level { centre, sides }
}

fn level_cache(bits: u32, level: u32) -> Arc<Level> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Level>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = cache.lock().expect("node cache poisoned").get(&(bits, level)) {
        return l.clone();
    }
    let built = Arc::new(build_level(bits, level));
    cache.lock().expect("node cache poisoned").entry((bits, level)).or_insert(built).clone()
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Float,
    pub err: Float,
    pub levels: u32,
    pub evaluations: usize,
}

/// Settings for [`integrate01`].
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub bits: u32,
    /// Relative tolerance exponent: stop when levels agree to `2^-rel_bits`.
    pub rel_bits: u32,
    pub max_level: u32,
    /// Evaluate nodes in parallel chunks.
    pub parallel: bool,
}

impl QuadConfig {
    pub fn new(bits: u32, rel_bits: u32) -> Self {
        QuadConfig { bits, rel_bits, max_level: 12, parallel: false }
    }

    pub fn parallel(mut self) -> Self {
        self.parallel = true;
        self
    }
}

/// Vector-valued result of [`integrate01_vec`].
#[derive(Clone, Debug)]
pub struct QuadVecResult {
    pub values: Vec<Float>,
    pub errs: Vec<Float>,
    pub levels: u32,
    pub evaluations: usize,
}

const CHUNK: usize = 8;

/// Weighted values of one side of a level, walking outward until every
/// component is negligible for three consecutive nodes.
fn side_sum<F>(
    f: &F,
    nodes: &[&Node],
    scale: &[Float],
    cfg: &QuadConfig,
    count: &mut usize,
) -> Result<Vec<Float>, QuadError>
where
    F: Fn(&Node) -> Vec<Float> + Sync,
{
    let dim = scale.len();
    let mut s = vec![Float::with_val(cfg.bits, 0); dim];
    let mut quiet = 0;
    let weighted = |node: &Node| -> Result<Vec<Float>, QuadError> {
        let v = f(node);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(QuadError::NonFinite);
        }
        Ok(v.into_iter().map(|x| x * &node.w).collect())
    };
    let chunk = if cfg.parallel { CHUNK } else { 1 };
    for block in nodes.chunks(chunk) {
        let terms: Vec<Result<Vec<Float>, QuadError>> = if cfg.parallel {
            block.par_iter().map(|n| weighted(n)).collect()
        } else {
            block.iter().map(|n| weighted(n)).collect()
        };
        for t in terms {
            let t = t?;
            *count += 1;
            let small = t.iter().zip(scale).all(|(x, sc)| Float::with_val(cfg.bits, x.abs_ref()) <= *sc);
            for (acc, x) in s.iter_mut().zip(t) {
                *acc += x;
            }
            if small {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(s);
                }
            } else {
                quiet = 0;
            }
        }
    }
    Ok(s)
}

/// `int_0^1 f` for a vector of integrands sharing the nodes, doubling the
/// level until every component agrees with the previous level.
pub fn integrate01_vec<F>(f: F, dim: usize, cfg: QuadConfig) -> Result<QuadVecResult, QuadError>
where
    F: Fn(&Node) -> Vec<Float> + Sync,
{
    let bits = cfg.bits;
    let mut count = 0usize;
    let mut raw = vec![Float::with_val(bits, 0); dim];
    let mut prev: Option<Vec<Float>> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..=cfg.max_level {
        let lvl = level_cache(bits, level);
        // terms below this size are dropped from the tails
        let scale: Vec<Float> = raw
            .iter()
            .map(|r| Float::with_val(bits, r.abs_ref()) >> (cfg.rel_bits as i32 + 8))
            .collect();
        let mut add = vec![Float::with_val(bits, 0); dim];
        if let Some(c) = &lvl.centre {
            count += 1;
            for (a, x) in add.iter_mut().zip(f(c)) {
                *a += x * &c.w;
            }
        }
        let pos: Vec<&Node> = lvl.sides.iter().map(|p| &p.0).collect();
        let neg: Vec<&Node> = lvl.sides.iter().map(|p| &p.1).collect();
        for side in [pos, neg] {
            for (a, x) in add.iter_mut().zip(side_sum(&f, &side, &scale, &cfg, &mut count)?) {
                *a += x;
            }
        }
        raw = if level == 0 {
            add
        } else {
            raw.into_iter().zip(add).map(|(r, a)| r / 2u32 + a).collect()
        };
        if let Some(p) = &prev {
            let diffs: Vec<Float> =
                raw.iter().zip(p).map(|(r, q)| Float::with_val(bits, r - q).abs()).collect();
            let done = diffs.iter().zip(&raw).all(|(d, r)| {
                let tol = Float::with_val(bits, r.abs_ref()) >> cfg.rel_bits as i32;
                *d <= tol || r.is_zero()
            });
            last_diff = diffs.iter().map(Float::to_f64).fold(0.0, f64::max);
            if level >= 3 && done {
                let errs = diffs
                    .into_iter()
                    .zip(&raw)
                    .map(|(d, r)| d + (Float::with_val(bits, r.abs_ref()) >> (bits as i32 - 8)))
                    .collect();
                return Ok(QuadVecResult { values: raw, errs, levels: level, evaluations: count });
            }
        }
        prev = Some(raw.clone());
    }
    Err(QuadError::NoConvergence { levels: cfg.max_level, diff: last_diff })
}

/// `int_0^1 f`, doubling the level until two estimates agree.
pub fn integrate01<F>(f: F, cfg: QuadConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(&Node) -> Float + Sync,
{
    let r = integrate01_vec(|n| vec![f(n)], 1, cfg)?;
    let QuadVecResult { mut values, mut errs, levels, evaluations } = r;
    Ok(QuadResult { value: values.remove(0), err: errs.remove(0), levels, evaluations })
}

/// `int_{(0,1)^2} f(x, y)` by nesting one-dimensional rules.
pub fn integrate01_2d<F>(f: F, cfg: QuadConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(&Node, &Node) -> Float + Sync,
{
    let inner_cfg = QuadConfig { rel_bits: cfg.rel_bits + 8, parallel: false, ..cfg };
    let worst = Mutex::new(Float::with_val(cfg.bits, 0));
    let fail = Mutex::new(None);
    let outer = integrate01(
        |x| match integrate01(|y| f(x, y), inner_cfg) {
            Ok(r) => {
                let mut w = worst.lock().expect("poisoned");
                if r.err > *w {
                    *w = r.err.clone();
                }
                r.value
            }
            Err(e) => {
                *fail.lock().expect("poisoned") = Some(e);
                Float::with_val(cfg.bits, 0)
            }
        },
        cfg,
    )?;
    if let Some(e) = fail.into_inner().expect("poisoned") {
        return Err(e);
    }
    let err = outer.err + worst.into_inner().expect("poisoned");
    Ok(QuadResult { err, ..outer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highprec::{bits_for_digits, pi};

    fn close(r: &QuadResult, exact: &Float, digits: i32) -> bool {
        let d = Float::with_val(r.value.prec(), &r.value - exact).abs();
        d < Float::with_val(64, 10).pow(-digits) && r.err < Float::with_val(64, 10).pow(-digits + 2)
    }

    use rug::ops::Pow;

    #[test]
    fn constant_and_singular() {
        let bits = bits_for_digits(40);
        let cfg = QuadConfig::new(bits, 135);
        let one = integrate01(|_| Float::with_val(bits, 1), cfg).unwrap();
        assert!(close(&one, &Float::with_val(bits, 1), 38));
        let inv_sqrt = integrate01(|n| n.x.clone().recip_sqrt(), cfg).unwrap();
        assert!(close(&inv_sqrt, &Float::with_val(bits, 2), 38));
        // int log(x) log(1-x) = 2 - pi^2/6
        let ll = integrate01(|n| Float::with_val(bits, &n.ln_x * &n.ln_xc), cfg).unwrap();
        let exact = 2 - Float::with_val(bits, pi(bits).square_ref()) / 6u32;
        assert!(close(&ll, &exact, 38));
    }

    #[test]
    fn two_dimensional() {
        let bits = bits_for_digits(30);
        let cfg = QuadConfig::new(bits, 100).parallel();
        let r = integrate01_2d(|x, y| (Float::with_val(bits, &x.x * &y.x) + 1u32).recip(), cfg).unwrap();
        let exact = Float::with_val(bits, pi(bits).square_ref()) / 12u32;
        assert!(close(&r, &exact, 28));
    }

    #[test]
    fn parallel_matches_serial() {
        let bits = 160;
        let f = |n: &Node| Float::with_val(bits, n.x.cos_ref());
        let a = integrate01(f, QuadConfig::new(bits, 100)).unwrap();
        let b = integrate01(f, QuadConfig::new(bits, 100).parallel()).unwrap();
        let d = Float::with_val(bits, &a.value - &b.value).abs();
        assert!(d < Float::with_val(bits, 1e-30));
        let exact = Float::with_val(bits, 1).sin();
        assert!(Float::with_val(bits, &a.value - exact).abs() < Float::with_val(bits, 1e-30));
    }
}
