use std::cmp::Ordering;
use std::collections::BTreeSet;

use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Value};

use cellzeta::asymptotics::worthiness;
use cellzeta::group::orbit;
use cellzeta::highprec::fmt_float;
use cellzeta::params::{convergence_check, ParamVec8};

use crate::Failure;

#[derive(Args, Clone, Debug)]
pub struct SearchArgs {
    /// Lower corner of the box (8 integers).
    #[arg(long, num_args = 8, allow_negative_numbers = true, required = true)]
    min: Vec<i64>,
    /// Upper corner of the box (8 integers).
    #[arg(long, num_args = 8, allow_negative_numbers = true, required = true)]
    max: Vec<i64>,
    /// Maximum number of candidates to evaluate.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Evaluate every admissible vector instead of one per orbit.
    #[arg(long)]
    no_dedupe: bool,
}

fn boxed<'a>(lo: &'a [i64], hi: &'a [i64]) -> impl Iterator<Item = ParamVec8> + 'a {
    let mut cur: Option<[i64; 8]> = if lo.iter().zip(hi).all(|(l, h)| l <= h) {
        Some(lo.try_into().expect("8 entries"))
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = cur?;
        let mut next = out;
        let mut k = 7;
        loop {
            if next[k] < hi[k] {
                next[k] += 1;
                cur = Some(next);
                break;
            }
            next[k] = lo[k];
            if k == 0 {
                cur = None;
                break;
            }
            k -= 1;
        }
        Some(ParamVec8(out))
    })
}

pub fn run(args: &SearchArgs, prec: u32) -> Result<(Value, u8), Failure> {
    if args.budget == 0 {
        return Err(Failure::new(1, "--budget must be at least 1"));
    }
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::new();
    let mut exhausted = false;
    for a in boxed(&args.min, &args.max).filter(convergence_check) {
        let rep = if args.no_dedupe { a } else { orbit(&a).canonical() };
        if !seen.insert(rep) {
            continue;
        }
        if candidates.len() == args.budget {
            exhausted = true;
            break;
        }
        candidates.push(rep);
    }
    if exhausted {
        eprintln!("warning: budget of {} candidates exceeded; results are partial", args.budget);
    }
    let mut rows: Vec<_> = candidates
        .par_iter()
        .map(|a| (*a, worthiness(a, prec)))
        .collect();
    let mut failed = Vec::new();
    rows.retain(|(a, r)| match r {
        Ok(_) => true,
        Err(e) => {
            failed.push(json!({ "a": a, "error": e.to_string() }));
            false
        }
    });
    rows.sort_by(|(a, x), (b, y)| {
        let (x, y) = (x.as_ref().expect("retained"), y.as_ref().expect("retained"));
        // vectors whose growth rates are out of order rank last, as does NaN
        let key = |g: &rug::Float| if g.is_nan() { f64::NEG_INFINITY } else { g.to_f64() };
        y.sane
            .cmp(&x.sane)
            .then_with(|| key(&y.gamma).total_cmp(&key(&x.gamma)))
            .then_with(|| y.gamma.partial_cmp(&x.gamma).unwrap_or(Ordering::Equal))
            .then_with(|| a.cmp(b))
    });
    let ranked: Vec<Value> = rows
        .iter()
        .map(|(a, r)| {
            let r = r.as_ref().expect("retained");
            json!({ "a": a, "gamma": fmt_float(&r.gamma, prec.min(20)), "sane": r.sane })
        })
        .collect();
    Ok((json!({ "results": ranked, "skipped": failed, "partial": exhausted }), 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration_is_lexicographic() {
        let lo = [0, 0, 0, 0, 0, 0, 1, 0];
        let hi = [0, 0, 0, 0, 0, 0, 2, 1];
        let all: Vec<_> = boxed(&lo, &hi).map(|a| (a.0[6], a.0[7])).collect();
        assert_eq!(all, vec![(1, 0), (1, 1), (2, 0), (2, 1)]);
        assert_eq!(boxed(&hi, &lo).count(), 0);
    }
}
