use rug::{Float, Rational};

use cellzeta::exact::{q_from_sum, totsym_sequences};
use cellzeta::group::{factorial_ratio, group, orbit};
use cellzeta::highprec::decompose::{decompose, decompose_verified};
use cellzeta::highprec::integral::eval_i;
use cellzeta::params::{a_to_pq, ParamVec8};

const SMALL: ParamVec8 = ParamVec8([1, 2, 1, 2, 2, 1, 2, 1]);

#[test]
fn decomposition_matches_recursion() {
    let rows = totsym_sequences(5).unwrap();
    for n in 0..=5 {
        let d = decompose(&ParamVec8::constant(n), 30 + 10 * n as u32).unwrap();
        let r = &rows[n as usize];
        assert_eq!((Rational::from(d.q.clone()), &d.phat, &d.p), (r.q.clone(), &r.phat, &r.p), "n = {n}");
    }
}

#[test]
fn integral_transforms_like_q() {
    assert!(orbit(&SMALL).all_admissible);
    let base = eval_i(&SMALL, 30).unwrap();
    let bits = base.value.prec();
    for g in group().elements.iter().step_by(997) {
        let r = factorial_ratio(g, &SMALL).unwrap();
        let moved = eval_i(&g.apply(&SMALL), 30).unwrap();
        let want = Float::with_val(bits, &base.value * Float::with_val(bits, &r));
        let rel = Float::with_val(bits, &moved.value - &want).abs() / want.abs();
        assert!(rel < 1e-25, "{:?}: {rel}", g.apply(&SMALL));
    }
}

#[test]
fn asymmetric_decomposition_is_stable() {
    let d = decompose_verified(&SMALL, 30).unwrap();
    assert_eq!(q_from_sum(&a_to_pq(&SMALL)).unwrap(), d.q);
    assert!(d.residual < 1e-20);
}
