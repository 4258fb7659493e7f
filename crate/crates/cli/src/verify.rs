use rug::{Float, Rational};
use serde_json::{json, Value};

use cellzeta::asymptotics::{lambda_values, worthiness};
use cellzeta::exact::{integrality, q_from_sum, q_totsym, recursion_residual, totsym_sequences};
use cellzeta::graph::{automorphism_order, build_g8, stabilizer_check, verify_table};
use cellzeta::group::{factorial_ratio, group, orbit};
use cellzeta::highprec::decompose::decompose;
use cellzeta::highprec::f7::{eval_f7, DualParams};
use cellzeta::highprec::{bits_for_digits, zeta_constants};
use cellzeta::params::{a_to_pq, hyperplane_values, ParamVec8};

use crate::Suite;

const EXAMPLE: ParamVec8 = ParamVec8([8, 16, 10, 15, 12, 16, 18, 13]);
const SECOND: ParamVec8 = ParamVec8([15, 20, 16, 14, 18, 17, 16, 20]);

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name, pass, detail: detail.into() }
}

fn group_suite() -> Vec<Check> {
    let g = group();
    let mut out = vec![check("group order", g.order() == 5040, g.order().to_string())];
    let o = orbit(&EXAMPLE);
    out.push(check("orbit size", o.len() == 5040, o.len().to_string()));
    let q = |a: &ParamVec8| q_from_sum(&a_to_pq(a)).ok();
    let mut ok = true;
    for (k, el) in g.elements.iter().enumerate().step_by(250) {
        let b = el.apply(&EXAMPLE);
        let (Some(qa), Some(qb), Ok(r)) = (q(&EXAMPLE), q(&b), factorial_ratio(el, &EXAMPLE)) else {
            ok = false;
            continue;
        };
        // Q(g a) / Q(a) = prod h(g a)! / prod h(a)!
        if Rational::from(qb) != r * qa {
            ok = false;
            eprintln!("Q-invariance fails at element {k}");
        }
    }
    out.push(check("Q invariance", ok, "every 250th element"));
    let base = hyperplane_values(&EXAMPLE);
    let inv = g.elements.iter().all(|el| {
        let h = hyperplane_values(&el.apply(&EXAMPLE));
        h.sorted() == base.sorted() && h.f_sum() == base.f_sum()
    });
    out.push(check("multiset and F-sum invariance", inv, "all elements"));
    out
}

fn graph_suite() -> Vec<Check> {
    let g8 = build_g8();
    let aut = automorphism_order(&g8);
    let st = stabilizer_check();
    vec![
        check("vertices", g8.order() == 28, g8.order().to_string()),
        check("edges", g8.edge_count() == 168, g8.edge_count().to_string()),
        check("12-regular", g8.regular_degree() == Some(12), format!("{:?}", g8.regular_degree())),
        check("automorphism order", aut == Some(40320), format!("{aut:?}")),
        check("stabilizer image", st.image_order == 5040 && st.image_in_aut && st.fixes_s0, st.image_order.to_string()),
        check("table identities", verify_table().is_ok() && st.matches_form_action, format!("{:?}", verify_table())),
        check("positivity", st.all_positive && st.extra_non_positive, ""),
        check("extended order", st.extended_order == 40320 && st.extended_in_aut, st.extended_order.to_string()),
    ]
}

fn sequences_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let first = [q_totsym(0), q_totsym(1), q_totsym(2)];
    out.push(check("Q_0, Q_1, Q_2", first == [1, 21, 2989], format!("{first:?}")));
    let qs: Vec<Rational> = (0..=30).map(|n| Rational::from(q_totsym(n))).collect();
    let rec_ok = (2..30).all(|n| recursion_residual(&qs, n) == 0);
    let sym_ok = (0..=30i64).all(|n| {
        q_from_sum(&a_to_pq(&ParamVec8::constant(n))).map(|q| q == q_totsym(n as u32)).unwrap_or(false)
    });
    out.push(check("recursion = sum, n <= 30", rec_ok && sym_ok, ""));
    match totsym_sequences(10) {
        Ok(rows) => {
            let q_int = rows.iter().all(|t| integrality(t).q_integral);
            out.push(check("Q_n integral, n <= 10", q_int, ""));
            let bad: Vec<_> = rows.iter().map(integrality).filter(|r| !r.holds()).map(|r| r.n).collect();
            out.push(check("d_n inclusions, n <= 10", bad.is_empty(), format!("fails at n = {bad:?}")));
        }
        Err(e) => out.push(check("sequence propagation", false, e.to_string())),
    }
    out
}

fn analytic_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let expect = [
        (ParamVec8::ZERO, (1, (0, 1), (0, 1))),
        (ParamVec8::constant(1), (21, (101, 4), (87, 4))),
        (ParamVec8::constant(2), (2989, (344923, 96), (1190161, 384))),
    ];
    for (a, (q, ph, p)) in expect {
        let name = match a.0[0] {
            0 => "decompose n = 0",
            1 => "decompose n = 1",
            _ => "decompose n = 2",
        };
        match decompose(&a, 40) {
            Ok(d) => {
                let ok = d.q == q && d.phat == Rational::from(ph) && d.p == Rational::from(p) && d.residual < 1e-25;
                out.push(check(name, ok, format!("{} {} {}", d.q, d.phat, d.p)));
            }
            Err(e) => out.push(check(name, false, e.to_string())),
        }
    }
    let targets = [0.00500378, 0.08438431, 592.07938053];
    match lambda_values(&ParamVec8::constant(1), 30) {
        Ok(l) => {
            let got: Vec<f64> = (0..3).map(|k| l.modulus(k).to_f64()).collect();
            let ok = got.iter().zip(targets).all(|(x, y)| (x - y).abs() < 1e-6);
            out.push(check("symmetric growth rates", ok, format!("{got:?}")));
        }
        Err(e) => out.push(check("symmetric growth rates", false, e.to_string())),
    }
    for (name, a, g) in [
        ("gamma symmetric", ParamVec8::constant(1), 0.77795976),
        ("gamma example", EXAMPLE, 0.86597135),
        ("gamma second example", SECOND, 0.85163139),
    ] {
        match worthiness(&a, 30) {
            Ok(r) => out.push(check(name, (r.gamma.to_f64() - g).abs() < 1e-6, r.gamma.to_f64().to_string())),
            Err(e) => out.push(check(name, false, e.to_string())),
        }
    }
    let bits = bits_for_digits(40);
    let z = zeta_constants(bits);
    match eval_f7(&DualParams { b: [0; 8] }, 40) {
        Ok(v) => {
            let d = Float::with_val(bits, &v.value - Float::with_val(bits, &z.z5 * 2u32)).abs();
            out.push(check("F7(0) = 2 zeta(5)", d < 1e-30, format!("{d:.3e}")));
        }
        Err(e) => out.push(check("F7(0) = 2 zeta(5)", false, e.to_string())),
    }
    let b = DualParams { b: [3, 1, 1, 1, 1, 1, 1, 1] };
    let ratio = eval_f7(&b.scale(31), 20).and_then(|x| eval_f7(&b.scale(30), 20).map(|y| x.value / y.value));
    match (ratio, lambda_values(&ParamVec8::constant(1), 30)) {
        (Ok(r), Ok(l)) => {
            let inv = 1.0 / l.modulus(2).to_f64();
            let rel = (r.to_f64() - inv).abs() / inv;
            out.push(check("F7 ratio at n = 30 vs 1/lambda_3", rel < 0.05, format!("relative gap {rel:.4}")));
        }
        _ => out.push(check("F7 ratio at n = 30 vs 1/lambda_3", false, "evaluation failed")),
    }
    out
}

pub fn run(suite: Suite) -> (Value, u8) {
    let mut checks = Vec::new();
    let mut names = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Group {
        names.push("group");
        checks.extend(group_suite());
    }
    if all || suite == Suite::Graph {
        names.push("graph");
        checks.extend(graph_suite());
    }
    if all || suite == Suite::Sequences {
        names.push("sequences");
        checks.extend(sequences_suite());
    }
    if all || suite == Suite::Analytic {
        names.push("analytic");
        checks.extend(analytic_suite());
    }
    let first_fail = checks.iter().find(|c| !c.pass).map(|c| c.name);
    if let Some(name) = first_fail {
        eprintln!("verification failed: {name}");
    }
    let list: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "check": c.name, "pass": c.pass, "detail": c.detail }))
        .collect();
    let v = json!({
        "suites": names,
        "checks": list,
        "passed": first_fail.is_none(),
        "first_failure": first_fail,
    });
    (v, if first_fail.is_none() { 0 } else { 1 })
}
