//! The order-5040 symmetry group acting linearly on the eight exponents.
//!
//! Elements are stored as integer matrices acting on column vectors, and
//! the group is closed once per process by breadth-first search from the
//! five generating involutions.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{
    from_symmetric, hyperplane_values, to_symmetric, LinearForm, ParamVec8, SymParams,
    EXCEPTIONAL, F_SET, HYPERPLANES,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("factorial of negative argument {value} (h_{index} at {which})")]
    NegativeFactorial { index: usize, value: i64, which: &'static str },
    #[error("no permutation of s1..s7 matches this element")]
    Inconsistent,
}

pub type Matrix8 = [[i64; 8]; 8];

pub const IDENTITY: Matrix8 = {
    let mut m = [[0; 8]; 8];
    let mut i = 0;
    while i < 8 {
        m[i][i] = 1;
        i += 1;
    }
    m
};

pub fn mat_mul(x: &Matrix8, y: &Matrix8) -> Matrix8 {
    let mut out = [[0i64; 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            let xik = x[i][k];
            if xik == 0 {
                continue;
            }
            for j in 0..8 {
                out[i][j] += xik * y[k][j];
            }
        }
    }
    out
}

fn matrix_of(f: impl Fn(&[i64; 8]) -> [i64; 8]) -> Matrix8 {
    let mut m = [[0; 8]; 8];
    for j in 0..8 {
        let mut e = [0; 8];
        e[j] = 1;
        let col = f(&e);
        for i in 0..8 {
            m[i][j] = col[i];
        }
    }
    m
}

/// A group element, acting on `a` by left multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub matrix: Matrix8,
}

/// A permutation of the labels `s_1..s_7`: `perm[j] = i` (0-based) means the
/// label `s_{j+1}` is moved to position `s_{i+1}`.
pub type Perm7 = [u8; 7];

pub fn perm_compose(outer: &Perm7, inner: &Perm7) -> Perm7 {
    let mut out = [0u8; 7];
    for (j, o) in out.iter_mut().enumerate() {
        *o = outer[inner[j] as usize];
    }
    out
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { matrix: IDENTITY };

    pub fn apply(&self, a: &ParamVec8) -> ParamVec8 {
        let mut out = [0i64; 8];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..8).map(|j| self.matrix[i][j] * a.0[j]).sum();
        }
        ParamVec8(out)
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { matrix: mat_mul(&self.matrix, &other.matrix) }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == IDENTITY
    }

    /// Positive: every positive defining form (the 28 `h_i` and the
    /// exceptional form) is sent to a form that is positive at `(1,...,1)`.
    pub fn is_positive(&self) -> bool {
        let ones = self.apply(&ParamVec8::constant(1));
        HYPERPLANES.iter().chain(std::iter::once(&EXCEPTIONAL)).all(|f| f.eval(&ones) > 0)
    }
}

/// The five generating involutions `i1, p01, p12, h, h'`, in that order.
pub fn generators() -> Vec<GroupElement> {
    let i1 = matrix_of(|a| {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
        [a5, a4, a3, a2, a1, a7, a6, -a2 + a4 - a6 + a7 + a8]
    });
    let p01 = matrix_of(|a| {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
        [a1, a2, -a2 + a4 + a5, a2 + a3 - a5, a5, a6, a7, -a2 - a3 + a4 + a5 + a8]
    });
    let p12 = matrix_of(|a| {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
        [
            a1,
            a2,
            -a2 + a4 + a8,
            a2 + a3 - a8,
            -a2 - a3 + a4 + a5 + a8,
            a2 + a3 - a4 + a6 - a8,
            a7,
            a8,
        ]
    });
    let h = matrix_of(|a| {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
        [a1, a2, a3 + a6 - a8, a4 - a6 + a8, a5 + a6 - a8, a8, -a6 + a7 + a8, a6]
    });
    let h_prime = matrix_of(|a| {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
        [
            a1,
            a2,
            a3,
            a4,
            a2 + a3 - a4 + a6 - a8,
            -a2 - a3 + a4 + a5 + a8,
            -a2 - a3 + a4 + a5 - a6 + a7 + a8,
            a8,
        ]
    });
    [i1, p01, p12, h, h_prime].into_iter().map(|matrix| GroupElement { matrix }).collect()
}

/// The non-positive automorphism `(a1, a2, a4) -> (-a2, -a1, a4 - a1 - a2)`
/// fixing the other coordinates.
pub fn extra_automorphism() -> GroupElement {
    GroupElement {
        matrix: matrix_of(|a| {
            let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
            [-a2, -a1, a3, a4 - a1 - a2, a5, a6, a7, a8]
        }),
    }
}

/// Closure of a set of integer matrices under multiplication, in BFS order
/// starting from the identity.
pub fn closure(gens: &[GroupElement]) -> Vec<GroupElement> {
    let mut seen: HashSet<Matrix8> = HashSet::new();
    let mut out = vec![GroupElement::IDENTITY];
    seen.insert(IDENTITY);
    let mut queue = VecDeque::from([GroupElement::IDENTITY]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let next = s.compose(&g);
            if seen.insert(next.matrix) {
                out.push(next);
                queue.push_back(next);
            }
        }
    }
    out
}

/// The closed group together with a lookup from matrix to index.
pub struct Group {
    pub elements: Vec<GroupElement>,
    index: HashMap<Matrix8, usize>,
}

impl Group {
    fn build() -> Self {
        let elements = closure(&generators());
        let index = elements.iter().enumerate().map(|(i, g)| (g.matrix, i)).collect();
        Group { elements, index }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(&g.matrix).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(&g.matrix)
    }
}

/// The cached group (computed on first use).
pub fn group() -> &'static Group {
    static GROUP: OnceLock<Group> = OnceLock::new();
    GROUP.get_or_init(Group::build)
}

pub fn apply(g: &GroupElement, a: &ParamVec8) -> ParamVec8 {
    g.apply(a)
}

/// The orbit of a parameter vector.
#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub base: ParamVec8,
    pub elements: BTreeSet<ParamVec8>,
    /// `by_element[k]` is the image under `group().elements[k]`.
    #[serde(skip)]
    pub by_element: Vec<ParamVec8>,
    /// Whether every orbit element satisfies the convergence conditions.
    pub all_admissible: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Lexicographically smallest element, used as the orbit's canonical form.
    pub fn canonical(&self) -> ParamVec8 {
        *self.elements.iter().next().expect("orbit contains its base")
    }
}

pub fn orbit(a: &ParamVec8) -> Orbit {
    let by_element: Vec<ParamVec8> = group().elements.iter().map(|g| g.apply(a)).collect();
    let elements: BTreeSet<ParamVec8> = by_element.iter().copied().collect();
    let all_admissible = elements.iter().all(crate::params::convergence_check);
    Orbit { base: *a, elements, by_element, all_admissible }
}

fn f_factorial_product(a: &ParamVec8, which: &'static str) -> Result<Integer, GroupError> {
    let h = hyperplane_values(a);
    let mut prod = Integer::from(1);
    for &i in &F_SET {
        let v = h.get(i);
        if v < 0 {
            return Err(GroupError::NegativeFactorial { index: i, value: v, which });
        }
        prod *= Integer::from(Integer::factorial(v as u32));
    }
    Ok(prod)
}

/// `prod_{i in F} h_i(g a)! / prod_{i in F} h_i(a)!`.
pub fn factorial_ratio(g: &GroupElement, a: &ParamVec8) -> Result<Rational, GroupError> {
    let num = f_factorial_product(&g.apply(a), "g.a")?;
    let den = f_factorial_product(a, "a")?;
    Ok(Rational::from((num, den)))
}

/// A vector with pairwise distinct symmetric coordinates, used to read off
/// permutations.
fn probe_vector() -> (SymParams, ParamVec8) {
    let s = SymParams { two_s: [1000, 2, 4, 8, 16, 32, 64, 128] };
    let a = from_symmetric(&s).expect("all doubled values even");
    (s, a)
}

/// The permutation of `s_1..s_7` induced by `g`. The map `g -> perm_rep(g)`
/// is a homomorphism for [`GroupElement::compose`] and [`perm_compose`].
pub fn perm_rep(g: &GroupElement) -> Result<Perm7, GroupError> {
    let (s, a) = probe_vector();
    let t = to_symmetric(&g.apply(&a));
    if t.two_s[0] != s.two_s[0] {
        return Err(GroupError::Inconsistent);
    }
    let mut perm = [0u8; 7];
    for j in 1..=7 {
        let pos = (1..=7).find(|&i| t.two_s[i] == s.two_s[j]).ok_or(GroupError::Inconsistent)?;
        perm[j - 1] = (pos - 1) as u8;
    }
    // verify on the full linear map, not just the probe
    for col in 0..8 {
        let mut e = [0i64; 8];
        e[col] = 1;
        let se = to_symmetric(&ParamVec8(e));
        let tg = to_symmetric(&g.apply(&ParamVec8(e)));
        if tg.two_s[0] != se.two_s[0] {
            return Err(GroupError::Inconsistent);
        }
        for j in 0..7 {
            if tg.two_s[perm[j] as usize + 1] != se.two_s[j + 1] {
                return Err(GroupError::Inconsistent);
            }
        }
    }
    Ok(perm)
}

/// How `g` permutes a list of forms up to sign: entry `i` is `(j, sign)`
/// with `forms[i] o g = sign * forms[j]`. `None` if some image is not in the
/// list.
pub fn form_action(g: &GroupElement, forms: &[LinearForm]) -> Option<Vec<(usize, i8)>> {
    forms
        .iter()
        .map(|f| {
            let img = f.compose(&g.matrix);
            forms.iter().enumerate().find_map(|(j, h)| {
                if *h == img {
                    Some((j, 1))
                } else if h.neg() == img {
                    Some((j, -1))
                } else {
                    None
                }
            })
        })
        .collect()
}

/// The 28 hyperplane forms followed by the exceptional one.
pub fn all_forms() -> Vec<LinearForm> {
    HYPERPLANES.iter().copied().chain(std::iter::once(EXCEPTIONAL)).collect()
}

/// Closure of a set of permutations of `0..n` (as index vectors).
pub fn perm_closure(gens: &[Vec<u8>]) -> HashSet<Vec<u8>> {
    let n = gens.first().map_or(0, Vec::len);
    let id: Vec<u8> = (0..n as u8).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let next: Vec<u8> = p.iter().map(|&x| g[x as usize]).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Permutation of the 29 hyperplanes induced by a linear automorphism.
pub fn hyperplane_permutation(g: &GroupElement) -> Option<Vec<u8>> {
    let forms = all_forms();
    form_action(g, &forms).map(|v| v.into_iter().map(|(j, _)| j as u8).collect())
}

/// Order of the permutation group on the 29 hyperplanes generated by the
/// group together with the non-positive automorphism.
pub fn extended_group_order() -> usize {
    let mut gens: Vec<Vec<u8>> = generators()
        .iter()
        .map(|g| hyperplane_permutation(g).expect("generator permutes the hyperplanes"))
        .collect();
    gens.push(hyperplane_permutation(&extra_automorphism()).expect("extra element permutes the hyperplanes"));
    perm_closure(&gens).len()
}

/// Order of the permutation group on the 29 hyperplanes generated by the
/// five generators alone.
pub fn group_order_on_hyperplanes() -> usize {
    let gens: Vec<Vec<u8>> = generators()
        .iter()
        .map(|g| hyperplane_permutation(g).expect("generator permutes the hyperplanes"))
        .collect();
    perm_closure(&gens).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{HyperplaneValues, H_DOUBLE_PRIME, H_PRIME};
    use proptest::prelude::*;

    const EXAMPLE: ParamVec8 = ParamVec8([8, 16, 10, 15, 12, 16, 18, 13]);

    #[test]
    fn generators_are_involutions() {
        for g in generators() {
            assert!(g.compose(&g).is_identity());
        }
        let i1 = generators()[0];
        let a = ParamVec8([1, 2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(i1.apply(&a), ParamVec8([5, 4, 3, 2, 1, 7, 6, -2 + 4 - 6 + 7 + 8]));
    }

    #[test]
    fn group_has_order_5040() {
        assert_eq!(group().order(), 5040);
        assert_eq!(group().elements[0], GroupElement::IDENTITY);
    }

    #[test]
    fn apply_examples() {
        let h = generators()[3];
        assert_eq!(h.apply(&EXAMPLE), ParamVec8([8, 16, 13, 12, 15, 13, 15, 16]));
        assert_eq!(GroupElement::IDENTITY.apply(&EXAMPLE), EXAMPLE);
        for g in &group().elements {
            assert_eq!(g.apply(&ParamVec8::constant(3)), ParamVec8::constant(3));
        }
    }

    #[test]
    fn orbits() {
        let o = orbit(&EXAMPLE);
        assert_eq!(o.len(), 5040);
        assert!(o.all_admissible);
        assert_eq!(orbit(&ParamVec8::constant(2)).len(), 1);
        assert_eq!(orbit(&ParamVec8::ZERO).len(), 1);
        assert_eq!(5040 % orbit(&ParamVec8([1, 1, 1, 1, 1, 1, 1, 2])).len(), 0);
    }

    #[test]
    fn factorial_ratio_examples() {
        let g = group().elements[1234];
        assert_eq!(factorial_ratio(&GroupElement::IDENTITY, &EXAMPLE).unwrap(), 1);
        assert_eq!(factorial_ratio(&g, &ParamVec8::constant(3)).unwrap(), 1);
        let bad = ParamVec8([1, 0, 5, 0, 0, 0, 0, 0]);
        assert!(matches!(
            factorial_ratio(&GroupElement::IDENTITY, &bad),
            Err(GroupError::NegativeFactorial { .. })
        ));
    }

    #[test]
    fn perm_rep_is_isomorphism_onto_s7() {
        assert_eq!(perm_rep(&GroupElement::IDENTITY).unwrap(), [0, 1, 2, 3, 4, 5, 6]);
        let perms: HashSet<Perm7> =
            group().elements.iter().map(|g| perm_rep(g).unwrap()).collect();
        assert_eq!(perms.len(), 5040);
        let gens: Vec<Vec<u8>> =
            generators().iter().map(|g| perm_rep(g).unwrap().to_vec()).collect();
        assert_eq!(perm_closure(&gens).len(), 5040);
    }

    #[test]
    fn perm_rep_is_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let els = &group().elements;
        for _ in 0..100 {
            let g = els[rng.gen_range(0..els.len())];
            let h = els[rng.gen_range(0..els.len())];
            let lhs = perm_rep(&g.compose(&h)).unwrap();
            let rhs = perm_compose(&perm_rep(&g).unwrap(), &perm_rep(&h).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn extended_action() {
        assert_eq!(group_order_on_hyperplanes(), 5040);
        assert_eq!(extended_group_order(), 40320);
        let x = extra_automorphism();
        let p = hyperplane_permutation(&x).unwrap();
        let sq: Vec<u8> = p.iter().map(|&i| p[i as usize]).collect();
        assert_eq!(sq, (0..29).collect::<Vec<u8>>());
        assert!(x.compose(&x).is_identity());
    }

    #[test]
    fn positivity() {
        assert!(group().elements.iter().all(GroupElement::is_positive));
        assert!(!extra_automorphism().is_positive());
    }

    #[test]
    fn exceptional_form_fixed_pointwise() {
        for g in &group().elements {
            assert_eq!(EXCEPTIONAL.compose(&g.matrix), EXCEPTIONAL);
        }
    }

    #[test]
    fn exhaustive_multiset_invariance() {
        for base in [EXAMPLE, ParamVec8([15, 20, 16, 14, 18, 17, 16, 20]), ParamVec8([3, 5, 4, 4, 3, 6, 5, 4])] {
            let h0 = hyperplane_values(&base);
            for g in &group().elements {
                let h1 = hyperplane_values(&g.apply(&base));
                assert_eq!(h1.sorted(), h0.sorted());
                assert_eq!(h1.sorted_prime(), h0.sorted_prime());
                assert_eq!(h1.sorted_double_prime(), h0.sorted_double_prime());
                assert_eq!(h1.f_sum(), h0.f_sum());
            }
        }
    }

    fn split_sorted(h: &HyperplaneValues) -> (Vec<i64>, Vec<i64>) {
        let mut p: Vec<i64> = H_PRIME.iter().map(|&i| h.get(i)).collect();
        let mut q: Vec<i64> = H_DOUBLE_PRIME.iter().map(|&i| h.get(i)).collect();
        p.sort_unstable();
        q.sort_unstable();
        (p, q)
    }

    proptest! {
        #[test]
        fn multiset_invariance_random(a in prop::array::uniform8(-30i64..30), k in 0usize..5040) {
            let a = ParamVec8(a);
            let g = group().elements[k];
            let h0 = hyperplane_values(&a);
            let h1 = hyperplane_values(&g.apply(&a));
            prop_assert_eq!(h0.sorted(), h1.sorted());
            prop_assert_eq!(split_sorted(&h0), split_sorted(&h1));
            prop_assert_eq!(h0.f_sum(), h1.f_sum());
            prop_assert_eq!(h0.exceptional, h1.exceptional);
        }

        #[test]
        fn perm_matches_symmetric_coordinates(a in prop::array::uniform8(-30i64..30), k in 0usize..5040) {
            let a = ParamVec8(a);
            let g = group().elements[k];
            let perm = perm_rep(&g).unwrap();
            let s = to_symmetric(&a);
            let t = to_symmetric(&g.apply(&a));
            prop_assert_eq!(t.two_s[0], s.two_s[0]);
            for j in 0..7 {
                prop_assert_eq!(t.two_s[perm[j] as usize + 1], s.two_s[j + 1]);
            }
        }
    }
}
