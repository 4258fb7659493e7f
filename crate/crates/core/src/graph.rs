//! The graph on 2-subsets of an `n`-set and its link with the hyperplane
//! arrangement.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::group::{
    extra_automorphism, form_action, generators, group, hyperplane_permutation, perm_closure, perm_rep,
};
use crate::params::{to_symmetric, LinearForm, ParamVec8, HYPERPLANES};

/// Vertices are the 2-subsets `{i, j}` (`i < j`) of `{0, ..., n-1}`, adjacent
/// when their union has three elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<(u8, u8)>,
    pub adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&b| b).count()).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.order()).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn index_of(&self, pair: (u8, u8)) -> Option<usize> {
        let p = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.vertices.iter().position(|&v| v == p)
    }

    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.order();
        perm.len() == n
            && perm.iter().copied().collect::<HashSet<_>>().len() == n
            && (0..n).all(|i| (0..n).all(|j| self.adj[i][j] == self.adj[perm[i]][perm[j]]))
    }

    /// One `{i,j} {k,l}` pair per line for each edge.
    pub fn adjacency_list(&self) -> String {
        let mut out = String::new();
        for i in 0..self.order() {
            for j in i + 1..self.order() {
                if self.adj[i][j] {
                    let (a, b) = self.vertices[i];
                    let (c, d) = self.vertices[j];
                    let _ = writeln!(out, "{a}{b} {c}{d}");
                }
            }
        }
        out
    }
}

pub fn build_g(n: u8) -> Graph {
    let vertices: Vec<(u8, u8)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let adj = vertices
        .iter()
        .map(|&(a, b)| {
            vertices
                .iter()
                .map(|&(c, d)| {
                    let mut s = [a, b, c, d];
                    s.sort_unstable();
                    let distinct = 1 + s.windows(2).filter(|w| w[0] != w[1]).count();
                    distinct == 3
                })
                .collect()
        })
        .collect();
    Graph { vertices, adj }
}

pub fn build_g8() -> Graph {
    build_g(8)
}

/// `h_i -> {s_a, s_b}`, indexed by `i - 1`.
pub const VERTEX_TABLE: [(u8, u8); 28] = [
    (1, 2),
    (0, 2),
    (2, 3),
    (0, 3),
    (3, 4),
    (5, 6),
    (6, 7),
    (3, 5),
    (1, 3),
    (1, 4),
    (1, 5),
    (0, 4),
    (0, 5),
    (2, 6),
    (0, 1),
    (2, 4),
    (0, 6),
    (2, 5),
    (4, 6),
    (3, 7),
    (1, 6),
    (1, 7),
    (3, 6),
    (0, 7),
    (4, 5),
    (2, 7),
    (5, 7),
    (4, 7),
];

/// Doubled symmetric coordinates `2 s_k` as linear forms in `a`.
fn doubled_s_forms() -> [LinearForm; 8] {
    std::array::from_fn(|k| {
        LinearForm(std::array::from_fn(|j| {
            let mut e = [0; 8];
            e[j] = 1;
            to_symmetric(&ParamVec8(e)).two_s[k]
        }))
    })
}

/// The linear form `s_a + s_b`, or `s_0 - s_b` when `a = 0`, doubled.
fn doubled_vertex_form(pair: (u8, u8)) -> LinearForm {
    let s = doubled_s_forms();
    let (a, b) = (pair.0 as usize, pair.1 as usize);
    let sign = if a == 0 { -1 } else { 1 };
    LinearForm(std::array::from_fn(|j| s[a].0[j] + sign * s[b].0[j]))
}

/// `Err(i)` names the first hyperplane `h_i` whose identity fails.
pub fn verify_table() -> Result<(), usize> {
    let distinct: HashSet<(u8, u8)> = VERTEX_TABLE.iter().copied().collect();
    if distinct.len() != 28 || VERTEX_TABLE.iter().any(|&(a, b)| a >= b || b > 7) {
        return Err(0);
    }
    for (i, (&pair, h)) in VERTEX_TABLE.iter().zip(HYPERPLANES.iter()).enumerate() {
        let twice_h = LinearForm(h.0.map(|c| 2 * c));
        if doubled_vertex_form(pair) != twice_h {
            return Err(i + 1);
        }
    }
    Ok(())
}

/// Vertex of `graph` labelled by `h_i` (1-based) via the table.
fn table_vertex(graph: &Graph, i: usize) -> usize {
    graph.index_of(VERTEX_TABLE[i - 1]).expect("table pairs are vertices")
}

/// Colour refinement run jointly on two copies of the graph so that colour
/// ids are comparable between them.
fn refine(g: &Graph, colors: &mut [u32]) {
    let n = g.order();
    loop {
        let count = colors.iter().collect::<HashSet<_>>().len();
        let sigs: Vec<(u32, Vec<u32>)> = (0..2 * n)
            .map(|v| {
                let (base, local) = if v < n { (0, v) } else { (n, v - n) };
                let mut nb: Vec<u32> = (0..n).filter(|&w| g.adj[local][w]).map(|w| colors[base + w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        for (v, s) in sigs.iter().enumerate() {
            colors[v] = uniq.binary_search(&s).expect("present") as u32;
        }
        if uniq.len() == count {
            return;
        }
    }
}

fn balanced(colors: &[u32], n: usize) -> bool {
    let mut a: Vec<u32> = colors[..n].to_vec();
    let mut b: Vec<u32> = colors[n..].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Whether an automorphism extends the given colouring of two copies.
fn extends(g: &Graph, mut colors: Vec<u32>, budget: &mut u64) -> Option<bool> {
    let n = g.order();
    *budget = budget.checked_sub(1)?;
    refine(g, &mut colors);
    if !balanced(&colors, n) {
        return Some(false);
    }
    let mut sizes = vec![0usize; 2 * n + 1];
    for &c in &colors[..n] {
        sizes[c as usize] += 1;
    }
    let Some(v) = (0..n).find(|&v| sizes[colors[v] as usize] > 1) else {
        let perm: Vec<usize> =
            (0..n).map(|v| (0..n).find(|&w| colors[n + w] == colors[v]).expect("balanced")).collect();
        return Some(g.is_automorphism(&perm));
    };
    let fresh = *colors.iter().max().expect("nonempty") + 1;
    for w in (0..n).filter(|&w| colors[n + w] == colors[v]) {
        let mut c = colors.clone();
        c[v] = fresh;
        c[n + w] = fresh;
        if extends(g, c, budget)? {
            return Some(true);
        }
    }
    Some(false)
}

/// Order of the automorphism group, as a product of orbit lengths along a
/// stabilizer chain. `None` if the search budget runs out.
pub fn automorphism_order(g: &Graph) -> Option<u128> {
    let n = g.order();
    let mut budget: u64 = 1_000_000;
    let mut order: u128 = 1;
    let mut colors = vec![0u32; 2 * n];
    for v in 0..n {
        refine(g, &mut colors);
        let fresh = *colors.iter().max().expect("nonempty") + 1;
        let mut orbit = 0u128;
        for w in (0..n).filter(|&w| colors[n + w] == colors[v]) {
            let mut c = colors.clone();
            c[v] = fresh;
            c[n + w] = fresh;
            if extends(g, c, &mut budget)? {
                orbit += 1;
            }
        }
        order *= orbit;
        colors[v] = fresh;
        colors[n + v] = fresh;
    }
    Some(order)
}

/// Outcome of comparing the group with the vertex stabilizer.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub image_order: usize,
    pub image_in_aut: bool,
    pub fixes_s0: bool,
    pub matches_form_action: bool,
    pub extended_order: usize,
    pub extended_in_aut: bool,
    pub all_positive: bool,
    pub extra_non_positive: bool,
}

impl StabilizerReport {
    pub fn ok(&self) -> bool {
        self.image_order == 5040
            && self.image_in_aut
            && self.fixes_s0
            && self.matches_form_action
            && self.extended_order == 40320
            && self.extended_in_aut
            && self.all_positive
            && self.extra_non_positive
    }
}

/// Vertex permutation of the graph induced by a permutation of `{1..7}`
/// extended by `0 -> 0`.
fn vertex_perm(graph: &Graph, sigma: &[u8; 7]) -> Vec<usize> {
    let full = |x: u8| if x == 0 { 0 } else { sigma[x as usize - 1] + 1 };
    graph.vertices.iter().map(|&(a, b)| graph.index_of((full(a), full(b))).expect("2-subset")).collect()
}

pub fn stabilizer_check() -> StabilizerReport {
    let graph = build_g8();
    let mut images: HashSet<Vec<usize>> = HashSet::new();
    let mut image_in_aut = true;
    let mut fixes_s0 = true;
    let mut matches_form_action = true;
    for g in &group().elements {
        let Ok(sigma) = perm_rep(g) else {
            image_in_aut = false;
            continue;
        };
        let vp = vertex_perm(&graph, &sigma);
        image_in_aut &= graph.is_automorphism(&vp);
        fixes_s0 &= (0..graph.order())
            .all(|v| (graph.vertices[v].0 == 0) == (graph.vertices[vp[v]].0 == 0));
        // h_i o g = h_j with vertex(h_j) = sigma^-1(vertex(h_i))
        match form_action(g, &HYPERPLANES) {
            Some(act) => {
                for (i, &(j, sign)) in act.iter().enumerate() {
                    matches_form_action &= sign == 1 && vp[table_vertex(&graph, j + 1)] == table_vertex(&graph, i + 1);
                }
            }
            None => matches_form_action = false,
        }
        images.insert(vp);
    }

    // extended group through its permutation of the hyperplanes
    let to_vertex_perm = |p: &[u8]| -> Option<Vec<usize>> {
        if p[28] != 28 {
            return None;
        }
        let mut vp = vec![0; 28];
        for i in 0..28 {
            vp[table_vertex(&graph, i + 1)] = table_vertex(&graph, p[i] as usize + 1);
        }
        Some(vp)
    };
    let mut gens: Vec<Vec<u8>> = generators().iter().filter_map(hyperplane_permutation).collect();
    gens.extend(hyperplane_permutation(&extra_automorphism()));
    let ext = perm_closure(&gens);
    let extended_in_aut =
        ext.iter().all(|p| to_vertex_perm(p).is_some_and(|vp| graph.is_automorphism(&vp)));

    StabilizerReport {
        image_order: images.len(),
        image_in_aut,
        fixes_s0,
        matches_form_action,
        extended_order: ext.len(),
        extended_in_aut,
        all_positive: group().elements.iter().all(|g| g.is_positive()),
        extra_non_positive: !extra_automorphism().is_positive(),
    }
}
