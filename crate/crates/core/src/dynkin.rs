//! Generalized Dynkin diagrams of diagonal braidings and matching against a
//! fixed catalogue of finite-type diagrams.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braided::{BraidedSpace, Scalar};
use crate::permkit::{all_permutations, Permutation};
use crate::scalars::Cyc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynkinError {
    #[error("the braiding is not of diagonal type")]
    NotDiagonal,
    #[error("permutation of degree {got} on a diagram with {expected} vertices")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("edge ({}, {}) is invalid", .0 + 1, .1 + 1)]
    BadEdge(usize, usize),
}

/// Vertices labelled `q_ii`, an edge `{i, j}` labelled `q̃_ij = q_ij q_ji` whenever `q̃_ij ≠ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gdd<S> {
    vertices: Vec<S>,
    edges: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> Gdd<S> {
    /// Edges labelled `1` are dropped.
    pub fn new(vertices: Vec<S>, edges: Vec<(usize, usize, S)>) -> Result<Self, DynkinError> {
        let n = vertices.len();
        let mut map = BTreeMap::new();
        for (i, j, label) in edges {
            if i == j || i >= n || j >= n {
                return Err(DynkinError::BadEdge(i, j));
            }
            if !label.is_one() {
                map.insert((i.min(j), i.max(j)), label);
            }
        }
        Ok(Self { vertices, edges: map })
    }

    /// The diagram of the table `q[i][j]`.
    pub fn from_table(q: &[Vec<S>]) -> Self {
        let n = q.len();
        let vertices = (0..n).map(|i| q[i][i].clone()).collect();
        let mut edges = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let t = q[i][j].mul(&q[j][i]);
                if !t.is_one() {
                    edges.insert((i, j), t);
                }
            }
        }
        Self { vertices, edges }
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &S {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[S] {
        &self.vertices
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&S> {
        self.edges.get(&(i.min(j), i.max(j)))
    }

    /// `q̃_ij`, which is `1` for non-adjacent vertices.
    pub fn tilde(&self, i: usize, j: usize) -> S {
        self.edge(i, j).cloned().unwrap_or_else(S::one)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.edges.iter().map(|(&(i, j), s)| (i, j, s))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.size()).filter(|&j| j != i && self.edge(i, j).is_some()).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).len()
    }

    pub fn is_connected(&self) -> bool {
        if self.size() == 0 {
            return true;
        }
        let mut seen = vec![false; self.size()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The diagram with vertex `i` renamed `perm(i)`.
    pub fn relabel(&self, perm: &Permutation) -> Result<Self, DynkinError> {
        if perm.degree() != self.size() {
            return Err(DynkinError::DegreeMismatch { expected: self.size(), got: perm.degree() });
        }
        let mut vertices = self.vertices.clone();
        for (i, v) in self.vertices.iter().enumerate() {
            vertices[perm.apply(i)] = v.clone();
        }
        let edges = self.edges().map(|(i, j, s)| (perm.apply(i), perm.apply(j), s.clone())).collect();
        Self::new(vertices, edges)
    }

    /// Vertices in path order if the diagram is a path, starting at the
    /// smaller-numbered end.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        let n = self.size();
        if n == 0 || self.edge_count() != n - 1 || !self.is_connected() {
            return None;
        }
        if n == 1 {
            return Some(vec![0]);
        }
        let start = (0..n).find(|&i| self.degree(i) == 1)?;
        if (0..n).any(|i| self.degree(i) > 2) {
            return None;
        }
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(next) = self.neighbors(cur).into_iter().find(|&w| w != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

/// The diagram of a diagonal braiding.
pub fn gdd<S: Scalar>(b: &BraidedSpace<S>) -> Result<Gdd<S>, DynkinError> {
    let q = b.diagonal_table().ok_or(DynkinError::NotDiagonal)?;
    Ok(Gdd::from_table(&q))
}

/// Whether `q_ii = q_{τ(i)τ(i)}` and `q̃_ij = q̃_{τ(i)τ(j)}` for all `i, j`,
/// comparing labels with `eq`.
pub fn check_tau_symmetry_with<S: Scalar>(
    g: &Gdd<S>,
    tau: &Permutation,
    eq: impl Fn(&S, &S) -> bool,
) -> Result<bool, DynkinError> {
    let n = g.size();
    if tau.degree() != n {
        return Err(DynkinError::DegreeMismatch { expected: n, got: tau.degree() });
    }
    let vertices = (0..n).all(|i| eq(g.vertex(i), g.vertex(tau.apply(i))));
    let edges = (0..n).all(|i| (i + 1..n).all(|j| eq(&g.tilde(i, j), &g.tilde(tau.apply(i), tau.apply(j)))));
    Ok(vertices && edges)
}

pub fn check_tau_symmetry<S: Scalar>(g: &Gdd<S>, tau: &Permutation) -> Result<bool, DynkinError> {
    check_tau_symmetry_with(g, tau, |a, b| a == b)
}

/// A vertex `k` adjacent to both `i` and `τ(i) ≠ i` with `τ(k) ≠ k`. For a
/// τ-symmetric diagram this gives the 4-cycle `k, i, τ(k), τ(i)`, which rules
/// out a finite-dimensional Nichols algebra. Returns `(k, i)`.
pub fn tau_square<S: Scalar>(g: &Gdd<S>, tau: &Permutation) -> Option<(usize, usize)> {
    let n = g.size();
    for i in 0..n {
        let ti = tau.apply(i);
        if ti == i {
            continue;
        }
        for k in 0..n {
            if k != i && k != ti && tau.apply(k) != k && g.edge(k, i).is_some() && g.edge(k, ti).is_some() {
                return Some((k, i));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Ascii,
    Dot,
}

/// Deterministic text rendering; vertices are numbered from 1.
pub fn render<S: Scalar>(g: &Gdd<S>, format: RenderFormat) -> String {
    let mut out = String::new();
    match format {
        RenderFormat::Ascii => {
            for (i, v) in g.vertices.iter().enumerate() {
                out.push_str(&format!("({}) {}\n", i + 1, v.label()));
            }
            for (i, j, s) in g.edges() {
                out.push_str(&format!("({}) --[{}]-- ({})\n", i + 1, s.label(), j + 1));
            }
        }
        RenderFormat::Dot => {
            out.push_str("graph gdd {\n");
            for (i, v) in g.vertices.iter().enumerate() {
                out.push_str(&format!("  v{} [label=\"{}\"];\n", i + 1, escape(&v.label())));
            }
            for (i, j, s) in g.edges() {
                out.push_str(&format!("  v{} -- v{} [label=\"{}\"];\n", i + 1, j + 1, escape(&s.label())));
            }
            out.push_str("}\n");
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A matched catalogue entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeLabel {
    pub family: String,
    pub rank: usize,
    pub params: BTreeMap<String, String>,
    pub predicted_dim: Option<u64>,
}

impl TypeLabel {
    fn new(family: &str, rank: usize) -> Self {
        Self { family: family.into(), rank, params: BTreeMap::new(), predicted_dim: None }
    }

    fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

impl std::fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (rank {})", self.family, self.rank)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        if let Some(d) = self.predicted_dim {
            write!(f, " dim={d}")?;
        }
        Ok(())
    }
}

fn minus_one() -> Cyc {
    Cyc::from_int(1, -1)
}

fn order_of(c: &Cyc) -> Option<u64> {
    c.root_order()
}

/// Label of a template entry as a function of the parameter.
#[derive(Clone, Copy, Debug)]
enum L {
    MinusOne,
    /// `param^k`
    P(i64),
    /// `−param^k`
    NegP(i64),
}

impl L {
    fn eval(self, param: &Cyc) -> Cyc {
        match self {
            L::MinusOne => minus_one(),
            L::P(k) => param.pow(k).expect("nonzero parameter"),
            L::NegP(k) => param.pow(k).expect("nonzero parameter").neg(),
        }
    }

    /// The parameter determined by a label value, for `±1` exponents.
    fn solve(self, value: &Cyc) -> Option<Cyc> {
        match self {
            L::P(1) => Some(value.clone()),
            L::P(-1) => value.inv().ok(),
            L::NegP(1) => Some(value.neg()),
            L::NegP(-1) => value.neg().inv().ok(),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum ParamRule {
    /// Primitive root of unity of exactly this order.
    OrderIs(u64),
    /// Root of unity of order greater than the bound.
    OrderAbove(u64),
}

impl ParamRule {
    fn holds(self, c: &Cyc) -> bool {
        match (self, order_of(c)) {
            (ParamRule::OrderIs(d), Some(o)) => o == d,
            (ParamRule::OrderAbove(d), Some(o)) => o > d,
            _ => false,
        }
    }
}

struct Template {
    family: &'static str,
    param: &'static str,
    vertices: Vec<L>,
    edges: Vec<(usize, usize, L)>,
    rule: ParamRule,
}

fn catalogue() -> Vec<Template> {
    use L::*;
    vec![
        Template {
            family: "triangle",
            param: "q",
            vertices: vec![MinusOne, MinusOne, P(1)],
            edges: vec![(0, 1, P(2)), (0, 2, P(-1)), (1, 2, P(-1))],
            rule: ParamRule::OrderAbove(2),
        },
        Template {
            family: "D(2,1)",
            param: "q",
            vertices: vec![P(1), MinusOne, P(1)],
            edges: vec![(0, 1, P(-1)), (1, 2, P(-1))],
            rule: ParamRule::OrderAbove(2),
        },
        Template {
            family: "D(2,1)",
            param: "q",
            vertices: vec![MinusOne, MinusOne, MinusOne],
            edges: vec![(0, 1, P(2)), (0, 2, P(-1)), (1, 2, P(-1))],
            rule: ParamRule::OrderAbove(2),
        },
        Template {
            family: "g(2,3)",
            param: "zeta",
            vertices: vec![MinusOne, MinusOne, MinusOne],
            edges: vec![(0, 1, P(1)), (1, 2, P(1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(2,3)",
            param: "zeta",
            vertices: vec![MinusOne, NegP(-1), MinusOne],
            edges: vec![(0, 1, P(-1)), (1, 2, P(-1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(2,3)",
            param: "zeta",
            vertices: vec![P(1), P(1), MinusOne],
            edges: vec![(0, 1, P(-1)), (0, 2, P(-1)), (1, 2, P(-1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(3,3)",
            param: "zeta",
            vertices: vec![P(-1), P(1), MinusOne, MinusOne],
            edges: vec![(0, 1, P(1)), (1, 2, P(-1)), (1, 3, P(-1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(3,3)",
            param: "zeta",
            vertices: vec![P(-1), P(-1), MinusOne, MinusOne],
            edges: vec![(0, 1, P(1)), (1, 2, P(1)), (1, 3, P(1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(2,6)",
            param: "zeta",
            vertices: vec![P(1), MinusOne, MinusOne, P(1), MinusOne],
            edges: vec![(0, 1, P(-1)), (1, 2, P(1)), (2, 3, P(-1)), (1, 4, P(1)), (2, 4, P(1))],
            rule: ParamRule::OrderIs(3),
        },
        Template {
            family: "g(2,6)",
            param: "zeta",
            vertices: vec![P(1), P(1), MinusOne, P(1), P(1)],
            edges: vec![(0, 1, P(-1)), (1, 2, P(-1)), (2, 3, P(-1)), (3, 4, P(-1))],
            rule: ParamRule::OrderIs(3),
        },
    ]
}

fn match_template(g: &Gdd<Cyc>, t: &Template) -> Option<TypeLabel> {
    let n = t.vertices.len();
    if g.size() != n || g.edge_count() != t.edges.len() {
        return None;
    }
    let mut tmpl_edges = BTreeMap::new();
    for &(i, j, l) in &t.edges {
        tmpl_edges.insert((i, j), l);
    }
    for perm in all_permutations(n) {
        // template vertex a sits at graph vertex perm(a)
        let at = |a: usize| perm.apply(a);
        let mut param = None;
        for (a, l) in t.vertices.iter().enumerate() {
            param = param.or_else(|| l.solve(g.vertex(at(a))));
        }
        for (&(a, b), l) in &tmpl_edges {
            param = param.or_else(|| g.edge(at(a), at(b)).and_then(|v| l.solve(v)));
        }
        let Some(param) = param else { continue };
        if !t.rule.holds(&param) {
            continue;
        }
        let vertices_ok = t.vertices.iter().enumerate().all(|(a, l)| *g.vertex(at(a)) == l.eval(&param));
        let edges_ok = tmpl_edges
            .iter()
            .all(|(&(a, b), l)| g.edge(at(a), at(b)).is_some_and(|v| *v == l.eval(&param)));
        if vertices_ok && edges_ok {
            return Some(TypeLabel::new(t.family, n).with(t.param, param.to_text()));
        }
    }
    None
}

/// Checks the defining clauses of `A_n(q; J)` along the path `order`;
/// returns `(q, J)` with `J` as 1-based path positions.
fn a_type(g: &Gdd<Cyc>, order: &[usize]) -> Option<(Cyc, BTreeSet<usize>)> {
    let n = order.len();
    if n < 2 {
        return None;
    }
    let qv = |k: usize| g.vertex(order[k]).clone();
    let e = |k: usize| g.tilde(order[k], order[k + 1]);
    let q = qv(n - 1).mul(&qv(n - 1)).mul(&e(n - 2));
    if q.is_one() || q == minus_one() {
        return None;
    }
    let mut j = BTreeSet::new();
    for k in 0..n {
        let inv = qv(k).inv().ok()?;
        let left_ok = k == 0 || e(k - 1) == inv;
        let right_ok = k == n - 1 || e(k) == inv;
        if left_ok && right_ok {
            continue;
        }
        let balanced = k == 0 || k == n - 1 || e(k - 1).mul(&e(k)).is_one();
        if qv(k) == minus_one() && balanced {
            j.insert(k + 1);
        } else {
            return None;
        }
    }
    Some((q, j))
}

fn is_symmetric_super(g: &Gdd<Cyc>, order: &[usize], j: &BTreeSet<usize>) -> bool {
    let n = order.len();
    let qv = |k: usize| g.vertex(order[k]).clone();
    let e = |k: usize| g.tilde(order[k], order[k + 1]);
    if j.is_empty() {
        return false;
    }
    for k in 1..=n / 2 {
        if qv(k - 1) != qv(n - k) {
            return false;
        }
        if k >= 2 && e(k - 2) != e(n - k - 1) {
            return false;
        }
    }
    if n % 2 == 0 && !j.contains(&(n / 2)) {
        let m = n / 2;
        let mid = qv(m - 1);
        if e(m - 1) != mid.mul(&mid) || qv(m) != mid || order_of(&mid) != Some(3) {
            return false;
        }
    }
    true
}

fn set_text(j: &BTreeSet<usize>) -> String {
    let items: Vec<String> = j.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn a_labels(g: &Gdd<Cyc>) -> Vec<TypeLabel> {
    let Some(order) = g.path_order() else { return Vec::new() };
    let mut out = Vec::new();
    let reversed: Vec<usize> = order.iter().rev().copied().collect();
    for path in [order, reversed] {
        if let Some((q, j)) = a_type(g, &path) {
            let n = path.len();
            let label = if j.is_empty() {
                TypeLabel::new("Cartan A", n).with("q", q.to_text())
            } else {
                let l = TypeLabel::new("super A", n).with("q", q.to_text()).with("J", set_text(&j));
                if is_symmetric_super(g, &path, &j) {
                    l.with("symmetric", "true")
                } else {
                    l
                }
            };
            out.push(label);
        }
    }
    out
}

/// The single vertex of degree 3 and its branches (each a path starting next to the center).
fn branches(g: &Gdd<Cyc>) -> Option<(usize, Vec<Vec<usize>>)> {
    let n = g.size();
    if n < 4 || g.edge_count() != n - 1 || !g.is_connected() {
        return None;
    }
    let centers: Vec<usize> = (0..n).filter(|&i| g.degree(i) >= 3).collect();
    if centers.len() != 1 || g.degree(centers[0]) != 3 {
        return None;
    }
    let c = centers[0];
    let mut out = Vec::new();
    for start in g.neighbors(c) {
        let mut branch = vec![start];
        let (mut prev, mut cur) = (c, start);
        while let Some(next) = g.neighbors(cur).into_iter().find(|&w| w != prev) {
            branch.push(next);
            prev = cur;
            cur = next;
        }
        out.push(branch);
    }
    out.sort_by_key(Vec::len);
    Some((c, out))
}

fn uniform_cartan(g: &Gdd<Cyc>) -> Option<Cyc> {
    let q = g.vertex(0).clone();
    if q.is_one() {
        return None;
    }
    let inv = q.inv().ok()?;
    let ok = g.vertices().iter().all(|v| *v == q) && g.edges().all(|(_, _, s)| *s == inv);
    ok.then_some(q)
}

fn de_labels(g: &Gdd<Cyc>) -> Vec<TypeLabel> {
    let Some((_, br)) = branches(g) else { return Vec::new() };
    let lens: Vec<usize> = br.iter().map(Vec::len).collect();
    let family = match lens.as_slice() {
        [1, 1, _] => "Cartan D",
        [1, 2, 2] => "Cartan E",
        _ => return Vec::new(),
    };
    match uniform_cartan(g) {
        Some(q) => vec![TypeLabel::new(family, g.size()).with("q", q.to_text())],
        None => Vec::new(),
    }
}

/// The two super-type `D_n` shapes: a super `A_{n−2}` path whose end carries
/// two extra vertices.
fn super_d_labels(g: &Gdd<Cyc>) -> Vec<TypeLabel> {
    let n = g.size();
    if n < 4 || !g.is_connected() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for c in 0..n {
        let nb = g.neighbors(c);
        for (a, &u) in nb.iter().enumerate() {
            for &w in &nb[a + 1..] {
                let rest: Vec<usize> = (0..n).filter(|&x| x != u && x != w).collect();
                let joined = g.edge(u, w).is_some();
                if g.neighbors(u).iter().any(|&x| x != c && x != w) || g.neighbors(w).iter().any(|&x| x != c && x != u) {
                    continue;
                }
                let cu = g.tilde(c, u);
                let (q, path_param) = if joined {
                    let Ok(q) = cu.inv() else { continue };
                    let ok = *g.vertex(u) == minus_one()
                        && *g.vertex(w) == minus_one()
                        && g.tilde(c, w) == cu
                        && g.tilde(u, w) == q.mul(&q);
                    if !ok {
                        continue;
                    }
                    (q.clone(), q)
                } else {
                    let q = cu.clone();
                    let Ok(qinv) = q.inv() else { continue };
                    let ok = *g.vertex(u) == qinv && *g.vertex(w) == qinv && g.tilde(c, w) == q;
                    if !ok {
                        continue;
                    }
                    (q, qinv)
                };
                let Ok(sub) = subgraph(g, &rest) else { continue };
                let Some(order) = sub.path_order() else { continue };
                let c_pos = rest.iter().position(|&x| x == c).expect("center kept");
                let order: Vec<usize> = if order.last() == Some(&c_pos) {
                    order
                } else if order.first() == Some(&c_pos) {
                    order.into_iter().rev().collect()
                } else {
                    continue;
                };
                if let Some((pq, j)) = a_type(&sub, &order) {
                    if pq == path_param && !j.is_empty() {
                        out.insert(
                            TypeLabel::new("super D", n)
                                .with("q", q.to_text())
                                .with("J", set_text(&j))
                                .with("shape", if joined { "triangle end" } else { "fork" }),
                        );
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn subgraph(g: &Gdd<Cyc>, keep: &[usize]) -> Result<Gdd<Cyc>, DynkinError> {
    let vertices = keep.iter().map(|&v| g.vertex(v).clone()).collect();
    let mut edges = Vec::new();
    for (a, &x) in keep.iter().enumerate() {
        for (b, &y) in keep.iter().enumerate().skip(a + 1) {
            if let Some(s) = g.edge(x, y) {
                edges.push((a, b, s.clone()));
            }
        }
    }
    Gdd::new(vertices, edges)
}

/// The rank-two table: `27` for `q_ii = b ∈ 𝔾₃′`, `q̃ = b²`; `4m` for
/// `q_ii = −1`, `q̃ ∈ 𝔾_m′`; `m²` for `q̃ = 1`, `q_ii = b ∈ 𝔾_m′`.
fn rank_two_labels(g: &Gdd<Cyc>) -> Vec<TypeLabel> {
    if g.size() != 2 || g.vertex(0) != g.vertex(1) {
        return Vec::new();
    }
    let b = g.vertex(0);
    let t = g.tilde(0, 1);
    let mut out = Vec::new();
    if order_of(b) == Some(3) && t == b.mul(b) {
        let mut l = TypeLabel::new("Cartan A", 2).with("q", b.to_text());
        l.predicted_dim = Some(27);
        out.push(l);
    }
    if *b == minus_one() {
        if let Some(m) = order_of(&t).filter(|&m| m >= 2) {
            let mut l = TypeLabel::new("super A", 2).with("q", t.to_text()).with("J", "{1,2}");
            l.predicted_dim = Some(4 * m);
            out.push(l);
        }
    }
    if t.is_one() {
        if let Some(m) = order_of(b).filter(|&m| m >= 2) {
            let mut l = TypeLabel::new("Cartan A1xA1", 2).with("q", b.to_text());
            l.predicted_dim = Some(m * m);
            out.push(l);
        }
    }
    out
}

/// All catalogue entries matching the diagram; empty means the diagram is
/// not in the catalogue (which says nothing about finiteness).
pub fn classify(g: &Gdd<Cyc>) -> Vec<TypeLabel> {
    let mut out: BTreeSet<TypeLabel> = BTreeSet::new();
    let table = rank_two_labels(g);
    for mut l in a_labels(g) {
        // attach the table's predicted dimension to the matching A-label
        if let Some(t) = table.iter().find(|t| t.family == l.family && t.params.get("q") == l.params.get("q")) {
            l.predicted_dim = t.predicted_dim;
        }
        out.insert(l);
    }
    out.extend(table);
    out.extend(de_labels(g));
    out.extend(super_d_labels(g));
    out.extend(catalogue().iter().filter_map(|t| match_template(g, t)));
    out.into_iter().collect()
}
