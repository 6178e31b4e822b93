//! Quantum symmetrizers and graded dimensions of Nichols algebras.
//!
//! `dim 𝔅ⁿ(V)` is the rank of `𝔖_n = Σ_{σ ∈ 𝕊_n} 𝒯(σ)` on `V^{⊗n}`. Ranks are
//! computed from the image recursion
//! `Im 𝔖_n = (id + c_{n−1} + c_{n−2}c_{n−1} + … + c_1⋯c_{n−1})(Im 𝔖_{n−1} ⊗ V)`,
//! split into blocks by braid-group orbits of words.

mod field;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{prime_fields, CycField, Field, PrimeField};

use crate::braided::ConcreteBraiding;
use crate::permkit::Permutation;
use crate::scalars::Cyc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NicholsError {
    #[error("degree {degree} needs {required} basis words, budget is {budget}")]
    BudgetExceeded { degree: usize, required: u128, budget: u128 },
    #[error("no usable prime p ≡ 1 mod {0} found")]
    NoPrime(u64),
    #[error("a coefficient is not defined over the chosen field")]
    NotEmbeddable,
    #[error("braided spaces have different dimensions {0} and {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Exact,
    Modular,
}

#[derive(Clone, Debug)]
pub struct NicholsOptions {
    pub cutoff: usize,
    pub mode: RankMode,
    /// Largest admissible `dim(V)ⁿ`.
    pub max_words: u128,
    /// Primes used for agreement in modular mode.
    pub primes: usize,
}

impl Default for NicholsOptions {
    fn default() -> Self {
        Self { cutoff: 8, mode: RankMode::Modular, max_words: 1 << 22, primes: 2 }
    }
}

impl NicholsOptions {
    pub fn exact(cutoff: usize) -> Self {
        Self { cutoff, mode: RankMode::Exact, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certification {
    Exact,
    Modular { primes: Vec<u64> },
}

/// Graded dimensions `dim 𝔅ⁿ(V)` for `n = 0..=cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertData {
    pub dims: Vec<usize>,
    /// Present iff some graded dimension reached zero within the cutoff.
    pub total: Option<usize>,
    pub certification: Certification,
}

impl HilbertData {
    fn new(mut dims: Vec<usize>, cutoff: usize, certification: Certification) -> Self {
        let finite = dims.contains(&0);
        dims.resize(cutoff + 1, 0);
        let total = finite.then(|| dims.iter().sum());
        Self { dims, total, certification }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_some()
    }

    /// `1 + d₁ t + d₂ t² + …` up to the cutoff.
    pub fn series(&self) -> String {
        let mut parts = Vec::new();
        for (n, &d) in self.dims.iter().enumerate() {
            if d == 0 {
                continue;
            }
            parts.push(match (n, d) {
                (0, _) => d.to_string(),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{d}t"),
                (_, 1) => format!("t^{n}"),
                _ => format!("{d}t^{n}"),
            });
        }
        let mut s = parts.join(" + ");
        if self.total.is_none() {
            s.push_str(" + …");
        }
        s
    }
}

type SparseVec<E> = Vec<(usize, E)>;

/// Words of length `n` over `m` letters, position 0 most significant.
struct WordSpace<'a> {
    m: usize,
    n: usize,
    /// `targets[a·m + b] = σ_a(b)·m + τ_b(a)`.
    targets: &'a [usize],
    powers: Vec<usize>,
}

impl<'a> WordSpace<'a> {
    fn new(m: usize, n: usize, targets: &'a [usize]) -> Self {
        let mut powers = vec![1usize; n];
        for p in (0..n.saturating_sub(1)).rev() {
            powers[p] = powers[p + 1] * m;
        }
        Self { m, n, targets, powers }
    }

    fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    /// `c` at positions `(p, p+1)`: the new word and the coefficient index.
    fn step(&self, word: usize, p: usize) -> (usize, usize) {
        let (hi, lo) = (self.powers[p], self.powers[p + 1]);
        let a = word / hi % self.m;
        let b = word / lo % self.m;
        let k = a * self.m + b;
        let t = self.targets[k];
        let (a2, b2) = (t / self.m, t % self.m);
        (word - a * hi - b * lo + a2 * hi + b2 * lo, k)
    }

    /// Orbit label of every word under the generators `c_1, .., c_{n−1}`.
    fn orbits(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for w in 0..self.len() {
            for p in 0..self.n.saturating_sub(1) {
                let (v, _) = self.step(w, p);
                let (a, b) = (find(&mut parent, w), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.len()).map(|w| find(&mut parent, w)).collect()
    }
}

fn targets(b: &ConcreteBraiding) -> Vec<usize> {
    let m = b.dim();
    (0..m * m)
        .map(|k| {
            let (a, c) = b.solution().apply(k / m, k % m);
            a * m + c
        })
        .collect()
}

fn embed_coeffs<F: Field>(f: &F, b: &ConcreteBraiding) -> Result<Vec<F::Elem>, NicholsError> {
    b.coeffs()
        .iter()
        .map(|c| f.embed(c).filter(|e| !f.is_zero(e)).ok_or(NicholsError::NotEmbeddable))
        .collect()
}

fn check_budget(m: usize, n: usize, budget: u128) -> Result<(), NicholsError> {
    let required = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(NicholsError::BudgetExceeded { degree: n, required, budget });
    }
    Ok(())
}

/// Adds `v` to an echelon basis keyed by leading index; returns whether the
/// rank grew.
fn insert<F: Field>(
    f: &F,
    pivots: &mut HashMap<usize, SparseVec<F::Elem>>,
    v: SparseVec<F::Elem>,
) -> bool {
    let mut acc: BTreeMap<usize, F::Elem> = v.into_iter().filter(|(_, e)| !f.is_zero(e)).collect();
    loop {
        let Some((&lead, coeff)) = acc.iter().next() else { return false };
        let Some(piv) = pivots.get(&lead) else {
            let inv = f.inv(coeff);
            let normalized = acc.into_iter().map(|(k, e)| (k, f.mul(&e, &inv))).collect();
            pivots.insert(lead, normalized);
            return true;
        };
        let scale = coeff.clone();
        for (k, e) in piv {
            let d = f.mul(&scale, e);
            let slot = acc.entry(*k).or_insert_with(|| f.zero());
            *slot = f.sub(slot, &d);
            if f.is_zero(slot) {
                acc.remove(k);
            }
        }
    }
}

fn echelon<F: Field>(f: &F, vectors: Vec<SparseVec<F::Elem>>) -> Vec<SparseVec<F::Elem>> {
    let mut pivots = HashMap::new();
    for v in vectors {
        insert(f, &mut pivots, v);
    }
    let mut out: Vec<_> = pivots.into_iter().collect();
    out.sort_by_key(|(k, _)| *k);
    out.into_iter().map(|(_, v)| v).collect()
}

/// Rank of the matrix with the given sparse columns.
pub fn rank<F: Field>(f: &F, columns: &[SparseVec<F::Elem>]) -> usize {
    echelon(f, columns.to_vec()).len()
}

/// Applies `id + c_{n−1} + c_{n−2}c_{n−1} + … + c_1⋯c_{n−1}` to `v`.
fn apply_coset_sum<F: Field>(
    f: &F,
    space: &WordSpace,
    coeffs: &[F::Elem],
    v: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
    let add = |acc: &mut BTreeMap<usize, F::Elem>, t: &SparseVec<F::Elem>| {
        for (w, e) in t {
            let slot = acc.entry(*w).or_insert_with(|| f.zero());
            *slot = f.add(slot, e);
        }
    };
    add(&mut acc, v);
    let mut t = v.clone();
    for p in (0..space.n - 1).rev() {
        for (w, e) in t.iter_mut() {
            let (w2, k) = space.step(*w, p);
            *w = w2;
            *e = f.mul(e, &coeffs[k]);
        }
        add(&mut acc, &t);
    }
    acc.into_iter().filter(|(_, e)| !f.is_zero(e)).collect()
}

/// `dim 𝔅ⁿ` for `n = 0..=cutoff` over the field `f`, stopping at the first zero.
pub fn graded_dims_over<F: Field>(
    f: &F,
    b: &ConcreteBraiding,
    cutoff: usize,
    max_words: u128,
) -> Result<Vec<usize>, NicholsError> {
    let m = b.dim();
    let coeffs = embed_coeffs(f, b)?;
    let tg = targets(b);
    let mut dims = vec![1];
    if cutoff == 0 {
        return Ok(dims);
    }
    let one = f.embed(&Cyc::one(1)).ok_or(NicholsError::NotEmbeddable)?;
    let mut basis: Vec<SparseVec<F::Elem>> = (0..m).map(|x| vec![(x, one.clone())]).collect();
    dims.push(m);
    for n in 2..=cutoff {
        if basis.is_empty() {
            break;
        }
        check_budget(m, n, max_words)?;
        let space = WordSpace::new(m, n, &tg);
        let orbit = space.orbits();
        let candidates: Vec<SparseVec<F::Elem>> = basis
            .par_iter()
            .flat_map_iter(|v| {
                let space = &space;
                let coeffs = &coeffs;
                (0..m).map(move |x| {
                    let lifted = v.iter().map(|(w, e)| (w * m + x, e.clone())).collect();
                    apply_coset_sum(f, space, coeffs, &lifted)
                })
            })
            .filter(|v| !v.is_empty())
            .collect();
        let mut blocks: BTreeMap<usize, Vec<SparseVec<F::Elem>>> = BTreeMap::new();
        for v in candidates {
            blocks.entry(orbit[v[0].0]).or_default().push(v);
        }
        let reduced: Vec<Vec<SparseVec<F::Elem>>> =
            blocks.into_values().collect::<Vec<_>>().into_par_iter().map(|vs| echelon(f, vs)).collect();
        basis = reduced.into_iter().flatten().collect();
        dims.push(basis.len());
    }
    Ok(dims)
}

/// Graded dimensions of `𝔅(V)` up to `opts.cutoff`.
pub fn graded_dims(b: &ConcreteBraiding, opts: &NicholsOptions) -> Result<HilbertData, NicholsError> {
    let order = b.field_order();
    if opts.mode == RankMode::Exact {
        let dims = graded_dims_over(&CycField::new(order), b, opts.cutoff, opts.max_words)?;
        return Ok(HilbertData::new(dims, opts.cutoff, Certification::Exact));
    }
    let mut fields = prime_fields(order).filter(|f| embed_coeffs(f, b).is_ok());
    let wanted = opts.primes.max(2);
    let mut runs: Vec<(u64, Vec<usize>)> = Vec::new();
    for _ in 0..wanted {
        let f = fields.next().ok_or(NicholsError::NoPrime(order))?;
        runs.push((f.prime(), graded_dims_over(&f, b, opts.cutoff, opts.max_words)?));
    }
    if runs.iter().all(|r| r.1 == runs[0].1) {
        let (primes, dims): (Vec<u64>, Vec<Vec<usize>>) = runs.into_iter().unzip();
        return Ok(HilbertData::new(dims[0].clone(), opts.cutoff, Certification::Modular { primes }));
    }
    let f = fields.next().ok_or(NicholsError::NoPrime(order))?;
    runs.push((f.prime(), graded_dims_over(&f, b, opts.cutoff, opts.max_words)?));
    // reduction mod p can only lower a rank: trust the largest profile seen twice
    let best = runs.iter().map(|r| r.1.clone()).max().expect("nonempty");
    let agreeing: Vec<u64> = runs.iter().filter(|r| r.1 == best).map(|r| r.0).collect();
    if agreeing.len() >= 2 {
        return Ok(HilbertData::new(best, opts.cutoff, Certification::Modular { primes: agreeing }));
    }
    graded_dims(b, &NicholsOptions { mode: RankMode::Exact, ..opts.clone() })
}

/// Whether the two Nichols algebras have equal graded dimensions through `cutoff`.
pub fn compare_graded(
    b1: &ConcreteBraiding,
    b2: &ConcreteBraiding,
    opts: &NicholsOptions,
) -> Result<bool, NicholsError> {
    if b1.dim() != b2.dim() {
        return Err(NicholsError::DimensionMismatch(b1.dim(), b2.dim()));
    }
    let (h1, h2) = rayon::join(|| graded_dims(b1, opts), || graded_dims(b2, opts));
    Ok(h1?.dims == h2?.dims)
}

/// The expansion `𝔖_n = (𝔖_{n−1} ⊗ id)·(id + c_{n−1} + c_{n−1}c_{n−2} + … + c_{n−1}⋯c_1)`
/// into one reduced word per permutation.
#[derive(Clone, Debug)]
pub struct SymmetrizerPlan {
    degree: usize,
}

impl SymmetrizerPlan {
    pub fn new(degree: usize) -> Self {
        Self { degree: degree.max(1) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Reduced words in the generators `1..n−1`; the word `[i₁, .., i_k]`
    /// stands for `c_{i₁}⋯c_{i_k}`.
    pub fn words(&self) -> Vec<Vec<usize>> {
        let mut words = vec![Vec::new()];
        for n in 2..=self.degree {
            let mut next = Vec::with_capacity(words.len() * n);
            for w in &words {
                for k in (1..=n).rev() {
                    let mut word = w.clone();
                    word.extend((k..n).rev());
                    next.push(word);
                }
            }
            words = next;
        }
        words
    }

    /// The permutation `s_{i₁}⋯s_{i_k}` of a word.
    pub fn permutation(&self, word: &[usize]) -> Permutation {
        word.iter().fold(Permutation::identity(self.degree), |acc, &i| {
            &acc * &Permutation::transposition(self.degree, i - 1, i)
        })
    }
}

/// A sparse operator given by its columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    pub dim: usize,
    pub columns: Vec<SparseVec<Cyc>>,
}

impl SparseOperator {
    pub fn rank(&self) -> usize {
        let order = self
            .columns
            .iter()
            .flatten()
            .fold(1u64, |acc, (_, c)| num_integer::lcm(acc, c.order()));
        rank(&CycField::new(order), &self.columns)
    }
}

/// `𝔖_{n,c}` on `V^{⊗n}`, assembled through the right-coset recursion.
pub fn symmetrizer(b: &ConcreteBraiding, n: usize, max_words: u128) -> Result<SparseOperator, NicholsError> {
    let m = b.dim();
    check_budget(m, n.max(1), max_words)?;
    let order = b.field_order();
    let f = CycField::new(order);
    let coeffs = embed_coeffs(&f, b)?;
    let tg = targets(b);
    let mut columns: Vec<SparseVec<Cyc>> = (0..m).map(|x| vec![(x, Cyc::one(order))]).collect();
    for k in 2..=n {
        let space = WordSpace::new(m, k, &tg);
        let prev = columns;
        columns = (0..space.len())
            .into_par_iter()
            .map(|w| {
                // T_k e_w = Σ_j (c_{k−1}⋯c_j) e_w
                let mut acc: BTreeMap<usize, Cyc> = BTreeMap::new();
                for j in (0..k).rev() {
                    // c_j acts first, c_{k−1} last
                    let mut word = w;
                    let mut scale = Cyc::one(order);
                    for p in j..k - 1 {
                        let (w2, c) = space.step(word, p);
                        word = w2;
                        scale = scale.mul(&coeffs[c]);
                    }
                    for (u, e) in &prev[word / m] {
                        let slot = acc.entry(u * m + word % m).or_insert_with(|| Cyc::zero(order));
                        *slot = slot.add(&e.mul(&scale));
                    }
                }
                acc.into_iter().filter(|(_, e)| !e.is_zero()).collect()
            })
            .collect();
    }
    Ok(SparseOperator { dim: m.pow(n as u32), columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braided::{ConcreteBraiding, MonomialOperator};
    use crate::scalars::parse_value;
    use crate::solutions::{SetSolution, Rack};

    fn diagonal(q: &[&[&str]]) -> ConcreteBraiding {
        let coeffs = q.iter().flat_map(|row| row.iter().map(|v| parse_value(v).unwrap())).collect();
        ConcreteBraiding::new(SetSolution::flip(q.len()), coeffs).unwrap()
    }

    /// The 2-dim diagonal braiding with `q₁₁ = q₂₂ = b`, `q₁₂ = a`, `q₂₁ = e`.
    fn two_dim(a: &str, b: &str, e: &str) -> ConcreteBraiding {
        diagonal(&[&[b, a], &[e, b]])
    }

    #[test]
    fn plan_expands_to_every_permutation_once() {
        for n in 1..=6 {
            let plan = SymmetrizerPlan::new(n);
            let words = plan.words();
            assert_eq!(words.len(), (1..=n).product::<usize>());
            let mut seen = std::collections::HashSet::new();
            for w in &words {
                let p = plan.permutation(w);
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p.apply(i) > p.apply(j))
                    .count();
                assert_eq!(w.len(), inversions, "word {w:?} is not reduced");
                assert!(seen.insert(p.images().to_vec()));
            }
        }
    }

    #[test]
    fn rank_one_at_cube_root() {
        let b = diagonal(&[&["zeta3"]]);
        let h = graded_dims(&b, &NicholsOptions::exact(8)).unwrap();
        assert_eq!(&h.dims[..4], &[1, 1, 1, 0]);
        assert_eq!(h.total, Some(3));
        let h = graded_dims(&diagonal(&[&["2"]]), &NicholsOptions::exact(5)).unwrap();
        assert_eq!(h.total, None);
    }

    #[test]
    fn two_dim_table() {
        let exact = NicholsOptions::exact(12);
        let a2 = two_dim("zeta3^2", "zeta3", "1");
        assert_eq!(graded_dims(&a2, &exact).unwrap().total, Some(27));
        let super_a2 = two_dim("zeta3", "-1", "1");
        assert_eq!(graded_dims(&super_a2, &exact).unwrap().total, Some(12));
        let quantum_plane = two_dim("1", "zeta4", "1");
        assert_eq!(graded_dims(&quantum_plane, &exact).unwrap().total, Some(16));
    }

    #[test]
    fn modular_agrees_with_exact() {
        let b = two_dim("zeta5", "-1", "1");
        let exact = graded_dims(&b, &NicholsOptions::exact(8)).unwrap();
        let modular = graded_dims(&b, &NicholsOptions { cutoff: 8, ..Default::default() }).unwrap();
        assert_eq!(exact.dims, modular.dims);
        assert!(matches!(modular.certification, Certification::Modular { ref primes } if primes.len() == 2));
    }

    #[test]
    fn symmetrizer_rank_matches_image_recursion() {
        let d3 = ConcreteBraiding::new(
            Rack::dihedral(3).to_solution(),
            vec![parse_value("-1").unwrap(); 9],
        )
        .unwrap();
        let dims = graded_dims_over(&CycField::new(1), &d3, 4, 1 << 20).unwrap();
        for (n, &d) in dims.iter().enumerate().skip(1) {
            assert_eq!(symmetrizer(&d3, n, 1 << 20).unwrap().rank(), d, "degree {n}");
        }
        assert_eq!(dims, vec![1, 3, 4, 3, 1]);
    }

    #[test]
    fn small_symmetrizers() {
        let b = two_dim("2", "zeta3", "-1");
        let s1 = symmetrizer(&b, 1, 100).unwrap();
        assert_eq!(s1.columns, (0..2).map(|x| vec![(x, Cyc::one(3))]).collect::<Vec<_>>());
        let s2 = symmetrizer(&b, 2, 100).unwrap();
        let c = b.braiding_operator();
        for w in 0..4 {
            let mut expected = vec![(w, Cyc::one(3)), (c.targets[w], c.scalars[w].clone())];
            expected.sort_by_key(|e| e.0);
            if expected[0].0 == expected[1].0 {
                expected = vec![(w, Cyc::one(3).add(&c.scalars[w]))];
            }
            expected.retain(|e| !e.1.is_zero());
            assert_eq!(s2.columns[w], expected);
        }
        let _ = MonomialOperator::<Cyc>::identity(1);
    }

    #[test]
    fn budget_is_enforced() {
        let b = two_dim("1", "2", "1");
        let err = graded_dims(&b, &NicholsOptions { cutoff: 10, max_words: 100, ..NicholsOptions::exact(10) });
        assert!(matches!(err, Err(NicholsError::BudgetExceeded { degree: 7, .. })));
    }
}
