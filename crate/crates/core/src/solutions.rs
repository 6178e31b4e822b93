//! Finite set-theoretic solutions of the braid equation, racks and
//! near-rack solutions.
//!
//! A solution on `X = {0, .., n-1}` is stored through its components:
//! `r(i, j) = (σ_i(j), τ_j(i))`.

use std::collections::HashMap;

use thiserror::Error;

use crate::permkit::{involutions, PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("solution must have at least one element")]
    Empty,
    #[error("component tables have inconsistent sizes")]
    Shape,
    #[error("map is degenerate: {0}")]
    Degenerate(String),
    #[error("braid equation fails on ({}, {}, {})", .0 + 1, .1 + 1, .2 + 1)]
    NotBraided(usize, usize, usize),
    #[error("not a near-rack solution: {0}")]
    NotNearRack(String),
    #[error("rack axiom fails: {0}")]
    NotRack(String),
    #[error("tau is incompatible with the rack at ({}, {})", .x + 1, .y + 1)]
    Incompatible { x: usize, y: usize },
    #[error("tau must be an involution different from the identity")]
    BadInvolution,
    #[error("metahomomorphism identity fails at ({}, {})", .x + 1, .y + 1)]
    NotMetahomomorphism { x: usize, y: usize },
    #[error("invalid group table: {0}")]
    BadGroup(String),
    #[error("unit {unit} is not invertible modulo {modulus}")]
    NotInvertible { modulus: usize, unit: usize },
    #[error("elements are not closed under conjugation")]
    NotClosed,
    #[error("no printed case covers ({a}, {b})")]
    Uncovered { a: usize, b: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// A non-degenerate map `r: X×X → X×X`, `r(i, j) = (σ_i(j), τ_j(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetSolution {
    sigma: Vec<Permutation>,
    tau: Vec<Permutation>,
}

impl SetSolution {
    /// Builds a solution from its components. Does not check the braid
    /// equation; see [`SetSolution::is_ybe`] and [`verify`].
    pub fn new(sigma: Vec<Permutation>, tau: Vec<Permutation>) -> Result<Self, SolutionError> {
        let n = sigma.len();
        if n == 0 {
            return Err(SolutionError::Empty);
        }
        if tau.len() != n || sigma.iter().chain(&tau).any(|p| p.degree() != n) {
            return Err(SolutionError::Shape);
        }
        Ok(Self { sigma, tau })
    }

    /// A solution whose right components all equal `tau`.
    pub fn with_constant_tau(sigma: Vec<Permutation>, tau: Permutation) -> Result<Self, SolutionError> {
        let n = sigma.len();
        Self::new(sigma, vec![tau; n])
    }

    /// Builds a solution from the map `r` on 0-based pairs, checking
    /// non-degeneracy.
    pub fn from_fn(
        n: usize,
        r: impl Fn(usize, usize) -> (usize, usize),
    ) -> Result<Self, SolutionError> {
        if n == 0 {
            return Err(SolutionError::Empty);
        }
        let mut sigma_maps = vec![vec![0; n]; n];
        let mut tau_maps = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = r(i, j);
                if a >= n || b >= n {
                    return Err(SolutionError::Degenerate(format!("r({}, {}) leaves X", i + 1, j + 1)));
                }
                sigma_maps[i][j] = a;
                tau_maps[j][i] = b;
            }
        }
        let bij = |maps: Vec<Vec<usize>>, what: &str| -> Result<Vec<Permutation>, SolutionError> {
            maps.into_iter()
                .enumerate()
                .map(|(k, m)| {
                    Permutation::from_images(m).map_err(|_| {
                        SolutionError::Degenerate(format!("{what}_{} is not bijective", k + 1))
                    })
                })
                .collect()
        };
        Ok(Self { sigma: bij(sigma_maps, "sigma")?, tau: bij(tau_maps, "tau")? })
    }

    /// The flip `r(x, y) = (y, x)`.
    pub fn flip(n: usize) -> Self {
        let id = Permutation::identity(n);
        Self { sigma: vec![id.clone(); n], tau: vec![id; n] }
    }

    pub fn size(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self, i: usize) -> &Permutation {
        &self.sigma[i]
    }

    pub fn tau(&self, j: usize) -> &Permutation {
        &self.tau[j]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigma
    }

    pub fn taus(&self) -> &[Permutation] {
        &self.tau
    }

    #[inline]
    pub fn apply(&self, i: usize, j: usize) -> (usize, usize) {
        (self.sigma[i].apply(j), self.tau[j].apply(i))
    }

    /// First triple on which `(r×id)(id×r)(r×id) ≠ (id×r)(r×id)(id×r)`.
    pub fn ybe_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y) = self.apply(a, b);
                    let (y, z) = self.apply(y, c);
                    let (x, y) = self.apply(x, y);
                    let left = (x, y, z);
                    let (y, z) = self.apply(b, c);
                    let (x, y) = self.apply(a, y);
                    let (y, z) = self.apply(y, z);
                    if left != (x, y, z) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_ybe(&self) -> bool {
        self.ybe_witness().is_none()
    }

    pub fn is_involutive(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let (a, b) = self.apply(i, j);
                self.apply(a, b) == (i, j)
            })
        })
    }

    pub fn is_rack_type(&self) -> bool {
        self.tau.iter().all(Permutation::is_identity)
    }

    /// The common right component, if all `τ_j` agree.
    pub fn common_tau(&self) -> Option<&Permutation> {
        let first = &self.tau[0];
        self.tau.iter().all(|t| t == first).then_some(first)
    }

    /// All pairs with `r(x, y) = (x, y)`.
    pub fn fixed_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.apply(x, y) == (x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// The solution `(φ×φ) r (φ×φ)⁻¹`, isomorphic to `self` through `φ`.
    pub fn relabel(&self, phi: &Permutation) -> SetSolution {
        let inv = phi.inverse();
        let n = self.size();
        SetSolution::from_fn(n, |i, j| {
            let (a, b) = self.apply(inv.apply(i), inv.apply(j));
            (phi.apply(a), phi.apply(b))
        })
        .expect("relabeling preserves non-degeneracy")
    }
}

/// Summary of the properties checked by [`verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub is_ybe: bool,
    pub involutive: bool,
    pub rack_type: bool,
    pub near_rack: bool,
    /// 0-based pairs fixed by `r`.
    pub fixed_pairs: Vec<(usize, usize)>,
}

pub fn verify(s: &SetSolution) -> Report {
    let is_ybe = s.is_ybe();
    let near_rack = is_ybe
        && s.common_tau().is_some_and(|t| !t.is_identity() && t.is_involution());
    Report {
        is_ybe,
        involutive: s.is_involutive(),
        rack_type: s.is_rack_type(),
        near_rack,
        fixed_pairs: s.fixed_pairs(),
    }
}

/// A rack given by its operation table `table[i][j] = i ▷ j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rack {
    table: Vec<Vec<usize>>,
}

impl Rack {
    /// Validates bijective rows and self-distributivity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, SolutionError> {
        let n = table.len();
        if n == 0 {
            return Err(SolutionError::Empty);
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(SolutionError::Shape);
            }
            if Permutation::from_images(row.clone()).is_err() {
                return Err(SolutionError::NotRack(format!("row {} is not a bijection", i + 1)));
            }
        }
        let rack = Self { table };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if rack.op(i, rack.op(j, k)) != rack.op(rack.op(i, j), rack.op(i, k)) {
                        return Err(SolutionError::NotRack(format!(
                            "self-distributivity fails at ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(rack)
    }

    /// Builds a rack from a 1-based table as printed in the literature.
    pub fn from_one_based(table: &[Vec<usize>]) -> Result<Self, SolutionError> {
        let n = table.len();
        let mut t = Vec::with_capacity(n);
        for row in table {
            let mut r = Vec::with_capacity(row.len());
            for &v in row {
                if v == 0 || v > n {
                    return Err(PermError::OutOfRange { value: v, degree: n }.into());
                }
                r.push(v - 1);
            }
            t.push(r);
        }
        Self::new(t)
    }

    /// `i ▷ j = j`.
    pub fn trivial(n: usize) -> Self {
        Self { table: vec![(0..n).collect(); n] }
    }

    /// The dihedral quandle `i ▷ j = 2i − j (mod n)`, labels shifted by one.
    pub fn dihedral(n: usize) -> Self {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (2 * i + 2 * n - j) % n).collect())
            .collect();
        Self { table }
    }

    /// The affine rack `a ▷ b = u·b + (1 − u)·a (mod m)`; element `a` gets label `a + 1`.
    pub fn affine(modulus: usize, unit: usize) -> Result<Self, SolutionError> {
        if modulus == 0 || num_integer::gcd(unit % modulus, modulus) != 1 {
            return Err(SolutionError::NotInvertible { modulus, unit });
        }
        let m = modulus as i64;
        let u = unit as i64;
        let table = (0..m)
            .map(|a| (0..m).map(|b| (u * b + (1 - u) * a).rem_euclid(m) as usize).collect())
            .collect();
        Self::new(table)
    }

    /// The conjugation rack `x ▷ y = x y x⁻¹` on the given elements, in the
    /// given order.
    pub fn conjugation(elements: &[Permutation]) -> Result<Self, SolutionError> {
        let index: HashMap<&Permutation, usize> =
            elements.iter().enumerate().map(|(k, p)| (p, k)).collect();
        if index.len() != elements.len() {
            return Err(SolutionError::NotClosed);
        }
        let mut table = Vec::with_capacity(elements.len());
        for x in elements {
            let mut row = Vec::with_capacity(elements.len());
            for y in elements {
                if x.degree() != y.degree() {
                    return Err(PermError::DegreeMismatch(x.degree(), y.degree()).into());
                }
                let c = y.conjugate_by(x);
                row.push(*index.get(&c).ok_or(SolutionError::NotClosed)?);
            }
            table.push(row);
        }
        Self::new(table)
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// The left translation `φ_i = i ▷ -`.
    pub fn translation(&self, i: usize) -> Permutation {
        Permutation::from_images(self.table[i].clone()).expect("rack rows are bijections")
    }

    /// The rack-type solution `r(x, y) = (x ▷ y, x)`.
    pub fn to_solution(&self) -> SetSolution {
        let n = self.size();
        SetSolution {
            sigma: (0..n).map(|i| self.translation(i)).collect(),
            tau: vec![Permutation::identity(n); n],
        }
    }
}

/// A solution whose right components are one involution `τ ≠ id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearRackSolution {
    solution: SetSolution,
    tau: Permutation,
}

impl NearRackSolution {
    /// Checks that `s` satisfies the braid equation and has a common
    /// right component `τ` with `τ² = id ≠ τ`.
    pub fn from_solution(s: SetSolution) -> Result<Self, SolutionError> {
        let tau = s
            .common_tau()
            .ok_or_else(|| SolutionError::NotNearRack("right components differ".into()))?
            .clone();
        if tau.is_identity() || !tau.is_involution() {
            return Err(SolutionError::BadInvolution);
        }
        if let Some((a, b, c)) = s.ybe_witness() {
            return Err(SolutionError::NotBraided(a, b, c));
        }
        Ok(Self { solution: s, tau })
    }

    pub fn from_sigmas(sigma: Vec<Permutation>, tau: Permutation) -> Result<Self, SolutionError> {
        Self::from_solution(SetSolution::with_constant_tau(sigma, tau)?)
    }

    pub fn solution(&self) -> &SetSolution {
        &self.solution
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    pub fn size(&self) -> usize {
        self.solution.size()
    }

    pub fn sigma(&self, x: usize) -> &Permutation {
        self.solution.sigma(x)
    }

    /// The rack `x ▷ y = τ σ_{τ(x)}(y)` of the derived solution.
    pub fn derived_rack(&self) -> Rack {
        let n = self.size();
        let table = (0..n)
            .map(|x| {
                let s = self.sigma(self.tau.apply(x));
                (0..n).map(|y| self.tau.apply(s.apply(y))).collect()
            })
            .collect();
        Rack { table }
    }

    /// Descriptions of every failure among the structural identities of a
    /// near-rack solution: `σ_{σ_x(y)} σ_{τ(x)} = σ_x σ_y`, `τ σ_x = σ_{τ(x)} τ`,
    /// the fixed pairs `r(x, y) = (x, y)` being exactly `(x, τ(x))` with
    /// `σ_x τ(x) = x` and closed under swapping, `σ_x = σ_{σ_x τ(x)}`,
    /// `(τ×id) r (τ×id) = (id×τ) r (id×τ)`, and the round trip through
    /// the derived rack. Empty when all hold.
    pub fn identity_failures(&self) -> Vec<String> {
        let n = self.size();
        let t = &self.tau;
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let lhs = self.sigma(self.sigma(x).apply(y)).compose(self.sigma(t.apply(x)));
                let rhs = self.sigma(x).compose(self.sigma(y));
                if lhs.ok() != rhs.ok() {
                    out.push(format!("sigma composition fails at ({}, {})", x + 1, y + 1));
                }
            }
            if t.compose(self.sigma(x)).ok() != self.sigma(t.apply(x)).compose(t).ok() {
                out.push(format!("tau does not intertwine sigma at {}", x + 1));
            }
            let z = self.sigma(x).apply(t.apply(x));
            if self.sigma(x) != self.sigma(z) {
                out.push(format!("sigma_{} differs from sigma_{}", x + 1, z + 1));
            }
        }
        let fixed = self.solution.fixed_pairs();
        let expected: Vec<(usize, usize)> =
            self.fixed_points().into_iter().map(|x| (x, t.apply(x))).collect();
        let mut sorted = fixed.clone();
        sorted.sort_unstable();
        let mut want = expected.clone();
        want.sort_unstable();
        if sorted != want {
            out.push("fixed pairs differ from (x, tau(x)) with sigma_x tau(x) = x".into());
        }
        if expected.iter().any(|&(x, y)| !fixed.contains(&(y, x))) {
            out.push("fixed pairs are not closed under swapping".into());
        }
        for x in 0..n {
            for y in 0..n {
                let (a, b) = self.solution.apply(t.apply(x), y);
                let left = (t.apply(a), b);
                let (c, d) = self.solution.apply(x, t.apply(y));
                if left != (c, t.apply(d)) {
                    out.push(format!("tau conjugations of r differ at ({}, {})", x + 1, y + 1));
                }
            }
        }
        match near_rack_from(&self.derived_rack(), t) {
            Ok(back) if back == *self => {}
            _ => out.push("derived rack does not reproduce the solution".into()),
        }
        out
    }

    /// Elements `x` with `σ_x τ(x) = x`, i.e. `r(x, τ(x)) = (x, τ(x))`.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&x| self.sigma(x).apply(self.tau.apply(x)) == x)
            .collect()
    }
}

/// The derived solution `T r T⁻¹` with `T(x, y) = (τ_y(x), y)`, together
/// with its rack `x ▷ y = τ_x σ_{τ_y⁻¹(x)}(y)`.
pub fn derived_solution(s: &SetSolution) -> Result<(SetSolution, Rack), SolutionError> {
    if let Some((a, b, c)) = s.ybe_witness() {
        return Err(SolutionError::NotBraided(a, b, c));
    }
    let n = s.size();
    let tau_inv: Vec<Permutation> = s.taus().iter().map(Permutation::inverse).collect();
    let table: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| s.tau(x).apply(s.sigma(tau_inv[y].apply(x)).apply(y)))
                .collect()
        })
        .collect();
    let rack = Rack::new(table)?;
    Ok((rack.to_solution(), rack))
}

/// The near-rack solution `r(x, y) = (x ▷ τ(y), τ(x))` attached to a rack
/// and a compatible involution.
pub fn near_rack_from(rack: &Rack, tau: &Permutation) -> Result<NearRackSolution, SolutionError> {
    let n = rack.size();
    if tau.degree() != n {
        return Err(SolutionError::SizeMismatch(n, tau.degree()));
    }
    if tau.is_identity() || !tau.is_involution() {
        return Err(SolutionError::BadInvolution);
    }
    if let Some((x, y)) = incompatibility(rack, tau) {
        return Err(SolutionError::Incompatible { x, y });
    }
    let sigma = (0..n)
        .map(|x| Permutation::from_images((0..n).map(|y| rack.op(x, tau.apply(y))).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let solution = SetSolution::with_constant_tau(sigma, tau.clone())?;
    Ok(NearRackSolution { solution, tau: tau.clone() })
}

/// First pair violating `τ(τ(x) ▷ y) = x ▷ τ(y)`.
fn incompatibility(rack: &Rack, tau: &Permutation) -> Option<(usize, usize)> {
    let n = rack.size();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| tau.apply(rack.op(tau.apply(x), y)) != rack.op(x, tau.apply(y)))
}

/// Result of [`enum_near_racks`].
#[derive(Clone, Debug)]
pub struct NearRackEnumeration {
    /// Every compatible involution, in enumeration order.
    pub raw: Vec<NearRackSolution>,
    /// One representative per isomorphism class, first-found first.
    pub classes: Vec<NearRackSolution>,
}

/// All near-rack solutions whose derived rack is `rack`, with their
/// isomorphism classes.
pub fn enum_near_racks(rack: &Rack) -> NearRackEnumeration {
    let raw: Vec<NearRackSolution> = involutions(rack.size(), false)
        .filter(|t| incompatibility(rack, t).is_none())
        .map(|t| near_rack_from(rack, &t).expect("compatibility checked"))
        .collect();
    let classes = iso_classes(&raw, |s| s.solution());
    NearRackEnumeration { raw, classes }
}

fn iso_classes<T: Clone>(items: &[T], sol: impl Fn(&T) -> &SetSolution) -> Vec<T> {
    let mut reps: Vec<T> = Vec::new();
    for item in items {
        let known = reps
            .iter()
            .any(|r| isomorphic(sol(r), sol(item)).ok().flatten().is_some());
        if !known {
            reps.push(item.clone());
        }
    }
    reps
}

/// Searches for `φ` with `(φ×φ) r₁ = r₂ (φ×φ)`.
pub fn isomorphic(s1: &SetSolution, s2: &SetSolution) -> Result<Option<Permutation>, SolutionError> {
    let n = s1.size();
    if s2.size() != n {
        return Err(SolutionError::SizeMismatch(n, s2.size()));
    }
    let inv1: Vec<_> = (0..n).map(|x| element_invariant(s1, x)).collect();
    let inv2: Vec<_> = (0..n).map(|x| element_invariant(s2, x)).collect();
    let mut sorted1 = inv1.clone();
    let mut sorted2 = inv2.clone();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return Ok(None);
    }
    let mut search = IsoSearch { s1, s2, inv1, inv2 };
    let state = IsoState { phi: vec![None; n], used: vec![false; n] };
    Ok(search.run(state).map(|phi| {
        Permutation::from_images(phi.into_iter().map(|v| v.unwrap()).collect())
            .expect("search produces bijections")
    }))
}

type Invariant = (Vec<usize>, Vec<usize>, bool);

fn element_invariant(s: &SetSolution, x: usize) -> Invariant {
    (s.sigma(x).cycle_type(), s.tau(x).cycle_type(), s.apply(x, x) == (x, x))
}

struct IsoSearch<'a> {
    s1: &'a SetSolution,
    s2: &'a SetSolution,
    inv1: Vec<Invariant>,
    inv2: Vec<Invariant>,
}

#[derive(Clone)]
struct IsoState {
    phi: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn run(&mut self, state: IsoState) -> Option<Vec<Option<usize>>> {
        let Some(x) = state.phi.iter().position(Option::is_none) else {
            return Some(state.phi);
        };
        for y in 0..self.s1.size() {
            if state.used[y] || self.inv1[x] != self.inv2[y] {
                continue;
            }
            let mut next = state.clone();
            if self.assign(&mut next, x, y) {
                if let Some(found) = self.run(next) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Assigns `φ(x) = y` and closes under the forced images; false on conflict.
    fn assign(&self, st: &mut IsoState, x: usize, y: usize) -> bool {
        let mut queue = vec![(x, y)];
        while let Some((a, b)) = queue.pop() {
            match st.phi[a] {
                Some(c) if c == b => continue,
                Some(_) => return false,
                None if st.used[b] || self.inv1[a] != self.inv2[b] => return false,
                None => {
                    st.phi[a] = Some(b);
                    st.used[b] = true;
                }
            }
            let assigned: Vec<(usize, usize)> = st
                .phi
                .iter()
                .enumerate()
                .filter_map(|(k, v)| v.map(|w| (k, w)))
                .collect();
            for &(u, fu) in &assigned {
                for (p, fp, q, fq) in [(a, b, u, fu), (u, fu, a, b)] {
                    let (l, r) = self.s1.apply(p, q);
                    let (l2, r2) = self.s2.apply(fp, fq);
                    queue.push((l, l2));
                    queue.push((r, r2));
                }
            }
        }
        true
    }
}

/// The near-rack solution on `X = [1, 2n]` with the piecewise formula of the
/// family associated with even dihedral racks.
pub fn k_family(n: usize) -> Result<NearRackSolution, SolutionError> {
    if n < 2 {
        return Err(SolutionError::BadInvolution);
    }
    let m = 2 * n;
    let r = |a: usize, b: usize| -> Result<(usize, usize), SolutionError> {
        // 1-based a, b
        let d = (b + 2 * a - 2) % m;
        let f = (m + 1 - b + 2 * a - 2) % m;
        let second = m + 2 - a;
        Ok(if a == 1 {
            (b, 1)
        } else if (a + b) % 2 == 0 {
            (if d == 0 { m } else { d }, second)
        } else if f == 0 {
            (1, second)
        } else if f > 0 {
            (m + 1 - f, second)
        } else {
            return Err(SolutionError::Uncovered { a, b });
        })
    };
    one_based_near_rack(m, r)
}

/// The near-rack solution on `X = [1, 2n+1]` built from the maps `L^γ` and
/// `R^γ`, associated with odd dihedral racks.
pub fn n_family(n: usize) -> Result<NearRackSolution, SolutionError> {
    if n < 1 {
        return Err(SolutionError::Empty);
    }
    let m = 2 * n + 1;
    let right = |g: usize, a: usize, b: usize| -> Result<(usize, usize), SolutionError> {
        let second = 2 * n + 2 - a;
        Ok(if b + g <= m {
            (b + g, second)
        } else if b + g == m + 1 {
            (m, second)
        } else {
            (4 * n + 3 - g - b, second)
        })
    };
    let left = |g: usize, a: usize, b: usize| -> Result<(usize, usize), SolutionError> {
        let second = 2 * n + 2 - a;
        if g < b {
            Ok((b - g, second))
        } else if g <= b + 2 * n {
            Ok((g - b + 1, second))
        } else {
            Err(SolutionError::Uncovered { a, b })
        }
    };
    let r = |a: usize, b: usize| -> Result<(usize, usize), SolutionError> {
        let even = (a + b) % 2 == 0;
        if a == n + 1 {
            Ok((b, 2 * n + 2 - a))
        } else if a < n + 1 {
            let g = 2 * (n + 1 - a);
            if even { left(g, a, b) } else { right(g, a, b) }
        } else {
            let g = 2 * (a - n - 1);
            if even { right(g, a, b) } else { left(g, a, b) }
        }
    };
    one_based_near_rack(m, r)
}

fn one_based_near_rack(
    m: usize,
    r: impl Fn(usize, usize) -> Result<(usize, usize), SolutionError>,
) -> Result<NearRackSolution, SolutionError> {
    let mut images = vec![vec![(0, 0); m]; m];
    for a in 1..=m {
        for b in 1..=m {
            let (x, y) = r(a, b)?;
            if x == 0 || x > m || y == 0 || y > m {
                return Err(SolutionError::Uncovered { a, b });
            }
            images[a - 1][b - 1] = (x - 1, y - 1);
        }
    }
    NearRackSolution::from_solution(SetSolution::from_fn(m, |i, j| images[i][j])?)
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug)]
pub struct GroupTable {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self, SolutionError> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(SolutionError::BadGroup("table is not square over its elements".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
            .ok_or_else(|| SolutionError::BadGroup("no identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| mul[x][y] == identity)
                .ok_or_else(|| SolutionError::BadGroup(format!("{} has no inverse", x + 1)))?;
            inverse.push(y);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(SolutionError::BadGroup("not associative".into()));
                    }
                }
            }
        }
        Ok(Self { mul, identity, inverse })
    }

    /// The additive group `ℤ_n`, element `k` stored at index `k`.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(mul).expect("cyclic group table is valid")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }
}

/// The solution `r(x, y) = (x y τ(x)⁻¹, τ(x))` on a group, valid exactly
/// when `τ(x y τ(x)⁻¹) = τ(x) τ(y) τ²(x)⁻¹` for all pairs.
pub fn metahomo_solution(group: &GroupTable, tau: &[usize]) -> Result<SetSolution, SolutionError> {
    let n = group.order();
    if tau.len() != n || tau.iter().any(|&v| v >= n) {
        return Err(SolutionError::SizeMismatch(n, tau.len()));
    }
    let g = group;
    for x in 0..n {
        for y in 0..n {
            let lhs = tau[g.mul(g.mul(x, y), g.inv(tau[x]))];
            let rhs = g.mul(g.mul(tau[x], tau[y]), g.inv(tau[tau[x]]));
            if lhs != rhs {
                return Err(SolutionError::NotMetahomomorphism { x, y });
            }
        }
    }
    SetSolution::from_fn(n, |x, y| (g.mul(g.mul(x, y), g.inv(tau[x])), tau[x]))
}

/// The involutive near-rack solution `r(i, j) = (τ(j), τ(i))` with
/// `τ = (1,2)(3,4)⋯(2k−1,2k)`.
pub fn involutive_representative(n: usize, k: usize) -> Result<NearRackSolution, SolutionError> {
    if k == 0 || 2 * k > n {
        return Err(SolutionError::BadInvolution);
    }
    let mut images: Vec<usize> = (0..n).collect();
    for c in 0..k {
        images.swap(2 * c, 2 * c + 1);
    }
    let tau = Permutation::from_images(images)?;
    NearRackSolution::from_sigmas(vec![tau.clone(); n], tau)
}

/// One representative per isomorphism class of involutive near-rack
/// solutions on `n` points.
pub fn involutive_near_racks(n: usize) -> Vec<NearRackSolution> {
    (1..=n / 2)
        .map(|k| involutive_representative(n, k).expect("k within range"))
        .collect()
}

/// Exhaustive search over all involutive near-rack solutions on `n` points,
/// reduced to isomorphism classes. Intended for small `n`.
pub fn involutive_near_racks_exhaustive(n: usize) -> Vec<NearRackSolution> {
    let perms: Vec<Permutation> = crate::permkit::all_permutations(n).collect();
    let mut found = Vec::new();
    for tau in involutions(n, false) {
        // r² = id forces τ σ_x(y) = y for each x separately, so each σ_x is
        // drawn from the permutations passing that coordinate test.
        let options: Vec<&Permutation> =
            perms.iter().filter(|s| (&tau * *s).is_identity()).collect();
        let mut choice = vec![0usize; n];
        loop {
            let sigma: Vec<Permutation> = choice.iter().map(|&c| options[c].clone()).collect();
            let s = SetSolution::with_constant_tau(sigma, tau.clone()).expect("shapes agree");
            if s.is_involutive() && s.is_ybe() {
                found.push(NearRackSolution::from_solution(s).expect("checked"));
            }
            let Some(pos) = (0..n).rev().find(|&p| choice[p] + 1 < options.len()) else {
                break;
            };
            choice[pos] += 1;
            for c in &mut choice[pos + 1..] {
                *c = 0;
            }
        }
    }
    iso_classes(&found, NearRackSolution::solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    fn near_rack(sigmas: &[&str], tau: &str) -> NearRackSolution {
        let n = sigmas.len();
        NearRackSolution::from_sigmas(sigmas.iter().map(|s| p(s, n)).collect(), p(tau, n)).unwrap()
    }

    fn d3() -> NearRackSolution {
        near_rack(&["id", "(1,3,2)", "(1,2,3)"], "(2,3)")
    }

    #[test]
    fn verify_examples() {
        let flip = verify(&SetSolution::flip(3));
        assert!(flip.is_ybe && flip.involutive && flip.rack_type && !flip.near_rack);

        let d = verify(d3().solution());
        assert!(d.is_ybe && d.near_rack && !d.involutive);

        let t = p("(1,2)", 2);
        let s = SetSolution::from_fn(2, |i, j| (t.apply(j), t.apply(i))).unwrap();
        let rep = verify(&s);
        assert!(rep.involutive && rep.near_rack);
    }

    #[test]
    fn verify_detects_broken_braid() {
        let s = SetSolution::with_constant_tau(
            vec![p("(1,2)", 3), p("id", 3), p("id", 3)],
            Permutation::identity(3),
        )
        .unwrap();
        assert!(!s.is_ybe());
    }

    #[test]
    fn dihedral_rack_table() {
        let r = Rack::dihedral(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r.op(i, j), (2 * i + 3 - j) % 3);
            }
        }
        assert_eq!(Rack::affine(5, 1).unwrap(), Rack::trivial(5));
        assert!(matches!(Rack::affine(6, 2), Err(SolutionError::NotInvertible { .. })));
    }

    #[test]
    fn conjugation_rack_of_transpositions() {
        let els: Vec<_> = ["(1,2)", "(1,3)", "(1,4)", "(2,3)", "(2,4)", "(3,4)"]
            .iter()
            .map(|s| p(s, 4))
            .collect();
        let rack = Rack::conjugation(&els).unwrap();
        let printed = [
            [1, 4, 5, 2, 3, 6],
            [4, 2, 6, 1, 5, 3],
            [5, 6, 3, 4, 1, 2],
            [2, 1, 3, 4, 6, 5],
            [3, 2, 1, 6, 5, 4],
            [1, 3, 2, 5, 4, 6],
        ];
        let expected =
            Rack::from_one_based(&printed.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        assert_eq!(rack, expected);
        assert!(Rack::conjugation(&els[..3]).is_err());
    }

    #[test]
    fn near_rack_from_dihedral() {
        let s = near_rack_from(&Rack::dihedral(3), &p("(2,3)", 3)).unwrap();
        assert_eq!(s, d3());
        let triv = near_rack_from(&Rack::trivial(2), &p("(1,2)", 2)).unwrap();
        let t = p("(1,2)", 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(triv.solution().apply(i, j), (t.apply(j), t.apply(i)));
            }
        }
        // every reflection of the triangle is compatible
        for t in ["(1,2)", "(1,3)"] {
            assert!(near_rack_from(&Rack::dihedral(3), &p(t, 3)).is_ok());
        }
    }

    #[test]
    fn near_rack_from_reports_witness() {
        let rack = Rack::affine(5, 2).unwrap();
        let err = near_rack_from(&rack, &p("(1,2)", 5)).unwrap_err();
        let SolutionError::Incompatible { x, y } = err else { panic!("{err:?}") };
        let t = p("(1,2)", 5);
        assert_ne!(t.apply(rack.op(t.apply(x), y)), rack.op(x, t.apply(y)));
        assert_eq!(
            near_rack_from(&rack, &Permutation::identity(5)).unwrap_err(),
            SolutionError::BadInvolution
        );
    }

    #[test]
    fn derived_of_rack_type_is_itself() {
        let rack = Rack::affine(5, 3).unwrap();
        let s = rack.to_solution();
        let (d, r) = derived_solution(&s).unwrap();
        assert_eq!(d, s);
        assert_eq!(r, rack);
    }

    #[test]
    fn derived_rack_of_alternating_example() {
        let s = near_rack(&["(1,2,4)", "(1,3,2)", "(2,3,4)", "(1,4,3)"], "(1,4)(2,3)");
        let printed = vec![
            vec![1, 3, 4, 2],
            vec![4, 2, 1, 3],
            vec![2, 4, 3, 1],
            vec![3, 1, 2, 4],
        ];
        let expected = Rack::from_one_based(&printed).unwrap();
        let (_, rack) = derived_solution(s.solution()).unwrap();
        assert_eq!(rack, expected);
        assert_eq!(s.derived_rack(), expected);
    }

    #[test]
    fn derived_matches_conjugation_by_tau() {
        for s in [d3(), k_family(3).unwrap(), n_family(2).unwrap()] {
            let t = s.tau();
            let (d, _) = derived_solution(s.solution()).unwrap();
            let n = s.size();
            for x in 0..n {
                for y in 0..n {
                    let (a, b) = s.solution().apply(t.apply(x), y);
                    assert_eq!((t.apply(a), b), d.apply(x, y));
                    let (a, b) = s.solution().apply(x, t.apply(y));
                    assert_eq!((a, t.apply(b)), d.apply(x, y));
                }
            }
        }
    }

    #[test]
    fn families() {
        let k2 = k_family(2).unwrap();
        for b in 0..4 {
            assert_eq!(k2.solution().apply(0, b), (b, 0));
        }
        let (_, rack) = derived_solution(k2.solution()).unwrap();
        assert!(isomorphic(&rack.to_solution(), &Rack::dihedral(4).to_solution())
            .unwrap()
            .is_some());
        let n1 = n_family(1).unwrap();
        for b in 0..3 {
            assert_eq!(n1.solution().apply(1, b), (b, 1));
        }
        for n in 2..=5 {
            let k = k_family(n).unwrap();
            let rk = k.derived_rack().to_solution();
            assert!(isomorphic(&rk, &Rack::dihedral(2 * n).to_solution()).unwrap().is_some());
            let nn = n_family(n).unwrap();
            let rn = nn.derived_rack().to_solution();
            assert!(isomorphic(&rn, &Rack::dihedral(2 * n + 1).to_solution()).unwrap().is_some());
        }
        assert!(k_family(1).is_err());
    }

    #[test]
    fn metahomomorphisms() {
        let z3 = GroupTable::cyclic(3);
        let neg = [0, 2, 1];
        let s = metahomo_solution(&z3, &neg).unwrap();
        assert!(verify(&s).near_rack);
        assert!(isomorphic(&s, d3().solution()).unwrap().is_some());

        let conj = metahomo_solution(&z3, &[0, 1, 2]).unwrap();
        assert!(verify(&conj).rack_type);

        let z4 = GroupTable::cyclic(4);
        assert!(metahomo_solution(&z4, &[1, 2, 3, 0]).is_ok());
        let err = metahomo_solution(&z4, &[1, 0, 2, 3]).unwrap_err();
        assert!(matches!(err, SolutionError::NotMetahomomorphism { .. }));
    }

    #[test]
    fn isomorphism_search() {
        let s = d3();
        let id = isomorphic(s.solution(), s.solution()).unwrap().unwrap();
        let c = p("(1,2,3)", 3);
        let moved = s.solution().relabel(&c);
        let phi = isomorphic(s.solution(), &moved).unwrap().unwrap();
        assert_eq!(s.solution().relabel(&phi), moved);
        assert_eq!(s.solution().relabel(&id), *s.solution());
        assert!(isomorphic(s.solution(), &SetSolution::flip(4)).is_err());
    }

    #[test]
    fn two_solutions_over_transpositions_differ() {
        let a = near_rack(
            &["id", "(1,4,2)(3,5,6)", "(1,5,3)(2,4,6)", "(1,2,4)(3,6,5)", "(1,3,5)(2,6,4)", "(2,5)(3,4)"],
            "(2,4)(3,5)",
        );
        let b = near_rack(
            &[
                "(2,3)(4,5)",
                "(1,4,6,3)(2,5)",
                "(1,5,6,2)(3,4)",
                "(1,2,6,5)(3,4)",
                "(1,3,6,4)(2,5)",
                "(2,4)(3,5)",
            ],
            "(2,5)(3,4)",
        );
        assert!(isomorphic(a.solution(), b.solution()).unwrap().is_none());
    }

    #[test]
    fn enumeration_small() {
        let e = enum_near_racks(&Rack::dihedral(3));
        assert_eq!(e.raw.len(), 3);
        assert_eq!(e.classes.len(), 1);
        assert!(isomorphic(e.classes[0].solution(), d3().solution()).unwrap().is_some());
    }

    #[test]
    fn fixed_point_lemmas() {
        for s in [d3(), k_family(2).unwrap(), n_family(3).unwrap()] {
            assert!(s.identity_failures().is_empty(), "{:?}", s.identity_failures());
            let n = s.size();
            let t = s.tau();
            let fixed = s.solution().fixed_pairs();
            for x in 0..n {
                for y in 0..n {
                    let expect = s.sigma(x).apply(t.apply(x)) == x && y == t.apply(x);
                    assert_eq!(fixed.contains(&(x, y)), expect);
                }
                if fixed.contains(&(x, t.apply(x))) {
                    assert!(fixed.contains(&(t.apply(x), x)));
                }
                let z = s.sigma(x).apply(t.apply(x));
                assert_eq!(s.sigma(x), s.sigma(z));
            }
        }
    }

    #[test]
    fn involutive_classification() {
        assert_eq!(involutive_near_racks(2).len(), 1);
        assert_eq!(involutive_near_racks(4).len(), 2);
        for n in 2..=4 {
            let ex = involutive_near_racks_exhaustive(n);
            let reps = involutive_near_racks(n);
            assert_eq!(ex.len(), reps.len(), "n = {n}");
            for r in &reps {
                assert!(ex
                    .iter()
                    .any(|e| isomorphic(e.solution(), r.solution()).unwrap().is_some()));
            }
        }
    }
}
