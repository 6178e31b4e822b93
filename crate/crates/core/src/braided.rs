//! Braided vector spaces of set-theoretical type.
//!
//! Over a solution `(X, r)` with basis `w_1, .., w_m`, the braiding is
//! `c(w_i ⊗ w_j) = R_{i,j} w_{σ_i(j)} ⊗ w_{τ_j(i)}`. Coefficients are either
//! symbolic ([`Monomial`]) or concrete ([`Cyc`]).

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::multsolve::{MultSystem, SolutionFamily};
use crate::permkit::Permutation;
use crate::scalars::{Assignment, Cyc, Monomial, ScalarError, Symbol};
use crate::solutions::{derived_solution, SetSolution, SolutionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidedError {
    #[error("coefficient table has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("coefficient R_({}, {}) is zero", .0 + 1, .1 + 1)]
    ZeroCoefficient(usize, usize),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("the solution is not a near-rack solution")]
    NotNearRack,
    #[error("the solution is not involutive")]
    NotInvolutive,
    #[error("the braiding is not of diagonal type")]
    NotDiagonal,
}

/// Multiplicative scalars shared by the symbolic and concrete modes.
pub trait Scalar: Clone + PartialEq + fmt::Display + Send + Sync {
    fn one() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn try_inv(&self) -> Option<Self>;
    fn is_one(&self) -> bool;
    /// Text used when rendering diagrams.
    fn label(&self) -> String {
        self.to_string()
    }
}

impl Scalar for Monomial {
    fn one() -> Self {
        Monomial::one()
    }
    fn mul(&self, other: &Self) -> Self {
        Monomial::mul(self, other)
    }
    fn try_inv(&self) -> Option<Self> {
        Some(self.inv())
    }
    fn is_one(&self) -> bool {
        Monomial::is_one(self)
    }
}

impl Scalar for Cyc {
    fn one() -> Self {
        Cyc::one(1)
    }
    fn mul(&self, other: &Self) -> Self {
        Cyc::mul(self, other)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn is_one(&self) -> bool {
        Cyc::is_one(self)
    }
    fn label(&self) -> String {
        self.to_text()
    }
}

/// The name of the coefficient `R_{i,j}` (0-based `i`, `j`): `x_{m·i+j+1}`.
pub fn coefficient_symbol(m: usize, i: usize, j: usize) -> Symbol {
    Symbol::param(format!("x{}", m * i + j + 1))
}

/// A braided vector space `W_{X,r}` with coefficient table `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct BraidedSpace<S> {
    solution: SetSolution,
    coeffs: Vec<S>,
}

pub type SymbolicBraiding = BraidedSpace<Monomial>;
pub type ConcreteBraiding = BraidedSpace<Cyc>;

impl<S: Scalar> BraidedSpace<S> {
    /// `coeffs[m·i + j] = R_{i,j}`.
    pub fn new(solution: SetSolution, coeffs: Vec<S>) -> Result<Self, BraidedError> {
        let m = solution.size();
        if coeffs.len() != m * m {
            return Err(BraidedError::Shape { expected: m * m, got: coeffs.len() });
        }
        if let Some(k) = coeffs.iter().position(|c| c.try_inv().is_none()) {
            return Err(BraidedError::ZeroCoefficient(k / m, k % m));
        }
        Ok(Self { solution, coeffs })
    }

    pub fn solution(&self) -> &SetSolution {
        &self.solution
    }

    pub fn dim(&self) -> usize {
        self.solution.size()
    }

    pub fn coeff(&self, i: usize, j: usize) -> &S {
        &self.coeffs[self.dim() * i + j]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// `c` as a monomial operator on `V ⊗ V`, basis word `(i, j)` at index `m·i + j`.
    pub fn braiding_operator(&self) -> MonomialOperator<S> {
        let m = self.dim();
        let mut targets = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let (a, b) = self.solution.apply(i, j);
                targets.push(a * m + b);
            }
        }
        MonomialOperator { targets, scalars: self.coeffs.clone() }
    }

    /// The `q_{ij}` table when `c(w_i ⊗ w_j) = q_{ij} w_j ⊗ w_i` for all `i, j`.
    pub fn diagonal_table(&self) -> Option<Vec<Vec<S>>> {
        let m = self.dim();
        let flips = (0..m).all(|i| (0..m).all(|j| self.solution.apply(i, j) == (j, i)));
        flips.then(|| (0..m).map(|i| (0..m).map(|j| self.coeff(i, j).clone()).collect()).collect())
    }

    /// The twist by `φ(w_i) = z_i w_{τ(i)}`: coefficients
    /// `R̃_{i,j} = (z_j / z_i)·R_{i,τ(j)}` over the derived solution.
    pub fn twist(&self, z: &[S], tau: &Permutation) -> Result<BraidedSpace<S>, BraidedError> {
        let m = self.dim();
        if z.len() != m || tau.degree() != m {
            return Err(BraidedError::Shape { expected: m, got: z.len() });
        }
        if self.solution.common_tau() != Some(tau) || tau.is_identity() || !tau.is_involution() {
            return Err(BraidedError::NotNearRack);
        }
        let (derived, _) = derived_solution(&self.solution)?;
        let inv: Vec<S> = z
            .iter()
            .enumerate()
            .map(|(k, v)| v.try_inv().ok_or(BraidedError::ZeroCoefficient(k, k)))
            .collect::<Result<_, _>>()?;
        let mut coeffs = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                coeffs.push(z[j].mul(&inv[i]).mul(self.coeff(i, tau.apply(j))));
            }
        }
        BraidedSpace::new(derived, coeffs)
    }
}

impl SymbolicBraiding {
    /// The braiding with formal coefficients `R_{i,j} = x_{m·i+j+1}`.
    pub fn generic(solution: SetSolution) -> Self {
        let m = solution.size();
        let coeffs = (0..m)
            .flat_map(|i| (0..m).map(move |j| Monomial::symbol(coefficient_symbol(m, i, j))))
            .collect();
        Self { solution, coeffs }
    }

    /// The braiding whose coefficients are the expressions of a solved family
    /// of the coefficient system.
    pub fn from_family(solution: SetSolution, family: &SolutionFamily) -> Result<Self, BraidedError> {
        let m = solution.size();
        let mut coeffs = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let sym = coefficient_symbol(m, i, j);
                coeffs.push(family.expr(&sym).cloned().unwrap_or_else(|| Monomial::symbol(sym)));
            }
        }
        Self::new(solution, coeffs)
    }

    /// Replaces the formal coefficients by the given expressions
    /// (e.g. a parametrization `x_k ↦ monomial`).
    pub fn substitute(&self, map: &std::collections::BTreeMap<Symbol, Monomial>) -> Self {
        Self {
            solution: self.solution.clone(),
            coeffs: self.coeffs.iter().map(|c| c.substitute(map)).collect(),
        }
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<ConcreteBraiding, BraidedError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.evaluate(assignment))
            .collect::<Result<Vec<_>, _>>()?;
        BraidedSpace::new(self.solution.clone(), coeffs)
    }
}

impl ConcreteBraiding {
    /// The smallest `N` with every coefficient in `ℚ(ζ_N)`.
    pub fn field_order(&self) -> u64 {
        self.coeffs.iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.order()))
    }

    /// First basis word where `(c⊗id)(id⊗c)(c⊗id) ≠ (id⊗c)(c⊗id)(id⊗c)`.
    pub fn braid_witness(&self) -> Option<(usize, usize, usize)> {
        let m = self.dim();
        let c = self.braiding_operator();
        let apply = |(a, b): (usize, usize)| -> ((usize, usize), &Cyc) {
            let k = a * m + b;
            let t = c.targets[k];
            ((t / m, t % m), &c.scalars[k])
        };
        (0..m).into_par_iter().find_map_first(|i| {
            for j in 0..m {
                for k in 0..m {
                    let ((x, y), s1) = apply((i, j));
                    let ((y, z), s2) = apply((y, k));
                    let ((x, y), s3) = apply((x, y));
                    let left = ((x, y, z), s1.mul(s2).mul(s3));
                    let ((y, z), t1) = apply((j, k));
                    let ((x, y), t2) = apply((i, y));
                    let ((y, z), t3) = apply((y, z));
                    let right = ((x, y, z), t1.mul(t2).mul(t3));
                    if left != right {
                        return Some((i, j, k));
                    }
                }
            }
            None
        })
    }

    pub fn braid_check(&self) -> bool {
        self.braid_witness().is_none()
    }
}

/// The multiplicative system of braid-equation rows for formal coefficients
/// `x_{m·i+j+1} = R_{i,j}`: one row per triple, deduplicated.
pub fn ybe_coefficient_system(s: &SetSolution) -> MultSystem {
    let m = s.size();
    let unknowns = (0..m).flat_map(|i| (0..m).map(move |j| coefficient_symbol(m, i, j))).collect();
    let mut sys = MultSystem::new(unknowns);
    let idx = |i: usize, j: usize| m * i + j;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let ti = s.tau(j).apply(i);
                let sjk = s.sigma(j).apply(k);
                let mut exps = vec![0i64; m * m];
                exps[idx(i, j)] += 1;
                exps[idx(ti, k)] += 1;
                exps[idx(s.sigma(i).apply(j), s.sigma(ti).apply(k))] += 1;
                exps[idx(j, k)] -= 1;
                exps[idx(i, sjk)] -= 1;
                exps[idx(s.tau(sjk).apply(i), s.tau(k).apply(j))] -= 1;
                sys.push(exps, Monomial::one()).expect("row length matches");
            }
        }
    }
    sys
}

/// A generalized permutation matrix: basis vector `k` maps to
/// `scalars[k]·e_{targets[k]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialOperator<S> {
    pub targets: Vec<usize>,
    pub scalars: Vec<S>,
}

impl<S: Scalar> MonomialOperator<S> {
    pub fn identity(dim: usize) -> Self {
        Self { targets: (0..dim).collect(), scalars: vec![S::one(); dim] }
    }

    /// `φ(w_i) = z_i w_{π(i)}`.
    pub fn weighted_permutation(perm: &Permutation, z: &[S]) -> Self {
        Self { targets: perm.images().to_vec(), scalars: z.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let targets = other.targets.iter().map(|&t| self.targets[t]).collect();
        let scalars = other
            .scalars
            .iter()
            .zip(&other.targets)
            .map(|(s, &t)| s.mul(&self.scalars[t]))
            .collect();
        Self { targets, scalars }
    }

    pub fn inverse(&self) -> Option<Self> {
        let mut targets = vec![0; self.dim()];
        let mut scalars = vec![S::one(); self.dim()];
        for (k, (&t, s)) in self.targets.iter().zip(&self.scalars).enumerate() {
            targets[t] = k;
            scalars[t] = s.try_inv()?;
        }
        Some(Self { targets, scalars })
    }

    /// `self ⊗ other`, index `a·dim(other) + b`.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = other.dim();
        let mut targets = Vec::with_capacity(self.dim() * n);
        let mut scalars = Vec::with_capacity(self.dim() * n);
        for (ta, sa) in self.targets.iter().zip(&self.scalars) {
            for (tb, sb) in other.targets.iter().zip(&other.scalars) {
                targets.push(ta * n + tb);
                scalars.push(sa.mul(sb));
            }
        }
        Self { targets, scalars }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multsolve::{is_one_modulo, solve, SolveOptions};
    use crate::solutions::{involutive_representative, near_rack_from, NearRackSolution, Rack};

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    fn d3() -> NearRackSolution {
        near_rack_from(&Rack::dihedral(3), &p("(2,3)", 3)).unwrap()
    }

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    #[test]
    fn flip_has_empty_system() {
        let sys = ybe_coefficient_system(&SetSolution::flip(3));
        assert!(sys.is_empty());
        let d = ybe_coefficient_system(d3().solution());
        assert!(d.len() <= 27);
    }

    #[test]
    fn diagonal_braidings_always_braid() {
        let vals = ["2", "zeta5", "-1/3", "zeta5^3", "7", "1/2", "zeta3", "-1", "5"];
        let coeffs = vals.iter().map(|v| crate::scalars::parse_value(v).unwrap()).collect();
        let b = ConcreteBraiding::new(SetSolution::flip(3), coeffs).unwrap();
        assert!(b.braid_check());
        assert!(b.diagonal_table().is_some());
    }

    #[test]
    fn dihedral_family_instantiation() {
        let s = d3();
        let sys = ybe_coefficient_system(s.solution());
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert!(fam.failing_rows(&sys).is_empty());
        let sym = SymbolicBraiding::from_family(s.solution().clone(), &fam).unwrap();
        let asg = Assignment::parse("x1=1,x4=1,x5=1,eps1=1").unwrap();
        let conc = sym.evaluate(&asg).unwrap();
        assert!(conc.braid_check());
        let mut coeffs = conc.coeffs().to_vec();
        coeffs[0] = Cyc::from_int(1, 2);
        let broken = ConcreteBraiding::new(s.solution().clone(), coeffs).unwrap();
        assert!(!broken.braid_check());
        assert!(conc.diagonal_table().is_none());
    }

    #[test]
    fn rack_type_trivial_rack_is_diagonal() {
        let b = SymbolicBraiding::generic(Rack::trivial(3).to_solution());
        // trivial rack: r(x, y) = (y, x)
        assert!(b.diagonal_table().is_some());
    }

    #[test]
    fn fixed_points_force_symmetric_coefficients() {
        for s in [d3(), near_rack_from(&Rack::affine(5, 2).unwrap(), &p("(2,5)(3,4)", 5)).unwrap()] {
            let sys = ybe_coefficient_system(s.solution());
            let fam = solve(&sys, &SolveOptions::default()).unwrap();
            let b = SymbolicBraiding::from_family(s.solution().clone(), &fam).unwrap();
            for x in s.fixed_points() {
                let t = s.tau().apply(x);
                let ratio = b.coeff(x, t).div(b.coeff(t, x));
                assert!(is_one_modulo(&ratio, &fam.conditions), "x = {x}");
            }
        }
    }

    #[test]
    fn twist_with_unit_z() {
        // involutive: R_{i,τ(j)} = R_{τ(i),j} holds when R is constant
        let s = involutive_representative(2, 1).unwrap();
        let b = SymbolicBraiding::new(s.solution().clone(), vec![m("a"); 4]).unwrap();
        let t = b.twist(&[Monomial::one(), Monomial::one()], s.tau()).unwrap();
        assert_eq!(t.coeffs(), &[m("a"), m("a"), m("a"), m("a")]);
        assert!(t.solution().is_rack_type());
        assert!(b.twist(&[Monomial::one(), Monomial::one()], &Permutation::identity(2)).is_err());
    }

    #[test]
    fn operator_algebra() {
        let phi = MonomialOperator::weighted_permutation(
            &p("(1,2)", 2),
            &[Cyc::from_int(1, 2), Cyc::root_of_unity(3, 1)],
        );
        let inv = phi.inverse().unwrap();
        assert_eq!(phi.compose(&inv), MonomialOperator::identity(2));
        let big = phi.tensor(&MonomialOperator::identity(2));
        assert_eq!(big.dim(), 4);
        assert_eq!(big.targets, vec![2, 3, 0, 1]);
    }
}
