//! t-equivalence of near-rack braided spaces with rack-type ones.
//!
//! For `φ(w_i) = z_i w_{τ(i)}` the conjugations `(φ⁻¹⊗id)c(φ⊗id)` and
//! `(id⊗φ⁻¹)c(id⊗φ)` agree iff `z_i² = z_j z_{σ_iτ(j)} R_{i,τ(j)} / R_{τ(i),j}`
//! for all `i, j`; the common value is a braiding over the derived solution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::braided::{BraidedError, ConcreteBraiding, MonomialOperator, SymbolicBraiding};
use crate::multsolve::{is_one_modulo, solve, MultSystem, SolveError, SolveOptions};
use crate::permkit::Permutation;
use crate::scalars::{Assignment, Cyc, Monomial, ScalarError, Symbol};
use crate::solutions::{derived_solution, SetSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TEquivError {
    #[error("the solution is not a near-rack solution")]
    NotNearRack,
    #[error("the solution is not an involutive near-rack solution")]
    NotInvolutive,
    #[error("condition {0} = 1 fails at the chosen values")]
    ConditionViolated(Monomial),
    #[error("no values of the torsion symbols satisfy the conditions")]
    NoInstantiation,
    #[error(transparent)]
    Braided(#[from] BraidedError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The name of the twist parameter `z_i` (0-based `i`).
pub fn z_symbol(i: usize) -> Symbol {
    Symbol::param(format!("z{}", i + 1))
}

/// The involution of a near-rack solution.
pub fn near_rack_tau(s: &SetSolution) -> Result<Permutation, TEquivError> {
    match s.common_tau() {
        Some(t) if !t.is_identity() && t.is_involution() => Ok(t.clone()),
        _ => Err(TEquivError::NotNearRack),
    }
}

/// `z_i² z_j⁻¹ z_{σ_iτ(j)}⁻¹ = R_{i,τ(j)} / R_{τ(i),j}` for all pairs.
pub fn z_system(b: &SymbolicBraiding) -> Result<MultSystem, TEquivError> {
    let s = b.solution();
    let tau = near_rack_tau(s)?;
    let m = s.size();
    let mut sys = MultSystem::new((0..m).map(z_symbol).collect());
    for i in 0..m {
        for j in 0..m {
            let mut exps = vec![0i64; m];
            exps[i] += 2;
            exps[j] -= 1;
            exps[s.sigma(i).apply(tau.apply(j))] -= 1;
            let rhs = b.coeff(i, tau.apply(j)).div(b.coeff(tau.apply(i), j));
            sys.push(exps, rhs)?;
        }
    }
    Ok(sys)
}

/// Pairs `(i, j)` where the twist equation fails for the given `z`,
/// modulo the listed conditions.
pub fn failing_pairs(b: &SymbolicBraiding, z: &[Monomial], conditions: &[Monomial]) -> Vec<(usize, usize)> {
    let s = b.solution();
    let Ok(tau) = near_rack_tau(s) else { return Vec::new() };
    let m = s.size();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let lhs = z[i].pow_int(2).mul(b.coeff(tau.apply(i), j));
            let rhs = z[j].mul(&z[s.sigma(i).apply(tau.apply(j))]).mul(b.coeff(i, tau.apply(j)));
            if !is_one_modulo(&lhs.div(&rhs), conditions) {
                out.push((i, j));
            }
        }
    }
    out
}

/// A symbolic t-equivalence certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct TEquivCertificate {
    pub base: SymbolicBraiding,
    pub tau: Permutation,
    pub z: Vec<Monomial>,
    pub derived: SymbolicBraiding,
    /// Constraints on the coefficient parameters assumed by the base family.
    pub assumptions: Vec<Monomial>,
    /// Further constraints needed for the twist to exist.
    pub conditions: Vec<Monomial>,
}

impl TEquivCertificate {
    /// All constraints under which the certificate is valid.
    pub fn all_conditions(&self) -> Vec<Monomial> {
        self.assumptions.iter().chain(&self.conditions).cloned().collect()
    }

    /// Whether `z` is a solution of the twist equations under the certificate's conditions.
    pub fn admits(&self, z: &[Monomial]) -> bool {
        z.len() == self.z.len() && failing_pairs(&self.base, z, &self.all_conditions()).is_empty()
    }

    /// `z_i^{2|X|} = ∏ z_j²` for `τ(i) = i` and `(z_i z_{τ(i)})^{2|X|} = ∏ z_j⁴`.
    pub fn power_identities_hold(&self) -> bool {
        let m = self.z.len() as i64;
        let conds = self.all_conditions();
        let prod = self.z.iter().fold(Monomial::one(), |acc, z| acc.mul(z));
        (0..self.z.len()).all(|i| {
            let t = self.tau.apply(i);
            let pair = self.z[i].mul(&self.z[t]).pow_int(2 * m).div(&prod.pow_int(4));
            let fixed = t != i || is_one_modulo(&self.z[i].pow_int(2 * m).div(&prod.pow_int(2)), &conds);
            fixed && is_one_modulo(&pair, &conds)
        })
    }

    /// Evaluates every scalar at `assignment` after checking the conditions.
    pub fn instantiate(&self, assignment: &Assignment) -> Result<ConcreteCertificate, TEquivError> {
        for c in self.all_conditions() {
            if !c.evaluate(assignment)?.is_one() {
                return Err(TEquivError::ConditionViolated(c));
            }
        }
        let z = self.z.iter().map(|v| v.evaluate(assignment)).collect::<Result<Vec<_>, _>>()?;
        Ok(ConcreteCertificate {
            base: self.base.evaluate(assignment)?,
            tau: self.tau.clone(),
            z,
            derived: self.derived.evaluate(assignment)?,
        })
    }

    /// Instantiates at free parameters 1, principal roots, and the first
    /// torsion values (in lexicographic order of exponents) meeting the conditions.
    pub fn instantiate_default(&self) -> Result<ConcreteCertificate, TEquivError> {
        let mut monos: Vec<&Monomial> = self.base.coeffs().iter().chain(&self.z).collect();
        monos.extend(self.derived.coeffs());
        let conds = self.all_conditions();
        monos.extend(&conds);
        let asg = principal_assignment(&monos, &conds).ok_or(TEquivError::NoInstantiation)?;
        self.instantiate(&asg)
    }
}

/// Either a certificate or a proof that no twist exists.
#[derive(Clone, Debug, PartialEq)]
pub enum TEquivOutcome {
    Certified(Box<TEquivCertificate>),
    /// The row combination `certificate` of the z-system forces `1 = value`.
    Obstructed { certificate: Vec<BigInt>, value: Monomial },
}

/// Solves the twist equations for a symbolic near-rack braiding whose
/// coefficients satisfy `assumptions`. Conditions already implied by the
/// assumptions are dropped from the certificate.
pub fn solve_tequiv(b: &SymbolicBraiding, assumptions: &[Monomial]) -> Result<TEquivOutcome, TEquivError> {
    let tau = near_rack_tau(b.solution())?;
    let sys = z_system(b)?;
    let fam = match solve(&sys, &SolveOptions { torsion_prefix: "delta".into(), ..SolveOptions::default() }) {
        Ok(f) => f,
        Err(SolveError::Inconsistent { certificate, value }) => {
            return Ok(TEquivOutcome::Obstructed { certificate, value });
        }
        Err(e) => return Err(e.into()),
    };
    let conditions = fam.conditions.iter().filter(|c| !is_one_modulo(c, assumptions)).cloned().collect();
    let derived = b.twist(&fam.exprs, &tau)?;
    Ok(TEquivOutcome::Certified(Box::new(TEquivCertificate {
        base: b.clone(),
        tau,
        z: fam.exprs,
        derived,
        assumptions: assumptions.to_vec(),
        conditions,
    })))
}

/// The closed form `z_i = √(R_{i,τ(1)} / R_{τ(i),1})` for involutive near-racks.
pub fn involutive_z(b: &SymbolicBraiding) -> Result<Vec<Monomial>, TEquivError> {
    let s = b.solution();
    let tau = near_rack_tau(s).map_err(|_| TEquivError::NotInvolutive)?;
    if (0..s.size()).any(|x| s.sigma(x) != &tau) {
        return Err(TEquivError::NotInvolutive);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let t1 = tau.apply(0);
    Ok((0..s.size()).map(|i| b.coeff(i, t1).div(b.coeff(tau.apply(i), 0)).pow(&half)).collect())
}

/// Builds the certificate for given `z` without solving.
pub fn certificate_from_z(
    b: &SymbolicBraiding,
    z: Vec<Monomial>,
    assumptions: &[Monomial],
) -> Result<TEquivCertificate, TEquivError> {
    let tau = near_rack_tau(b.solution())?;
    let derived = b.twist(&z, &tau)?;
    Ok(TEquivCertificate {
        base: b.clone(),
        tau,
        z,
        derived,
        assumptions: assumptions.to_vec(),
        conditions: Vec::new(),
    })
}

/// Values for every symbol in `monos`: free parameters 1, torsion symbols
/// searched in lexicographic order of exponents until `conditions` hold,
/// roots principal.
pub fn principal_assignment(monos: &[&Monomial], conditions: &[Monomial]) -> Option<Assignment> {
    let mut dens: BTreeMap<Symbol, u64> = BTreeMap::new();
    for m in monos.iter().copied().chain(conditions) {
        for (s, e) in m.exponents() {
            let d: u64 = e.denom().try_into().ok()?;
            let slot = dens.entry(s.clone()).or_insert(1);
            *slot = num_integer::lcm(*slot, d);
        }
    }
    let torsion: Vec<(Symbol, u64)> = dens.keys().filter_map(|s| s.order.map(|d| (s.clone(), d))).collect();
    let combos: u64 = torsion.iter().map(|(_, d)| *d).product();
    if combos > 1 << 16 {
        return None;
    }
    for code in 0..combos {
        let mut asg = Assignment::new();
        let mut rest = code;
        for (s, den) in &dens {
            let (value, root) = match s.order {
                Some(d) => {
                    let k = (rest % d) as i64;
                    rest /= d;
                    (Cyc::root_of_unity(d, k), Cyc::root_of_unity(d * den, k))
                }
                None => (Cyc::one(1), Cyc::one(1)),
            };
            asg.set(&s.name, value);
            if *den > 1 {
                asg.set_root(&s.name, *den, root);
            }
        }
        if conditions.iter().all(|c| c.evaluate(&asg).is_ok_and(|v| v.is_one())) {
            return Some(asg);
        }
    }
    None
}

/// A certificate with concrete scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcreteCertificate {
    pub base: ConcreteBraiding,
    pub tau: Permutation,
    pub z: Vec<Cyc>,
    pub derived: ConcreteBraiding,
}

impl ConcreteCertificate {
    pub fn phi(&self) -> MonomialOperator<Cyc> {
        MonomialOperator::weighted_permutation(&self.tau, &self.z)
    }

    /// `U_n = φ^{n−1} ⊗ φ^{n−2} ⊗ … ⊗ φ ⊗ id` on `V^{⊗n}`.
    pub fn intertwiner(&self, n: usize) -> MonomialOperator<Cyc> {
        let m = self.z.len();
        let phi = self.phi();
        let mut powers = vec![MonomialOperator::identity(m)];
        for k in 1..n {
            powers.push(phi.compose(&powers[k - 1]));
        }
        powers.iter().rev().skip(1).fold(powers[n - 1].clone(), |acc, p| acc.tensor(p))
    }
}

/// Outcome of [`verify_certificate`]; every witness is 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VerificationReport {
    /// First pair violating the twist equation.
    pub failing_pair: Option<(usize, usize)>,
    /// First basis word of `V⊗V` where `(φ⁻¹⊗id)c(φ⊗id)` differs from `c̃`.
    pub left_mismatch: Option<usize>,
    /// First basis word where `(id⊗φ⁻¹)c(id⊗φ)` differs from `c̃`.
    pub right_mismatch: Option<usize>,
    /// First triple where `c̃` fails the braid equation.
    pub braid_witness: Option<(usize, usize, usize)>,
    pub derived_solution_ok: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failing_pair.is_none()
            && self.left_mismatch.is_none()
            && self.right_mismatch.is_none()
            && self.braid_witness.is_none()
            && self.derived_solution_ok
    }
}

fn first_difference(a: &MonomialOperator<Cyc>, b: &MonomialOperator<Cyc>) -> Option<usize> {
    (0..a.dim()).find(|&k| a.targets[k] != b.targets[k] || a.scalars[k] != b.scalars[k])
}

/// Checks the twist equations, both conjugation identities against `c̃`,
/// the braid equation for `c̃`, and that `c̃` lives on the derived solution.
pub fn verify_certificate(cert: &ConcreteCertificate) -> Result<VerificationReport, TEquivError> {
    let b = &cert.base;
    let s = b.solution();
    let m = s.size();
    let tau = &cert.tau;
    let z = &cert.z;
    let mut report = VerificationReport::default();
    'rows: for i in 0..m {
        for j in 0..m {
            let lhs = z[i].mul(&z[i]).mul(b.coeff(tau.apply(i), j));
            let rhs = z[j].mul(&z[s.sigma(i).apply(tau.apply(j))]).mul(b.coeff(i, tau.apply(j)));
            if lhs != rhs {
                report.failing_pair = Some((i, j));
                break 'rows;
            }
        }
    }
    let c = b.braiding_operator();
    let phi = cert.phi();
    let phi_inv = phi.inverse().ok_or(BraidedError::ZeroCoefficient(0, 0))?;
    let id = MonomialOperator::identity(m);
    let left = phi_inv.tensor(&id).compose(&c.compose(&phi.tensor(&id)));
    let right = id.tensor(&phi_inv).compose(&c.compose(&id.tensor(&phi)));
    let twisted = cert.derived.braiding_operator();
    report.left_mismatch = first_difference(&left, &twisted);
    report.right_mismatch = first_difference(&right, &twisted);
    report.braid_witness = cert.derived.braid_witness();
    report.derived_solution_ok = derived_solution(s).is_ok_and(|(d, _)| &d == cert.derived.solution());
    Ok(report)
}

/// The generic braiding `R_{i,j} = x_{m·i+j+1}` restricted to the solved
/// coefficient family of `s`, with the family's conditions.
pub fn solved_family_braiding(s: &SetSolution) -> Result<(SymbolicBraiding, Vec<Monomial>), TEquivError> {
    let sys = crate::braided::ybe_coefficient_system(s);
    let fam = solve(&sys, &SolveOptions::default())?;
    let b = SymbolicBraiding::from_family(s.clone(), &fam)?;
    Ok((b, fam.conditions))
}

/// Substitutes `z_1 ↦ value` style overrides, used to compare with printed forms.
pub fn rename_scale(z: &[Monomial], map: &BTreeMap<Symbol, Monomial>) -> Vec<Monomial> {
    z.iter().map(|v| v.substitute(map)).collect()
}

impl TEquivOutcome {
    pub fn certificate(&self) -> Option<&TEquivCertificate> {
        match self {
            TEquivOutcome::Certified(c) => Some(c),
            TEquivOutcome::Obstructed { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nichols::{compare_graded, NicholsOptions};
    use crate::solutions::{involutive_near_racks, involutive_representative, near_rack_from, Rack};

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    /// The 2-dim involutive braiding with `c(w₁⊗w₁) = a w₂⊗w₂`, `c(w₁⊗w₂) = b w₁⊗w₂`,
    /// `c(w₂⊗w₁) = b w₂⊗w₁`, `c(w₂⊗w₂) = e w₁⊗w₁`.
    fn two_dim() -> SymbolicBraiding {
        let s = involutive_representative(2, 1).unwrap();
        SymbolicBraiding::new(s.solution().clone(), vec![m("a"), m("b"), m("b"), m("e")]).unwrap()
    }

    #[test]
    fn two_dim_system_and_closed_form() {
        let b = two_dim();
        let sys = z_system(&b).unwrap();
        // z₁² z₂⁻² = a/e is the only independent relation
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(fam.invariant_factors, vec![2]);
        let z = involutive_z(&b).unwrap();
        assert_eq!(z, vec![Monomial::one(), m("a^(-1/2) * e^(1/2)")]);
        assert!(failing_pairs(&b, &z, &[]).is_empty());
        let cert = certificate_from_z(&b, z, &[]).unwrap();
        let q = cert.derived.diagonal_table().unwrap();
        assert_eq!(q[0][0], m("b"));
        assert_eq!(q[1][1], m("b"));
        assert_eq!(q[0][1].mul(&q[1][0]), m("a * e"));
    }

    #[test]
    fn two_dim_certificate_verifies() {
        let b = two_dim();
        let cert = certificate_from_z(&b, involutive_z(&b).unwrap(), &[]).unwrap();
        let asg = Assignment::parse("a=1,e=1,b=-1,a^(1/2)=1,e^(1/2)=1").unwrap();
        let conc = cert.instantiate(&asg).unwrap();
        let report = verify_certificate(&conc).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(conc.derived.diagonal_table().is_some());

        let mut bad = conc.clone();
        bad.z[1] = bad.z[1].mul(&Cyc::root_of_unity(4, 1));
        let report = verify_certificate(&bad).unwrap();
        assert_eq!(report.failing_pair, Some((0, 1)));
        assert!(!report.passed());
    }

    #[test]
    fn intertwiner_conjugates_the_braid_generators() {
        let b = two_dim();
        let cert = certificate_from_z(&b, involutive_z(&b).unwrap(), &[]).unwrap();
        let asg = Assignment::parse("a=1,e=4,b=zeta3,a^(1/2)=1,e^(1/2)=2").unwrap();
        let conc = cert.instantiate(&asg).unwrap();
        let id = MonomialOperator::identity(2);
        let c = conc.base.braiding_operator();
        let ct = conc.derived.braiding_operator();
        let u = conc.intertwiner(3);
        for (gen, gen_t) in [
            (c.tensor(&id), ct.tensor(&id)),
            (id.tensor(&c), id.tensor(&ct)),
        ] {
            assert_eq!(u.compose(&gen_t), gen.compose(&u));
        }
    }

    #[test]
    fn closed_form_solves_every_involutive_class() {
        for n in 2..=6 {
            for s in involutive_near_racks(n) {
                let (b, conds) = solved_family_braiding(s.solution()).unwrap();
                let z = involutive_z(&b).unwrap();
                assert!(failing_pairs(&b, &z, &conds).is_empty(), "n = {n}, tau = {}", s.tau());
                let cert = certificate_from_z(&b, z, &conds).unwrap();
                assert!(cert.power_identities_hold());
            }
        }
    }

    #[test]
    fn rack_type_is_rejected() {
        let b = SymbolicBraiding::generic(Rack::dihedral(3).to_solution());
        assert_eq!(z_system(&b).unwrap_err(), TEquivError::NotNearRack);
    }

    #[test]
    fn dihedral_needs_the_trivial_branch() {
        let s = near_rack_from(&Rack::dihedral(3), &p("(2,3)", 3)).unwrap();
        let (b, conds) = solved_family_braiding(s.solution()).unwrap();
        let out = solve_tequiv(&b, &conds).unwrap();
        let cert = out.certificate().expect("solvable on a branch");
        assert!(!cert.conditions.is_empty());
        assert!(cert.power_identities_hold());
        let conc = cert.instantiate_default().unwrap();
        assert!(verify_certificate(&conc).unwrap().passed());
        let opts = NicholsOptions::exact(4);
        assert!(compare_graded(&conc.base, &conc.derived, &opts).unwrap());
    }

    #[test]
    fn default_assignment_respects_torsion() {
        let c = m("eps1[3]^2");
        let asg = principal_assignment(&[&c], &[]).unwrap();
        assert!(c.evaluate(&asg).unwrap().is_one());
        let cond = m("eps1[3] * zeta3^2");
        let asg = principal_assignment(&[&cond], std::slice::from_ref(&cond)).unwrap();
        assert!(cond.evaluate(&asg).unwrap().is_one());
        assert!(principal_assignment(&[], &[m("-1")]).is_none());
    }
}
