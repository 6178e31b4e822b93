//! Systems of multiplicative equations `∏ u_i^{a_i} = c` over the units of
//! an algebraically closed field of characteristic zero.
//!
//! The exponent matrix is brought to Smith normal form; invariant factors
//! give roots and root-of-unity torsion, the kernel gives free parameters,
//! and the remaining rows give conditions on the right-hand sides.

pub mod snf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalars::{Monomial, ScalarError, Symbol};
use snf::{smith_normal_form, solve_integer, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("inconsistent system: the row combination {certificate:?} forces 1 = {value}")]
    Inconsistent { certificate: Vec<BigInt>, value: Monomial },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("row has {got} exponents, expected {expected}")]
    Shape { expected: usize, got: usize },
}

/// A multiplicative system over ordered unknowns.
#[derive(Clone, Debug, Default)]
pub struct MultSystem {
    unknowns: Vec<Symbol>,
    rows: Vec<(Vec<i64>, Monomial)>,
    seen: BTreeSet<(Vec<i64>, String)>,
}

impl MultSystem {
    pub fn new(unknowns: Vec<Symbol>) -> Self {
        Self { unknowns, rows: Vec::new(), seen: BTreeSet::new() }
    }

    pub fn unknowns(&self) -> &[Symbol] {
        &self.unknowns
    }

    pub fn rows(&self) -> &[(Vec<i64>, Monomial)] {
        &self.rows
    }

    /// Adds a row, normalized so the first nonzero exponent is positive.
    /// Trivial rows (`1 = 1`) and duplicates are dropped.
    pub fn push(&mut self, mut exps: Vec<i64>, mut rhs: Monomial) -> Result<(), SolveError> {
        if exps.len() != self.unknowns.len() {
            return Err(SolveError::Shape { expected: self.unknowns.len(), got: exps.len() });
        }
        if exps.iter().find(|&&e| e != 0).is_some_and(|&e| e < 0) {
            exps.iter_mut().for_each(|e| *e = -*e);
            rhs = rhs.inv();
        }
        if exps.iter().all(|&e| e == 0) && rhs.is_one() {
            return Ok(());
        }
        if self.seen.insert((exps.clone(), rhs.to_string())) {
            self.rows.push((exps, rhs));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `∏ u_i^{a_i} / rhs` for row `k` with unknowns replaced by `values`.
    pub fn residual(&self, k: usize, values: &[Monomial]) -> Monomial {
        let (exps, rhs) = &self.rows[k];
        let mut acc = rhs.inv();
        for (e, v) in exps.iter().zip(values) {
            if *e != 0 {
                acc = acc.mul(&v.pow_int(*e));
            }
        }
        acc
    }
}

/// Options for [`solve`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Prefix for fresh root-of-unity symbols.
    pub torsion_prefix: String,
    /// Prefix for free parameters that cannot be named after an unknown.
    pub free_prefix: String,
    /// Maximum exponent denominator allowed in the result.
    pub denominator_cap: Option<u64>,
    /// Name free parameters after the lexicographically first unknowns
    /// that can serve as coordinates.
    pub name_after_unknowns: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            torsion_prefix: "eps".into(),
            free_prefix: "t".into(),
            denominator_cap: None,
            name_after_unknowns: true,
        }
    }
}

/// The complete solution set of a [`MultSystem`]; serializes with monomials in text form.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SolutionFamily {
    pub unknowns: Vec<Symbol>,
    /// Each unknown as a monomial in free parameters, torsion symbols and
    /// the external parameters of the right-hand sides.
    pub exprs: Vec<Monomial>,
    pub free: Vec<Symbol>,
    /// Fresh root-of-unity symbols; each carries its order.
    pub torsion: Vec<Symbol>,
    /// Residual constraints `c = 1` on external parameters.
    pub conditions: Vec<Monomial>,
    /// Invariant factors of the exponent matrix.
    pub invariant_factors: Vec<u64>,
}

impl SolutionFamily {
    pub fn expr(&self, unknown: &Symbol) -> Option<&Monomial> {
        self.unknowns.iter().position(|u| u == unknown).map(|k| &self.exprs[k])
    }

    /// Substitution map unknown → expression.
    pub fn substitution(&self) -> BTreeMap<Symbol, Monomial> {
        self.unknowns.iter().cloned().zip(self.exprs.iter().cloned()).collect()
    }

    /// Orders of the torsion symbols.
    pub fn torsion_orders(&self) -> Vec<u64> {
        self.torsion.iter().filter_map(|s| s.order).collect()
    }

    /// Indices of rows not satisfied after substitution, modulo conditions.
    pub fn failing_rows(&self, system: &MultSystem) -> Vec<usize> {
        (0..system.len())
            .filter(|&k| !is_one_modulo(&system.residual(k, &self.exprs), &self.conditions))
            .collect()
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, e) in self.unknowns.iter().zip(&self.exprs) {
            writeln!(f, "{u} = {e}")?;
        }
        for c in &self.conditions {
            writeln!(f, "condition: {c} = 1")?;
        }
        Ok(())
    }
}

fn to_rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Solves the system. Never assumes a condition silently: constraints on
/// external parameters are returned in `conditions`.
pub fn solve(system: &MultSystem, opts: &SolveOptions) -> Result<SolutionFamily, SolveError> {
    let n = system.unknowns.len();
    let a: IntMatrix = system
        .rows
        .iter()
        .map(|(e, _)| e.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let (u, v, factors) = if a.is_empty() {
        (Vec::new(), snf::identity(n), Vec::new())
    } else {
        let s = smith_normal_form(&a);
        (s.u, s.v, s.factors)
    };
    let r = factors.len();

    // transformed right-hand sides C_l = ∏_k rhs_k^{U_lk}
    let transformed: Vec<Monomial> = u
        .iter()
        .map(|row| {
            let mut acc = Monomial::one();
            for (c, (_, rhs)) in row.iter().zip(&system.rows) {
                if !c.is_zero() {
                    acc = acc.mul(&rhs.pow(&to_rat(c)));
                }
            }
            acc
        })
        .collect();

    let mut conditions = Vec::new();
    for (l, c) in transformed.iter().enumerate().skip(r) {
        if c.is_one() {
            continue;
        }
        if c.is_constant() {
            return Err(SolveError::Inconsistent { certificate: u[l].clone(), value: c.clone() });
        }
        conditions.push(c.clone());
    }
    let conditions = normalize_conditions(conditions);

    // w_l = C_l^{1/d_l}·ε_l for l < r, free for l ≥ r
    let mut particular = vec![Monomial::one(); n];
    let mut torsion_part = vec![Monomial::one(); n];
    let mut torsion_syms = Vec::new();
    for l in 0..r {
        let d = &factors[l];
        let root = transformed[l].pow(&BigRational::new(BigInt::one(), d.clone()));
        let eps = (!d.is_one()).then(|| {
            let s = Symbol::torsion(
                format!("{}{}", opts.torsion_prefix, torsion_syms.len() + 1),
                d.to_u64().expect("invariant factor fits in u64"),
            );
            torsion_syms.push(s.clone());
            s
        });
        for i in 0..n {
            let e = &v[i][l];
            if e.is_zero() {
                continue;
            }
            particular[i] = particular[i].mul(&root.pow(&to_rat(e)));
            if let Some(s) = &eps {
                torsion_part[i] = torsion_part[i].clone().with_factor(s.clone(), to_rat(e));
            }
        }
    }

    let mut kernel: Vec<Vec<BigInt>> = (0..n).map(|i| v[i][r..].to_vec()).collect();
    let f = n - r;
    let chosen = if opts.name_after_unknowns { choose_coordinates(&mut kernel, f) } else { Vec::new() };

    // names of the kernel columns
    let mut names: Vec<Symbol> = chosen.iter().map(|&i| system.unknowns[i].clone()).collect();
    let taken: BTreeSet<String> = system.unknowns.iter().map(|s| s.name.clone()).collect();
    let mut counter = 0;
    while names.len() < f {
        counter += 1;
        let name = format!("{}{}", opts.free_prefix, counter);
        if !taken.contains(&name) {
            names.push(Symbol::param(name));
        }
    }
    // column c named after unknown i: t_c = u_i / (P_i E_i)
    let column_value: Vec<Monomial> = (0..f)
        .map(|c| match chosen.get(c) {
            Some(&i) => Monomial::symbol(names[c].clone()).div(&particular[i].mul(&torsion_part[i])),
            None => Monomial::symbol(names[c].clone()),
        })
        .collect();

    let mut exprs = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = particular[i].mul(&torsion_part[i]);
        for (c, k) in kernel[i].iter().enumerate() {
            if !k.is_zero() {
                e = e.mul(&column_value[c].pow(&to_rat(k)));
            }
        }
        if let Some(cap) = opts.denominator_cap {
            let den = e.max_denominator();
            if den > cap {
                return Err(ScalarError::DenominatorCap { den, cap }.into());
            }
        }
        exprs.push(e);
    }
    let used: BTreeSet<&Symbol> = exprs.iter().flat_map(|e| e.symbols()).collect();
    let torsion = torsion_syms.into_iter().filter(|s| used.contains(s)).collect();
    Ok(SolutionFamily {
        unknowns: system.unknowns.clone(),
        exprs,
        free: names,
        torsion,
        conditions,
        invariant_factors: factors.iter().map(|d| d.to_u64().unwrap()).collect(),
    })
}

/// Greedily picks rows of the kernel basis, in unknown order, that can be
/// made coordinate rows by unimodular column operations. On return the
/// chosen rows of `kernel` form an identity block.
fn choose_coordinates(kernel: &mut [Vec<BigInt>], f: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    for i in 0..kernel.len() {
        let c = chosen.len();
        if c == f {
            break;
        }
        let g = kernel[i][c..].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_one() {
            continue;
        }
        // column Euclid on row i over columns c..f
        loop {
            let nz: Vec<usize> = (c..f).filter(|&j| !kernel[i][j].is_zero()).collect();
            let piv = *nz.iter().min_by_key(|&&j| kernel[i][j].abs()).unwrap();
            swap_cols(kernel, c, piv);
            if nz.len() == 1 {
                break;
            }
            for j in c + 1..f {
                if !kernel[i][j].is_zero() {
                    let q = kernel[i][j].div_floor(&kernel[i][c]);
                    col_sub(kernel, j, c, &q);
                }
            }
        }
        if kernel[i][c].is_negative() {
            for row in kernel.iter_mut() {
                row[c] = -&row[c];
            }
        }
        for j in 0..c {
            let q = kernel[i][j].clone();
            if !q.is_zero() {
                col_sub(kernel, j, c, &q);
            }
        }
        chosen.push(i);
    }
    chosen
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_sub(m: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[target] -= t;
        }
    }
}

/// Sorts and deduplicates conditions, orienting each so that its first
/// symbol has a positive exponent.
fn normalize_conditions(conds: Vec<Monomial>) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    for c in conds {
        let c = match c.exponents().values().next() {
            Some(e) if e.is_negative() => c.inv(),
            _ => c,
        };
        if !c.is_one() && !out.iter().any(|o| is_one_modulo(&c, std::slice::from_ref(o))) {
            out.push(c);
        }
    }
    out.sort_by_key(|c| c.to_string());
    out
}

/// Whether `m` lies in the subgroup generated by `conditions` (each
/// condition `c` meaning `c = 1`), taking torsion orders into account.
pub fn is_one_modulo(m: &Monomial, conditions: &[Monomial]) -> bool {
    if m.is_one() {
        return true;
    }
    if conditions.is_empty() {
        return false;
    }
    // collect coordinates: unit, then every symbol
    let mut symbols: BTreeSet<Symbol> = m.symbols().cloned().collect();
    for c in conditions {
        symbols.extend(c.symbols().cloned());
    }
    let symbols: Vec<Symbol> = symbols.into_iter().collect();
    let mut den = m.unit().denom().clone();
    let mut bump = |mono: &Monomial| {
        den = den.lcm(mono.unit().denom());
        for e in mono.exponents().values() {
            den = den.lcm(e.denom());
        }
    };
    bump(m);
    conditions.iter().for_each(&mut bump);
    let coords = |mono: &Monomial| -> Vec<BigInt> {
        let mut v = vec![(mono.unit() * to_rat(&den)).to_integer()];
        for s in &symbols {
            v.push((mono.exponent(s) * to_rat(&den)).to_integer());
        }
        v
    };
    let dim = symbols.len() + 1;
    let mut generators: Vec<Vec<BigInt>> = conditions.iter().map(coords).collect();
    // the unit coordinate lives modulo den, torsion coordinates modulo den·order
    let mut unit_gen = vec![BigInt::zero(); dim];
    unit_gen[0] = den.clone();
    generators.push(unit_gen);
    for (k, s) in symbols.iter().enumerate() {
        if let Some(d) = s.order {
            let mut g = vec![BigInt::zero(); dim];
            g[k + 1] = &den * BigInt::from(d);
            generators.push(g);
        }
    }
    let a: IntMatrix = (0..dim).map(|row| generators.iter().map(|g| g[row].clone()).collect()).collect();
    solve_integer(&a, &coords(m)).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn sym(s: &str) -> Symbol {
        Symbol::param(s)
    }

    #[test]
    fn square_root_of_one() {
        let mut sys = MultSystem::new(vec![sym("u")]);
        sys.push(vec![2], Monomial::one()).unwrap();
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert!(fam.free.is_empty());
        assert_eq!(fam.torsion, vec![Symbol::torsion("eps1", 2)]);
        assert_eq!(fam.exprs[0], m("eps1[2]"));
        assert!(fam.failing_rows(&sys).is_empty());
    }

    #[test]
    fn family_json_round_trip() {
        let mut sys = MultSystem::new(vec![sym("x"), sym("y")]);
        sys.push(vec![4, 0], m("1")).unwrap();
        sys.push(vec![1, -1], m("a")).unwrap();
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        assert!(text.contains("[4]"), "{text}");
        let back: SolutionFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn inconsistent_system() {
        let mut sys = MultSystem::new(vec![sym("u"), sym("v")]);
        sys.push(vec![1, 1], Monomial::one()).unwrap();
        sys.push(vec![2, 2], m("-1")).unwrap();
        assert!(matches!(solve(&sys, &SolveOptions::default()), Err(SolveError::Inconsistent { .. })));
    }

    #[test]
    fn conditions_are_reported() {
        let mut sys = MultSystem::new(vec![sym("u")]);
        sys.push(vec![1], m("a")).unwrap();
        sys.push(vec![1], m("b")).unwrap();
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(fam.conditions.len(), 1);
        assert!(is_one_modulo(&m("a/b"), &fam.conditions));
        assert!(fam.failing_rows(&sys).is_empty());
    }

    #[test]
    fn free_parameters_named_after_unknowns() {
        let mut sys = MultSystem::new(vec![sym("x1"), sym("x2"), sym("x3")]);
        sys.push(vec![1, 1, -1], Monomial::one()).unwrap();
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(fam.free, vec![sym("x1"), sym("x2")]);
        assert_eq!(fam.exprs[2], m("x1*x2"));
    }

    #[test]
    fn lattice_membership() {
        assert!(is_one_modulo(&m("x1^6/x2^6"), &[m("x1^3/x2^3")]));
        assert!(!is_one_modulo(&m("x1/x2"), &[m("x1^3/x2^3")]));
        assert!(is_one_modulo(&m("q[4]^2"), &[m("q[4]^2")]));
        assert!(is_one_modulo(&m("zeta3 * q[3]^2"), &[m("zeta3^2 * q[3]")]));
        assert!(!is_one_modulo(&m("-1"), &[]));
    }

    #[test]
    fn brute_force_counts() {
        // u^2 v = 1, v^3 = 1 over roots of unity of order dividing 6
        let mut sys = MultSystem::new(vec![sym("u"), sym("v")]);
        sys.push(vec![2, 1], Monomial::one()).unwrap();
        sys.push(vec![0, 3], Monomial::one()).unwrap();
        let fam = solve(&sys, &SolveOptions::default()).unwrap();
        assert!(fam.free.is_empty());
        let predicted: u64 = fam.torsion_orders().iter().product();
        let mut count = 0;
        for a in 0..6 {
            for b in 0..6 {
                if (2 * a + b) % 6 == 0 && (3 * b) % 6 == 0 {
                    count += 1;
                }
            }
        }
        assert_eq!(predicted, count);
    }
}
