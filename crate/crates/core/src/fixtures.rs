//! The example corpus: near-rack solutions with their coefficient families,
//! twist maps and diagrams as printed, and an end-to-end checker.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braided::{ybe_coefficient_system, SymbolicBraiding};
pub use crate::document::{parse_conditions, parse_equation, parse_substitution};
use crate::document::{DocumentError, RackSpec, SolutionDocument};
use crate::dynkin::{check_tau_symmetry, gdd};
use crate::multsolve::snf::smith_normal_form;
use crate::multsolve::{solve, SolveOptions};
use crate::scalars::{Monomial, ScalarError, Symbol};
use crate::solutions::{enum_near_racks, isomorphic, NearRackSolution, SetSolution};
use crate::tequiv::{certificate_from_z, solve_tequiv, verify_certificate, TEquivCertificate, TEquivOutcome};

const SOURCES: &[&str] = &[
    include_str!("../fixtures/dihedral3.json"),
    include_str!("../fixtures/alt4-three-cycles.json"),
    include_str!("../fixtures/s4-four-cycles-first.json"),
    include_str!("../fixtures/s4-four-cycles-second.json"),
    include_str!("../fixtures/aff5-2.json"),
    include_str!("../fixtures/aff5-3.json"),
    include_str!("../fixtures/s4-transpositions-first.json"),
    include_str!("../fixtures/s4-transpositions-second.json"),
    include_str!("../fixtures/aff7-3.json"),
    include_str!("../fixtures/aff7-5.json"),
    include_str!("../fixtures/s5-transpositions-first.json"),
    include_str!("../fixtures/s5-transpositions-second.json"),
    include_str!("../fixtures/involutive-two.json"),
    include_str!("../fixtures/involutive-three.json"),
    include_str!("../fixtures/involutive-four.json"),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("fixture {id}: {reason}")]
    Malformed { id: String, reason: String },
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Dependent unknowns as printed, `"x6 = x1"`, and constraints `"x1^3 = x2^3"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub relations: Vec<String>,
    #[serde(default)]
    pub conditions: Vec<String>,
}

/// A branch choice (`substitution`) and the printed `z_i` with `φ(w_i) = z_i w_{τ(i)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistSpec {
    #[serde(default)]
    pub substitution: Vec<String>,
    pub z: Vec<String>,
}

/// Vertex labels and 1-based labelled edges of the twisted diagonal braiding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub id: String,
    pub title: String,
    pub solution: SolutionDocument,
    /// Rack whose near-rack solutions are enumerated; defaults to the derived rack.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rack: Option<RackSpec>,
    /// Expected number of isomorphism classes over the rack.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TwistSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramSpec>,
    /// Checks that fail because the recorded data is wrong, keyed by check
    /// name, with the reason.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub known_failures: BTreeMap<String, String>,
}

impl Fixture {
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        serde_json::from_str(text).map_err(|e| FixtureError::Malformed { id: "?".into(), reason: e.to_string() })
    }

    pub fn set_solution(&self) -> Result<SetSolution, FixtureError> {
        Ok(self.solution.to_solution()?)
    }

    /// The generic braiding restricted to the printed family.
    pub fn printed_braiding(&self) -> Result<Option<(SymbolicBraiding, Vec<Monomial>)>, FixtureError> {
        let Some(family) = &self.family else { return Ok(None) };
        let s = self.set_solution()?;
        let map = parse_substitution(&family.relations)?;
        let b = SymbolicBraiding::generic(s).substitute(&map);
        Ok(Some((b, parse_conditions(&family.conditions)?)))
    }

    /// The printed braiding on the twist branch, its conditions and the printed `z`.
    pub fn twist_data(&self) -> Result<Option<(SymbolicBraiding, Vec<Monomial>, Vec<Monomial>)>, FixtureError> {
        let (Some(twist), Some((b, conds))) = (&self.twist, self.printed_braiding()?) else {
            return Ok(None);
        };
        let branch = parse_substitution(&twist.substitution)?;
        let b = b.substitute(&branch);
        let conds = conds.iter().map(|c| c.substitute(&branch)).filter(|c| !c.is_one()).collect();
        let z = twist
            .z
            .iter()
            .map(|t| Monomial::parse(t).map(|m| m.substitute(&branch)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some((b, conds, z)))
    }

    /// Certificate built from the printed `z` on the twist branch.
    pub fn printed_certificate(&self) -> Result<Option<TEquivCertificate>, FixtureError> {
        let Some((b, conds, z)) = self.twist_data()? else { return Ok(None) };
        certificate_from_z(&b, z, &conds)
            .map(Some)
            .map_err(|e| FixtureError::Malformed { id: self.id.clone(), reason: e.to_string() })
    }
}

/// Every fixture of the corpus, in a fixed order.
pub fn corpus() -> Result<Vec<Fixture>, FixtureError> {
    SOURCES.iter().map(|s| Fixture::from_json(s)).collect()
}

pub fn find(id: &str) -> Result<Option<Fixture>, FixtureError> {
    Ok(corpus()?.into_iter().find(|f| f.id == id))
}

/// Free rank and nontrivial invariant factors of `ℤ^gens / ⟨relations⟩`.
pub fn lattice_shape(gens: usize, relations: &[Vec<BigInt>]) -> (usize, Vec<u64>) {
    if relations.is_empty() {
        return (gens, Vec::new());
    }
    let snf = smith_normal_form(&relations.to_vec());
    let torsion = snf.factors.iter().filter(|f| !f.is_one()).filter_map(|f| f.to_u64()).collect();
    (gens - snf.rank(), torsion)
}

/// Shape of the printed family: generators are the unknowns not solved
/// for and the torsion symbols; relations are the conditions and the
/// torsion orders.
fn printed_shape(s: &SetSolution, family: &FamilySpec) -> Result<(usize, Vec<u64>), FixtureError> {
    let sys = ybe_coefficient_system(s);
    let map = parse_substitution(&family.relations)?;
    let conds = parse_conditions(&family.conditions)?;
    let mut gens: BTreeSet<Symbol> = sys.unknowns().iter().filter(|u| !map.contains_key(u)).cloned().collect();
    for m in map.values().chain(&conds) {
        gens.extend(m.symbols().cloned());
    }
    let gens: Vec<Symbol> = gens.into_iter().collect();
    let coords = |m: &Monomial| -> Vec<BigInt> { gens.iter().map(|g| m.exponent(g).to_integer()).collect() };
    let mut rels: Vec<Vec<BigInt>> = conds.iter().map(coords).collect();
    for (k, g) in gens.iter().enumerate() {
        if let Some(d) = g.order {
            let mut row = vec![BigInt::from(0); gens.len()];
            row[k] = BigInt::from(d);
            rels.push(row);
        }
    }
    Ok(lattice_shape(gens.len(), &rels))
}

/// One named check of a fixture run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub id: String,
    pub checks: Vec<Check>,
    /// Check names listed as known failures in the fixture.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub known_failures: Vec<String>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Failing checks not listed as known failures.
    pub fn unexpected_failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed && !self.known_failures.contains(&c.name)).collect()
    }

    /// Known failures that now pass.
    pub fn stale_known_failures(&self) -> Vec<&str> {
        self.known_failures
            .iter()
            .filter(|k| self.check(k).is_none_or(|c| c.passed))
            .map(String::as_str)
            .collect()
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: &str, result: Result<(bool, String), String>) {
        let (passed, detail) = result.unwrap_or_else(|e| (false, e));
        self.0.push(Check { name: name.into(), passed, detail });
    }
}

fn check_solution(f: &Fixture) -> Result<(bool, String), String> {
    let s = f.set_solution().map_err(|e| e.to_string())?;
    let nr = NearRackSolution::from_solution(s).map_err(|e| e.to_string())?;
    let failures = nr.identity_failures();
    Ok((failures.is_empty(), if failures.is_empty() { "near-rack identities hold".into() } else { failures.join("; ") }))
}

fn check_enumeration(f: &Fixture, expected: usize) -> Result<(bool, String), String> {
    let s = f.set_solution().map_err(|e| e.to_string())?;
    let nr = NearRackSolution::from_solution(s).map_err(|e| e.to_string())?;
    let rack = match &f.rack {
        Some(spec) => spec.build().map_err(|e| e.to_string())?,
        None => nr.derived_rack(),
    };
    let same_rack = isomorphic(&rack.to_solution(), &nr.derived_rack().to_solution())
        .map_err(|e| e.to_string())?
        .is_some();
    let e = enum_near_racks(&rack);
    let found = e
        .classes
        .iter()
        .any(|c| isomorphic(c.solution(), nr.solution()).ok().flatten().is_some());
    let ok = same_rack && found && e.classes.len() == expected;
    Ok((
        ok,
        format!(
            "{} classes ({} compatible involutions), expected {expected}; derived rack matches: {same_rack}; printed solution found: {found}",
            e.classes.len(),
            e.raw.len()
        ),
    ))
}

fn check_rows(f: &Fixture) -> Result<(bool, String), String> {
    let (b, conds) = f.printed_braiding().map_err(|e| e.to_string())?.ok_or("no family")?;
    let sys = ybe_coefficient_system(b.solution());
    let failing: Vec<usize> = (0..sys.len())
        .filter(|&k| !crate::multsolve::is_one_modulo(&sys.residual(k, b.coeffs()), &conds))
        .collect();
    Ok((failing.is_empty(), format!("{} rows, {} failing", sys.len(), failing.len())))
}

fn check_shape(f: &Fixture, family: &FamilySpec) -> Result<(bool, String), String> {
    let s = f.set_solution().map_err(|e| e.to_string())?;
    let printed = printed_shape(&s, family).map_err(|e| e.to_string())?;
    let fam = solve(&ybe_coefficient_system(&s), &SolveOptions::default()).map_err(|e| e.to_string())?;
    let torsion_rels: Vec<Vec<BigInt>> = fam
        .torsion_orders()
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let mut row = vec![BigInt::from(0); fam.torsion.len()];
            row[k] = BigInt::from(d);
            row
        })
        .collect();
    let (_, solved_torsion) = lattice_shape(fam.torsion.len(), &torsion_rels);
    let solved = (fam.free.len(), solved_torsion);
    Ok((
        printed == solved,
        format!("printed rank {} torsion {:?}; solved rank {} torsion {:?}", printed.0, printed.1, solved.0, solved.1),
    ))
}

fn check_twist(f: &Fixture) -> Result<(bool, String), String> {
    let (b, conds, z) = f.twist_data().map_err(|e| e.to_string())?.ok_or("no twist")?;
    let outcome = solve_tequiv(&b, &conds).map_err(|e| e.to_string())?;
    let TEquivOutcome::Certified(cert) = outcome else {
        return Ok((false, "the twist equations are inconsistent".into()));
    };
    let admits = cert.admits(&z);
    let powers = cert.power_identities_hold();
    let report = cert
        .instantiate_default()
        .map_err(|e| e.to_string())
        .and_then(|c| verify_certificate(&c).map_err(|e| e.to_string()))?;
    let printed = f.printed_certificate().map_err(|e| e.to_string())?.ok_or("no twist")?;
    let printed_report = printed
        .instantiate_default()
        .map_err(|e| e.to_string())
        .and_then(|c| verify_certificate(&c).map_err(|e| e.to_string()))?;
    let ok = admits && powers && report.passed() && printed_report.passed();
    Ok((
        ok,
        format!(
            "printed z admitted: {admits}; power identities: {powers}; solved certificate verifies: {}; printed certificate verifies: {}; extra conditions: {}",
            report.passed(),
            printed_report.passed(),
            cert.conditions.len()
        ),
    ))
}

fn check_diagram(f: &Fixture, spec: &DiagramSpec) -> Result<(bool, String), String> {
    let cert = f.printed_certificate().map_err(|e| e.to_string())?.ok_or("no twist")?;
    let g = gdd(&cert.derived).map_err(|e| e.to_string())?;
    let mut mismatches = Vec::new();
    for (i, text) in spec.vertices.iter().enumerate() {
        let want = Monomial::parse(text).map_err(|e| e.to_string())?;
        if *g.vertex(i) != want {
            mismatches.push(format!("vertex {}: {} vs {want}", i + 1, g.vertex(i)));
        }
    }
    let mut listed = BTreeSet::new();
    for (i, j, text) in &spec.edges {
        let want = Monomial::parse(text).map_err(|e| e.to_string())?;
        listed.insert((i.min(j) - 1, i.max(j) - 1));
        let got = g.tilde(i - 1, j - 1);
        if got != want {
            mismatches.push(format!("edge {i}-{j}: {got} vs {want}"));
        }
    }
    for (i, j, s) in g.edges() {
        if !listed.contains(&(i, j)) {
            mismatches.push(format!("unexpected edge {}-{}: {s}", i + 1, j + 1));
        }
    }
    let symmetric = check_tau_symmetry(&g, &cert.tau).map_err(|e| e.to_string())?;
    if !symmetric {
        mismatches.push("diagram is not tau-symmetric".into());
    }
    Ok((
        mismatches.is_empty(),
        if mismatches.is_empty() { "labels match; tau-symmetric".into() } else { mismatches.join("; ") },
    ))
}

/// Runs every check that the fixture has data for.
pub fn run(f: &Fixture) -> FixtureReport {
    let mut checks = Checks(Vec::new());
    checks.record("solution", check_solution(f));
    if let Some(n) = f.classes {
        checks.record("enumeration", check_enumeration(f, n));
    }
    if let Some(family) = &f.family {
        checks.record("family rows", check_rows(f));
        checks.record("family shape", check_shape(f, family));
    }
    if f.twist.is_some() {
        checks.record("twist", check_twist(f));
    }
    if let Some(spec) = &f.diagram {
        checks.record("diagram", check_diagram(f, spec));
    }
    FixtureReport { id: f.id.clone(), checks: checks.0, known_failures: f.known_failures.keys().cloned().collect() }
}

/// Runs fixtures concurrently; reports keep the input order.
pub fn run_all(fixtures: &[Fixture]) -> Vec<FixtureReport> {
    fixtures.par_iter().map(run).collect()
}
