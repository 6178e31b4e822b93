//! JSON documents for solutions, with permutations in 1-based cycle notation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braided::{coefficient_symbol, SymbolicBraiding};
use crate::dynkin::{DynkinError, Gdd};
use crate::permkit::{PermError, Permutation};
use crate::scalars::{parse_value, Cyc, Monomial, ScalarError, Symbol};
use crate::solutions::{Rack, SetSolution, SolutionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("expected {expected} permutations, found {got}")]
    Count { expected: usize, got: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Diagram(#[from] DynkinError),
    #[error("equation without '=': {0}")]
    Equation(String),
    #[error("left side of {0} is not a single unknown")]
    NotAnUnknown(String),
}

/// Splits `lhs = rhs` into monomials.
pub fn parse_equation(text: &str) -> Result<(Monomial, Monomial), DocumentError> {
    let (l, r) = text.split_once('=').ok_or_else(|| DocumentError::Equation(text.into()))?;
    Ok((Monomial::parse(l)?, Monomial::parse(r)?))
}

/// `unknown = expression` lines as a substitution map.
pub fn parse_substitution(lines: &[String]) -> Result<BTreeMap<Symbol, Monomial>, DocumentError> {
    let mut map = BTreeMap::new();
    for line in lines {
        let (l, r) = parse_equation(line)?;
        let mut syms = l.exponents().iter();
        match (syms.next(), syms.next()) {
            (Some((s, e)), None) if e.is_one() && l.unit().is_zero() => {
                map.insert(s.clone(), r);
            }
            _ => return Err(DocumentError::NotAnUnknown(line.clone())),
        }
    }
    Ok(map)
}

/// `lhs = rhs` lines as monomials `lhs/rhs` constrained to equal 1.
pub fn parse_conditions(lines: &[String]) -> Result<Vec<Monomial>, DocumentError> {
    lines.iter().map(|l| parse_equation(l).map(|(a, b)| a.div(&b))).collect()
}

/// Right components: one involution shared by all elements, or one per element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    Common(String),
    PerElement(Vec<String>),
}

/// `{size, sigma, tau, metadata}` with cycle strings such as `"(2,5)(3,4)"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub size: usize,
    pub sigma: Vec<String>,
    pub tau: TauSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn parse_all(texts: &[String], n: usize) -> Result<Vec<Permutation>, DocumentError> {
    if texts.len() != n {
        return Err(DocumentError::Count { expected: n, got: texts.len() });
    }
    Ok(texts.iter().map(|t| Permutation::parse_cycles(t, n)).collect::<Result<_, _>>()?)
}

impl SolutionDocument {
    pub fn to_solution(&self) -> Result<SetSolution, DocumentError> {
        let sigma = parse_all(&self.sigma, self.size)?;
        let tau = match &self.tau {
            TauSpec::Common(t) => vec![Permutation::parse_cycles(t, self.size)?; self.size],
            TauSpec::PerElement(ts) => parse_all(ts, self.size)?,
        };
        Ok(SetSolution::new(sigma, tau)?)
    }

    /// Canonical form: shared right components are written once.
    pub fn from_solution(s: &SetSolution) -> Self {
        let sigma = s.sigmas().iter().map(|p| p.to_string()).collect();
        let tau = match s.common_tau() {
            Some(t) => TauSpec::Common(t.to_string()),
            None => TauSpec::PerElement(s.taus().iter().map(|p| p.to_string()).collect()),
        };
        Self { size: s.size(), sigma, tau, metadata: BTreeMap::new() }
    }

    /// Re-serializes through the parsed solution, keeping metadata.
    pub fn canonical(&self) -> Result<Self, DocumentError> {
        let mut out = Self::from_solution(&self.to_solution()?);
        out.metadata = self.metadata.clone();
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

/// A solution with coefficients: `coefficients[m·i + j]` is `R_{i,j}` as a
/// monomial in named parameters, and `conditions` are `lhs = rhs` constraints
/// on them. Without coefficients every `R_{i,j}` is the unknown `x_{m·i+j+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidingDocument {
    #[serde(flatten)]
    pub solution: SolutionDocument,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<String>,
}

impl BraidingDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))
    }

    pub fn has_coefficients(&self) -> bool {
        !self.coefficients.is_empty()
    }

    /// The symbolic braiding and its conditions.
    pub fn braiding(&self) -> Result<(SymbolicBraiding, Vec<Monomial>), DocumentError> {
        let s = self.solution.to_solution()?;
        let m = s.size();
        let coeffs = if self.coefficients.is_empty() {
            (0..m * m).map(|k| Monomial::symbol(coefficient_symbol(m, k / m, k % m))).collect()
        } else {
            if self.coefficients.len() != m * m {
                return Err(DocumentError::Count { expected: m * m, got: self.coefficients.len() });
            }
            self.coefficients.iter().map(|c| Monomial::parse(c)).collect::<Result<_, _>>()?
        };
        let b = SymbolicBraiding::new(s, coeffs).map_err(|e| DocumentError::Json(e.to_string()))?;
        Ok((b, parse_conditions(&self.conditions)?))
    }
}

/// A generalized Dynkin diagram: vertex labels and 1-based labelled edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(usize, usize, String)>,
}

impl DiagramDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))
    }

    fn build<S>(&self, parse: impl Fn(&str) -> Result<S, ScalarError>) -> Result<Gdd<S>, DocumentError>
    where
        S: crate::braided::Scalar,
    {
        let vertices = self.vertices.iter().map(|v| parse(v)).collect::<Result<Vec<_>, _>>()?;
        let mut edges = Vec::new();
        for (i, j, label) in &self.edges {
            if *i == 0 || *j == 0 {
                return Err(DocumentError::Diagram(DynkinError::BadEdge(*i, *j)));
            }
            edges.push((i - 1, j - 1, parse(label)?));
        }
        Ok(Gdd::new(vertices, edges)?)
    }

    /// Labels as concrete values such as `-1` or `zeta3^2`.
    pub fn concrete(&self) -> Result<Gdd<Cyc>, DocumentError> {
        self.build(parse_value)
    }

    /// Labels as monomials.
    pub fn symbolic(&self) -> Result<Gdd<Monomial>, DocumentError> {
        self.build(Monomial::parse)
    }

    pub fn from_gdd<S: crate::braided::Scalar>(g: &Gdd<S>) -> Self {
        Self {
            vertices: g.vertices().iter().map(|v| v.label()).collect(),
            edges: g.edges().map(|(i, j, s)| (i + 1, j + 1, s.label())).collect(),
        }
    }
}

/// A rack given by a named construction or a 1-based table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RackSpec {
    Dihedral { n: usize },
    Affine { modulus: usize, unit: usize },
    /// Conjugation `x ▷ y = x y x⁻¹` on the listed permutations.
    Conjugation { degree: usize, elements: Vec<String> },
    Table { rows: Vec<Vec<usize>> },
}

impl RackSpec {
    pub fn build(&self) -> Result<Rack, DocumentError> {
        Ok(match self {
            RackSpec::Dihedral { n } => Rack::dihedral(*n),
            RackSpec::Affine { modulus, unit } => Rack::affine(*modulus, *unit)?,
            RackSpec::Conjugation { degree, elements } => {
                let perms = elements
                    .iter()
                    .map(|e| Permutation::parse_cycles(e, *degree))
                    .collect::<Result<Vec<_>, _>>()?;
                Rack::conjugation(&perms)?
            }
            RackSpec::Table { rows } => Rack::from_one_based(rows)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_rack_document_round_trip() {
        let text = r#"{"size": 3, "sigma": ["()", "(1,3,2)", "(1,2,3)"], "tau": "(2,3)"}"#;
        let doc = SolutionDocument::from_json(text).unwrap();
        let canon = doc.canonical().unwrap();
        assert_eq!(canon.sigma, vec!["id", "(1,3,2)", "(1,2,3)"]);
        assert_eq!(canon.tau, TauSpec::Common("(2,3)".into()));
        let again = SolutionDocument::from_json(&canon.to_json()).unwrap();
        assert_eq!(again.canonical().unwrap().to_json(), canon.to_json());
    }

    #[test]
    fn per_element_tau_and_errors() {
        let flip = SetSolution::flip(2);
        let doc = SolutionDocument::from_solution(&flip);
        assert_eq!(doc.to_solution().unwrap(), flip);
        let bad = SolutionDocument { size: 2, sigma: vec!["id".into()], tau: TauSpec::Common("id".into()), metadata: BTreeMap::new() };
        assert!(matches!(bad.to_solution(), Err(DocumentError::Count { expected: 2, got: 1 })));
        assert!(SolutionDocument::from_json("{").is_err());
    }

    #[test]
    fn braiding_documents() {
        let text = r#"{"size": 2, "sigma": ["(1,2)", "(1,2)"], "tau": "(1,2)",
            "coefficients": ["a", "b", "b", "e"], "conditions": ["a*e = b^2"]}"#;
        let doc = BraidingDocument::from_json(text).unwrap();
        let (b, conds) = doc.braiding().unwrap();
        assert_eq!(b.coeff(1, 1), &Monomial::parse("e").unwrap());
        assert_eq!(conds, vec![Monomial::parse("a*e/b^2").unwrap()]);
        let generic = BraidingDocument { coefficients: vec![], ..doc.clone() };
        assert_eq!(generic.braiding().unwrap().0.coeff(1, 0), &Monomial::parse("x3").unwrap());
        let short = BraidingDocument { coefficients: vec!["a".into()], ..doc };
        assert!(matches!(short.braiding(), Err(DocumentError::Count { expected: 4, got: 1 })));
    }

    #[test]
    fn diagram_documents() {
        let doc = DiagramDocument::from_json(r#"{"vertices": ["-1", "zeta3"], "edges": [[1, 2, "zeta3^2"]]}"#).unwrap();
        let g = doc.concrete().unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.tilde(0, 1), Cyc::root_of_unity(3, 2));
        assert_eq!(DiagramDocument::from_gdd(&g), doc);
        let sym = DiagramDocument::from_json(r#"{"vertices": ["b", "b"], "edges": [[1, 2, "a*e"]]}"#).unwrap();
        assert_eq!(sym.symbolic().unwrap().edge_count(), 1);
        let bad = DiagramDocument { vertices: vec!["1".into()], edges: vec![(0, 1, "2".into())] };
        assert!(bad.concrete().is_err());
    }

    #[test]
    fn equations_and_substitutions() {
        let (l, r) = parse_equation("x1^3 = x2^3").unwrap();
        assert_eq!(l.div(&r), Monomial::parse("x1^3/x2^3").unwrap());
        let map = parse_substitution(&["x6 = x1*x2".to_string()]).unwrap();
        assert_eq!(map[&Symbol::param("x6")], Monomial::parse("x1*x2").unwrap());
        assert!(parse_substitution(&["x1*x2 = x3".to_string()]).is_err());
        assert!(parse_equation("x1").is_err());
    }

    #[test]
    fn rack_specs() {
        assert_eq!(RackSpec::Dihedral { n: 3 }.build().unwrap(), Rack::dihedral(3));
        let spec: RackSpec = serde_json::from_str(r#"{"kind": "affine", "modulus": 5, "unit": 2}"#).unwrap();
        assert_eq!(spec.build().unwrap().size(), 5);
        let conj = RackSpec::Conjugation { degree: 3, elements: vec!["(1,2)".into(), "(1,3)".into(), "(2,3)".into()] };
        assert_eq!(conj.build().unwrap().size(), 3);
    }
}
