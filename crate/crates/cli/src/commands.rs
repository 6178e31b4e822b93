//! One function per subcommand. Each returns human-readable text, a JSON
//! value, and whether the result counts as a success.

use std::collections::BTreeMap;
use std::path::Path;

use nearrack::braided::{ybe_coefficient_system, SymbolicBraiding};
use nearrack::document::{
    parse_substitution, BraidingDocument, DiagramDocument, RackSpec, SolutionDocument,
};
use nearrack::dynkin::{check_tau_symmetry, classify, gdd, render, Gdd, RenderFormat};
use nearrack::fixtures::{corpus, run_all, Fixture};
use nearrack::multsolve::{is_one_modulo, solve, SolveOptions};
use nearrack::nichols::{graded_dims, NicholsError, NicholsOptions};
use nearrack::scalars::{Assignment, Cyc, Monomial};
use nearrack::solutions::{derived_solution, enum_near_racks, verify, NearRackSolution, Rack};
use nearrack::tequiv::{solve_tequiv, solved_family_braiding, verify_certificate, TEquivOutcome};
use serde_json::{json, Value};

use crate::error::{failed, input, CliError};

pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Outcome {
    fn success(text: String, json: Value) -> Self {
        Self { text, json, ok: true }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn pairs(list: &[(usize, usize)]) -> Vec<[usize; 2]> {
    list.iter().map(|&(a, b)| [a + 1, b + 1]).collect()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn verify_cmd(path: &Path) -> Result<Outcome, CliError> {
    let s = SolutionDocument::from_json(&read(path)?).and_then(|d| d.to_solution()).map_err(input)?;
    let r = verify(&s);
    let fixed = pairs(&r.fixed_pairs);
    let mut text = format!(
        "braided: {}\ninvolutive: {}\nrack type: {}\nnear-rack: {}\n",
        yes(r.is_ybe),
        yes(r.involutive),
        yes(r.rack_type),
        yes(r.near_rack)
    );
    if let Some((a, b, c)) = s.ybe_witness() {
        text.push_str(&format!("braid relation fails at ({}, {}, {})\n", a + 1, b + 1, c + 1));
    }
    let shown: Vec<String> = fixed.iter().map(|[a, b]| format!("({a},{b})")).collect();
    text.push_str(&format!("fixed pairs: {}\n", if shown.is_empty() { "none".into() } else { shown.join(" ") }));
    if r.near_rack {
        let nr = NearRackSolution::from_solution(s.clone()).map_err(failed)?;
        let failures = nr.identity_failures();
        if !failures.is_empty() {
            text.push_str(&format!("near-rack identities fail: {}\n", failures.join("; ")));
        }
    }
    let json = json!({
        "braided": r.is_ybe,
        "involutive": r.involutive,
        "rack_type": r.rack_type,
        "near_rack": r.near_rack,
        "fixed_pairs": fixed,
    });
    Ok(Outcome { text, json, ok: r.is_ybe })
}

fn one_based_table(rack: &Rack) -> Vec<Vec<usize>> {
    rack.table().iter().map(|row| row.iter().map(|x| x + 1).collect()).collect()
}

pub fn derive_cmd(path: &Path) -> Result<Outcome, CliError> {
    let s = SolutionDocument::from_json(&read(path)?).and_then(|d| d.to_solution()).map_err(input)?;
    let (d, rack) = derived_solution(&s).map_err(failed)?;
    let doc = SolutionDocument::from_solution(&d);
    let table = one_based_table(&rack);
    let mut text = String::from("derived solution:\n");
    text.push_str(&format!("  sigma: {}\n", doc.sigma.join(" ")));
    text.push_str("rack (row x lists x > y):\n");
    for row in &table {
        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
        text.push_str(&format!("  {}\n", cells.join(" ")));
    }
    Ok(Outcome::success(text, json!({"derived": doc, "rack": table})))
}

/// A rack file is a rack description or a solution whose derived rack is used.
fn load_rack(text: &str) -> Result<Rack, CliError> {
    if let Ok(spec) = serde_json::from_str::<RackSpec>(text) {
        return spec.build().map_err(input);
    }
    let s = SolutionDocument::from_json(text).and_then(|d| d.to_solution()).map_err(input)?;
    Ok(derived_solution(&s).map_err(failed)?.1)
}

pub fn enum_cmd(path: &Path) -> Result<Outcome, CliError> {
    let rack = load_rack(&read(path)?)?;
    let e = enum_near_racks(&rack);
    let taus: Vec<String> = e.classes.iter().map(|c| c.tau().to_string()).collect();
    let noun = if taus.len() == 1 { "class" } else { "classes" };
    let listed: Vec<String> = taus.iter().map(|t| format!("tau={t}")).collect();
    let text = if taus.is_empty() {
        format!("0 classes\ncompatible involutions: {}\n", e.raw.len())
    } else {
        format!("{} {noun}: {}\ncompatible involutions: {}\n", taus.len(), listed.join(", "), e.raw.len())
    };
    let classes: Vec<Value> = e
        .classes
        .iter()
        .map(|c| json!({"tau": c.tau().to_string(), "solution": SolutionDocument::from_solution(c.solution())}))
        .collect();
    Ok(Outcome::success(text, json!({"classes": classes, "compatible_involutions": e.raw.len()})))
}

fn load_braiding(path: &Path) -> Result<BraidingDocument, CliError> {
    BraidingDocument::from_json(&read(path)?).map_err(input)
}

/// Residual constraints on named coefficients, or the solved generic family.
pub fn solve_cmd(path: &Path, conditions_only: bool) -> Result<Outcome, CliError> {
    let doc = load_braiding(path)?;
    let (b, assumed) = doc.braiding().map_err(input)?;
    if doc.has_coefficients() {
        let sys = ybe_coefficient_system(b.solution());
        let mut residuals: Vec<Monomial> = Vec::new();
        for k in 0..sys.len() {
            let r = sys.residual(k, b.coeffs());
            // r = 1 and 1/r = 1 are the same constraint; keep one deterministically
            let inv = r.inv();
            let r = if inv.to_string() < r.to_string() { inv } else { r };
            if !is_one_modulo(&r, &assumed) && !residuals.contains(&r) {
                residuals.push(r);
            }
        }
        let lines: Vec<String> = residuals.iter().map(|r| format!("{r} = 1")).collect();
        let text = if lines.is_empty() {
            "no conditions: the coefficients satisfy every row\n".to_string()
        } else {
            format!("{}\n", lines.join("\n"))
        };
        let ok = residuals.is_empty();
        return Ok(Outcome { text, json: json!({"conditions": residuals}), ok });
    }
    let fam = solve(&ybe_coefficient_system(b.solution()), &SolveOptions::default()).map_err(failed)?;
    if conditions_only {
        let lines: Vec<String> = fam.conditions.iter().map(|c| format!("{c} = 1")).collect();
        let text = if lines.is_empty() { "no conditions\n".to_string() } else { format!("{}\n", lines.join("\n")) };
        return Ok(Outcome::success(text, json!({"conditions": fam.conditions})));
    }
    let mut text = format!(
        "free parameters: {}\ntorsion orders: {:?}\n",
        fam.free.len(),
        fam.torsion_orders()
    );
    text.push_str(&fam.to_string());
    Ok(Outcome::success(text, serde_json::to_value(&fam).map_err(failed)?))
}

/// The document's braiding, or the solved family when no coefficients are given,
/// with a branch substitution applied.
fn branch_braiding(doc: &BraidingDocument, branch: &[String]) -> Result<(SymbolicBraiding, Vec<Monomial>), CliError> {
    let (b, conds) = if doc.has_coefficients() {
        doc.braiding().map_err(input)?
    } else {
        let s = doc.solution.to_solution().map_err(input)?;
        solved_family_braiding(&s).map_err(failed)?
    };
    let map = parse_substitution(branch).map_err(input)?;
    let conds = conds.iter().map(|c| c.substitute(&map)).filter(|c| !c.is_one()).collect();
    Ok((b.substitute(&map), conds))
}

pub fn tequiv_cmd(path: &Path, branch: &[String]) -> Result<Outcome, CliError> {
    let doc = load_braiding(path)?;
    let (b, conds) = branch_braiding(&doc, branch)?;
    let outcome = solve_tequiv(&b, &conds).map_err(failed)?;
    let cert = match outcome {
        TEquivOutcome::Certified(c) => c,
        TEquivOutcome::Obstructed { certificate, value } => {
            let text = format!("obstructed: the twist equations force 1 = {value}\n");
            let cert: Vec<String> = certificate.iter().map(|c| c.to_string()).collect();
            return Ok(Outcome { text, json: json!({"obstructed": value, "certificate": cert}), ok: false });
        }
    };
    let mut text = format!("tau: {}\n", cert.tau);
    for (i, z) in cert.z.iter().enumerate() {
        text.push_str(&format!("phi(w{}) = {z} w{}\n", i + 1, cert.tau.apply(i) + 1));
    }
    let lines: Vec<String> = cert.conditions.iter().map(|c| format!("{c} = 1")).collect();
    text.push_str(&format!("conditions: {}\n", if lines.is_empty() { "none".into() } else { lines.join(", ") }));
    let verified = cert
        .instantiate_default()
        .map_err(failed)
        .and_then(|c| verify_certificate(&c).map_err(failed))?;
    text.push_str(&format!("verified at the default point: {}\n", yes(verified.passed())));
    let derived = SolutionDocument::from_solution(cert.derived.solution());
    let json = json!({
        "tau": cert.tau.to_string(),
        "z": cert.z,
        "conditions": cert.conditions,
        "derived": derived,
        "derived_coefficients": cert.derived.coeffs(),
        "verified": verified.passed(),
    });
    Ok(Outcome { text, json, ok: verified.passed() })
}

fn budget(e: NicholsError) -> CliError {
    match e {
        NicholsError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => failed(other),
    }
}

pub fn nichols_cmd(path: &Path, assignment: &str, opts: &NicholsOptions) -> Result<Outcome, CliError> {
    let doc = load_braiding(path)?;
    let (b, conds) = doc.braiding().map_err(input)?;
    let asg = Assignment::parse(assignment).map_err(input)?;
    for c in &conds {
        if !c.evaluate(&asg).map_err(input)?.is_one() {
            return Err(CliError::Usage(format!("the assignment violates the condition {c} = 1")));
        }
    }
    let concrete = b.evaluate(&asg).map_err(input)?;
    if let Some((i, j, k)) = concrete.braid_witness() {
        let text = format!("not a braiding at this point: the braid relation fails at ({}, {}, {})\n", i + 1, j + 1, k + 1);
        return Ok(Outcome { text, json: json!({"braided": false}), ok: false });
    }
    let h = graded_dims(&concrete, opts).map_err(budget)?;
    let dims: Vec<String> = h.dims.iter().map(usize::to_string).collect();
    let mut text = format!("dims: {}\n", dims.join(" "));
    match h.total {
        Some(t) => text.push_str(&format!("total: {t}\n")),
        None => text.push_str(&format!("total: not reached by degree {}\n", opts.cutoff)),
    }
    text.push_str(&format!("hilbert series: {}\n", h.series()));
    Ok(Outcome::success(text, serde_json::to_value(&h).map_err(failed)?))
}

/// The diagram of a diagonal braiding, or of the twist of a near-rack braiding.
pub fn gdd_cmd(path: &Path, branch: &[String], assignment: Option<&str>, format: RenderFormat) -> Result<Outcome, CliError> {
    let doc = load_braiding(path)?;
    let (b, conds) = branch_braiding(&doc, branch)?;
    let (diagram, tau) = if b.diagonal_table().is_some() {
        (b, None)
    } else {
        match solve_tequiv(&b, &conds).map_err(failed)? {
            TEquivOutcome::Certified(c) => (c.derived.clone(), Some(c.tau.clone())),
            TEquivOutcome::Obstructed { value, .. } => {
                return Err(CliError::Failed(format!("no twist to diagonal type: 1 = {value} is forced")))
            }
        }
    };
    let g = gdd(&diagram).map_err(failed)?;
    let symmetric = match &tau {
        Some(t) => Some(check_tau_symmetry(&g, t).map_err(failed)?),
        None => None,
    };
    let (mut text, doc) = match assignment {
        None => (render(&g, format), DiagramDocument::from_gdd(&g)),
        Some(a) => {
            let asg = Assignment::parse(a).map_err(input)?;
            let concrete = evaluate_gdd(&g, &asg)?;
            (render(&concrete, format), DiagramDocument::from_gdd(&concrete))
        }
    };
    if format == RenderFormat::Ascii {
        if let Some(s) = symmetric {
            text.push_str(&format!("tau-symmetric: {}\n", yes(s)));
        }
    }
    let mut json = serde_json::to_value(&doc).map_err(failed)?;
    if let Some(s) = symmetric {
        json["tau_symmetric"] = json!(s);
    }
    Ok(Outcome { text, json, ok: symmetric.unwrap_or(true) })
}

fn evaluate_gdd(g: &Gdd<Monomial>, asg: &Assignment) -> Result<Gdd<Cyc>, CliError> {
    let vertices = g.vertices().iter().map(|v| v.evaluate(asg)).collect::<Result<Vec<_>, _>>().map_err(input)?;
    let mut edges = Vec::new();
    for (i, j, s) in g.edges() {
        edges.push((i, j, s.evaluate(asg).map_err(input)?));
    }
    Gdd::new(vertices, edges).map_err(failed)
}

pub fn classify_cmd(path: &Path) -> Result<Outcome, CliError> {
    let g = DiagramDocument::from_json(&read(path)?).and_then(|d| d.concrete()).map_err(input)?;
    let labels = classify(&g);
    let text = if labels.is_empty() {
        "no catalogue match\n".to_string()
    } else {
        labels.iter().map(|l| format!("{l}\n")).collect()
    };
    Ok(Outcome::success(text, serde_json::to_value(&labels).map_err(failed)?))
}

pub fn fixtures_cmd(ids: &[String]) -> Result<Outcome, CliError> {
    let all = corpus().map_err(failed)?;
    let selected: Vec<Fixture> = if ids.is_empty() {
        all
    } else {
        let by_id: BTreeMap<&str, &Fixture> = all.iter().map(|f| (f.id.as_str(), f)).collect();
        ids.iter()
            .map(|id| by_id.get(id.as_str()).map(|f| (*f).clone()).ok_or_else(|| CliError::Usage(format!("unknown fixture {id}"))))
            .collect::<Result<_, _>>()?
    };
    let reports = run_all(&selected);
    let width = reports.iter().flat_map(|r| r.checks.iter().map(|c| c.name.len())).max().unwrap_or(0);
    let id_width = reports.iter().map(|r| r.id.len()).max().unwrap_or(0);
    let mut text = String::new();
    let (mut clean, mut known, mut broken) = (0, 0, 0);
    for r in &reports {
        for c in &r.checks {
            let status = match (c.passed, r.known_failures.contains(&c.name)) {
                (true, false) => "PASS",
                (true, true) => "PASS (listed as known failure)",
                (false, true) => "KNOWN",
                (false, false) => "FAIL",
            };
            text.push_str(&format!("{:id_width$}  {:width$}  {status}  {}\n", r.id, c.name, c.detail));
        }
        if !r.unexpected_failures().is_empty() || !r.stale_known_failures().is_empty() {
            broken += 1;
        } else if r.passed() {
            clean += 1;
        } else {
            known += 1;
        }
    }
    text.push_str(&format!("{clean} passed, {known} with known failures, {broken} failed\n"));
    Ok(Outcome { text, json: serde_json::to_value(&reports).map_err(failed)?, ok: broken == 0 })
}
