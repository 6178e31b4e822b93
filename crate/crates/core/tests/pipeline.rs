use nearrack::braided::BraidedSpace;
use nearrack::document::{BraidingDocument, DiagramDocument};
use nearrack::dynkin::{classify, gdd, Gdd};
use nearrack::nichols::{graded_dims, NicholsOptions};
use nearrack::scalars::{Assignment, Cyc};
use nearrack::solutions::SetSolution;
use nearrack::tequiv::{solve_tequiv, TEquivOutcome};

fn root(n: u64, k: i64) -> Cyc {
    Cyc::root_of_unity(n, k)
}

/// The diagonal braiding with `q_ij` on the flip, splitting each edge as `q_ij = q̃, q_ji = 1`.
fn diagonal(g: &Gdd<Cyc>) -> BraidedSpace<Cyc> {
    let n = g.size();
    let mut coeffs = vec![Cyc::one(1); n * n];
    for i in 0..n {
        coeffs[n * i + i] = g.vertex(i).clone();
    }
    for (i, j, q) in g.edges() {
        coeffs[n * i + j] = q.clone();
    }
    BraidedSpace::new(SetSolution::flip(n), coeffs).unwrap()
}

#[test]
fn catalogue_dimensions_match_computed_totals() {
    let cases = [
        // Cartan A2 at a cube root of unity
        Gdd::new(vec![root(3, 1), root(3, 1)], vec![(0, 1, root(3, 2))]).unwrap(),
        // two fermions joined by an order-3 edge
        Gdd::new(vec![root(2, 1), root(2, 1)], vec![(0, 1, root(3, 1))]).unwrap(),
        // disconnected points
        Gdd::new(vec![root(4, 1), root(4, 1)], vec![]).unwrap(),
    ];
    for g in cases {
        let labels = classify(&g);
        let predicted = labels.iter().find_map(|l| l.predicted_dim).expect("catalogue predicts a dimension");
        let h = graded_dims(&diagonal(&g), &NicholsOptions::exact(10)).unwrap();
        assert_eq!(h.total.map(|t| t as u64), Some(predicted), "{labels:?}");
    }
}

#[test]
fn twisted_braiding_feeds_the_diagram_and_classifier() {
    let doc = BraidingDocument::from_json(
        r#"{"size": 2, "sigma": ["(1,2)", "(1,2)"], "tau": "(1,2)",
            "coefficients": ["a", "b", "b", "e"], "conditions": []}"#,
    )
    .unwrap();
    let (b, assumptions) = doc.braiding().unwrap();
    let TEquivOutcome::Certified(cert) = solve_tequiv(&b, &assumptions).unwrap() else {
        panic!("the involutive braiding is twistable");
    };
    let symbolic = gdd(&cert.derived).unwrap();
    let text = DiagramDocument::from_gdd(&symbolic);
    assert_eq!(text.vertices, vec!["b", "b"]);
    // at b = ζ3 and ae = ζ3² the twisted diagram is Cartan A2
    let asg = Assignment::parse("a=1,e=zeta3^2,b=zeta3").unwrap();
    let vertices = symbolic.vertices().iter().map(|v| v.evaluate(&asg).unwrap()).collect();
    let edges = symbolic.edges().map(|(i, j, q)| (i, j, q.evaluate(&asg).unwrap())).collect();
    let labels = classify(&Gdd::new(vertices, edges).unwrap());
    assert!(labels.iter().any(|l| l.predicted_dim == Some(27)), "{labels:?}");
}

