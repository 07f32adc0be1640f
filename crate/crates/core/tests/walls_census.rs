//! Wall detection and theorem verification over the census sample.

mod common;

use veering_core::triangulation::{build_edge_stacks, VeeringTriangulation};
use veering_core::walls::{accounting, verify_theorem, WallContext};

#[test]
fn theorem_holds_on_census() {
    let mut hist = std::collections::BTreeMap::new();
    for sig in common::census() {
        let vt = VeeringTriangulation::from_signature(&sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let ctx = WallContext { vt: &vt, stacks: &stacks };
        let (report, walls, red) = verify_theorem(&sig, &ctx).unwrap_or_else(|e| panic!("{sig}: {e:?}"));
        assert!(report.passed());
        let fg = veering_core::flowgraph::build_flow_graph(&vt);
        accounting(&fg, &red, &walls).unwrap_or_else(|e| panic!("{sig}: {e} {walls:?}"));
        for w in &walls {
            *hist.entry((w.width, w.twisted)).or_insert(0) += 1;
        }
    }
    eprintln!("{hist:?}");
}

#[test]
fn detector_matches_exhaustive_search() {
    let mut checked = 0;
    for sig in common::census().into_iter().filter(|s| common::tet_count(s) <= 8) {
        let vt = VeeringTriangulation::from_signature(&sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let ctx = WallContext { vt: &vt, stacks: &stacks };
        let (_, walls, _) = verify_theorem(&sig, &ctx).unwrap();
        veering_core::walls::oracle::compare(&ctx, &walls).unwrap_or_else(|e| panic!("{sig}: {e}"));
        checked += 1;
    }
    assert!(checked >= 300);
}

#[test]
fn corrupted_graph_yields_counterexample() {
    use veering_core::flowgraph::FlowEdge;
    use veering_core::walls::{verify_with, WallError};
    let sig = "gLLAQbddeeffennmann_011200";
    let vt = VeeringTriangulation::from_signature(sig, false).unwrap();
    let stacks = build_edge_stacks(&vt).unwrap();
    let ctx = WallContext { vt: &vt, stacks: &stacks };
    let fg = veering_core::flowgraph::build_flow_graph(&vt);
    // Redirect every arc leaving vertex 0 back to itself: {0} becomes a
    // component with incoming arcs that no wall explains.
    let edges: Vec<FlowEdge> =
        fg.edges.iter().map(|&e| if e.source == 0 { FlowEdge { target: 0, ..e } } else { e }).collect();
    let bad = veering_core::flowgraph::FlowGraph::from_parts(fg.vertices.clone(), edges);
    match verify_with(sig, &ctx, &bad) {
        Err(WallError::TheoremViolation(cx)) => {
            assert_eq!(cx.signature, sig);
            assert_eq!(cx.component, Some(vec![0]));
        }
        other => panic!("expected a counterexample, got {other:?}"),
    }
}
