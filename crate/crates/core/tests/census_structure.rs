//! Triangulation and flow-graph invariants over the census sample, checked
//! against reference data from independent software.

mod common;

use veering_core::flowgraph::build_flow_graph;
use veering_core::triangulation::{build_edge_stacks, VeeringTriangulation};

#[test]
fn census_sample_is_large_enough() {
    let c = common::census();
    assert!(c.len() >= 100);
    assert!(c.iter().all(|s| common::tet_count(s) <= 12));
}

#[test]
fn strong_connectivity_matches_reference() {
    for row in common::oracle() {
        for flip in [false, true] {
            let vt = VeeringTriangulation::from_signature(&row.sig, flip).unwrap();
            let sc = build_flow_graph(&vt).scc().is_strongly_connected();
            assert_eq!(sc, row.strongly_connected, "{} flip={flip}", row.sig);
        }
    }
}

#[test]
fn type_counts_match_reference_up_to_colour_swap() {
    for row in common::oracle() {
        let vt = VeeringTriangulation::from_signature(&row.sig, false).unwrap();
        let c = vt.type_counts();
        let [t, a, b] = row.type_counts;
        assert_eq!(c.toggle, t, "{}", row.sig);
        let mut ours = [c.red_fan, c.blue_fan];
        let mut theirs = [a, b];
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs, "{}", row.sig);
    }
}

#[test]
fn stack_pattern_and_flow_degrees() {
    for sig in common::census() {
        let vt = VeeringTriangulation::from_signature(&sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap_or_else(|e| panic!("{sig}: {e}"));
        let fg = build_flow_graph(&vt);
        let out = fg.outdegrees();
        for s in &stacks {
            assert_eq!(out[fg.index_of(s.edge).unwrap()], s.outdegree(), "{sig}");
        }
        assert_eq!(fg.vertex_count(), vt.tet_count());
        assert_eq!(fg.edge_count(), 3 * vt.tet_count());
        assert!(fg.indegrees().iter().all(|&d| d == 3));
    }
}
