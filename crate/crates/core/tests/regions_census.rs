//! Complementary regions of the flow graph and reduced flow graph over the census sample.

mod common;

use veering_core::flowgraph::build_flow_graph;
use veering_core::triangulation::{build_edge_stacks, VeeringTriangulation};
use veering_core::walls::regions::{complementary_regions, Core, GraphVariant, Pattern};
use veering_core::walls::{verify_theorem, WallContext};

#[test]
fn regions_are_bands_with_tongues() {
    let mut failures = Vec::new();
    let mut stats = std::collections::BTreeMap::new();
    for sig in common::census() {
        let vt = VeeringTriangulation::from_signature(&sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let ctx = WallContext { vt: &vt, stacks: &stacks };
        let (_, walls, red) = verify_theorem(&sig, &ctx).unwrap();
        let fg = build_flow_graph(&vt);
        for (variant, g) in [(GraphVariant::Full, &fg), (GraphVariant::Reduced, &red)] {
            match complementary_regions(&ctx, g, &walls, variant) {
                Ok(regions) => {
                    for r in regions {
                        *stats.entry((variant == GraphVariant::Full, r.core == Core::Mobius, r.pattern)).or_insert(0) += 1;
                    }
                }
                Err(e) => failures.push(format!("{sig} {variant:?}: {e}")),
            }
        }
    }
    eprintln!("{stats:?}");
    for f in failures.iter().take(30) {
        eprintln!("{f}");
    }
    assert!(failures.is_empty(), "{} failures", failures.len());
}

fn setup(sig: &str) -> (VeeringTriangulation, Vec<veering_core::triangulation::EdgeStack>) {
    let vt = VeeringTriangulation::from_signature(sig, false).unwrap();
    let stacks = build_edge_stacks(&vt).unwrap();
    (vt, stacks)
}

#[test]
fn example_region_census() {
    let sig = "eLAkbbcdddhwqj_2102";
    let (vt, stacks) = setup(sig);
    let ctx = WallContext { vt: &vt, stacks: &stacks };
    let (_, walls, red) = verify_theorem(sig, &ctx).unwrap();
    let full = complementary_regions(&ctx, &build_flow_graph(&vt), &walls, GraphVariant::Full).unwrap();
    let reduced = complementary_regions(&ctx, &red, &walls, GraphVariant::Reduced).unwrap();
    let brief = |rs: &[veering_core::walls::regions::ComplementaryRegion]| {
        rs.iter().map(|r| (r.core, r.tongue_count, r.pattern)).collect::<Vec<_>>()
    };
    assert_eq!(
        brief(&full),
        vec![(Core::Mobius, 5, Pattern::Zigzag), (Core::Annulus, 2, Pattern::Zigzag), (Core::Mobius, 1, Pattern::Zigzag)]
    );
    assert_eq!(brief(&reduced), vec![(Core::Mobius, 5, Pattern::Crisscross(1)), (Core::Mobius, 1, Pattern::Crisscross(3))]);
    assert_eq!(reduced[1].source_wall, Some(0));
}

#[test]
fn wrong_graph_is_rejected() {
    let sig = "eLAkbbcdddhwqj_2102";
    let (vt, stacks) = setup(sig);
    let ctx = WallContext { vt: &vt, stacks: &stacks };
    let (_, walls, red) = verify_theorem(sig, &ctx).unwrap();
    let fg = build_flow_graph(&vt);
    assert!(!walls.is_empty());
    // The full graph read as reduced leaves the wall's arcs short.
    assert!(complementary_regions(&ctx, &fg, &walls, GraphVariant::Reduced).is_err());
    // The reduced graph read as full has long arcs.
    assert!(complementary_regions(&ctx, &red, &walls, GraphVariant::Full).is_err());
}

#[test]
fn dropping_a_graph_edge_breaks_the_pattern() {
    let sig = "fLAMcaccdeejsnaxk_20010";
    let (vt, stacks) = setup(sig);
    let ctx = WallContext { vt: &vt, stacks: &stacks };
    let fg = build_flow_graph(&vt);
    let original = complementary_regions(&ctx, &fg, &[], GraphVariant::Full).unwrap();
    let mut rejected = 0;
    for k in 0..fg.edges.len() {
        let mut edges = fg.edges.clone();
        edges.remove(k);
        let g = veering_core::flowgraph::FlowGraph::from_parts(fg.vertices.clone(), edges);
        match complementary_regions(&ctx, &g, &[], GraphVariant::Full) {
            Err(_) => rejected += 1,
            Ok(regions) => assert_ne!(regions, original),
        }
    }
    assert!(rejected > fg.edges.len() / 2);
}
