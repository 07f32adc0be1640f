//! Perron data of flow graphs and reduced flow graphs over the census sample.

mod common;

use veering_core::flowgraph::build_flow_graph;
use veering_core::spectral::{adjacency, perron, SpectralError};
use veering_core::triangulation::{build_edge_stacks, VeeringTriangulation};
use veering_core::walls::{verify_theorem, WallContext};

#[test]
fn reduced_graphs_have_eigenvalue_three() {
    for sig in common::census() {
        let vt = VeeringTriangulation::from_signature(&sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let ctx = WallContext { vt: &vt, stacks: &stacks };
        let (_, _, red) = verify_theorem(&sig, &ctx).unwrap();
        let fg = build_flow_graph(&vt);

        let a = adjacency(&fg);
        assert!(a.row_sums().iter().all(|&s| s == 3));
        assert_eq!(a.irreducible, fg.scc().is_strongly_connected(), "{sig}");
        if !a.irreducible {
            assert_eq!(perron(&a), Err(SpectralError::NotIrreducible));
        }

        let r = adjacency(&red);
        assert!(r.irreducible && r.row_sums().iter().all(|&s| s == 3));
        let p = perron(&r).unwrap_or_else(|e| panic!("{sig}: {e}"));
        assert!((p.lambda - 3.0).abs() <= 1e-9, "{sig}: {}", p.lambda);
        assert!(p.right_vec.iter().all(|x| (x - 1.0).abs() <= 1e-9), "{sig}");
        assert!(p.left_vec.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert!(p.residual < 1e-10);
    }
}
