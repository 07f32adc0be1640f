//! The flow graph, its strongly connected components and the reduced flow graph.
//!
//! Vertices are edges of the triangulation. Each tetrahedron contributes three
//! arcs into its bottom edge: one from its top edge and one from each
//! equatorial edge whose colour differs from the top edge.

use crate::triangulation::VeeringTriangulation;
use petgraph::graph::DiGraph;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowGraphError {
    #[error("reduced flow graph has {components} strongly connected components")]
    ReductionNotStronglyConnected { components: usize },
}

/// Which edge of the tetrahedron an arc starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceRole {
    Top,
    SideA,
    SideB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FlowEdge {
    pub source: usize,
    pub target: usize,
    /// Contributing tetrahedron; `usize::MAX` for graphs not built from a triangulation.
    pub tet: usize,
    pub role: SourceRole,
}

/// A directed multigraph on a set of labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowGraph {
    /// Vertex labels, ascending.
    pub vertices: Vec<usize>,
    pub edges: Vec<FlowEdge>,
    #[serde(skip)]
    slot: Vec<Option<usize>>,
}

impl FlowGraph {
    /// Builds the graph from labels and arcs; labels are sorted and deduplicated.
    pub fn from_parts(mut vertices: Vec<usize>, edges: Vec<FlowEdge>) -> FlowGraph {
        vertices.sort_unstable();
        vertices.dedup();
        let size = vertices.last().map_or(0, |&m| m + 1);
        let mut slot = vec![None; size];
        for (i, &v) in vertices.iter().enumerate() {
            slot[v] = Some(i);
        }
        for e in &edges {
            assert!(
                slot.get(e.source).copied().flatten().is_some()
                    && slot.get(e.target).copied().flatten().is_some(),
                "arc endpoint is not a vertex"
            );
        }
        FlowGraph { vertices, edges, slot }
    }

    /// A plain multigraph on `0..n`.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> FlowGraph {
        let edges = arcs
            .iter()
            .map(|&(source, target)| FlowEdge { source, target, tet: usize::MAX, role: SourceRole::Top })
            .collect();
        FlowGraph::from_parts((0..n).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of a label in [`FlowGraph::vertices`].
    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.slot.get(label).copied().flatten()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.index_of(label).is_some()
    }

    pub fn indegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count()];
        for e in &self.edges {
            d[self.index_of(e.target).unwrap()] += 1;
        }
        d
    }

    pub fn outdegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count()];
        for e in &self.edges {
            d[self.index_of(e.source).unwrap()] += 1;
        }
        d
    }

    /// Out-neighbours by index, with multiplicity.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            s[self.index_of(e.source).unwrap()].push(self.index_of(e.target).unwrap());
        }
        s
    }

    /// Deletes the given vertices together with every arc touching them.
    pub fn remove_vertices(&self, removed: &BTreeSet<usize>) -> FlowGraph {
        let vertices = self.vertices.iter().copied().filter(|v| !removed.contains(v)).collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(&e.source) && !removed.contains(&e.target))
            .collect();
        FlowGraph::from_parts(vertices, edges)
    }

    pub fn scc(&self) -> Condensation {
        Condensation::new(self)
    }
}

/// The flow graph of a veering triangulation.
pub fn build_flow_graph(vt: &VeeringTriangulation) -> FlowGraph {
    let mut edges = Vec::with_capacity(3 * vt.tet_count());
    for t in 0..vt.tet_count() {
        let target = vt.bottom_edge[t];
        edges.push(FlowEdge { source: vt.top_edge[t], target, tet: t, role: SourceRole::Top });
        let [(a, b), (c, d)] = vt.opposite_sides(t);
        edges.push(FlowEdge { source: vt.edge(t, a, b), target, tet: t, role: SourceRole::SideA });
        edges.push(FlowEdge { source: vt.edge(t, c, d), target, tet: t, role: SourceRole::SideB });
    }
    FlowGraph::from_parts((0..vt.edge_count()).collect(), edges)
}

/// Strongly connected components and the quotient graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condensation {
    /// Components as ascending label lists, numbered by smallest label.
    pub components: Vec<Vec<usize>>,
    /// Component of each vertex, by index.
    pub component_of: Vec<usize>,
    /// Distinct arcs between different components, sorted.
    pub dag: Vec<(usize, usize)>,
    /// Components with an incoming arc in the quotient.
    pub infinitesimal: Vec<bool>,
}

impl Condensation {
    fn new(g: &FlowGraph) -> Condensation {
        let n = g.vertex_count();
        let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(n, g.edge_count());
        let nodes: Vec<_> = (0..n).map(|_| pg.add_node(())).collect();
        for e in &g.edges {
            pg.add_edge(nodes[g.index_of(e.source).unwrap()], nodes[g.index_of(e.target).unwrap()], ());
        }
        let mut raw: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&pg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        // Indices are ordered like labels, so this numbers by smallest label.
        raw.sort_unstable_by_key(|c| c[0]);
        let mut component_of = vec![0; n];
        for (k, c) in raw.iter().enumerate() {
            for &i in c {
                component_of[i] = k;
            }
        }
        let dag: BTreeSet<(usize, usize)> = g
            .edges
            .iter()
            .map(|e| (component_of[g.index_of(e.source).unwrap()], component_of[g.index_of(e.target).unwrap()]))
            .filter(|(a, b)| a != b)
            .collect();
        let mut infinitesimal = vec![false; raw.len()];
        for &(_, b) in &dag {
            infinitesimal[b] = true;
        }
        Condensation {
            components: raw.into_iter().map(|c| c.into_iter().map(|i| g.vertices[i]).collect()).collect(),
            component_of,
            dag: dag.into_iter().collect(),
            infinitesimal,
        }
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn infinitesimal_count(&self) -> usize {
        self.infinitesimal.iter().filter(|&&b| b).count()
    }

    /// Components with no outgoing quotient arc.
    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.components.len()];
        for &(a, _) in &self.dag {
            has_out[a] = true;
        }
        (0..self.components.len()).filter(|&c| !has_out[c]).collect()
    }

    /// The root if the quotient is a rooted tree of height at most one: a
    /// unique component with an arc to every other, all others being sinks.
    pub fn height_one_root(&self) -> Option<usize> {
        let k = self.components.len();
        if k == 1 {
            return Some(0);
        }
        let roots: Vec<usize> = (0..k).filter(|&c| !self.infinitesimal[c]).collect();
        if roots.len() != 1 {
            return None;
        }
        let r = roots[0];
        let from_root = self.dag.iter().filter(|&&(a, _)| a == r).count();
        let all_from_root = self.dag.iter().all(|&(a, _)| a == r);
        (from_root == k - 1 && all_from_root).then_some(r)
    }

    pub fn is_rooted_height_one_tree(&self) -> bool {
        self.height_one_root().is_some()
    }

    /// Labels reachable from component `c`, ascending.
    pub fn closure(&self, c: usize) -> Vec<usize> {
        let mut seen = vec![false; self.components.len()];
        let mut stack = vec![c];
        seen[c] = true;
        while let Some(x) = stack.pop() {
            for &(a, b) in &self.dag {
                if a == x && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        let mut out: Vec<usize> = (0..seen.len())
            .filter(|&k| seen[k])
            .flat_map(|k| self.components[k].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// The inclusion-minimal nonempty sets closed under following arcs: the
    /// closures of sink components, which are the sink components themselves.
    pub fn minimal_sets(&self) -> Vec<Vec<usize>> {
        self.sinks().into_iter().map(|c| self.closure(c)).collect()
    }
}

/// The flow graph with the given infinitesimal cycles and the arcs entering them removed.
pub fn reduce(fg: &FlowGraph, infinitesimal_vertices: &BTreeSet<usize>) -> Result<FlowGraph, FlowGraphError> {
    let red = fg.remove_vertices(infinitesimal_vertices);
    let c = red.scc();
    if !c.is_strongly_connected() {
        return Err(FlowGraphError::ReductionNotStronglyConnected { components: c.component_count() });
    }
    Ok(red)
}

/// Graphviz rendering; vertices in `highlight` are drawn dashed.
pub fn to_dot(g: &FlowGraph, name: &str, highlight: &BTreeSet<usize>) -> String {
    let mut s = format!("digraph {name} {{\n");
    for &v in &g.vertices {
        if highlight.contains(&v) {
            s.push_str(&format!("  e{v} [label=\"{v}\", style=dashed, color=red];\n"));
        } else {
            s.push_str(&format!("  e{v} [label=\"{v}\"];\n"));
        }
    }
    for e in &g.edges {
        let role = match e.role {
            SourceRole::Top => "top",
            SourceRole::SideA | SourceRole::SideB => "side",
        };
        if e.tet == usize::MAX {
            s.push_str(&format!("  e{} -> e{};\n", e.source, e.target));
        } else {
            s.push_str(&format!("  e{} -> e{} [label=\"t{} {role}\"];\n", e.source, e.target, e.tet));
        }
    }
    s.push_str("}\n");
    s
}
