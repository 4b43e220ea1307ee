//! Minimal undirected simple graph used as the realization of a growing chain.
//!
//! Vertices are dense `usize` ids assigned in creation order. Graphs are
//! append-only: chain growth never deletes a vertex or an edge. Adjacency is
//! stored as per-vertex neighbor lists (chains have maximum degree 4).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {0} out of range (graph has {1} vertices)")]
    InvalidVertex(usize, usize),
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),
}

/// Undirected simple graph with degree queries and deterministic edge iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    // Insertion-ordered, endpoints normalized to (min, max).
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Graph with `vertex_count` isolated vertices and no edges.
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); vertex_count],
            edges: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Appends `count` new isolated vertices, returning the id of the first.
    pub fn add_vertices(&mut self, count: usize) -> usize {
        let first = self.adjacency.len();
        self.adjacency.resize(first + count, Vec::new());
        first
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adjacency.len() && self.adjacency[u].contains(&v)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.adjacency.len() {
            Err(GraphError::InvalidVertex(v, self.adjacency.len()))
        } else {
            Ok(())
        }
    }

    /// Adds the undirected edge (u, v).
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        self.edges.push((u.min(v), u.max(v)));
        Ok(())
    }

    /// Adds edges along the cyclic order of `vertices` (last connects back to first).
    ///
    /// Validates everything up front so a failed call leaves the graph unchanged.
    pub fn add_cycle(&mut self, vertices: &[usize]) -> Result<(), GraphError> {
        if vertices.len() < 3 {
            return Err(GraphError::CycleTooShort(vertices.len()));
        }
        for &v in vertices {
            self.check_vertex(v)?;
        }
        let pairs: Vec<(usize, usize)> = (0..vertices.len())
            .map(|i| {
                let u = vertices[i];
                let v = vertices[(i + 1) % vertices.len()];
                (u.min(v), u.max(v))
            })
            .collect();
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if self.has_edge(u, v) || pairs[..i].contains(&(u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
        }
        for (u, v) in pairs {
            self.adjacency[u].push(v);
            self.adjacency[v].push(u);
            self.edges.push((u, v));
        }
        Ok(())
    }

    /// All edges exactly once, sorted by (min, max). Stable across calls.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    /// Edges in insertion order, starting from the `from`-th one.
    ///
    /// Growth only appends, so this is exactly the set of edges added since
    /// the graph had `from` edges.
    pub fn edges_since(&self, from: usize) -> &[(usize, usize)] {
        &self.edges[from..]
    }

    /// Degree sequence indexed by vertex id.
    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_graph_is_empty() {
        let g = Graph::new(0);
        assert_eq!(g.vertex_count(), 0);
        assert!(g.edge_list().is_empty());

        let g = Graph::new(6);
        assert_eq!(g.vertex_count(), 6);
        assert!((0..6).all(|v| g.degree(v) == 0));

        let g = Graph::new(8);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn cycle_degrees() {
        let mut g = Graph::new(6);
        g.add_cycle(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 2));
        assert_eq!(g.edge_list().len(), 6);

        let mut g8 = Graph::new(8);
        g8.add_cycle(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert_eq!(g8.edge_count(), 8);
        assert!((0..8).all(|v| g8.degree(v) == 2));
    }

    #[test]
    fn duplicate_cycle_rejected() {
        let mut g = Graph::new(6);
        g.add_cycle(&[0, 1, 2, 3, 4, 5]).unwrap();
        let before = g.edge_list();
        let err = g.add_cycle(&[0, 1, 2, 3, 4, 5]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge(..)));
        // failed call left the graph unchanged
        assert_eq!(g.edge_list(), before);
    }

    #[test]
    fn bridge_between_two_hexagons() {
        // two C6 cycles + one bridge -> degree multiset {2: 10, 3: 2}
        let mut g = Graph::new(12);
        g.add_cycle(&[0, 1, 2, 3, 4, 5]).unwrap();
        g.add_cycle(&[6, 7, 8, 9, 10, 11]).unwrap();
        g.add_edge(0, 6).unwrap();
        let degs = g.degrees();
        assert_eq!(degs.iter().filter(|&&d| d == 2).count(), 10);
        assert_eq!(degs.iter().filter(|&&d| d == 3).count(), 2);
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn invalid_vertex_rejected() {
        let mut g = Graph::new(3);
        assert!(matches!(g.add_edge(0, 7), Err(GraphError::InvalidVertex(7, 3))));
    }

    #[test]
    fn edge_list_normalized_and_unique() {
        let mut g = Graph::new(4);
        g.add_edge(3, 1).unwrap();
        assert_eq!(g.edge_list(), vec![(1, 3)]);
        assert_eq!(g.add_edge(1, 3), Err(GraphError::DuplicateEdge(1, 3)));
    }

    #[test]
    fn handshake_lemma() {
        let mut g = Graph::new(9);
        g.add_cycle(&[0, 1, 2, 3, 4, 5]).unwrap();
        g.add_edge(5, 6).unwrap();
        g.add_edge(6, 7).unwrap();
        g.add_edge(6, 8).unwrap();
        let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn edge_list_stable_and_sorted() {
        let mut g = Graph::new(5);
        g.add_edge(4, 0).unwrap();
        g.add_edge(2, 1).unwrap();
        g.add_edge(3, 0).unwrap();
        let a = g.edge_list();
        let b = g.edge_list();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(a, sorted);
    }

    #[test]
    fn edges_since_tracks_growth() {
        let mut g = Graph::new(6);
        g.add_cycle(&[0, 1, 2]).unwrap();
        let mark = g.edge_count();
        g.add_edge(3, 4).unwrap();
        g.add_edge(4, 5).unwrap();
        assert_eq!(g.edges_since(mark), &[(3, 4), (4, 5)]);
    }
}
