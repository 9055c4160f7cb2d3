//! Simple undirected graphs on vertex set `1..=p`, graph6 and edge-list
//! text formats, and the combinatorial bounds that sandwich the maximum
//! likelihood threshold: the clique number from below and the k-core
//! emptiness threshold from above.
//!
//! Vertices are 1-indexed at every public boundary. Internally an edge
//! `{i, j}` with `i < j` is the bit at its position in the lexicographic
//! enumeration `(1,2), (1,3), .., (1,p), (2,3), ..` of all vertex pairs.

use std::fmt;

use thiserror::Error;

/// Largest vertex count accepted by the short graph6 form.
pub const MAX_GRAPH6_VERTICES: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("vertex {vertex} is out of range 1..={p}")]
    VertexOutOfRange { vertex: usize, p: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graphs with {0} vertices are not supported (limit {MAX_GRAPH6_VERTICES})")]
    TooManyVertices(usize),
    #[error("empty graph6 string")]
    EmptyGraph6,
    #[error("invalid graph6 header byte {0:#04x}")]
    BadGraph6Header(u8),
    #[error("byte {byte:#04x} at offset {offset} is outside the graph6 range 63..=126")]
    BadGraph6Byte { byte: u8, offset: usize },
    #[error("graph6 body has {found} bytes, expected {expected}")]
    Graph6Length { found: usize, expected: usize },
    #[error("malformed edge list: {0}")]
    EdgeList(String),
}

/// Undirected simple graph with a canonical bitset edge encoding.
///
/// Two graphs are equal exactly when they have the same vertex count and
/// the same edge bits, so `Graph` works directly as a hash key.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    p: usize,
    words: Vec<u64>,
}

/// Number of unordered vertex pairs on `p` vertices.
pub fn pair_count(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

// 0-based i < j
#[inline]
fn pair_index(p: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < p);
    i * p - i * (i + 1) / 2 + (j - i - 1)
}

impl Graph {
    /// Graph on `p` vertices with no edges.
    pub fn empty(p: usize) -> Result<Self, GraphError> {
        if p == 0 {
            return Err(GraphError::NoVertices);
        }
        if p > MAX_GRAPH6_VERTICES {
            return Err(GraphError::TooManyVertices(p));
        }
        Ok(Self {
            p,
            words: vec![0; pair_count(p).div_ceil(64).max(1)],
        })
    }

    /// Builds a graph from 1-indexed vertex pairs. Duplicates and reversed
    /// pairs collapse to a single edge.
    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(p)?;
        for &(a, b) in edges {
            g.insert_edge(a, b)?;
        }
        Ok(g)
    }

    /// Complete graph `K_p`.
    pub fn complete(p: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(p)?;
        for i in 0..p {
            for j in i + 1..p {
                g.set(i, j);
            }
        }
        Ok(g)
    }

    /// Cycle `1 - 2 - .. - p - 1`. For `p < 3` this is a path.
    pub fn cycle(p: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(p)?;
        for i in 0..p.saturating_sub(1) {
            g.set(i, i + 1);
        }
        if p >= 3 {
            g.set(0, p - 1);
        }
        Ok(g)
    }

    /// Graph whose edge set is given by the low `C(p,2)` bits of `mask`.
    /// Bits beyond the last pair are ignored.
    pub fn from_bitmask(p: usize, mask: u64) -> Result<Self, GraphError> {
        let mut g = Self::empty(p)?;
        let m = pair_count(p);
        g.words[0] = if m >= 64 {
            mask
        } else {
            mask & ((1u64 << m) - 1)
        };
        Ok(g)
    }

    /// Adds the edge `{a, b}` (1-indexed).
    pub fn insert_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        let (i, j) = self.check_pair(a, b)?;
        self.set(i, j);
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(usize, usize), GraphError> {
        for v in [a, b] {
            if v == 0 || v > self.p {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    p: self.p,
                });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(((a.min(b)) - 1, a.max(b) - 1))
    }

    fn set(&mut self, i: usize, j: usize) {
        let k = pair_index(self.p, i, j);
        self.words[k / 64] |= 1 << (k % 64);
    }

    /// Edge test on 0-based vertices.
    #[inline]
    pub(crate) fn adjacent0(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (i, j) = (i.min(j), i.max(j));
        let k = pair_index(self.p, i, j);
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    /// Edge test on 1-indexed vertices; out-of-range vertices are never adjacent.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        match self.check_pair(a, b) {
            Ok((i, j)) => self.adjacent0(i, j),
            Err(_) => false,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The edge bits as a single word, available while `C(p,2) <= 64`
    /// (that is, `p <= 11`).
    pub fn bitmask(&self) -> Option<u64> {
        (pair_count(self.p) <= 64).then(|| self.words[0])
    }

    /// Edges as 0-based `(i, j)` pairs with `i < j`, in lexicographic order.
    pub(crate) fn edges0(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = self.p;
        (0..p)
            .flat_map(move |i| (i + 1..p).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.adjacent0(i, j))
    }

    /// Edges as 1-indexed `(i, j)` pairs with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.edges0().map(|(i, j)| (i + 1, j + 1)).collect()
    }

    /// Neighbourhood of each vertex as a bitmask over 0-based vertices.
    pub(crate) fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.p];
        for (i, j) in self.edges0() {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency_masks()
            .iter()
            .map(|m| m.count_ones() as usize)
            .collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(p={}, edges={:?})", self.p, self.edges())
    }
}

impl fmt::Display for Graph {
    /// Edge-list text form, e.g. `3; 1 2; 2 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)?;
        for (i, j) in self.edges() {
            write!(f, "; {i} {j}")?;
        }
        Ok(())
    }
}

/// Alias for [`Graph::from_edges`].
pub fn graph_from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    Graph::from_edges(p, edges)
}

/// Decodes the short form of graph6 (at most 62 vertices). Surrounding
/// whitespace and an optional `>>graph6<<` prefix are accepted.
pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let text = text.trim();
    let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
    let bytes = text.as_bytes();
    let (&head, body) = bytes.split_first().ok_or(GraphError::EmptyGraph6)?;
    if !(63..=125).contains(&head) {
        return Err(GraphError::BadGraph6Header(head));
    }
    let p = (head - 63) as usize;
    if p == 0 {
        return Err(GraphError::NoVertices);
    }
    let expected = pair_count(p).div_ceil(6);
    if let Some((offset, &byte)) = body
        .iter()
        .enumerate()
        .find(|(_, b)| !(63..=126).contains(*b))
    {
        return Err(GraphError::BadGraph6Byte {
            byte,
            offset: offset + 1,
        });
    }
    if body.len() != expected {
        return Err(GraphError::Graph6Length {
            found: body.len(),
            expected,
        });
    }

    let mut g = Graph::empty(p)?;
    let mut bit = 0usize;
    for j in 1..p {
        for i in 0..j {
            let byte = body[bit / 6] - 63;
            if byte >> (5 - bit % 6) & 1 == 1 {
                g.set(i, j);
            }
            bit += 1;
        }
    }
    Ok(g)
}

/// Encodes a graph in short graph6 form.
pub fn write_graph6(g: &Graph) -> String {
    let p = g.vertex_count();
    let mut out = vec![p as u8 + 63];
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..p {
        for i in 0..j {
            acc = acc << 1 | g.adjacent0(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 output is ascii")
}

/// Parses the edge-list text form `p; i j; i j; ...`.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut parts = text.trim().split(';').map(str::trim);
    let head = parts.next().unwrap_or_default();
    let p: usize = head
        .parse()
        .map_err(|_| GraphError::EdgeList(format!("bad vertex count {head:?}")))?;
    let mut g = Graph::empty(p)?;
    for part in parts.filter(|s| !s.is_empty()) {
        let nums: Vec<&str> = part.split_whitespace().collect();
        let [a, b] = nums[..] else {
            return Err(GraphError::EdgeList(format!(
                "expected two vertices in {part:?}"
            )));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| GraphError::EdgeList(format!("bad vertex {s:?}")))
        };
        g.insert_edge(parse(a)?, parse(b)?)?;
    }
    Ok(g)
}

/// Parses either format. Edge-list text starts with a decimal digit, which
/// can never open a graph6 string.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let t = text.trim();
    if t.starts_with(|c: char| c.is_ascii_digit()) {
        parse_edge_list(t)
    } else {
        parse_graph6(t)
    }
}

/// Smallest `k >= 1` whose k-core is empty, i.e. the degeneracy plus one.
pub fn k_core_bound(g: &Graph) -> usize {
    let adj = g.adjacency_masks();
    let mut alive: u64 = if g.p == 64 {
        u64::MAX
    } else {
        (1u64 << g.p) - 1
    };
    let mut k = 1;
    // Peel a minimum-degree vertex each round; the bound is one more than
    // the largest minimum degree seen along the way.
    while alive != 0 {
        let (v, d) = (0..g.p)
            .filter(|v| alive >> v & 1 == 1)
            .map(|v| (v, (adj[v] & alive).count_ones() as usize))
            .min_by_key(|&(_, d)| d)
            .expect("alive set is non-empty");
        k = k.max(d + 1);
        alive &= !(1 << v);
    }
    k
}

/// Size of a largest clique. At least 1 for every graph.
pub fn clique_number(g: &Graph) -> usize {
    fn extend(adj: &[u64], size: usize, mut candidates: u64, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        while candidates != 0 {
            if size + candidates.count_ones() as usize <= *best {
                return;
            }
            let v = candidates.trailing_zeros() as usize;
            candidates &= !(1 << v);
            extend(adj, size + 1, candidates & adj[v], best);
        }
    }

    let adj = g.adjacency_masks();
    let all = if g.p == 64 {
        u64::MAX
    } else {
        (1u64 << g.p) - 1
    };
    let mut best = 1;
    extend(&adj, 0, all, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_clique(g: &Graph) -> usize {
        let p = g.vertex_count();
        (1u32..1 << p)
            .filter(|s| {
                (0..p).all(|i| {
                    (i + 1..p).all(|j| s >> i & 1 == 0 || s >> j & 1 == 0 || g.adjacent0(i, j))
                })
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    // k-core by the literal definition: delete all vertices of degree < k
    // until stable.
    fn brute_kcore(g: &Graph) -> usize {
        let p = g.vertex_count();
        (1..=p + 1)
            .find(|&k| {
                let mut alive = vec![true; p];
                loop {
                    let doomed: Vec<usize> = (0..p)
                        .filter(|&v| {
                            alive[v]
                                && (0..p).filter(|&u| alive[u] && g.adjacent0(u, v)).count() < k
                        })
                        .collect();
                    if doomed.is_empty() {
                        break;
                    }
                    for v in doomed {
                        alive[v] = false;
                    }
                }
                alive.iter().all(|a| !a)
            })
            .unwrap()
    }

    #[test]
    fn from_edges_dedups() {
        let g = Graph::from_edges(3, &[(1, 2), (2, 1), (2, 3)]).unwrap();
        assert_eq!(g.edges(), vec![(1, 2), (2, 3)]);
        assert_eq!(g, Graph::from_edges(3, &[(2, 3), (1, 2)]).unwrap());
        assert_eq!(Graph::from_edges(2, &[]).unwrap().edge_count(), 0);
        let k4 = Graph::from_edges(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(k4, Graph::complete(4).unwrap());
        assert_eq!(k4.bitmask(), Some(0b111111));
    }

    #[test]
    fn from_edges_rejects_bad_pairs() {
        assert_eq!(
            Graph::from_edges(3, &[(1, 4)]),
            Err(GraphError::VertexOutOfRange { vertex: 4, p: 3 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 0, p: 3 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(2, 2)]),
            Err(GraphError::SelfLoop(2))
        );
        assert_eq!(Graph::empty(0), Err(GraphError::NoVertices));
    }

    #[test]
    fn lexicographic_bit_order() {
        // (1,2)=0 (1,3)=1 (1,4)=2 (2,3)=3 (2,4)=4 (3,4)=5
        let g = Graph::from_edges(4, &[(2, 4)]).unwrap();
        assert_eq!(g.bitmask(), Some(1 << 4));
        let g = Graph::from_bitmask(4, 1 << 5 | 1 << 1).unwrap();
        assert_eq!(g.edges(), vec![(1, 3), (3, 4)]);
        assert_eq!(
            Graph::from_bitmask(3, u64::MAX).unwrap(),
            Graph::complete(3).unwrap()
        );
    }

    #[test]
    fn graph6_known_strings() {
        assert_eq!(parse_graph6("D??").unwrap(), Graph::empty(5).unwrap());
        assert_eq!(
            parse_graph6("A_").unwrap(),
            Graph::from_edges(2, &[(1, 2)]).unwrap()
        );
        // nauty's encoding of the 5-vertex graph with edges 13 15 24 45
        let g = Graph::from_edges(5, &[(1, 3), (1, 5), (2, 4), (4, 5)]).unwrap();
        assert_eq!(write_graph6(&g), "DQc");
        assert_eq!(parse_graph6("DQc\n").unwrap(), g);
        assert_eq!(write_graph6(&Graph::complete(4).unwrap()), "C~");
        assert_eq!(parse_graph6(">>graph6<<A_").unwrap().edge_count(), 1);
    }

    #[test]
    fn graph6_errors() {
        assert_eq!(parse_graph6(""), Err(GraphError::EmptyGraph6));
        assert_eq!(parse_graph6("?"), Err(GraphError::NoVertices));
        assert_eq!(
            parse_graph6("D?"),
            Err(GraphError::Graph6Length {
                found: 1,
                expected: 2
            })
        );
        assert_eq!(
            parse_graph6("D???"),
            Err(GraphError::Graph6Length {
                found: 3,
                expected: 2
            })
        );
        assert_eq!(
            parse_graph6("D?!"),
            Err(GraphError::BadGraph6Byte {
                byte: b'!',
                offset: 2
            })
        );
        assert_eq!(parse_graph6("~??"), Err(GraphError::BadGraph6Header(b'~')));
        assert_eq!(parse_graph6(" "), Err(GraphError::EmptyGraph6));
    }

    #[test]
    fn edge_list_text() {
        let g = parse_edge_list("3; 1 2; 2 3").unwrap();
        assert_eq!(g.to_string(), "3; 1 2; 2 3");
        assert_eq!(parse_edge_list("4").unwrap(), Graph::empty(4).unwrap());
        assert_eq!(parse_edge_list("4;").unwrap(), Graph::empty(4).unwrap());
        assert!(matches!(
            parse_edge_list("x; 1 2"),
            Err(GraphError::EdgeList(_))
        ));
        assert!(matches!(
            parse_edge_list("3; 1 2 3"),
            Err(GraphError::EdgeList(_))
        ));
        assert_eq!(parse_edge_list("3; 1 1"), Err(GraphError::SelfLoop(1)));
        assert_eq!(parse_graph("A_").unwrap(), parse_graph("2; 1 2").unwrap());
    }

    #[test]
    fn kcore_examples() {
        for p in 1..=9 {
            assert_eq!(k_core_bound(&Graph::empty(p).unwrap()), 1);
            assert_eq!(k_core_bound(&Graph::complete(p).unwrap()), p);
        }
        assert_eq!(k_core_bound(&Graph::cycle(5).unwrap()), 3);
        let path = Graph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(k_core_bound(&path), 2);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(clique_number(&Graph::empty(4).unwrap()), 1);
        assert_eq!(clique_number(&Graph::cycle(5).unwrap()), 2);
        let mut k6_minus = Graph::from_edges(6, &[]).unwrap();
        for (i, j) in Graph::complete(6).unwrap().edges() {
            if (i, j) != (2, 5) {
                k6_minus.insert_edge(i, j).unwrap();
            }
        }
        assert_eq!(brute_clique(&k6_minus), 5);
        assert_eq!(clique_number(&k6_minus), 5);
    }

    #[test]
    fn bounds_agree_with_brute_force_on_all_small_graphs() {
        for p in 1..=6 {
            for mask in 0..1u64 << pair_count(p) {
                let g = Graph::from_bitmask(p, mask).unwrap();
                let w = clique_number(&g);
                let k = k_core_bound(&g);
                assert_eq!(w, brute_clique(&g), "{g:?}");
                assert_eq!(k, brute_kcore(&g), "{g:?}");
                assert!(w <= k && k <= p, "{g:?}");
                assert_eq!(w >= 2, g.edge_count() > 0);
            }
        }
    }

    #[test]
    fn adding_an_edge_is_monotone() {
        let p = 5;
        for mask in 0..1u64 << pair_count(p) {
            let g = Graph::from_bitmask(p, mask).unwrap();
            for bit in (0..pair_count(p)).filter(|b| mask >> b & 1 == 0) {
                let h = Graph::from_bitmask(p, mask | 1 << bit).unwrap();
                assert!(clique_number(&h) >= clique_number(&g));
                assert!(k_core_bound(&h) >= k_core_bound(&g));
            }
        }
    }

    #[test]
    fn large_graphs_parse() {
        let g = Graph::complete(20).unwrap();
        assert_eq!(g.bitmask(), None);
        let back = parse_graph6(&write_graph6(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!(clique_number(&back), 20);
        assert_eq!(k_core_bound(&back), 20);
    }
}
