//! Finite directed graphs presenting subshifts of finite type.
//!
//! A graph here is the data of a finite shift space: vertices are the
//! alphabet, edges are the allowed transitions, and admissible words are
//! walks. Construction prunes vertices that cannot lie on a two-sided
//! infinite walk (in- or out-degree zero) until a fixpoint, so every
//! surviving vertex extends to arbitrarily long pasts and futures.
//!
//! The module also carries the structure theory used downstream: strong
//! connectivity (topological transitivity), the period and its cyclic
//! vertex classes, the p-step power graph on one cyclic class, the k-block
//! recoding, and the decomposition into maximal transitive pieces.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Validated identifier: nonempty and whitespace-free (identifiers are
/// joined with spaces in potential-table keys, so whitespace is reserved).
fn check_vertex_id(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace()) {
        return Err(Error::InvalidVertexId(name.to_string()));
    }
    Ok(())
}

/// A finite directed graph with named vertices, held in a normalized form:
/// vertices sorted by identifier, adjacency lists sorted, parallel edges
/// collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    names: Vec<String>,
    index: BTreeMap<String, u32>,
    out: Vec<Vec<u32>>,
    inc: Vec<Vec<u32>>,
    edge_count: usize,
    pruned: Vec<String>,
}

impl DirectedGraph {
    /// Builds a graph from a vertex list and an edge list.
    ///
    /// Vertices of in- or out-degree zero are removed repeatedly until the
    /// remainder is edge-complete; the removed identifiers are recorded and
    /// available through [`DirectedGraph::pruned`]. An input whose pruned
    /// remainder is empty is rejected.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for v in vertices {
            let v = v.as_ref();
            check_vertex_id(v)?;
            if seen.insert(v.to_string(), ()).is_some() {
                return Err(Error::DuplicateVertex(v.to_string()));
            }
        }
        let mut alive: BTreeMap<String, (Vec<String>, Vec<String>)> = seen
            .keys()
            .map(|v| (v.clone(), (Vec::new(), Vec::new())))
            .collect();
        let mut edge_set: BTreeMap<(String, String), ()> = BTreeMap::new();
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            for w in [u, v] {
                if !alive.contains_key(w) {
                    check_vertex_id(w)?;
                    return Err(Error::UnknownVertex(w.to_string()));
                }
            }
            edge_set.insert((u.to_string(), v.to_string()), ());
        }

        // Prune to the maximal vertex set on which every vertex has both a
        // successor and a predecessor.
        let mut pruned = Vec::new();
        loop {
            for (o, i) in alive.values_mut() {
                o.clear();
                i.clear();
            }
            for (u, v) in edge_set.keys() {
                if alive.contains_key(u) && alive.contains_key(v) {
                    alive.get_mut(u).unwrap().0.push(v.clone());
                    alive.get_mut(v).unwrap().1.push(u.clone());
                }
            }
            let dead: Vec<String> = alive
                .iter()
                .filter(|(_, (o, i))| o.is_empty() || i.is_empty())
                .map(|(v, _)| v.clone())
                .collect();
            if dead.is_empty() {
                break;
            }
            for v in dead {
                alive.remove(&v);
                pruned.push(v);
            }
        }
        if alive.is_empty() {
            return Err(Error::EmptyGraph);
        }
        pruned.sort();

        let names: Vec<String> = alive.keys().cloned().collect();
        let index: BTreeMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edge_set.keys() {
            if let (Some(&ui), Some(&vi)) = (index.get(u), index.get(v)) {
                out[ui as usize].push(vi);
                inc[vi as usize].push(ui);
                edge_count += 1;
            }
        }
        for adj in out.iter_mut().chain(inc.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(DirectedGraph {
            names,
            index,
            out,
            inc,
            edge_count,
            pruned,
        })
    }

    /// Builds a graph whose vertex set is inferred from the edge list.
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        for (u, v) in edges {
            for w in [u.as_ref(), v.as_ref()] {
                if !vertices.iter().any(|x| x == w) {
                    vertices.push(w.to_string());
                }
            }
        }
        let edges: Vec<(String, String)> = edges
            .iter()
            .map(|(u, v)| (u.as_ref().to_string(), v.as_ref().to_string()))
            .collect();
        Self::new(&vertices, &edges)
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    /// Number of (distinct) edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Vertex identifiers in sorted order.
    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    /// Identifiers removed by construction-time pruning, sorted.
    pub fn pruned(&self) -> &[String] {
        &self.pruned
    }

    /// Identifier of vertex `i`.
    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    /// Index of the named vertex.
    pub fn index_of(&self, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Successors of vertex `u`, sorted.
    pub fn successors(&self, u: u32) -> &[u32] {
        &self.out[u as usize]
    }

    /// Predecessors of vertex `u`, sorted.
    pub fn predecessors(&self, u: u32) -> &[u32] {
        &self.inc[u as usize]
    }

    /// Whether the edge `u -> v` is present.
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.out[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as index pairs, lexicographically ordered.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u as u32, v)))
    }

    /// Whether an index word is a walk in the graph.
    pub fn is_admissible(&self, word: &[u32]) -> bool {
        word.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// Resolves a word of identifiers to indices, rejecting unknown names
    /// and forbidden transitions.
    pub fn resolve_word<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<u32>> {
        let idx: Vec<u32> = word
            .iter()
            .map(|s| self.index_of(s.as_ref()))
            .collect::<Result<_>>()?;
        for w in idx.windows(2) {
            if !self.has_edge(w[0], w[1]) {
                let joined: Vec<&str> = word.iter().map(|s| s.as_ref()).collect();
                return Err(Error::InadmissibleWord(
                    joined.join(" "),
                    self.name(w[0]).to_string(),
                    self.name(w[1]).to_string(),
                ));
            }
        }
        Ok(idx)
    }

    /// Renders an index word back to space-joined identifiers.
    pub fn word_name(&self, word: &[u32]) -> String {
        word.iter()
            .map(|&v| self.name(v))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// All admissible words of the given positive length, in lexicographic
    /// index order.
    pub fn admissible_words(&self, len: usize) -> Vec<Vec<u32>> {
        assert!(len >= 1, "word length must be positive");
        let mut words: Vec<Vec<u32>> = (0..self.vertex_count() as u32).map(|v| vec![v]).collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for w in &words {
                for &v in self.successors(*w.last().unwrap()) {
                    let mut e = w.clone();
                    e.push(v);
                    next.push(e);
                }
            }
            words = next;
        }
        words
    }

    /// Whether some walk of exactly `n` edges leads from `a` to `b`.
    pub fn reaches(&self, a: &str, b: &str, n: usize) -> Result<bool> {
        let a = self.index_of(a)?;
        let b = self.index_of(b)?;
        let mut now = vec![false; self.vertex_count()];
        now[a as usize] = true;
        for _ in 0..n {
            let mut next = vec![false; self.vertex_count()];
            for (u, reached) in now.iter().enumerate() {
                if *reached {
                    for &v in self.successors(u as u32) {
                        next[v as usize] = true;
                    }
                }
            }
            now = next;
        }
        Ok(now[b as usize])
    }

    fn reachable_from(&self, start: u32, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start as usize] = true;
        while let Some(u) = stack.pop() {
            let adj = if forward {
                self.successors(u)
            } else {
                self.predecessors(u)
            };
            for &v in adj {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Whether the graph is strongly connected, i.e. the shift it presents
    /// is topologically transitive.
    pub fn is_transitive(&self) -> bool {
        self.reachable_from(0, true).iter().all(|&r| r)
            && self.reachable_from(0, false).iter().all(|&r| r)
    }

    /// Breadth-first distance labels from vertex 0.
    fn bfs_levels(&self) -> Vec<i64> {
        let mut level = vec![-1i64; self.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        level[0] = 0;
        queue.push_back(0u32);
        while let Some(u) = queue.pop_front() {
            for &v in self.successors(u) {
                if level[v as usize] < 0 {
                    level[v as usize] = level[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    /// The period: gcd of all cycle lengths. Requires transitivity.
    ///
    /// Computed by BFS level labels from the first vertex: the period is the
    /// gcd of level(u) + 1 - level(v) over all edges u -> v.
    pub fn period(&self) -> Result<usize> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let level = self.bfs_levels();
        let mut g: u64 = 0;
        for (u, v) in self.edges() {
            let d = (level[u as usize] + 1 - level[v as usize]).unsigned_abs();
            g = gcd(g, d);
        }
        debug_assert!(g > 0, "strongly connected graph must close a cycle");
        Ok(g as usize)
    }

    /// Cyclic vertex classes of a transitive graph.
    ///
    /// Class index 0 contains the first vertex in identifier order; every
    /// edge steps from class i to class i+1 (mod p).
    pub fn spectral_decomposition(&self) -> Result<SpectralDecomposition> {
        let p = self.period()?;
        let level = self.bfs_levels();
        let class_of: Vec<usize> = level
            .iter()
            .map(|&l| (l.rem_euclid(p as i64)) as usize)
            .collect();
        let mut classes = vec![Vec::new(); p];
        for (v, &c) in class_of.iter().enumerate() {
            classes[c].push(v as u32);
        }
        Ok(SpectralDecomposition { period: p, class_of, classes })
    }

    /// Maximal transitive subgraphs: strongly connected components that
    /// carry at least one edge, as induced subgraphs, ordered by their
    /// least vertex identifier.
    pub fn transitive_components(&self) -> Vec<DirectedGraph> {
        let comp = self.scc_ids();
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (v, &c) in comp.iter().enumerate() {
            groups.entry(c).or_default().push(v as u32);
        }
        let mut members: Vec<Vec<u32>> = groups.into_values().collect();
        members.sort_by_key(|vs| vs[0]);
        let mut out = Vec::new();
        for vs in members {
            let vertex_names: Vec<String> =
                vs.iter().map(|&v| self.name(v).to_string()).collect();
            let edges: Vec<(String, String)> = self
                .edges()
                .filter(|&(u, v)| vs.contains(&u) && vs.contains(&v))
                .map(|(u, v)| (self.name(u).to_string(), self.name(v).to_string()))
                .collect();
            if edges.is_empty() {
                continue; // isolated vertex without a self-loop
            }
            out.push(
                DirectedGraph::new(&vertex_names, &edges)
                    .expect("a strongly connected component with an edge is a valid graph"),
            );
        }
        out
    }

    /// Strongly connected component id per vertex (id = least member index).
    fn scc_ids(&self) -> Vec<u32> {
        // Kosaraju: order by forward DFS finish time, then sweep the
        // reverse graph.
        let n = self.vertex_count();
        let mut finish = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n as u32 {
            if seen[s as usize] {
                continue;
            }
            // Iterative DFS recording finish order.
            let mut stack = vec![(s, 0usize)];
            seen[s as usize] = true;
            while let Some(&mut (u, ref mut i)) = stack.last_mut() {
                if *i < self.successors(u).len() {
                    let v = self.successors(u)[*i];
                    *i += 1;
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push((v, 0));
                    }
                } else {
                    finish.push(u);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![u32::MAX; n];
        for &root in finish.iter().rev() {
            if comp[root as usize] != u32::MAX {
                continue;
            }
            let mut members = vec![root];
            comp[root as usize] = root;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &v in self.predecessors(u) {
                    if comp[v as usize] == u32::MAX {
                        comp[v as usize] = root;
                        members.push(v);
                        stack.push(v);
                    }
                }
            }
            let least = *members.iter().min().unwrap();
            for &m in &members {
                comp[m as usize] = least;
            }
        }
        comp
    }

    /// Whether `self`'s vertices and edges are all present in `other`.
    pub fn is_subgraph_of(&self, other: &DirectedGraph) -> bool {
        self.names.iter().all(|v| other.index.contains_key(v))
            && self.edges().all(|(u, v)| {
                let (Ok(ou), Ok(ov)) = (other.index_of(self.name(u)), other.index_of(self.name(v)))
                else {
                    return false;
                };
                other.has_edge(ou, ov)
            })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period and cyclic vertex classes of a transitive graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralDecomposition {
    period: usize,
    class_of: Vec<usize>,
    classes: Vec<Vec<u32>>,
}

impl SpectralDecomposition {
    /// The period p.
    pub fn period(&self) -> usize {
        self.period
    }

    /// Class index of vertex `v` (by graph index).
    pub fn class_of(&self, v: u32) -> usize {
        self.class_of[v as usize]
    }

    /// Vertices of class `i`, sorted by index.
    pub fn class(&self, i: usize) -> &[u32] {
        &self.classes[i]
    }

    /// All classes, indexed 0..p.
    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }
}

/// A derived graph whose vertices stand for words of the base graph.
///
/// Produced by [`higher_block`] (overlapping k-blocks, one symbol consumed
/// per step) and [`power_graph`] (disjoint p-blocks, p symbols consumed per
/// step). `word(i)` is the base word behind derived vertex `i`.
#[derive(Debug, Clone)]
pub struct BlockGraph {
    graph: DirectedGraph,
    words: Vec<Vec<u32>>,
    block_len: usize,
    overlapping: bool,
}

impl BlockGraph {
    /// The derived graph.
    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Base-graph word behind derived vertex `i`.
    pub fn word(&self, i: u32) -> &[u32] {
        &self.words[i as usize]
    }

    /// Block length (k for k-blocks, p for power blocks).
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Derived vertex index for a base word of exactly the block length.
    pub fn block_index(&self, word: &[u32]) -> Option<u32> {
        self.words
            .iter()
            .position(|w| w.as_slice() == word)
            .map(|i| i as u32)
    }

    /// Expands a derived word to the base word it describes.
    ///
    /// Overlapping blocks merge on their shared (k-1)-suffixes; power
    /// blocks concatenate.
    pub fn expand(&self, derived: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for (j, &b) in derived.iter().enumerate() {
            let w = self.word(b);
            if self.overlapping && j > 0 {
                out.push(*w.last().unwrap());
            } else {
                out.extend_from_slice(w);
            }
        }
        out
    }

    /// Encodes a base word as a derived word.
    ///
    /// Overlapping blocks need base length >= k and produce length
    /// len-k+1; power blocks need a positive multiple of p and produce
    /// length len/p. Returns None if some block is not a derived vertex.
    pub fn encode(&self, base: &[u32]) -> Option<Vec<u32>> {
        let k = self.block_len;
        let chunks: Vec<&[u32]> = if self.overlapping {
            if base.len() < k {
                return None;
            }
            base.windows(k).collect()
        } else {
            if base.is_empty() || !base.len().is_multiple_of(k) {
                return None;
            }
            base.chunks(k).collect()
        };
        chunks.iter().map(|c| self.block_index(c)).collect()
    }
}

/// Constructs a [`BlockGraph`] from generated block words and an adjacency
/// rule, naming derived vertices by comma-joined base identifiers.
fn build_block_graph(
    base: &DirectedGraph,
    blocks: Vec<Vec<u32>>,
    overlapping: bool,
    connect: impl Fn(&[u32], &[u32]) -> bool,
) -> Result<BlockGraph> {
    let mut by_name: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for b in &blocks {
        let name = b
            .iter()
            .map(|&v| base.name(v))
            .collect::<Vec<_>>()
            .join(",");
        if by_name.insert(name.clone(), b.clone()).is_some() {
            return Err(Error::Format(format!(
                "derived vertex name {name:?} is ambiguous; base identifiers contain ','"
            )));
        }
    }
    let names: Vec<String> = by_name.keys().cloned().collect();
    let mut edges = Vec::new();
    for (nu, wu) in &by_name {
        for (nv, wv) in &by_name {
            if connect(wu, wv) {
                edges.push((nu.clone(), nv.clone()));
            }
        }
    }
    let graph = DirectedGraph::new(&names, &edges)?;
    let words: Vec<Vec<u32>> = graph
        .vertices()
        .iter()
        .map(|n| by_name[n].clone())
        .collect();
    let block_len = words[0].len();
    Ok(BlockGraph {
        graph,
        words,
        block_len,
        overlapping,
    })
}

/// The k-block recoding: vertices are admissible k-words, and (k+1)-words
/// give the edges (each step consumes one base symbol). The recoded shift
/// is conjugate to the base shift, and a potential read through the
/// conjugacy trades var_k for var_1.
pub fn higher_block(g: &DirectedGraph, k: usize) -> Result<BlockGraph> {
    if k < 1 {
        return Err(Error::InvalidParameter(
            "block length must be at least 1".to_string(),
        ));
    }
    let blocks = g.admissible_words(k);
    build_block_graph(g, blocks, true, |wu, wv| {
        wu[1..] == wv[..wv.len() - 1] && g.has_edge(*wu.last().unwrap(), *wv.last().unwrap())
    })
}

/// The p-step power graph on cyclic class `i`: vertices are admissible
/// p-vertex words starting in class i, with an edge exactly when the base
/// graph connects the last vertex of one block to the first of the next
/// (p symbols consumed per step, so the derived shift is conjugate to the
/// p-th power of the base shift restricted to class-i starting points).
pub fn power_graph(
    g: &DirectedGraph,
    dec: &SpectralDecomposition,
    i: usize,
) -> Result<BlockGraph> {
    let p = dec.period();
    if i >= p {
        return Err(Error::ClassIndex { index: i, period: p });
    }
    let blocks: Vec<Vec<u32>> = g
        .admissible_words(p)
        .into_iter()
        .filter(|w| dec.class_of(w[0]) == i)
        .collect();
    build_block_graph(g, blocks, false, |wu, wv| {
        g.has_edge(*wu.last().unwrap(), wv[0])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{cycle, full_shift, golden_mean};

    #[test]
    fn construction_sorts_and_validates() {
        let g = DirectedGraph::new(&["b", "a"], &[("a", "b"), ("b", "a"), ("a", "a")]).unwrap();
        assert_eq!(g.vertices(), &["a".to_string(), "b".to_string()]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 1));
        assert!(matches!(
            DirectedGraph::new(&["a", "a"], &[("a", "a")]),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(
            DirectedGraph::new(&["a"], &[("a", "z")]),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            DirectedGraph::new(&["a b"], &[]),
            Err(Error::InvalidVertexId(_))
        ));
    }

    #[test]
    fn pruning_removes_dead_ends_to_fixpoint() {
        // c feeds only d, d has no successor: both fall, then nothing else.
        let g = DirectedGraph::new(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "a"), ("c", "d"), ("a", "c")],
        )
        .unwrap();
        assert_eq!(g.vertices(), &["a".to_string(), "b".to_string()]);
        assert_eq!(g.pruned(), &["c".to_string(), "d".to_string()]);
        // A graph that prunes to nothing is an error.
        assert!(matches!(
            DirectedGraph::new(&["a", "b"], &[("a", "b")]),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn reaches_counts_exact_step_walks() {
        let g = golden_mean();
        assert!(g.reaches("a", "a", 0).unwrap());
        assert!(!g.reaches("a", "b", 0).unwrap());
        assert!(g.reaches("b", "b", 2).unwrap()); // b a b
        assert!(!g.reaches("b", "b", 1).unwrap()); // no b self-loop
        let c2 = cycle(2);
        assert!(c2.reaches("v0", "v0", 4).unwrap());
        assert!(!c2.reaches("v0", "v0", 3).unwrap());
    }

    #[test]
    fn transitivity_and_components() {
        assert!(golden_mean().is_transitive());
        let disjoint = DirectedGraph::new(
            &["a", "b"],
            &[("a", "a"), ("b", "b"), ("a", "b")],
        )
        .unwrap();
        assert!(!disjoint.is_transitive());
        let comps = disjoint.transitive_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].vertices(), &["a".to_string()]);
        assert_eq!(comps[1].vertices(), &["b".to_string()]);
    }

    /// Brute-force period: gcd of all return-walk lengths up to a horizon.
    fn period_oracle(g: &DirectedGraph) -> usize {
        let n = g.vertex_count();
        let mut reach = vec![vec![false; n]; n];
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
        }
        let mut g_acc: u64 = 0;
        for len in 1..=64u64 {
            let mut next = vec![vec![false; n]; n];
            for s in 0..n {
                for (u, r) in reach[s].iter().enumerate() {
                    if *r {
                        for &v in g.successors(u as u32) {
                            next[s][v as usize] = true;
                        }
                    }
                }
            }
            reach = next;
            if (0..n).any(|v| reach[v][v]) {
                g_acc = gcd(g_acc, len);
            }
        }
        g_acc as usize
    }

    #[test]
    fn period_matches_cycle_length_oracle() {
        assert_eq!(full_shift(2).period().unwrap(), 1);
        assert_eq!(golden_mean().period().unwrap(), 1);
        for p in [2usize, 3, 4, 6] {
            let c = cycle(p);
            assert_eq!(c.period().unwrap(), p, "cycle of length {p}");
            assert_eq!(period_oracle(&c), p);
        }
        // Two cycles of lengths 4 and 6 sharing a vertex: period gcd(4,6)=2.
        let g = DirectedGraph::from_edges(&[
            ("a", "b"),
            ("b", "c"),
            ("c", "d"),
            ("d", "a"),
            ("a", "e"),
            ("e", "f"),
            ("f", "g"),
            ("g", "h"),
            ("h", "i"),
            ("i", "a"),
        ])
        .unwrap();
        assert_eq!(g.period().unwrap(), 2);
        assert_eq!(period_oracle(&g), 2);
        let nontransitive =
            DirectedGraph::new(&["a", "b"], &[("a", "a"), ("b", "b"), ("a", "b")]).unwrap();
        assert!(matches!(nontransitive.period(), Err(Error::NotTransitive)));
    }

    #[test]
    fn spectral_classes_step_forward() {
        let c4 = cycle(4);
        let dec = c4.spectral_decomposition().unwrap();
        assert_eq!(dec.period(), 4);
        for i in 0..4 {
            assert_eq!(dec.class(i).len(), 1);
        }
        // First vertex in identifier order sits in class 0.
        assert_eq!(dec.class_of(0), 0);
        // Every edge advances the class by one mod p.
        for (u, v) in c4.edges() {
            assert_eq!((dec.class_of(u) + 1) % 4, dec.class_of(v));
        }
        let dec1 = full_shift(2).spectral_decomposition().unwrap();
        assert_eq!(dec1.period(), 1);
        assert_eq!(dec1.class(0).len(), 2);
    }

    #[test]
    fn power_graph_of_cycles_is_single_loop() {
        for p in [2usize, 4] {
            let c = cycle(p);
            let dec = c.spectral_decomposition().unwrap();
            let pw = power_graph(&c, &dec, 0).unwrap();
            assert_eq!(pw.graph().vertex_count(), 1, "cycle of length {p}");
            assert_eq!(pw.graph().edge_count(), 1);
            assert!(pw.graph().has_edge(0, 0));
            assert_eq!(pw.word(0).len(), p);
        }
    }

    #[test]
    fn power_graph_of_mixing_graph_with_period_one_is_the_graph() {
        let g = full_shift(2);
        let dec = g.spectral_decomposition().unwrap();
        let pw = power_graph(&g, &dec, 0).unwrap();
        assert_eq!(pw.graph().vertex_count(), 2);
        assert_eq!(pw.graph().edge_count(), 4);
        let bad = power_graph(&g, &dec, 1);
        assert!(matches!(bad, Err(Error::ClassIndex { .. })));
    }

    #[test]
    fn power_graph_words_biject_with_base_words() {
        // Words of length L in the power graph on class i must match base
        // words of length L*p starting in class i. Cycles of lengths 2 and
        // 4 give period 2 with classes {a, c} and {b, d}.
        let g = DirectedGraph::from_edges(&[
            ("a", "b"),
            ("b", "a"),
            ("b", "c"),
            ("c", "d"),
            ("d", "a"),
        ])
        .unwrap();
        let dec = g.spectral_decomposition().unwrap();
        let p = dec.period();
        assert_eq!(p, 2);
        for i in 0..p {
            let pw = power_graph(&g, &dec, i).unwrap();
            for len in 1..=3usize {
                let derived = pw.graph().admissible_words(len);
                let base: Vec<Vec<u32>> = g
                    .admissible_words(len * p)
                    .into_iter()
                    .filter(|w| dec.class_of(w[0]) == i)
                    .collect();
                assert_eq!(derived.len(), base.len(), "class {i} length {len}");
                for d in &derived {
                    let expanded = pw.expand(d);
                    assert!(base.contains(&expanded));
                    assert_eq!(pw.encode(&expanded).unwrap(), *d);
                }
            }
        }
    }

    #[test]
    fn higher_block_golden_mean_two_blocks() {
        let g = golden_mean();
        let hb = higher_block(&g, 2).unwrap();
        let names: Vec<&str> = hb.graph().vertices().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, vec!["a,a", "a,b", "b,a"]);
        assert_eq!(hb.graph().edge_count(), 5);
        // Conjugacy: base words of length L <-> derived words of length L-1.
        for len in 2..=8usize {
            let base = g.admissible_words(len);
            let derived = hb.graph().admissible_words(len - 1);
            assert_eq!(base.len(), derived.len(), "length {len}");
            for w in &base {
                let enc = hb.encode(w).expect("admissible word must encode");
                assert!(hb.graph().is_admissible(&enc));
                assert_eq!(hb.expand(&enc), *w);
            }
        }
    }

    #[test]
    fn higher_block_preserves_period() {
        for g in [cycle(3), golden_mean(), full_shift(3)] {
            let p = g.period().unwrap();
            for k in 2..=3usize {
                let hb = higher_block(&g, k).unwrap();
                assert_eq!(hb.graph().period().unwrap(), p);
            }
        }
    }
}
