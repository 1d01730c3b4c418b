//! Shift-invariant Markov measures and the variational quantities.
//!
//! A stationary Markov chain on a block recoding of the graph defines a
//! shift-invariant measure: a cylinder of length at least the block
//! length has mass `pi(first block) * prod P(block, next block)` over its
//! overlapping blocks, and shorter cylinders sum the stationary weights
//! of the blocks extending them. Shift invariance is built in — the
//! anchor of a cylinder never enters the formula.
//!
//! The equilibrium state of a one-sided potential is such a chain on the
//! solver's blocks: `pi(A) = nu(A) h(A)` and
//! `P(A, B) = B(A, B) nu(B) / (lambda nu(A))`, row-stochastic precisely
//! because `B nu = lambda nu`. Its entropy plus the integral of the
//! potential equals `log lambda`, and every other stationary chain gives
//! a strictly smaller value — the variational principle this module
//! exposes through [`entropy`] and [`pressure_functional`]. The zero
//! potential specializes to the measure of maximal entropy
//! ([`parry_measure`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{higher_block, BlockGraph, DirectedGraph};
use crate::potential::LocallyConstantPotential;
use crate::transfer::{solve_rpf, RpfSolution};

/// A shift-invariant measure presented by a stationary block chain.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    base: Arc<DirectedGraph>,
    block: BlockGraph,
    pi: Vec<f64>,
    p: Vec<Vec<f64>>,
}

impl MarkovMeasure {
    /// Builds a measure from an explicit stationary chain on blocks.
    ///
    /// Rows must be stochastic to 1e-8 (then renormalized exactly),
    /// positive exactly on block edges, and `pi` stationary to 1e-8.
    pub(crate) fn from_parts(
        base: &Arc<DirectedGraph>,
        block: BlockGraph,
        pi: Vec<f64>,
        p: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = block.graph().vertex_count();
        if pi.len() != dim || p.len() != dim || p.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidParameter(
                "chain dimensions do not match the block count".into(),
            ));
        }
        let mut pi = pi;
        let mut p = p;
        for (i, row) in p.iter_mut().enumerate() {
            for (j, &weight) in row.iter().enumerate() {
                let has = block.graph().has_edge(i as u32, j as u32);
                let positive = weight > 0.0;
                if has != positive {
                    return Err(Error::SupportMismatch(format!(
                        "transition weight for {} -> {} must be positive exactly on edges",
                        block.graph().name(i as u32),
                        block.graph().name(j as u32)
                    )));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidParameter(format!(
                    "row {} sums to {sum}, not 1",
                    block.graph().name(i as u32)
                )));
            }
            for x in row.iter_mut() {
                *x /= sum;
            }
        }
        let mass: f64 = pi.iter().sum();
        if pi.iter().any(|x| !(x.is_finite() && *x > 0.0)) || (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(
                "stationary vector must be positive with total mass 1".into(),
            ));
        }
        for x in &mut pi {
            *x /= mass;
        }
        for j in 0..dim {
            let from_pi: f64 = (0..dim).map(|i| pi[i] * p[i][j]).sum();
            if (from_pi - pi[j]).abs() > 1e-8 {
                return Err(Error::InvalidParameter(format!(
                    "vector is not stationary at block {}",
                    block.graph().name(j as u32)
                )));
            }
        }
        Ok(MarkovMeasure { base: Arc::clone(base), block, pi, p })
    }

    /// Builds a 1-block measure from explicit transition rows.
    ///
    /// Every edge needs a positive weight, weights off edges are
    /// rejected, rows must sum to 1 within 1e-9; the stationary vector is
    /// computed by iteration. The graph must be transitive so that the
    /// stationary vector is unique.
    pub fn from_stochastic<S: AsRef<str>>(
        graph: &Arc<DirectedGraph>,
        rows: &[(S, S, f64)],
    ) -> Result<Self> {
        if !graph.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let dim = graph.vertex_count();
        let mut p = vec![vec![0.0; dim]; dim];
        for (from, to, weight) in rows {
            let i = graph.index_of(from.as_ref())? as usize;
            let j = graph.index_of(to.as_ref())? as usize;
            if !graph.has_edge(i as u32, j as u32) {
                return Err(Error::SupportMismatch(format!(
                    "{} -> {} is not an edge",
                    from.as_ref(),
                    to.as_ref()
                )));
            }
            if !(weight.is_finite() && *weight > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "transition weight for {} -> {} must be positive",
                    from.as_ref(),
                    to.as_ref()
                )));
            }
            if p[i][j] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate transition {} -> {}",
                    from.as_ref(),
                    to.as_ref()
                )));
            }
            p[i][j] = *weight;
        }
        for (i, row) in p.iter().enumerate() {
            for (j, &weight) in row.iter().enumerate() {
                if graph.has_edge(i as u32, j as u32) && weight == 0.0 {
                    return Err(Error::SupportMismatch(format!(
                        "edge {} -> {} has no transition weight",
                        graph.name(i as u32),
                        graph.name(j as u32)
                    )));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "row {} sums to {sum}, not 1",
                    graph.name(i as u32)
                )));
            }
        }
        let pi = stationary_vector(&p)?;
        Self::from_parts(graph, higher_block(graph, 1)?, pi, p)
    }

    /// The graph the measure lives on.
    pub fn base(&self) -> &Arc<DirectedGraph> {
        &self.base
    }

    /// The block recoding carrying the chain.
    pub fn block(&self) -> &BlockGraph {
        &self.block
    }

    /// Length of the chain's blocks.
    pub fn block_len(&self) -> usize {
        self.block.block_len()
    }

    /// Stationary weights, indexed by blocks.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Transition rows, indexed by blocks.
    pub fn p(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Stationary weights keyed by block vertex name.
    pub fn pi_map(&self) -> BTreeMap<String, f64> {
        let g = self.block.graph();
        (0..self.pi.len())
            .map(|i| (g.name(i as u32).to_string(), self.pi[i]))
            .collect()
    }

    /// Transition weights keyed by block vertex names, edges only.
    pub fn p_map(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        let g = self.block.graph();
        let mut out: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (i, j) in g.edges() {
            out.entry(g.name(i).to_string())
                .or_default()
                .insert(g.name(j).to_string(), self.p[i as usize][j as usize]);
        }
        out
    }

    /// Measure of the cylinder through a word of base-vertex names.
    pub fn cylinder<S: AsRef<str>>(&self, word: &[S]) -> Result<f64> {
        let mut indices = Vec::with_capacity(word.len());
        for s in word {
            indices.push(self.base.index_of(s.as_ref())?);
        }
        Ok(self.cylinder_indices(&indices))
    }

    /// Measure of the cylinder through a word of base-vertex indices.
    ///
    /// Inadmissible words have measure zero; the empty word is the whole
    /// space.
    pub fn cylinder_indices(&self, word: &[u32]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        if !self.base.is_admissible(word) {
            return 0.0;
        }
        let k = self.block_len();
        if word.len() < k {
            // Sum the stationary weights of every block extending the word.
            let mut mass = 0.0;
            for w in 0..self.block.graph().vertex_count() {
                let bw = self.block.word(w as u32);
                if bw[..word.len()] == *word {
                    mass += self.pi[w];
                }
            }
            return mass;
        }
        let first = match self.block.block_index(&word[..k]) {
            Some(b) => b as usize,
            None => return 0.0,
        };
        let mut mass = self.pi[first];
        let mut prev = first;
        for t in 1..=(word.len() - k) {
            let next = match self.block.block_index(&word[t..t + k]) {
                Some(b) => b as usize,
                None => return 0.0,
            };
            mass *= self.p[prev][next];
            prev = next;
        }
        mass
    }

    /// The same measure carried by a finer block chain.
    ///
    /// `pi` becomes the cylinder mass of each longer block and `P` the
    /// conditional mass of one-step extensions; cylinder values are
    /// unchanged.
    pub fn refine(&self, new_len: usize) -> Result<MarkovMeasure> {
        if new_len < self.block_len() {
            return Err(Error::InvalidParameter(format!(
                "cannot refine a {}-block chain to shorter {new_len}-blocks",
                self.block_len()
            )));
        }
        if new_len == self.block_len() {
            return Ok(self.clone());
        }
        let block = higher_block(&self.base, new_len)?;
        let dim = block.graph().vertex_count();
        let mut pi = vec![0.0; dim];
        for (i, slot) in pi.iter_mut().enumerate() {
            *slot = self.cylinder_indices(block.word(i as u32));
        }
        let mut p = vec![vec![0.0; dim]; dim];
        let mut merged = Vec::with_capacity(new_len + 1);
        for (i, j) in block.graph().edges() {
            merged.clear();
            merged.extend_from_slice(block.word(i));
            merged.push(*block.word(j).last().unwrap());
            p[i as usize][j as usize] = self.cylinder_indices(&merged) / pi[i as usize];
        }
        MarkovMeasure::from_parts(&self.base, block, pi, p)
    }
}

/// The equilibrium Markov chain of a solved potential.
pub fn equilibrium_measure(sol: &RpfSolution) -> MarkovMeasure {
    let block = sol.block().clone();
    let dim = block.graph().vertex_count();
    let lambda = sol.lambda();
    let h = sol.h();
    let nu = sol.nu();
    let pi: Vec<f64> = (0..dim).map(|i| nu[i] * h[i]).collect();
    let mut p = vec![vec![0.0; dim]; dim];
    for (i, j) in block.graph().edges() {
        p[i as usize][j as usize] =
            sol.matrix().weight(i as usize, j as usize) * nu[j as usize]
                / (lambda * nu[i as usize]);
    }
    MarkovMeasure::from_parts(sol.base_graph(), block, pi, p)
        .expect("equilibrium chain is stationary by construction")
}

/// Kolmogorov-Sinai entropy of the chain:
/// `-sum_A pi(A) sum_B P(A,B) log P(A,B)`.
pub fn entropy(m: &MarkovMeasure) -> f64 {
    let mut h = 0.0;
    for (i, row) in m.p().iter().enumerate() {
        for &x in row {
            if x > 0.0 {
                h -= m.pi()[i] * x * x.ln();
            }
        }
    }
    h
}

/// The variational functional `entropy + integral of phi`.
///
/// The integral sums `mu[w] phi(w)` over the measure's admissible window
/// words; the measure must be supported inside the potential's graph.
pub fn pressure_functional(m: &MarkovMeasure, phi: &LocallyConstantPotential) -> Result<f64> {
    if !m.base().is_subgraph_of(phi.graph()) {
        return Err(Error::SupportMismatch(
            "measure support is not contained in the potential's graph".into(),
        ));
    }
    let span = phi.span();
    let mut integral = 0.0;
    for word in m.base().admissible_words(span) {
        let mass = m.cylinder_indices(&word);
        if mass > 0.0 {
            let names: Vec<&str> = word.iter().map(|&v| m.base().name(v)).collect();
            integral += mass * phi.value_by_names(&names)?;
        }
    }
    Ok(entropy(m) + integral)
}

/// The measure of maximal entropy and its entropy `log lambda`.
pub fn parry_measure(graph: &Arc<DirectedGraph>) -> Result<(MarkovMeasure, f64)> {
    let sol = solve_rpf(&LocallyConstantPotential::zero(graph))?;
    Ok((equilibrium_measure(&sol), sol.pressure()))
}

fn stationary_vector(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let dim = p.len();
    // A matrix whose rows all agree is a product chain; its stationary
    // vector is the common row, exactly. Skipping the iteration keeps
    // independence identities bit-exact downstream.
    if p.windows(2).all(|w| w[0] == w[1]) {
        return Ok(p[0].clone());
    }
    let tolerance = 1e-14;
    let max_iterations = 200_000;
    let mut pi = vec![1.0 / dim as f64; dim];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        // pi <- pi (P + I), normalized: the identity shift keeps the
        // iteration convergent on periodic chains.
        let mut next = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                next[j] += pi[i] * p[i][j];
            }
        }
        for i in 0..dim {
            next[i] += pi[i];
        }
        let mass: f64 = next.iter().sum();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            next[i] /= mass;
            worst = worst.max((next[i] - pi[i]).abs());
        }
        pi = next;
        residual = worst;
        if residual < tolerance {
            return Ok(pi);
        }
    }
    Err(Error::NoConvergence {
        tolerance,
        max_iterations,
        last_residual: residual,
    })
}
