//! The finite-rotation factor of a periodic chain.
//!
//! A transitive graph of period p splits its vertices into cyclic
//! classes C_0, ..., C_{p-1} that the shift advances deterministically:
//! an equilibrium chain therefore factors onto the rotation
//! `i -> i + 1 mod p` on p points, each fiber X_i = {x : x_0 in C_i}
//! carrying exactly 1/p of the mass. Conditioning on a fiber and
//! watching the chain only every p steps gives a stationary Markov
//! measure on the p-step power graph of that class — the return system
//! of the rotation factor. This module builds those conditioned
//! measures and verifies the identities that tie the product structure
//! together:
//!
//! * mass: each fiber weighs exactly 1/p, and averaging the conditioned
//!   measures over classes recovers the original chain on cylinders;
//! * entropy: each return system satisfies `h(mu_i) = p h(mu)`, the
//!   p-fold speedup of watching every p-th symbol;
//! * pressure: a potential summed along p consecutive steps and recoded
//!   onto any class's power graph has pressure `p` times the base
//!   pressure.
//!
//! The classes stay pairwise disjoint on the symbolic side, so the
//! rotation factor always has exactly p points here; no further
//! collapse can occur without leaving the shift model.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{higher_block, power_graph, BlockGraph, DirectedGraph};
use crate::measure::{entropy, MarkovMeasure};
use crate::potential::LocallyConstantPotential;
use crate::sinai::sinai_reduce;
use crate::transfer::solve_rpf;
use crate::word::{Sidedness, Word};

/// The rotation factor of a periodic chain: cyclic classes, their
/// masses, and the conditioned return measure on each class's power
/// graph.
#[derive(Debug, Clone)]
pub struct RotationFactor {
    base: Arc<DirectedGraph>,
    p: usize,
    class_of: Vec<usize>,
    masses: Vec<f64>,
    powers: Vec<BlockGraph>,
    measures: Vec<MarkovMeasure>,
}

impl RotationFactor {
    /// The period — the number of rotation points.
    pub fn p(&self) -> usize {
        self.p
    }

    /// The base graph the factor was built over.
    pub fn base(&self) -> &Arc<DirectedGraph> {
        &self.base
    }

    /// The cyclic class of a base vertex.
    pub fn class_of<S: AsRef<str>>(&self, vertex: S) -> Result<usize> {
        Ok(self.class_of[self.base.index_of(vertex.as_ref())? as usize])
    }

    /// The vertex names of each cyclic class, in class order.
    pub fn classes(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.p];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(self.base.name(v as u32).to_string());
        }
        out
    }

    /// The measure of each fiber X_i.
    pub fn class_masses(&self) -> &[f64] {
        &self.masses
    }

    /// The p-step power graph of class `i`.
    pub fn power(&self, i: usize) -> Result<&BlockGraph> {
        self.powers
            .get(i)
            .ok_or(Error::ClassIndex { index: i, period: self.p })
    }

    /// The conditioned return measure on class `i`'s power graph.
    pub fn mu_i(&self, i: usize) -> Result<&MarkovMeasure> {
        self.measures
            .get(i)
            .ok_or(Error::ClassIndex { index: i, period: self.p })
    }

    /// The conditioned measure of a base cylinder, evaluated through
    /// the power chain: all power words extending the cylinder are
    /// enumerated and their return-measure masses summed. Words
    /// starting outside class `i` get measure zero.
    pub fn factor_cylinder<S: AsRef<str>>(&self, i: usize, word: &[S]) -> Result<f64> {
        let mu_i = self.mu_i(i)?;
        let base_word = self.base.resolve_word(word)?;
        if base_word.is_empty() {
            return Ok(1.0);
        }
        if self.class_of[base_word[0] as usize] != i {
            return Ok(0.0);
        }
        let power = &self.powers[i];
        let chain_len = base_word.len().div_ceil(self.p);
        let mut total = 0.0;
        for chain in power.graph().admissible_words(chain_len) {
            let expanded = power.expand(&chain);
            if expanded[..base_word.len()] == base_word[..] {
                total += mu_i.cylinder_indices(&chain);
            }
        }
        Ok(total)
    }
}

/// Builds the rotation factor of an equilibrium chain.
///
/// `g` must be the chain's own transitive base graph; its spectral
/// decomposition fixes the classes, and each conditioned measure is the
/// chain watched every p steps from a class, renormalized by the fiber
/// mass 1/p.
pub fn build_rotation_factor(
    g: &Arc<DirectedGraph>,
    mu: &MarkovMeasure,
) -> Result<RotationFactor> {
    if g.as_ref() != mu.base().as_ref() {
        return Err(Error::GraphMismatch);
    }
    let dec = g.spectral_decomposition()?;
    let p = dec.period();
    let mut class_of = vec![0usize; g.vertex_count()];
    for v in 0..g.vertex_count() as u32 {
        class_of[v as usize] = dec.class_of(v);
    }

    let mut masses = vec![0.0; p];
    for v in 0..g.vertex_count() as u32 {
        masses[class_of[v as usize]] += mu.cylinder_indices(&[v]);
    }

    let mut powers = Vec::with_capacity(p);
    let mut measures = Vec::with_capacity(p);
    for i in 0..p {
        let power = power_graph(g, &dec, i)?;
        let power_arc = Arc::new(power.graph().clone());
        let block = higher_block(&power_arc, 1)?;
        let dim = block.graph().vertex_count();
        let mut pi = vec![0.0; dim];
        let mut rows = vec![vec![0.0; dim]; dim];
        for bi in 0..dim as u32 {
            let w = power.word(block.word(bi)[0]).to_vec();
            pi[bi as usize] = p as f64 * mu.cylinder_indices(&w);
            for bj in 0..dim as u32 {
                if !block.graph().has_edge(bi, bj) {
                    continue;
                }
                let mut joined = w.clone();
                joined.extend_from_slice(power.word(block.word(bj)[0]));
                rows[bi as usize][bj as usize] =
                    mu.cylinder_indices(&joined) / mu.cylinder_indices(&w);
            }
        }
        measures.push(MarkovMeasure::from_parts(&power_arc, block, pi, rows)?);
        powers.push(power);
    }

    Ok(RotationFactor {
        base: Arc::clone(g),
        p,
        class_of,
        masses,
        powers,
        measures,
    })
}

/// Each return system's entropy next to its target `p h(mu)`.
///
/// Returns the per-class entropies and the common right-hand side; the
/// speedup identity makes every entry match the target.
pub fn entropy_identity_check(
    rf: &RotationFactor,
    mu: &MarkovMeasure,
) -> Result<(Vec<f64>, f64)> {
    if rf.base().as_ref() != mu.base().as_ref() {
        return Err(Error::GraphMismatch);
    }
    let lhs: Vec<f64> = rf.measures.iter().map(entropy).collect();
    Ok((lhs, rf.p as f64 * entropy(mu)))
}

/// Pressure of the p-step sum of a potential, recoded per class,
/// against `p` times the base pressure.
///
/// Two-sided potentials are reduced to one-sided form first (pressure
/// is unchanged). Returns `p * P(psi)` and the per-class power
/// pressures; all entries agree up to solver accuracy.
pub fn power_potential_pressure_check(
    g: &Arc<DirectedGraph>,
    psi: &LocallyConstantPotential,
) -> Result<(f64, Vec<f64>)> {
    if g.as_ref() != psi.graph().as_ref() {
        return Err(Error::GraphMismatch);
    }
    let one_sided;
    let psi = if psi.sidedness() == Sidedness::OneSided {
        psi
    } else {
        one_sided = sinai_reduce(psi)?;
        one_sided.phi()
    };

    let base_pressure = solve_rpf(psi)?.pressure();
    let dec = g.spectral_decomposition()?;
    let p = dec.period();
    let reach = psi.window().1 as usize;
    let span = reach.div_ceil(p);

    let mut power_pressures = Vec::with_capacity(p);
    for i in 0..p {
        let power = power_graph(g, &dec, i)?;
        let power_arc = Arc::new(power.graph().clone());
        let mut table = BTreeMap::new();
        for chain in power.graph().admissible_words(span + 1) {
            let expanded = power.expand(&chain);
            let w = Word::from_indices(g, expanded, 0, Sidedness::OneSided)?;
            table.insert(chain, psi.birkhoff_sum_exact(&w, p)?);
        }
        let power_psi = LocallyConstantPotential::from_exact_table(
            &power_arc,
            (0, span as i64),
            table,
            None,
        )?;
        power_pressures.push(solve_rpf(&power_psi)?.pressure());
    }
    Ok((p as f64 * base_pressure, power_pressures))
}

/// The checkable scaffolding of the product structure: class
/// advancement under the shift, uniform fiber masses, and the return
/// system's entropy speedup.
#[derive(Debug, Clone)]
pub struct ProductStructureWitness {
    p: usize,
    shift_advances_classes: bool,
    class_masses: Vec<f64>,
    max_mass_deviation: f64,
    return_entropy: f64,
    target_entropy: f64,
}

impl ProductStructureWitness {
    /// The number of rotation points.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Whether every edge advances the class index by exactly one.
    pub fn shift_advances_classes(&self) -> bool {
        self.shift_advances_classes
    }

    /// The fiber masses, in class order.
    pub fn class_masses(&self) -> &[f64] {
        &self.class_masses
    }

    /// Largest deviation of a fiber mass from 1/p.
    pub fn max_mass_deviation(&self) -> f64 {
        self.max_mass_deviation
    }

    /// Entropy of the class-0 return system.
    pub fn return_entropy(&self) -> f64 {
        self.return_entropy
    }

    /// The target `p h(mu)`.
    pub fn target_entropy(&self) -> f64 {
        self.target_entropy
    }

    /// Whether all three witnesses hold: exact class advancement,
    /// fiber masses within 1e-12 of 1/p, entropy within 1e-9.
    pub fn pass(&self) -> bool {
        self.shift_advances_classes
            && self.max_mass_deviation <= 1e-12
            && (self.return_entropy - self.target_entropy).abs() <= 1e-9
    }
}

/// Verifies the product-structure witnesses for a rotation factor.
pub fn product_structure_witness(
    rf: &RotationFactor,
    mu: &MarkovMeasure,
) -> Result<ProductStructureWitness> {
    if rf.base().as_ref() != mu.base().as_ref() {
        return Err(Error::GraphMismatch);
    }
    let g = rf.base();
    let p = rf.p();
    let shift_advances_classes = g.edges().all(|(u, v)| {
        rf.class_of[v as usize] == (rf.class_of[u as usize] + 1) % p
    });
    let uniform = 1.0 / p as f64;
    let max_mass_deviation = rf
        .masses
        .iter()
        .map(|&m| (m - uniform).abs())
        .fold(0.0, f64::max);
    Ok(ProductStructureWitness {
        p,
        shift_advances_classes,
        class_masses: rf.masses.clone(),
        max_mass_deviation,
        return_entropy: entropy(&rf.measures[0]),
        target_entropy: p as f64 * entropy(mu),
    })
}
