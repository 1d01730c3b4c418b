//! Gibbs product bounds with explicit constants.
//!
//! An equilibrium chain almost factorizes over concatenation: for
//! cylinders `[a]` and `[c]` that actually concatenate, the ratio
//! `mu[a c] / (mu[a] mu[c])` is controlled both ways by a constant that
//! depends only on a distortion bound and on how small the boundary
//! symbol's mass can get. The distortion constant is
//! `M = exp(sup_n var_{n+1}(phi*_n))`, measuring how far log cylinder
//! masses drift from Birkhoff sums of the normalized potential; for a
//! finite-range potential the supremum stabilizes after the window
//! length, so it is an exact finite maximum here. With a chosen boundary
//! set S* the two one-sided constants are
//!
//! ```text
//! C1 = max { M / mu(sigma[a]) : a in S* },
//! C2 = max { M / mu[a]        : a in S* },
//! ```
//!
//! and every admissible concatenation whose boundary symbol lies in S* —
//! the last symbol of the left word, or the first symbol of the right
//! word — satisfies `1/C* <= mu[a c]/(mu[a] mu[c]) <= C*` with
//! `C* = max(C1, C2)`. The certificate records the a-priori constant,
//! the observed extremes over an exhaustive enumeration, and the pair
//! attaining the worst ratio. The bound is tight: chains with a
//! unique-predecessor symbol attain it exactly, so the containment test
//! allows one part in 1e9 of rounding slack.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{exact_from_f64, exact_to_f64};
use crate::measure::MarkovMeasure;
use crate::potential::LocallyConstantPotential;
use crate::word::Sidedness;

/// Which side of the concatenation carried the S* boundary symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcatCase {
    /// `[a c]` with the last symbol of `a` in S*.
    SuffixInStar,
    /// `[c a]` with the first symbol of `a` in S*.
    PrefixInStar,
}

/// The concatenation attaining the most extreme product ratio.
#[derive(Debug, Clone)]
pub struct WorstPair {
    /// Which boundary condition the pair used.
    pub case: ConcatCase,
    /// The word whose boundary symbol lies in S*.
    pub a: Vec<String>,
    /// The other word.
    pub c: Vec<String>,
    /// The ratio `mu[concat] / (mu[a] mu[c])`.
    pub ratio: f64,
}

/// Explicit constants certifying the Gibbs product bounds.
#[derive(Debug, Clone)]
pub struct GibbsCertificate {
    s_star: Vec<String>,
    m_const: f64,
    c1: f64,
    c2: f64,
    c_star: f64,
    observed_min: f64,
    observed_max: f64,
    worst_pair: WorstPair,
    pairs_checked: usize,
    max_len: usize,
    within_bounds: bool,
}

impl GibbsCertificate {
    /// The boundary symbol set, sorted.
    pub fn s_star(&self) -> &[String] {
        &self.s_star
    }

    /// The distortion constant M.
    pub fn m_const(&self) -> f64 {
        self.m_const
    }

    /// `max M / mu(sigma[a])` over S*.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `max M / mu[a]` over S*.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// The a-priori two-sided bound `max(C1, C2)`.
    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    /// Smallest ratio seen in the enumeration.
    pub fn observed_min(&self) -> f64 {
        self.observed_min
    }

    /// Largest ratio seen in the enumeration.
    pub fn observed_max(&self) -> f64 {
        self.observed_max
    }

    /// The pair attaining the ratio farthest from 1.
    pub fn worst_pair(&self) -> &WorstPair {
        &self.worst_pair
    }

    /// How many admissible concatenations were enumerated.
    pub fn pairs_checked(&self) -> usize {
        self.pairs_checked
    }

    /// The word-length cap of the enumeration.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Whether every observed ratio lay in `[1/C*, C*]`, with 1e-9
    /// relative slack for the exactly-attained boundary.
    pub fn within_bounds(&self) -> bool {
        self.within_bounds
    }
}

/// The normalized potential of a chain, read off its cylinder masses:
/// `phi*(w) = log(mu[w] / mu[w without its first symbol])` on
/// `(block length + 1)`-words.
///
/// Satisfies `L_{phi*} 1 = 1` and recovers the chain as its equilibrium
/// state.
pub fn phi_star_from_measure(mu: &MarkovMeasure) -> Result<LocallyConstantPotential> {
    let graph = mu.base();
    let k = mu.block_len();
    let mut table = BTreeMap::new();
    for word in graph.admissible_words(k + 1) {
        let whole = mu.cylinder_indices(&word);
        let tail = mu.cylinder_indices(&word[1..]);
        let value = (whole / tail).ln();
        let exact = exact_from_f64(value).ok_or_else(|| {
            Error::InvalidPotential(format!(
                "log cylinder ratio overflowed on {}",
                graph.word_name(&word)
            ))
        })?;
        table.insert(word, exact);
    }
    LocallyConstantPotential::from_exact_table(graph, (0, k as i64), table, None)
}

/// The distortion constant `M = exp(sup_n var_{n+1}(phi*_n))`.
///
/// For a window reaching r, the supremum is attained by `n <= max(r, 1)`;
/// the variations are exact, so M is exact up to the final `exp`.
pub fn distortion_constant(phi_star: &LocallyConstantPotential) -> Result<f64> {
    if phi_star.sidedness() != Sidedness::OneSided {
        return Err(Error::SidednessMismatch(
            "the distortion constant needs a one-sided potential".into(),
        ));
    }
    let reach = (phi_star.window().1 as usize).max(1);
    let mut sup = exact_from_f64(0.0).expect("zero is finite");
    for n in 1..=reach {
        let v = phi_star.birkhoff_potential(n)?.var_exact(n + 1);
        if v > sup {
            sup = v;
        }
    }
    Ok(exact_to_f64(&sup).exp())
}

/// Enumerates concatenation ratios against the a-priori constant.
///
/// All words up to `max_len` are tried on both boundary conditions; the
/// certificate carries `M`, `C1`, `C2`, `C* = max(C1, C2)`, the observed
/// extremes, and the worst pair.
pub fn gibbs_ratio_bounds<S: AsRef<str>>(
    mu: &MarkovMeasure,
    s_star: &[S],
    max_len: usize,
) -> Result<GibbsCertificate> {
    if s_star.is_empty() {
        return Err(Error::InvalidParameter("S* must not be empty".into()));
    }
    if max_len < 1 {
        return Err(Error::InvalidParameter("word-length cap must be >= 1".into()));
    }
    let graph = Arc::clone(mu.base());
    let mut star: BTreeSet<u32> = BTreeSet::new();
    for name in s_star {
        star.insert(graph.index_of(name.as_ref())?);
    }

    let m_const = distortion_constant(&phi_star_from_measure(mu)?)?;

    // One-symbol masses and their shift images.
    let symbol_mass = |v: u32| mu.cylinder_indices(&[v]);
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for &a in &star {
        let image: f64 = graph.successors(a).iter().map(|&b| symbol_mass(b)).sum();
        c1 = c1.max(m_const / image);
        c2 = c2.max(m_const / symbol_mass(a));
    }
    let c_star = c1.max(c2);

    let mut words_by_len: Vec<Vec<Vec<u32>>> = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        words_by_len.push(graph.admissible_words(len));
    }

    let mut observed_min = f64::INFINITY;
    let mut observed_max = f64::NEG_INFINITY;
    let mut worst: Option<WorstPair> = None;
    let mut pairs_checked = 0usize;
    let mut concat = Vec::with_capacity(2 * max_len);

    let mut consider = |case: ConcatCase,
                        a: &[u32],
                        c: &[u32],
                        ratio: f64,
                        worst: &mut Option<WorstPair>| {
        if ratio < observed_min {
            observed_min = ratio;
        }
        if ratio > observed_max {
            observed_max = ratio;
        }
        let deviation = ratio.max(1.0 / ratio);
        let is_worse = match worst {
            None => true,
            Some(w) => deviation > w.ratio.max(1.0 / w.ratio),
        };
        if is_worse {
            *worst = Some(WorstPair {
                case,
                a: a.iter().map(|&v| graph.name(v).to_string()).collect(),
                c: c.iter().map(|&v| graph.name(v).to_string()).collect(),
                ratio,
            });
        }
    };

    for a_words in &words_by_len {
        for a in a_words {
            let a_mass = mu.cylinder_indices(a);
            let suffix_ok = star.contains(a.last().unwrap());
            let prefix_ok = star.contains(&a[0]);
            if !suffix_ok && !prefix_ok {
                continue;
            }
            for c_words in &words_by_len {
                for c in c_words {
                    let c_mass = mu.cylinder_indices(c);
                    if suffix_ok && graph.has_edge(*a.last().unwrap(), c[0]) {
                        concat.clear();
                        concat.extend_from_slice(a);
                        concat.extend_from_slice(c);
                        let ratio = mu.cylinder_indices(&concat) / (a_mass * c_mass);
                        pairs_checked += 1;
                        consider(ConcatCase::SuffixInStar, a, c, ratio, &mut worst);
                    }
                    if prefix_ok && graph.has_edge(*c.last().unwrap(), a[0]) {
                        concat.clear();
                        concat.extend_from_slice(c);
                        concat.extend_from_slice(a);
                        let ratio = mu.cylinder_indices(&concat) / (a_mass * c_mass);
                        pairs_checked += 1;
                        consider(ConcatCase::PrefixInStar, a, c, ratio, &mut worst);
                    }
                }
            }
        }
    }

    let worst_pair = worst.ok_or_else(|| {
        Error::InvalidParameter("no admissible concatenation met the boundary condition".into())
    })?;
    let slack = 1e-9;
    let within_bounds =
        observed_max <= c_star * (1.0 + slack) && observed_min >= (1.0 - slack) / c_star;

    Ok(GibbsCertificate {
        s_star: star.iter().map(|&v| graph.name(v).to_string()).collect(),
        m_const,
        c1,
        c2,
        c_star,
        observed_min,
        observed_max,
        worst_pair,
        pairs_checked,
        max_len,
        within_bounds,
    })
}
