//! Reduction of two-sided potentials to one-sided ones by a coboundary.
//!
//! A potential whose window reaches negative coordinates sees the past of
//! a point. Subtracting a coboundary removes that dependence without
//! changing any Birkhoff sum along periodic orbits, hence without changing
//! pressure or equilibrium states. The construction: fix for every vertex
//! a deterministic past `r(x)` — replace the coordinates below 0 by the
//! walk obtained by repeatedly stepping to the lexicographically-least
//! predecessor of `x_0` — and set, for a window reaching back `m` steps,
//!
//! ```text
//! u(x)   = sum_{n=0}^{m-1} [ psi(sigma^n r(x)) - psi(sigma^n x) ],
//! phi(x) = psi(x) + u(x) - u(sigma x).
//! ```
//!
//! The sum is finite because for `n >= m` the shifts of `x` and `r(x)`
//! agree on every coordinate the window reads. Expanding `phi` gives
//! `phi(x) = psi(sigma^m x) + sum_{n<m} psi(sigma^n r(x))
//! - sum_{n<m} psi(sigma^n r(sigma x))`, and each term reads only
//! coordinates `>= 0`, so `phi` is one-sided with window `(0, r+m)`.
//!
//! The module does not trust that expansion: it tabulates
//! `psi + u - u o sigma` literally on the two-sided window `(l, r+m)`,
//! then certifies by exact comparison that words agreeing on their
//! nonnegative coordinates get equal values, and only then projects to a
//! one-sided table. With rational arithmetic the certificate is exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{exact_zero, Exact};
use crate::potential::LocallyConstantPotential;

/// A certified one-sided replacement `phi = psi + u - u o sigma`.
#[derive(Debug, Clone)]
pub struct SinaiReduction {
    phi: LocallyConstantPotential,
    u: LocallyConstantPotential,
    past_choice: BTreeMap<String, Vec<String>>,
    m: usize,
}

impl SinaiReduction {
    /// The one-sided potential, window `(0, r+m)`.
    pub fn phi(&self) -> &LocallyConstantPotential {
        &self.phi
    }

    /// The transfer function `u`; bounded since its table is finite.
    pub fn u(&self) -> &LocallyConstantPotential {
        &self.u
    }

    /// The chosen past per vertex: the names at coordinates -1, -2, ...
    /// obtained by iterating the least-predecessor step.
    pub fn past_choice(&self) -> &BTreeMap<String, Vec<String>> {
        &self.past_choice
    }

    /// How far below zero the input window reached.
    pub fn lookback(&self) -> usize {
        self.m
    }

    /// Largest absolute value in the transfer-function table.
    pub fn sup_u_abs(&self) -> f64 {
        self.u
            .entries()
            .into_iter()
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// True iff changing coordinates below 0 never changes the value.
///
/// Checked exhaustively: window words that agree on their nonnegative
/// coordinates must take exactly equal values.
pub fn certify_one_sided(phi: &LocallyConstantPotential) -> bool {
    let (l, r) = phi.window();
    if l >= 0 {
        return true;
    }
    let mut groups: BTreeMap<&[u32], &Exact> = BTreeMap::new();
    for (word, value) in phi.table() {
        let key: &[u32] = if r < 0 {
            &[]
        } else {
            &word[(-l) as usize..]
        };
        match groups.get(key) {
            None => {
                groups.insert(key, value);
            }
            Some(seen) => {
                if *seen != value {
                    return false;
                }
            }
        }
    }
    true
}

/// Reduces a two-sided potential to a certified one-sided one.
///
/// Already one-sided input returns the identity reduction (`u = 0`).
pub fn sinai_reduce(psi: &LocallyConstantPotential) -> Result<SinaiReduction> {
    let graph = Arc::clone(psi.graph());
    let (l, r) = psi.window();
    if l >= 0 {
        let u = LocallyConstantPotential::zero(&graph);
        return Ok(SinaiReduction {
            phi: psi.clone(),
            u,
            past_choice: graph.vertices().iter().map(|v| (v.clone(), Vec::new())).collect(),
            m: 0,
        });
    }
    let m = (-l) as usize;

    // The deterministic past: one least-predecessor step per vertex,
    // iterated as far as the construction looks back.
    let least_pred: Vec<u32> = (0..graph.vertex_count() as u32)
        .map(|v| graph.predecessors(v)[0])
        .collect();
    let past_choice: BTreeMap<String, Vec<String>> = (0..graph.vertex_count() as u32)
        .map(|v| {
            let mut path = Vec::with_capacity(m);
            let mut cur = v;
            for _ in 0..m {
                cur = least_pred[cur as usize];
                path.push(graph.name(cur).to_string());
            }
            (graph.name(v).to_string(), path)
        })
        .collect();

    // Reads psi(sigma^n y) where y agrees with the stored word on
    // coordinates >= base and follows the chosen past below base.
    let span = psi.span();
    let read_past = |word: &[u32], word_anchor: i64, base: i64, n: i64| -> Result<Exact> {
        let mut window_word = Vec::with_capacity(span);
        for t in (n + l)..=(n + r) {
            let symbol = if t >= base {
                word[(t - word_anchor) as usize]
            } else {
                let mut cur = word[(base - word_anchor) as usize];
                for _ in 0..(base - t) {
                    cur = least_pred[cur as usize];
                }
                cur
            };
            window_word.push(symbol);
        }
        Ok(psi.value_exact(&window_word)?.clone())
    };

    // u on window (l, r+m-1): u(x) = sum_{n<m} [psi(s^n r(x)) - psi(s^n x)].
    let u_hi = r + m as i64 - 1;
    let u_span = (u_hi - l + 1) as usize;
    let mut u_table: BTreeMap<Vec<u32>, Exact> = BTreeMap::new();
    for word in graph.admissible_words(u_span) {
        let mut sum = exact_zero();
        for n in 0..m as i64 {
            let on_r = read_past(&word, l, 0, n)?;
            let on_x = psi.value_exact(&word[(n) as usize..(n as usize + span)])?;
            sum += on_r - on_x;
        }
        u_table.insert(word, sum);
    }
    let u = LocallyConstantPotential::from_exact_table(&graph, (l, u_hi), u_table, None)?;

    // phi = psi + u - u o sigma, tabulated literally on (l, r+m), then
    // certified one-sided and projected to (0, r+m).
    let raw_hi = r + m as i64;
    let raw_span = (raw_hi - l + 1) as usize;
    let mut projected: BTreeMap<Vec<u32>, Exact> = BTreeMap::new();
    for word in graph.admissible_words(raw_span) {
        let psi_part = psi.value_exact(&word[0..span])?;
        let u_here = u.value_exact(&word[0..u_span])?;
        let u_next = u.value_exact(&word[1..1 + u_span])?;
        let value = psi_part + u_here - u_next;
        let key = word[m..].to_vec();
        match projected.get(&key) {
            None => {
                projected.insert(key, value);
            }
            Some(seen) => {
                if *seen != value {
                    return Err(Error::SidednessMismatch(format!(
                        "reduction left a past-dependence on word {}",
                        graph.word_name(&word)
                    )));
                }
            }
        }
    }
    let phi = LocallyConstantPotential::from_exact_table(
        &graph,
        (0, raw_hi),
        projected,
        psi.declared_theta(),
    )?;
    debug_assert!(certify_one_sided(&phi));

    Ok(SinaiReduction { phi, u, past_choice, m })
}
