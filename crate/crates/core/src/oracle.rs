//! Exhaustive ground truth for small blocks.
//!
//! Every error with a given syndrome is written `E = L·S·T(s)`: a product of
//! logical generators, stabilizer generators (including the Z images of the
//! initial memory wires), and the pure-error representative. Walking those
//! coordinates in Gray-code order visits the whole coset exactly once.
//!
//! Three optima are reported: the most likely single error, the logical
//! class with the largest total probability, and the best path of the
//! merged (super-edge) trellis. The last is rebuilt here from the coset
//! itself, grouping per-frame segments by `(M_{t-1}, M_t, L_t)` through the
//! un-encoding circuit, without touching the trellis module.

use std::collections::{BTreeMap, BTreeSet};

use crate::code::{ConvolutionalCode, Syndrome};
use crate::error::{Error, Result};
use crate::noise::IidPauliNoise;
use crate::pauli::{Pauli, PauliOperator};

pub const DEFAULT_CAP: u128 = 1 << 24;

/// Two objective values within this distance count as tied.
pub const OPTIMUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MergedPath {
    /// `M_0 .. M_tau` as canonical codes.
    pub memory: Vec<u64>,
    pub labels: PauliOperator,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub coset_size: u64,
    /// `P(T(s))`, the total probability of the coset.
    pub coset_mass: f64,
    pub best_single_error: PauliOperator,
    /// `-ln P` of the best single error.
    pub best_single_weight: f64,
    /// All single errors within [`OPTIMUM_TOLERANCE`] of the best weight.
    pub single_error_optima: Vec<PauliOperator>,
    pub best_class_labels: PauliOperator,
    /// Joint probability `P(L, T(s))` of the best class.
    pub best_class_probability: f64,
    /// Joint class probabilities keyed by label sequence.
    pub class_table: BTreeMap<PauliOperator, f64>,
    pub best_merged_path: MergedPath,
    /// All merged paths within [`OPTIMUM_TOLERANCE`] of the best objective.
    pub merged_optima: Vec<MergedPath>,
}

impl OracleReport {
    /// Posterior `P(L | T(s))` of a label sequence.
    pub fn class_posterior(&self, labels: &PauliOperator) -> f64 {
        self.class_table.get(labels).copied().unwrap_or(0.0) / self.coset_mass
    }

    pub fn is_merged_optimum(&self, memory: &[u64], labels: &PauliOperator) -> bool {
        self.merged_optima
            .iter()
            .any(|p| p.memory == memory && &p.labels == labels)
    }

    pub fn is_single_optimum(&self, error: &PauliOperator) -> bool {
        self.single_error_optima.iter().any(|e| e == error)
    }
}

/// Number of coset elements the oracle would visit.
pub fn coset_enumeration_size(code: &ConvolutionalCode) -> u128 {
    let generators = 2 * code.k() * code.tau() + code.s() * code.tau() + code.m();
    1u128.checked_shl(generators as u32).unwrap_or(u128::MAX)
}

/// `-ln Σ exp(-w)`, summed directly.
fn merge_plain(weights: &BTreeMap<u64, f64>) -> f64 {
    let total: f64 = weights.values().map(|w| (-w).exp()).sum();
    -total.ln()
}

pub fn enumerate_coset(code: &ConvolutionalCode, noise: &IidPauliNoise, syndrome: &Syndrome, cap: u128) -> Result<OracleReport> {
    let size = coset_enumeration_size(code);
    if size > cap {
        return Err(Error::EnumerationCapExceeded { size, cap });
    }
    let (n, k, m, tau) = (code.n(), code.k(), code.m(), code.tau());
    let gens = code.derive_generators();

    // Each generator with the label qubit and component it toggles.
    let mut walk: Vec<(PauliOperator, Option<(usize, Pauli)>)> = Vec::new();
    for (i, g) in gens.logicals_x.iter().enumerate() {
        walk.push((g.clone(), Some((i, Pauli::X))));
    }
    for (i, g) in gens.logicals_z.iter().enumerate() {
        walk.push((g.clone(), Some((i, Pauli::Z))));
    }
    for g in gens.stabilizers.iter().chain(&gens.boundary_stabilizers) {
        walk.push((g.clone(), None));
    }

    let mut error = code.pure_error_for(syndrome)?;
    let mut labels = PauliOperator::identity(k * tau);

    let mut class_table: BTreeMap<PauliOperator, f64> = BTreeMap::new();
    let mut singles: Vec<(f64, PauliOperator)> = Vec::new();
    let mut best_single = f64::INFINITY;
    // (t, M_{t-1}, M_t, L_t) -> distinct E_t with their weights.
    let mut groups: BTreeMap<(usize, u64, u64, u64), BTreeMap<u64, f64>> = BTreeMap::new();
    let mut paths: BTreeSet<(Vec<u64>, PauliOperator)> = BTreeSet::new();
    let mut coset_mass = 0.0;
    let mut coset_size = 0u64;

    for step in 0..size as u64 {
        if step > 0 {
            let (g, toggle) = &walk[step.trailing_zeros() as usize];
            error.multiply_assign(g)?;
            if let Some((q, p)) = toggle {
                let flipped = labels.get(*q).bits();
                let (dx, dz) = p.bits();
                labels.set(*q, Pauli::from_bits(flipped.0 ^ dx, flipped.1 ^ dz));
            }
        }
        coset_size += 1;
        let w = noise.log_prob(&error);
        let prob = (-w).exp();
        coset_mass += prob;
        *class_table.entry(labels.clone()).or_insert(0.0) += prob;
        if w < best_single - OPTIMUM_TOLERANCE {
            singles.retain(|(sw, _)| *sw <= w + OPTIMUM_TOLERANCE);
        }
        if w <= best_single + OPTIMUM_TOLERANCE {
            singles.push((w, error.clone()));
        }
        best_single = best_single.min(w);

        let d = code.decompose(&error)?;
        debug_assert_eq!(d.logical, labels);
        debug_assert_eq!(&d.syndrome, syndrome);
        for t in 1..=tau {
            let segment = error.slice((t - 1) * n..t * n)?;
            let key = (
                t,
                d.memory_trace[t - 1],
                d.memory_trace[t],
                d.logical.segment_code((t - 1) * k, k),
            );
            groups
                .entry(key)
                .or_default()
                .insert(segment.to_code().expect("frame fits a code"), noise.log_prob(&segment));
        }
        paths.insert((d.memory_trace, d.logical));
    }

    singles.retain(|(sw, _)| *sw <= best_single + OPTIMUM_TOLERANCE);
    singles.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let (best_single_weight, best_single_error) = singles[0].clone();

    let (best_class_labels, best_class_probability) = class_table
        .iter()
        .fold(None::<(&PauliOperator, f64)>, |best, (l, &p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((l, p)),
        })
        .map(|(l, p)| (l.clone(), p))
        .expect("coset is non-empty");

    let super_weights: BTreeMap<_, f64> = groups.iter().map(|(key, members)| (*key, merge_plain(members))).collect();
    let mut merged: Vec<MergedPath> = paths
        .into_iter()
        .map(|(memory, labels)| {
            let end = PauliOperator::from_code(m, memory[tau]);
            let mut objective = noise.log_prob(&end);
            for t in (1..=tau).rev() {
                let key = (t, memory[t - 1], memory[t], labels.segment_code((t - 1) * k, k));
                objective += super_weights[&key];
            }
            MergedPath { memory, labels, objective }
        })
        .collect();
    merged.sort_by(|a, b| a.objective.total_cmp(&b.objective));
    let best_objective = merged[0].objective;
    merged.retain(|p| p.objective <= best_objective + OPTIMUM_TOLERANCE);
    let best_merged_path = merged[0].clone();

    Ok(OracleReport {
        coset_size,
        coset_mass,
        best_single_error,
        best_single_weight,
        single_error_optima: singles.into_iter().map(|(_, e)| e).collect(),
        best_class_labels,
        best_class_probability,
        class_table,
        best_merged_path,
        merged_optima: merged,
    })
}
