//! Syndrome-conditioned trellis.
//!
//! Frame `t` links memory state `M_{t-1}` to `M_t` whenever
//! `V (M_{t-1} ⊗ Z_t X(s_t) ⊗ L_t) V† = E_t ⊗ M_t` for some ancilla Z pattern
//! `Z_t`, logical segment `L_t`, and physical segment `E_t`. In
//! non-degenerate mode each solution is its own edge labelled by `E_t`; in
//! degenerate mode solutions sharing `(M_{t-1}, M_t, L_t)` are merged into a
//! super edge whose probability is the sum of its members'.
//!
//! A frame depends only on its syndrome pattern, so [`TrellisBuilder`]
//! caches one edge list per pattern.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use crate::code::{ConvolutionalCode, Syndrome};
use crate::error::{Error, Result};
use crate::noise::IidPauliNoise;
use crate::pauli::{code_mask, interleave, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderMode {
    NonDegenerate,
    Degenerate,
}

impl DecoderMode {
    pub fn name(self) -> &'static str {
        match self {
            DecoderMode::NonDegenerate => "nondegenerate",
            DecoderMode::Degenerate => "degenerate",
        }
    }
}

/// Edge between memory states, all values as canonical codes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrellisEdge {
    /// `M_{t-1}`.
    pub from: u64,
    /// `M_t`.
    pub to: u64,
    /// `E_t` in non-degenerate mode, `L_t` in degenerate mode.
    pub label: u64,
    /// `L_t` in both modes.
    pub logical: u64,
    pub weight: f64,
}

/// `-ln Σ exp(-w_i)`, shifted by the minimum weight.
pub fn super_edge_weight(member_weights: &[f64]) -> Result<f64> {
    let min = member_weights
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::invalid("member_weights", "cannot merge an empty edge set"))?;
    if min == f64::INFINITY {
        return Ok(min);
    }
    let sum: f64 = member_weights.iter().map(|&w| (min - w).exp()).sum();
    Ok(min - sum.ln())
}

/// Edges of one frame, sorted by `(from, to, label)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameEdges {
    edges: Vec<TrellisEdge>,
}

impl FrameEdges {
    pub fn edges(&self) -> &[TrellisEdge] {
        &self.edges
    }

    /// Total probability carried by the frame's edges.
    pub fn mass(&self) -> f64 {
        self.edges.iter().map(|e| (-e.weight).exp()).sum()
    }
}

/// Enumerates every `(M_{t-1}, Z_t, L_t)` tuple for syndrome pattern `s_t`,
/// in lexicographic order, as raw (unmerged) edges.
fn raw_edges(code: &ConvolutionalCode, noise: &IidPauliNoise, s_t: u64) -> Vec<TrellisEdge> {
    let (n, k, m, s) = (code.n(), code.k(), code.m(), code.s());
    let map = code.forward_map();
    let mem_images: Vec<u64> = (0..1u64 << (2 * m)).map(|c| map.apply(c)).collect();
    let anc_images: Vec<u64> = (0..1u64 << s)
        .map(|z| map.apply(interleave(s_t, z) << (2 * m)))
        .collect();
    let logical_images: Vec<u64> = (0..1u64 << (2 * k))
        .map(|l| map.apply(l << (2 * (m + s))))
        .collect();
    let mut edges = Vec::with_capacity(mem_images.len() * anc_images.len() * logical_images.len());
    for (from, &mi) in mem_images.iter().enumerate() {
        for &ai in &anc_images {
            for (logical, &li) in logical_images.iter().enumerate() {
                let image = mi ^ ai ^ li;
                let e = image & code_mask(n);
                edges.push(TrellisEdge {
                    from: from as u64,
                    to: image >> (2 * n),
                    label: e,
                    logical: logical as u64,
                    weight: noise.log_prob_code(e, n),
                });
            }
        }
    }
    edges
}

pub fn build_frame(code: &ConvolutionalCode, noise: &IidPauliNoise, s_t: u64, mode: DecoderMode) -> Result<FrameEdges> {
    if s_t >> code.s() != 0 {
        return Err(Error::invalid("syndrome", format!("frame mask wider than {} bits", code.s())));
    }
    let mut raw = raw_edges(code, noise, s_t);
    let edges = match mode {
        DecoderMode::NonDegenerate => {
            raw.sort_by_key(|e| (e.from, e.to, e.label));
            raw
        }
        DecoderMode::Degenerate => {
            // Stable sort keeps members in enumeration order within a group.
            raw.sort_by_key(|e| (e.from, e.to, e.logical));
            let mut merged = Vec::new();
            let mut weights = Vec::new();
            for group in raw.chunk_by(|a, b| (a.from, a.to, a.logical) == (b.from, b.to, b.logical)) {
                weights.clear();
                weights.extend(group.iter().map(|e| e.weight));
                let head = group[0];
                merged.push(TrellisEdge {
                    from: head.from,
                    to: head.to,
                    label: head.logical,
                    logical: head.logical,
                    weight: super_edge_weight(&weights)?,
                });
            }
            merged
        }
    };
    Ok(FrameEdges { edges })
}

/// Builds trellises for one code, noise model, and mode, caching frames by syndrome pattern.
#[derive(Debug)]
pub struct TrellisBuilder {
    code: ConvolutionalCode,
    noise: IidPauliNoise,
    mode: DecoderMode,
    cache: Vec<OnceLock<Arc<FrameEdges>>>,
}

impl TrellisBuilder {
    pub fn new(code: ConvolutionalCode, noise: IidPauliNoise, mode: DecoderMode) -> Self {
        let patterns = 1usize << code.s();
        TrellisBuilder {
            code,
            noise,
            mode,
            cache: (0..patterns).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn code(&self) -> &ConvolutionalCode {
        &self.code
    }

    pub fn noise(&self) -> &IidPauliNoise {
        &self.noise
    }

    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    pub fn frame(&self, s_t: u64) -> Result<Arc<FrameEdges>> {
        let slot = self
            .cache
            .get(s_t as usize)
            .ok_or_else(|| Error::invalid("syndrome", format!("frame mask wider than {} bits", self.code.s())))?;
        if let Some(f) = slot.get() {
            return Ok(f.clone());
        }
        let built = Arc::new(build_frame(&self.code, &self.noise, s_t, self.mode)?);
        Ok(slot.get_or_init(|| built).clone())
    }

    pub fn build(&self, syndrome: &Syndrome) -> Result<SyndromeTrellis> {
        if syndrome.tau() != self.code.tau() {
            return Err(Error::SizeMismatch {
                expected: self.code.tau(),
                found: syndrome.tau(),
            });
        }
        if syndrome.checks_per_frame() != self.code.s() || syndrome.memory_bits() != self.code.m() {
            return Err(Error::invalid("syndrome", "shape does not match the code"));
        }
        let frames = syndrome
            .frames()
            .iter()
            .map(|&s_t| self.frame(s_t))
            .collect::<Result<Vec<_>>>()?;
        Ok(SyndromeTrellis {
            mode: self.mode,
            memory_qubits: self.code.m(),
            frames,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SyndromeTrellis {
    mode: DecoderMode,
    memory_qubits: usize,
    frames: Vec<Arc<FrameEdges>>,
}

impl SyndromeTrellis {
    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    pub fn tau(&self) -> usize {
        self.frames.len()
    }

    pub fn memory_qubits(&self) -> usize {
        self.memory_qubits
    }

    /// `|Λ_t|`, the same for every frame.
    pub fn vertices_per_frame(&self) -> usize {
        1 << (2 * self.memory_qubits)
    }

    /// Edges of frame `t` (1-based).
    pub fn frame(&self, t: usize) -> &FrameEdges {
        &self.frames[t - 1]
    }

    /// One line per edge: `t from_memory to_memory label weight`.
    pub fn dump(&self, physical_qubits: usize, logical_qubits: usize) -> String {
        let label_qubits = match self.mode {
            DecoderMode::NonDegenerate => physical_qubits,
            DecoderMode::Degenerate => logical_qubits,
        };
        let m = self.memory_qubits;
        let mut out = String::new();
        for (i, frame) in self.frames.iter().enumerate() {
            for e in frame.edges() {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {}",
                    i + 1,
                    PauliOperator::from_code(m, e.from),
                    PauliOperator::from_code(m, e.to),
                    PauliOperator::from_code(label_qubits, e.label),
                    e.weight
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeParams;
    use crate::symplectic::SymplecticMap;
    use std::collections::HashSet;

    fn random_code(n: usize, k: usize, m: usize, seed: u64) -> ConvolutionalCode {
        ConvolutionalCode::random(CodeParams::new(n, k, m).unwrap(), 3, seed, None)
            .unwrap()
            .0
    }

    #[test]
    fn super_edge_weights() {
        assert_eq!(super_edge_weight(&[1.25]).unwrap(), 1.25);
        assert_eq!(super_edge_weight(&[f64::INFINITY, 0.75]).unwrap(), 0.75);
        assert_eq!(super_edge_weight(&[f64::INFINITY]).unwrap(), f64::INFINITY);
        let w = super_edge_weight(&[2.0, 2.0, 2.0]).unwrap();
        assert!((w - (2.0 - 3f64.ln())).abs() < 1e-15);
        assert!((w - 0.901_387_711_331_886).abs() < 1e-12);
        let w = super_edge_weight(&[3.0, 3.0]).unwrap();
        assert!((w - (3.0 - 2f64.ln())).abs() < 1e-15);
        assert!(super_edge_weight(&[]).is_err());
    }

    #[test]
    fn raw_edge_count() {
        let code = random_code(4, 1, 1, 2);
        let noise = IidPauliNoise::depolarizing(0.05).unwrap();
        let mut tuples = HashSet::new();
        for m_prev in 0..4u64 {
            for z in 0..8u64 {
                for l in 0..4u64 {
                    tuples.insert((m_prev, z, l));
                }
            }
        }
        assert_eq!(tuples.len(), 128);
        let f = build_frame(&code, &noise, 0b101, DecoderMode::NonDegenerate).unwrap();
        assert_eq!(f.edges().len(), 128);
    }

    #[test]
    fn identity_seed_frame() {
        let code = ConvolutionalCode::new(CodeParams::new(2, 1, 1).unwrap(), SymplecticMap::identity(3), 1).unwrap();
        let noise = IidPauliNoise::depolarizing(0.1).unwrap();
        let f = build_frame(&code, &noise, 0, DecoderMode::NonDegenerate).unwrap();
        let e = f.edges().iter().find(|e| e.from == 0 && e.logical == 0 && e.to == 0 && e.label == 0).unwrap();
        assert_eq!(e.weight, -2.0 * 0.7f64.ln());
        // Only the Z_t = Z choice changes E_t; it leaves M_t = I.
        assert!(f.edges().iter().any(|e| e.from == 0 && e.logical == 0 && e.to == 0 && e.label == 0b1000));
    }

    #[test]
    fn mass_is_conserved_by_merging() {
        let noise = IidPauliNoise::new(0.03, 0.05, 0.08).unwrap();
        for seed in 0..8 {
            let code = random_code(4, 1, 2, seed);
            for s_t in 0..8 {
                let nd = build_frame(&code, &noise, s_t, DecoderMode::NonDegenerate).unwrap();
                let d = build_frame(&code, &noise, s_t, DecoderMode::Degenerate).unwrap();
                assert!((nd.mass() - d.mass()).abs() < 1e-12);
                for sup in d.edges() {
                    for raw in nd.edges() {
                        if (raw.from, raw.to, raw.logical) == (sup.from, sup.to, sup.logical) {
                            assert!(sup.weight <= raw.weight);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn both_modes_share_raw_tuples() {
        let code = random_code(3, 1, 1, 4);
        let noise = IidPauliNoise::depolarizing(0.02).unwrap();
        let nd = build_frame(&code, &noise, 0b11, DecoderMode::NonDegenerate).unwrap();
        let d = build_frame(&code, &noise, 0b11, DecoderMode::Degenerate).unwrap();
        let nd_keys: HashSet<_> = nd.edges().iter().map(|e| (e.from, e.to, e.logical)).collect();
        let d_keys: HashSet<_> = d.edges().iter().map(|e| (e.from, e.to, e.logical)).collect();
        assert_eq!(nd_keys, d_keys);
    }

    #[test]
    fn builder_caches_and_validates() {
        let code = random_code(2, 1, 1, 0);
        let builder = TrellisBuilder::new(code.clone(), IidPauliNoise::depolarizing(0.1).unwrap(), DecoderMode::Degenerate);
        let syn = Syndrome::from_masks(code.params(), vec![1, 0, 1], 0).unwrap();
        let t = builder.build(&syn).unwrap();
        assert_eq!(t.tau(), 3);
        assert_eq!(t.vertices_per_frame(), 4);
        assert!(Arc::ptr_eq(&t.frames[0], &t.frames[2]));
        assert!(builder.build(&Syndrome::zeros(code.params(), 2)).is_err());
        assert!(builder.frame(2).is_err());
        let dump = t.dump(2, 1);
        assert!(dump.lines().all(|l| l.split(' ').count() == 5));
    }
}
