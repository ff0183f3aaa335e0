//! Min-sum Viterbi recursion over the syndrome trellis.
//!
//! The recursion runs from the padded end of the block (`t = tau`) back to
//! `t = 0`, starting from `d(M_tau) = -ln P(M_tau)`. Only initial memory
//! states whose X component matches the boundary bits are eligible at the
//! end. Ties go to the smallest `(M_t, label)` code at each vertex and then
//! to the smallest `M_0`.

use crate::code::{ConvolutionalCode, Syndrome};
use crate::error::{Error, Result};
use crate::noise::IidPauliNoise;
use crate::pauli::{deinterleave, PauliOperator};
use crate::trellis::{DecoderMode, SyndromeTrellis, TrellisBuilder, TrellisEdge};

const NO_EDGE: u32 = u32::MAX;

/// Shortest boundary-consistent path through a trellis.
#[derive(Debug, Clone)]
pub struct TrellisPath {
    /// `M_0 .. M_tau` as canonical codes.
    pub memory: Vec<u64>,
    /// Chosen edge of frames `1 .. tau`.
    pub edges: Vec<TrellisEdge>,
    pub weight: f64,
}

pub fn viterbi(trellis: &SyndromeTrellis, noise: &IidPauliNoise, boundary_bits: u64) -> Result<TrellisPath> {
    let tau = trellis.tau();
    let m = trellis.memory_qubits();
    let vertices = trellis.vertices_per_frame();
    if boundary_bits >> m != 0 {
        return Err(Error::invalid("boundary", format!("mask wider than {m} bits")));
    }

    let mut dist: Vec<f64> = (0..vertices as u64).map(|c| noise.log_prob_code(c, m)).collect();
    let mut next = vec![f64::INFINITY; vertices];
    let mut back = vec![NO_EDGE; tau * vertices];

    for t in (1..=tau).rev() {
        next.fill(f64::INFINITY);
        let pointers = &mut back[(t - 1) * vertices..t * vertices];
        for (i, e) in trellis.frame(t).edges().iter().enumerate() {
            if e.weight == f64::INFINITY {
                continue;
            }
            let cand = dist[e.to as usize] + e.weight;
            // Edges are sorted by (from, to, label): strict `<` keeps the smallest on ties.
            if cand < next[e.from as usize] {
                next[e.from as usize] = cand;
                pointers[e.from as usize] = i as u32;
            }
        }
        std::mem::swap(&mut dist, &mut next);
    }

    let (start, weight) = (0..vertices as u64)
        .filter(|&c| deinterleave(c).0 == boundary_bits)
        .map(|c| (c, dist[c as usize]))
        .fold((None, f64::INFINITY), |best, (c, d)| if d < best.1 { (Some(c), d) } else { best });
    let start = start.ok_or(Error::UncorrectableSyndrome)?;

    let mut memory = Vec::with_capacity(tau + 1);
    let mut edges = Vec::with_capacity(tau);
    memory.push(start);
    let mut current = start;
    for t in 1..=tau {
        let i = back[(t - 1) * vertices + current as usize];
        debug_assert_ne!(i, NO_EDGE);
        let e = trellis.frame(t).edges()[i as usize];
        edges.push(e);
        current = e.to;
        memory.push(current);
    }
    Ok(TrellisPath { memory, edges, weight })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub mode: DecoderMode,
    /// Recovered `L_1 ⊗ … ⊗ L_tau` on `k·tau` qubits.
    pub logical: PauliOperator,
    pub path_weight: f64,
    /// `M_0 .. M_tau` as canonical codes.
    pub memory_path: Vec<u64>,
    /// Physical error estimate (non-degenerate mode only).
    pub physical_error: Option<PauliOperator>,
}

impl DecodeOutcome {
    pub fn logical_label(&self, t: usize, k: usize) -> PauliOperator {
        self.logical.slice((t - 1) * k..t * k).expect("frame in range")
    }

    /// Labels formatted one frame per space-separated token.
    pub fn labels_text(&self, k: usize) -> String {
        let tau = self.logical.num_qubits() / k;
        (1..=tau)
            .map(|t| self.logical_label(t, k).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A reusable decoder for one code, noise model, and mode. Safe to share
/// between threads; frames are cached per syndrome pattern.
#[derive(Debug)]
pub struct Decoder {
    builder: TrellisBuilder,
}

impl Decoder {
    pub fn new(code: ConvolutionalCode, noise: IidPauliNoise, mode: DecoderMode) -> Self {
        Decoder {
            builder: TrellisBuilder::new(code, noise, mode),
        }
    }

    pub fn code(&self) -> &ConvolutionalCode {
        self.builder.code()
    }

    pub fn mode(&self) -> DecoderMode {
        self.builder.mode()
    }

    pub fn trellis(&self, syndrome: &Syndrome) -> Result<SyndromeTrellis> {
        self.builder.build(syndrome)
    }

    pub fn decode(&self, syndrome: &Syndrome) -> Result<DecodeOutcome> {
        let trellis = self.builder.build(syndrome)?;
        let path = viterbi(&trellis, self.builder.noise(), syndrome.boundary())?;
        let code = self.builder.code();
        let (n, k, tau) = (code.n(), code.k(), code.tau());
        match self.mode() {
            DecoderMode::Degenerate => {
                let mut logical = PauliOperator::identity(k * tau);
                for (t, e) in path.edges.iter().enumerate() {
                    logical.set_segment_code(t * k, k, e.label);
                }
                Ok(DecodeOutcome {
                    mode: DecoderMode::Degenerate,
                    logical,
                    path_weight: path.weight,
                    memory_path: path.memory,
                    physical_error: None,
                })
            }
            DecoderMode::NonDegenerate => {
                let mut error = PauliOperator::identity(code.num_physical());
                for (t, e) in path.edges.iter().enumerate() {
                    error.set_segment_code(t * n, n, e.label);
                }
                error.set_segment_code(n * tau, code.m(), path.memory[tau]);
                let logical = code.decompose(&error)?.logical;
                Ok(DecodeOutcome {
                    mode: DecoderMode::NonDegenerate,
                    logical,
                    path_weight: path.weight,
                    memory_path: path.memory,
                    physical_error: Some(error),
                })
            }
        }
    }
}

pub fn decode_degenerate(code: &ConvolutionalCode, noise: &IidPauliNoise, syndrome: &Syndrome) -> Result<DecodeOutcome> {
    Decoder::new(code.clone(), *noise, DecoderMode::Degenerate).decode(syndrome)
}

pub fn decode_nondegenerate(code: &ConvolutionalCode, noise: &IidPauliNoise, syndrome: &Syndrome) -> Result<DecodeOutcome> {
    Decoder::new(code.clone(), *noise, DecoderMode::NonDegenerate).decode(syndrome)
}
