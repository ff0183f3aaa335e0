//! Circuit-defined `(n, k, m)` quantum convolutional codes.
//!
//! The seed transformation acts on `n + m` wires. Its input wires are
//! ordered `[memory-in (m) | ancilla (s) | data (k)]` and its output wires
//! `[frame physical (n) | memory-out (m)]`, with `s = n - k`. Frame `t`
//! (1-based) emits physical qubits `(t-1)n .. tn`; the memory left after the
//! last frame is padded onto the block, so a block holds `N = n·tau + m`
//! physical qubits.
//!
//! The un-encoded side of a block uses the layout
//! `[initial memory (m) | frame 1: ancilla, data | frame 2: ... ]`. The
//! initial memory wires start in `|0⟩` and act as extra ancillas.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{code_mask, deinterleave, interleave, Pauli, PauliOperator, MAX_CODE_QUBITS};
use crate::symplectic::{self, CliffordCircuit, CodeMap, SymplecticMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if n <= k {
            return Err(Error::invalid("n", format!("must exceed k = {k}")));
        }
        if m < 1 {
            return Err(Error::invalid("m", "must be at least 1"));
        }
        if n + m > MAX_CODE_QUBITS {
            return Err(Error::invalid(
                "n",
                format!("n + m = {} exceeds {MAX_CODE_QUBITS} seed wires", n + m),
            ));
        }
        Ok(CodeParams { n, k, m })
    }

    /// Ancilla qubits per frame.
    pub fn s(&self) -> usize {
        self.n - self.k
    }

    pub fn seed_wires(&self) -> usize {
        self.n + self.m
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.m)
    }
}

/// Measured syndrome of a block: `s` bits per frame plus the `m` boundary
/// bits revealed by the initial memory wires. Bit value 1 means the
/// eigenvalue `-1` was observed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    checks: usize,
    memory: usize,
    frames: Vec<u64>,
    boundary: u64,
}

impl Syndrome {
    pub fn zeros(params: CodeParams, tau: usize) -> Self {
        Syndrome {
            checks: params.s(),
            memory: params.m,
            frames: vec![0; tau],
            boundary: 0,
        }
    }

    /// Builds a syndrome from per-frame masks (bit `a` = ancilla `a`) and a boundary mask.
    pub fn from_masks(params: CodeParams, frames: Vec<u64>, boundary: u64) -> Result<Self> {
        let s = params.s();
        if frames.iter().any(|&f| f >> s != 0) {
            return Err(Error::invalid("syndrome", format!("frame mask wider than {s} bits")));
        }
        if boundary >> params.m != 0 {
            return Err(Error::invalid("boundary", format!("mask wider than {} bits", params.m)));
        }
        Ok(Syndrome {
            checks: s,
            memory: params.m,
            frames,
            boundary,
        })
    }

    pub fn tau(&self) -> usize {
        self.frames.len()
    }

    /// Syndrome mask of frame `t` (1-based).
    pub fn frame(&self, t: usize) -> u64 {
        self.frames[t - 1]
    }

    pub fn frames(&self) -> &[u64] {
        &self.frames
    }

    pub fn bit(&self, t: usize, a: usize) -> bool {
        (self.frames[t - 1] >> a) & 1 == 1
    }

    pub fn boundary(&self) -> u64 {
        self.boundary
    }

    pub fn boundary_bit(&self, j: usize) -> bool {
        (self.boundary >> j) & 1 == 1
    }

    pub fn checks_per_frame(&self) -> usize {
        self.checks
    }

    pub fn memory_bits(&self) -> usize {
        self.memory
    }

    /// Text form: `tau` lines of `s` bits, then one line of `m` boundary bits.
    pub fn to_text(&self) -> String {
        let bits = |mask: u64, len: usize| -> String {
            (0..len).map(|i| if (mask >> i) & 1 == 1 { '1' } else { '0' }).collect()
        };
        let mut out = String::new();
        for &f in &self.frames {
            out.push_str(&bits(f, self.checks));
            out.push('\n');
        }
        out.push_str(&bits(self.boundary, self.memory));
        out.push('\n');
        out
    }

    pub fn parse(params: CodeParams, text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let Some((&(bline, bstr), frame_lines)) = lines.split_last() else {
            return Err(Error::parse(1, "empty syndrome file"));
        };
        if frame_lines.is_empty() {
            return Err(Error::parse(bline, "expected at least one frame line before the boundary line"));
        }
        let read = |line: usize, s: &str, len: usize| -> Result<u64> {
            if s.len() != len {
                return Err(Error::parse(line, format!("expected {len} bits, found {}", s.len())));
            }
            s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
                '0' => Ok(acc),
                '1' => Ok(acc | 1 << i),
                other => Err(Error::parse(line, format!("invalid bit {other:?}"))),
            })
        };
        let frames = frame_lines
            .iter()
            .map(|&(line, s)| read(line, s, params.s()))
            .collect::<Result<Vec<_>>>()?;
        let boundary = read(bline, bstr, params.m)?;
        Syndrome::from_masks(params, frames, boundary)
    }
}

/// Result of un-encoding an error: its logical class label, syndrome, and
/// memory states `M_0 .. M_tau`. Stabilizer coordinates are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `L_1 ⊗ … ⊗ L_tau` on `k·tau` qubits.
    pub logical: PauliOperator,
    pub syndrome: Syndrome,
    /// Canonical codes of `M_0 .. M_tau` (m qubits each).
    pub memory_trace: Vec<u64>,
}

impl Decomposition {
    pub fn logical_label(&self, t: usize, k: usize) -> PauliOperator {
        self.logical.slice((t - 1) * k..t * k).expect("frame in range")
    }
}

#[derive(Debug, Clone)]
pub struct Generators {
    /// `S_{t,a}`, frame-major.
    pub stabilizers: Vec<PauliOperator>,
    /// Images of `Z` on the initial memory wires.
    pub boundary_stabilizers: Vec<PauliOperator>,
    /// `T_{t,a}`, frame-major.
    pub pure_errors: Vec<PauliOperator>,
    /// Images of `X` on the initial memory wires.
    pub boundary_pure_errors: Vec<PauliOperator>,
    pub logicals_x: Vec<PauliOperator>,
    pub logicals_z: Vec<PauliOperator>,
}

#[derive(Debug, Clone)]
pub struct ConvolutionalCode {
    params: CodeParams,
    tau: usize,
    seed: SymplecticMap,
    forward: CodeMap,
    backward: CodeMap,
}

impl ConvolutionalCode {
    pub fn new(params: CodeParams, seed: SymplecticMap, tau: usize) -> Result<Self> {
        if tau < 1 {
            return Err(Error::invalid("tau", "must be at least 1"));
        }
        if seed.num_qubits() != params.seed_wires() {
            return Err(Error::SizeMismatch {
                expected: params.seed_wires(),
                found: seed.num_qubits(),
            });
        }
        let forward = seed.code_map().expect("seed width checked by CodeParams");
        let backward = seed.invert()?.code_map().expect("same width");
        Ok(ConvolutionalCode {
            params,
            tau,
            seed,
            forward,
            backward,
        })
    }

    /// Random code whose seed is a gate circuit drawn from `rng_seed`.
    pub fn random(params: CodeParams, tau: usize, rng_seed: u64, depth: Option<usize>) -> Result<(Self, CliffordCircuit)> {
        let wires = params.seed_wires();
        let depth = depth.unwrap_or_else(|| symplectic::default_depth(wires));
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let circuit = symplectic::random_circuit(wires, &mut rng, depth)?;
        let code = ConvolutionalCode::new(params, circuit.to_map(), tau)?;
        Ok((code, circuit))
    }

    /// Same code, different number of frames.
    pub fn with_tau(&self, tau: usize) -> Result<Self> {
        if tau < 1 {
            return Err(Error::invalid("tau", "must be at least 1"));
        }
        let mut c = self.clone();
        c.tau = tau;
        Ok(c)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn s(&self) -> usize {
        self.params.s()
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn seed(&self) -> &SymplecticMap {
        &self.seed
    }

    pub(crate) fn forward_map(&self) -> &CodeMap {
        &self.forward
    }

    /// Physical qubits per block.
    pub fn num_physical(&self) -> usize {
        self.params.n * self.tau + self.params.m
    }

    /// Un-encoded wire of ancilla `a` in frame `t` (1-based).
    pub fn ancilla_wire(&self, t: usize, a: usize) -> usize {
        self.params.m + (t - 1) * self.params.n + a
    }

    /// Un-encoded wire of data qubit `j` in frame `t` (1-based).
    pub fn data_wire(&self, t: usize, j: usize) -> usize {
        self.params.m + (t - 1) * self.params.n + self.params.s() + j
    }

    fn check_block(&self, p: &PauliOperator) -> Result<()> {
        if p.num_qubits() != self.num_physical() {
            return Err(Error::SizeMismatch {
                expected: self.num_physical(),
                found: p.num_qubits(),
            });
        }
        Ok(())
    }

    /// Propagates an un-encoded operator forward through the block circuit `U`.
    pub fn encode(&self, unencoded: &PauliOperator) -> Result<PauliOperator> {
        self.check_block(unencoded)?;
        let CodeParams { n, m, .. } = self.params;
        let mut out = PauliOperator::identity(self.num_physical());
        let mut mem = unencoded.segment_code(0, m);
        for t in 1..=self.tau {
            let input = mem | unencoded.segment_code(m + (t - 1) * n, n) << (2 * m);
            let image = self.forward.apply(input);
            out.set_segment_code((t - 1) * n, n, image & code_mask(n));
            mem = image >> (2 * n);
        }
        out.set_segment_code(n * self.tau, m, mem);
        Ok(out)
    }

    /// Conjugates a physical error by `U†`, the inverse of [`Self::encode`].
    pub fn unencode(&self, e: &PauliOperator) -> Result<PauliOperator> {
        self.check_block(e)?;
        let CodeParams { n, m, .. } = self.params;
        let mut out = PauliOperator::identity(self.num_physical());
        let mut mem = e.segment_code(n * self.tau, m);
        for t in (1..=self.tau).rev() {
            let image = e.segment_code((t - 1) * n, n) | mem << (2 * n);
            let input = self.backward.apply(image);
            out.set_segment_code(m + (t - 1) * n, n, input >> (2 * m));
            mem = input & code_mask(m);
        }
        out.set_segment_code(0, m, mem);
        Ok(out)
    }

    /// Splits an error into logical labels, syndrome, and memory trace by
    /// running the un-encoding circuit frame by frame from `t = tau` to 1.
    pub fn decompose(&self, e: &PauliOperator) -> Result<Decomposition> {
        self.check_block(e)?;
        let CodeParams { n, k, m } = self.params;
        let s = self.params.s();
        let mut logical = PauliOperator::identity(k * self.tau);
        let mut frames = vec![0u64; self.tau];
        let mut memory_trace = vec![0u64; self.tau + 1];
        let mut mem = e.segment_code(n * self.tau, m);
        memory_trace[self.tau] = mem;
        for t in (1..=self.tau).rev() {
            let image = e.segment_code((t - 1) * n, n) | mem << (2 * n);
            let input = self.backward.apply(image);
            let ancilla = (input >> (2 * m)) & code_mask(s);
            frames[t - 1] = deinterleave(ancilla).0;
            logical.set_segment_code((t - 1) * k, k, input >> (2 * (m + s)));
            mem = input & code_mask(m);
            memory_trace[t - 1] = mem;
        }
        let boundary = deinterleave(mem).0;
        Ok(Decomposition {
            logical,
            syndrome: Syndrome {
                checks: s,
                memory: m,
                frames,
                boundary,
            },
            memory_trace,
        })
    }

    fn encode_single(&self, wire: usize, pauli: Pauli) -> PauliOperator {
        let u = PauliOperator::single(self.num_physical(), wire, pauli).expect("wire in range");
        self.encode(&u).expect("block sized")
    }

    pub fn derive_generators(&self) -> Generators {
        let (tau, s, k, m) = (self.tau, self.s(), self.k(), self.m());
        let frame_wires = |f: &dyn Fn(usize, usize) -> usize, count: usize, pauli: Pauli| -> Vec<PauliOperator> {
            (1..=tau)
                .flat_map(|t| (0..count).map(move |a| (t, a)))
                .map(|(t, a)| self.encode_single(f(t, a), pauli))
                .collect()
        };
        Generators {
            stabilizers: frame_wires(&|t, a| self.ancilla_wire(t, a), s, Pauli::Z),
            pure_errors: frame_wires(&|t, a| self.ancilla_wire(t, a), s, Pauli::X),
            logicals_x: frame_wires(&|t, j| self.data_wire(t, j), k, Pauli::X),
            logicals_z: frame_wires(&|t, j| self.data_wire(t, j), k, Pauli::Z),
            boundary_stabilizers: (0..m).map(|j| self.encode_single(j, Pauli::Z)).collect(),
            boundary_pure_errors: (0..m).map(|j| self.encode_single(j, Pauli::X)).collect(),
        }
    }

    /// The pure-error representative `T(s)` of a syndrome: X on every flagged
    /// ancilla and initial memory wire, pushed through the encoder.
    pub fn pure_error_for(&self, syndrome: &Syndrome) -> Result<PauliOperator> {
        if syndrome.tau() != self.tau {
            return Err(Error::SizeMismatch {
                expected: self.tau,
                found: syndrome.tau(),
            });
        }
        if syndrome.checks_per_frame() != self.s() || syndrome.memory_bits() != self.m() {
            return Err(Error::invalid("syndrome", "shape does not match the code"));
        }
        let CodeParams { n, m, .. } = self.params;
        let mut u = PauliOperator::identity(self.num_physical());
        u.set_segment_code(0, m, interleave(syndrome.boundary(), 0));
        for t in 1..=self.tau {
            u.set_segment_code(m + (t - 1) * n, self.s(), interleave(syndrome.frame(t), 0));
        }
        self.encode(&u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::strategies::pauli;
    use proptest::prelude::*;
    use rand::Rng;

    fn params(n: usize, k: usize, m: usize) -> CodeParams {
        CodeParams::new(n, k, m).unwrap()
    }

    fn random_code(n: usize, k: usize, m: usize, tau: usize, seed: u64) -> ConvolutionalCode {
        ConvolutionalCode::random(params(n, k, m), tau, seed, None).unwrap().0
    }

    #[test]
    fn parameter_validation() {
        assert!(CodeParams::new(2, 2, 1).is_err());
        assert!(CodeParams::new(2, 0, 1).is_err());
        assert!(CodeParams::new(2, 1, 0).is_err());
        assert!(CodeParams::new(30, 1, 3).is_err());
        let id = SymplecticMap::identity(3);
        assert!(ConvolutionalCode::new(params(2, 1, 1), id.clone(), 0).is_err());
        assert!(ConvolutionalCode::new(params(3, 1, 1), id, 1).is_err());
    }

    #[test]
    fn identity_seed_stabilizer() {
        let code = ConvolutionalCode::new(params(2, 1, 1), SymplecticMap::identity(3), 1).unwrap();
        let g = code.derive_generators();
        // Seed input [mem | anc | data] maps straight to output [phys0 phys1 | mem],
        // so the ancilla Z lands on physical qubit 1.
        assert_eq!(g.stabilizers.len(), 1);
        assert_eq!(g.stabilizers[0].to_string(), "IZI");
        assert_eq!(g.boundary_stabilizers[0].to_string(), "ZII");
        assert_eq!(g.logicals_x[0].to_string(), "IIX");
    }

    #[test]
    fn generator_counts() {
        let code = random_code(4, 1, 1, 5, 3);
        let g = code.derive_generators();
        assert_eq!(g.stabilizers.len(), 3 * 5);
        assert_eq!(g.pure_errors.len(), 3 * 5);
        assert_eq!(g.logicals_x.len(), 5);
        assert_eq!(g.boundary_stabilizers.len(), 1);
    }

    #[test]
    fn generator_commutation_relations() {
        for seed in 0..10 {
            let code = random_code(3, 1, 2, 3, seed);
            let g = code.derive_generators();
            let stabs: Vec<_> = g.stabilizers.iter().chain(&g.boundary_stabilizers).collect();
            let pures: Vec<_> = g.pure_errors.iter().chain(&g.boundary_pure_errors).collect();
            for (i, a) in stabs.iter().enumerate() {
                for b in &stabs {
                    assert!(a.commutes(b).unwrap());
                }
                for l in g.logicals_x.iter().chain(&g.logicals_z) {
                    assert!(a.commutes(l).unwrap());
                }
                for (j, t) in pures.iter().enumerate() {
                    assert_eq!(a.anticommutes(t).unwrap(), i == j);
                }
            }
        }
    }

    #[test]
    fn decompose_identity() {
        let code = random_code(4, 1, 1, 3, 1);
        let d = code.decompose(&PauliOperator::identity(code.num_physical())).unwrap();
        assert!(d.logical.is_identity());
        assert_eq!(d.syndrome, Syndrome::zeros(code.params(), 3));
        assert!(d.memory_trace.iter().all(|&c| c == 0));
        assert!(code.decompose(&PauliOperator::identity(3)).is_err());
    }

    /// Brute force over all 4^5 errors of a (2,1,1) block with tau = 2.
    #[test]
    fn syndrome_matches_anticommutation_exhaustively() {
        let code = random_code(2, 1, 1, 2, 17);
        let g = code.derive_generators();
        let nq = code.num_physical();
        assert_eq!(nq, 5);
        for c in 0..1u64 << (2 * nq) {
            let e = PauliOperator::from_code(nq, c);
            let d = code.decompose(&e).unwrap();
            for t in 1..=2 {
                let stab = &g.stabilizers[t - 1];
                assert_eq!(d.syndrome.bit(t, 0), stab.anticommutes(&e).unwrap());
            }
            assert_eq!(
                d.syndrome.boundary_bit(0),
                g.boundary_stabilizers[0].anticommutes(&e).unwrap()
            );
        }
    }

    /// Two errors share labels, syndrome, and boundary iff they differ by a stabilizer.
    #[test]
    fn class_soundness_exhaustively() {
        let code = random_code(2, 1, 1, 2, 5);
        let g = code.derive_generators();
        let nq = code.num_physical();
        let gens: Vec<u64> = g
            .stabilizers
            .iter()
            .chain(&g.boundary_stabilizers)
            .map(|s| s.to_code().unwrap())
            .collect();
        let mut group = vec![0u64];
        for &s in &gens {
            let more: Vec<u64> = group.iter().map(|&x| x ^ s).collect();
            group.extend(more);
        }
        group.sort_unstable();
        let key = |c: u64| {
            let d = code.decompose(&PauliOperator::from_code(nq, c)).unwrap();
            (d.logical, d.syndrome)
        };
        let reference = key(0b01_10_00_11_01);
        for c in 0..1u64 << (2 * nq) {
            let same = key(c) == reference;
            let in_coset = group.binary_search(&(c ^ 0b01_10_00_11_01)).is_ok();
            assert_eq!(same, in_coset, "code {c:b}");
        }
    }

    #[test]
    fn pure_error_examples() {
        let code = random_code(2, 1, 1, 3, 8);
        let g = code.derive_generators();
        let zero = Syndrome::zeros(code.params(), 3);
        assert!(code.pure_error_for(&zero).unwrap().is_identity());
        let single = Syndrome::from_masks(code.params(), vec![0, 1, 0], 0).unwrap();
        assert_eq!(code.pure_error_for(&single).unwrap(), g.pure_errors[1]);
        let boundary = Syndrome::from_masks(code.params(), vec![0, 0, 0], 1).unwrap();
        assert_eq!(code.pure_error_for(&boundary).unwrap(), g.boundary_pure_errors[0]);
        assert!(code.pure_error_for(&Syndrome::zeros(code.params(), 2)).is_err());
    }

    #[test]
    fn pure_error_round_trip() {
        let code = random_code(2, 1, 1, 3, 21);
        let g = code.derive_generators();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let frames: Vec<u64> = (0..3).map(|_| rng.gen_range(0..2)).collect();
            let syn = Syndrome::from_masks(code.params(), frames, rng.gen_range(0..2)).unwrap();
            let t = code.pure_error_for(&syn).unwrap();
            let d = code.decompose(&t).unwrap();
            assert_eq!(d.syndrome, syn);
            assert!(d.logical.is_identity());
            for (i, stab) in g.stabilizers.iter().enumerate() {
                assert_eq!(stab.anticommutes(&t).unwrap(), syn.bit(i + 1, 0));
            }
        }
    }

    #[test]
    fn syndrome_text_round_trip() {
        let p = params(4, 1, 2);
        let syn = Syndrome::from_masks(p, vec![0b101, 0b010], 0b10).unwrap();
        let text = syn.to_text();
        assert_eq!(text, "101\n010\n01\n");
        assert_eq!(Syndrome::parse(p, &text).unwrap(), syn);
        assert!(Syndrome::parse(p, "10\n01\n").is_err());
        assert!(Syndrome::parse(p, "1x1\n01\n").is_err());
        assert!(Syndrome::parse(p, "01\n").is_err());
    }

    proptest! {
        #[test]
        fn decompose_is_stabilizer_invariant(e in pauli(13), seed in 0u64..50, which in 0usize..13) {
            let code = random_code(4, 1, 1, 3, seed);
            let g = code.derive_generators();
            let stabs: Vec<_> = g.stabilizers.iter().chain(&g.boundary_stabilizers).collect();
            let s = stabs[which % stabs.len()];
            let d0 = code.decompose(&e).unwrap();
            let d1 = code.decompose(&e.multiply(s).unwrap()).unwrap();
            prop_assert_eq!(d0.logical, d1.logical);
            prop_assert_eq!(d0.syndrome, d1.syndrome);
        }

        #[test]
        fn encode_unencode_are_inverse(e in pauli(11), seed in 0u64..50) {
            let code = random_code(3, 1, 2, 3, seed);
            let u = code.unencode(&e).unwrap();
            prop_assert_eq!(code.encode(&u).unwrap(), e.clone());
            let d = code.decompose(&e).unwrap();
            for t in 1..=3 {
                prop_assert_eq!(u.get(code.data_wire(t, 0)), d.logical.get(t - 1));
            }
        }
    }
}
