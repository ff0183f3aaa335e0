//! Pauli operators modulo phase, stored as paired X/Z bit vectors.
//!
//! The group of n-qubit Paulis modulo `{±1, ±i}` is isomorphic to `F_2^{2n}`:
//! products are XORs of the bit vectors and commutation is the symplectic
//! inner product.
//!
//! Small operators (at most 32 qubits) also have a canonical integer
//! encoding, interleaving `(x_q, z_q)` at bits `(2q, 2q + 1)` with qubit 0
//! least significant. The encoding is linear, so the product of two
//! operators is the XOR of their codes. It is used for map keys and
//! deterministic tie-breaking throughout the decoders.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::bitvec::BitVec;
use crate::error::{Error, Result};

/// Largest operator that fits in a canonical `u64` code.
pub const MAX_CODE_QUBITS: usize = 32;

/// Single-qubit Pauli class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Two-bit canonical code: `x | z << 1`.
    pub fn code(self) -> u64 {
        let (x, z) = self.bits();
        x as u64 | (z as u64) << 1
    }

    pub fn from_code(code: u64) -> Pauli {
        Pauli::from_bits(code & 1 == 1, code & 2 == 2)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Pauli> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauliChar(other)),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    num_qubits: usize,
    x: BitVec,
    z: BitVec,
}

/// Spreads the low 32 bits of `v` onto the even bit positions of a `u64`.
#[inline]
fn spread(v: u64) -> u64 {
    let mut v = v & 0xFFFF_FFFF;
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    (v | (v << 1)) & 0x5555_5555_5555_5555
}

/// Inverse of [`spread`]: gathers the even bits of `v`.
#[inline]
fn gather(v: u64) -> u64 {
    let mut v = v & 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v >> 4)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v >> 8)) & 0x0000_FFFF_0000_FFFF;
    (v | (v >> 16)) & 0xFFFF_FFFF
}

/// Interleaves X and Z masks into a canonical code.
#[inline]
pub fn interleave(x: u64, z: u64) -> u64 {
    spread(x) | spread(z) << 1
}

/// Splits a canonical code into its `(x, z)` masks.
#[inline]
pub fn deinterleave(code: u64) -> (u64, u64) {
    (gather(code), gather(code >> 1))
}

/// Mask selecting the canonical code bits of `qubits` qubits.
#[inline]
pub fn code_mask(qubits: usize) -> u64 {
    if qubits >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * qubits)) - 1
    }
}

/// Symplectic product of two canonical codes (true iff they anti-commute).
#[inline]
pub fn code_anticommutes(a: u64, b: u64) -> bool {
    let (ax, az) = deinterleave(a);
    let (bx, bz) = deinterleave(b);
    ((ax & bz) ^ (az & bx)).count_ones() & 1 == 1
}

impl PauliOperator {
    pub fn identity(num_qubits: usize) -> Self {
        PauliOperator {
            num_qubits,
            x: BitVec::zeros(num_qubits),
            z: BitVec::zeros(num_qubits),
        }
    }

    /// `pauli` on `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= num_qubits {
            return Err(Error::OutOfRange {
                start: qubit,
                end: qubit + 1,
                len: num_qubits,
            });
        }
        let mut p = PauliOperator::identity(num_qubits);
        p.set(qubit, pauli);
        Ok(p)
    }

    pub fn from_bitvecs(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(PauliOperator {
            num_qubits: x.len(),
            x,
            z,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        let (x, z) = pauli.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    fn check_len(&self, other: &PauliOperator) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(())
    }

    /// Product modulo phase.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        let mut out = self.clone();
        out.multiply_assign(other)?;
        Ok(out)
    }

    pub fn multiply_assign(&mut self, other: &PauliOperator) -> Result<()> {
        self.check_len(other)?;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        Ok(())
    }

    /// True iff `PQ = -QP`.
    pub fn anticommutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.x.and_parity(&other.z) ^ self.z.and_parity(&other.x))
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.anticommutes(other).map(|a| !a)
    }

    /// `self ⊗ other`, with `self` on the low qubit indices.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        PauliOperator {
            num_qubits: self.num_qubits + other.num_qubits,
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
        }
    }

    pub fn slice(&self, range: Range<usize>) -> Result<PauliOperator> {
        if range.start > range.end || range.end > self.num_qubits {
            return Err(Error::OutOfRange {
                start: range.start,
                end: range.end,
                len: self.num_qubits,
            });
        }
        Ok(PauliOperator {
            num_qubits: range.end - range.start,
            x: self.x.slice(range.start, range.end),
            z: self.z.slice(range.start, range.end),
        })
    }

    /// Overwrites qubits `at..at + src.num_qubits()` with `src`.
    pub fn place(&mut self, at: usize, src: &PauliOperator) -> Result<()> {
        if at + src.num_qubits > self.num_qubits {
            return Err(Error::OutOfRange {
                start: at,
                end: at + src.num_qubits,
                len: self.num_qubits,
            });
        }
        self.x.copy_from(at, &src.x);
        self.z.copy_from(at, &src.z);
        Ok(())
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.x.or_count(&self.z)
    }

    /// Canonical code of the whole operator, if it has at most 32 qubits.
    pub fn to_code(&self) -> Option<u64> {
        (self.num_qubits <= MAX_CODE_QUBITS).then(|| self.segment_code(0, self.num_qubits))
    }

    pub fn from_code(num_qubits: usize, code: u64) -> PauliOperator {
        assert!(num_qubits <= MAX_CODE_QUBITS, "code operators hold at most 32 qubits");
        let mut p = PauliOperator::identity(num_qubits);
        p.set_segment_code(0, num_qubits, code);
        p
    }

    /// Canonical code of qubits `start..start + len` (`len <= 32`).
    #[inline]
    pub fn segment_code(&self, start: usize, len: usize) -> u64 {
        debug_assert!(len <= MAX_CODE_QUBITS);
        interleave(self.x.read(start, len), self.z.read(start, len))
    }

    /// Overwrites qubits `start..start + len` from a canonical code.
    #[inline]
    pub fn set_segment_code(&mut self, start: usize, len: usize, code: u64) {
        debug_assert!(len <= MAX_CODE_QUBITS);
        let (x, z) = deinterleave(code & code_mask(len));
        self.x.write(start, len, x);
        self.z.write(start, len, z);
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.num_qubits).map(|q| self.get(q).as_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        let mut p = PauliOperator::identity(chars.len());
        for (q, &c) in chars.iter().enumerate() {
            p.set(q, Pauli::from_char(c)?);
        }
        Ok(p)
    }
}

#[cfg(test)]
pub(crate) mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn pauli(num_qubits: usize) -> impl Strategy<Value = PauliOperator> {
        proptest::collection::vec(0u64..4, num_qubits).prop_map(move |v| {
            let mut p = PauliOperator::identity(num_qubits);
            for (q, c) in v.into_iter().enumerate() {
                p.set(q, Pauli::from_code(c));
            }
            p
        })
    }
}
