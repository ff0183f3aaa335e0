//! Phase-free Clifford transformations as binary symplectic matrices.
//!
//! A map is stored column-wise: `columns[a]` is the image of `X_a` and
//! `columns[n + a]` the image of `Z_a`. In the `(x | z)` coordinate vector of
//! an operator, coordinate `a` is `x_a` and coordinate `n + a` is `z_a`.

use std::fmt;

use rand::Rng;

use crate::bitvec::BitVec;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator, MAX_CODE_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Hadamard(usize),
    Phase(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn check(&self, num_qubits: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q < num_qubits {
                Ok(())
            } else {
                Err(Error::OutOfRange {
                    start: q,
                    end: q + 1,
                    len: num_qubits,
                })
            }
        };
        match *self {
            Gate::Hadamard(a) | Gate::Phase(a) => in_range(a),
            Gate::Cnot { control, target } => {
                in_range(control)?;
                in_range(target)?;
                if control == target {
                    return Err(Error::invalid("cnot", "control and target must differ"));
                }
                Ok(())
            }
        }
    }

    /// Conjugates `p` by the gate in place.
    pub fn apply_in_place(&self, p: &mut PauliOperator) {
        match *self {
            Gate::Hadamard(a) => {
                let (x, z) = p.get(a).bits();
                p.set(a, Pauli::from_bits(z, x));
            }
            Gate::Phase(a) => {
                let (x, z) = p.get(a).bits();
                p.set(a, Pauli::from_bits(x, z ^ x));
            }
            Gate::Cnot { control, target } => {
                let (xc, zc) = p.get(control).bits();
                let (xt, zt) = p.get(target).bits();
                p.set(control, Pauli::from_bits(xc, zc ^ zt));
                p.set(target, Pauli::from_bits(xt ^ xc, zt));
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Hadamard(a) => write!(f, "H {a}"),
            Gate::Phase(a) => write!(f, "S {a}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

impl std::str::FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gate> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let wire = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::invalid("gate", format!("missing wire in {s:?}")))?
                .parse()
                .map_err(|_| Error::invalid("gate", format!("bad wire index in {s:?}")))
        };
        let gate = match parts.first().copied() {
            Some("H") if parts.len() == 2 => Gate::Hadamard(wire(1)?),
            Some("S" | "R") if parts.len() == 2 => Gate::Phase(wire(1)?),
            Some("CNOT") if parts.len() == 3 => Gate::Cnot {
                control: wire(1)?,
                target: wire(2)?,
            },
            _ => return Err(Error::invalid("gate", format!("unrecognized gate {s:?}"))),
        };
        Ok(gate)
    }
}

/// A gate sequence, applied in order (first gate acts first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(num_qubits)?;
        }
        Ok(CliffordCircuit { num_qubits, gates })
    }

    pub fn to_map(&self) -> SymplecticMap {
        let mut map = SymplecticMap::identity(self.num_qubits);
        for g in &self.gates {
            map.then_gate(g);
        }
        map
    }
}

/// Default circuit depth for random seed transformations.
pub fn default_depth(num_qubits: usize) -> usize {
    10 * num_qubits * num_qubits
}

/// Draws `depth` elementary gates, each of a uniformly chosen kind on
/// uniformly chosen wires. On one qubit only H and S are available.
pub fn random_circuit<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R, depth: usize) -> Result<CliffordCircuit> {
    if num_qubits == 0 {
        return Err(Error::invalid("num_qubits", "must be positive"));
    }
    let kinds = if num_qubits == 1 { 2 } else { 3 };
    let gates = (0..depth)
        .map(|_| match rng.gen_range(0..kinds) {
            0 => Gate::Hadamard(rng.gen_range(0..num_qubits)),
            1 => Gate::Phase(rng.gen_range(0..num_qubits)),
            _ => {
                let control = rng.gen_range(0..num_qubits);
                let mut target = rng.gen_range(0..num_qubits - 1);
                if target >= control {
                    target += 1;
                }
                Gate::Cnot { control, target }
            }
        })
        .collect();
    CliffordCircuit::new(num_qubits, gates)
}

pub fn random_clifford<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R, depth: usize) -> Result<SymplecticMap> {
    Ok(random_circuit(num_qubits, rng, depth)?.to_map())
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMap {
    num_qubits: usize,
    columns: Vec<PauliOperator>,
}

impl SymplecticMap {
    pub fn identity(num_qubits: usize) -> Self {
        let mut columns = Vec::with_capacity(2 * num_qubits);
        for pauli in [Pauli::X, Pauli::Z] {
            for a in 0..num_qubits {
                columns.push(PauliOperator::single(num_qubits, a, pauli).expect("in range"));
            }
        }
        SymplecticMap { num_qubits, columns }
    }

    pub fn elementary(gate: Gate, num_qubits: usize) -> Result<Self> {
        gate.check(num_qubits)?;
        let mut map = SymplecticMap::identity(num_qubits);
        map.then_gate(&gate);
        Ok(map)
    }

    /// Builds a map from the images of `X_0..X_{n-1}, Z_0..Z_{n-1}`.
    /// Rejects column sets that do not preserve the symplectic form.
    pub fn from_columns(columns: Vec<PauliOperator>) -> Result<Self> {
        if !columns.len().is_multiple_of(2) {
            return Err(Error::invalid("columns", "expected an even number of basis images"));
        }
        let num_qubits = columns.len() / 2;
        for c in &columns {
            if c.num_qubits() != num_qubits {
                return Err(Error::SizeMismatch {
                    expected: num_qubits,
                    found: c.num_qubits(),
                });
            }
        }
        let map = SymplecticMap { num_qubits, columns };
        if !map.is_symplectic() {
            return Err(Error::invalid("matrix", "does not preserve the symplectic form"));
        }
        Ok(map)
    }

    /// Builds a map from `2n` rows of `2n` bits, acting on `(x | z)` column vectors.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let dim = rows.len();
        if !dim.is_multiple_of(2) {
            return Err(Error::invalid("matrix", "dimension must be even"));
        }
        let n = dim / 2;
        let mut columns = vec![PauliOperator::identity(n); dim];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::SizeMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, &bit) in row.iter().enumerate() {
                if bit {
                    set_coordinate(&mut columns[j], i, n);
                }
            }
        }
        SymplecticMap::from_columns(columns)
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        let dim = 2 * self.num_qubits;
        (0..dim)
            .map(|i| (0..dim).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Matrix entry: coordinate `row` of the image of basis vector `col`.
    pub fn entry(&self, row: usize, col: usize) -> bool {
        let n = self.num_qubits;
        let c = &self.columns[col];
        if row < n {
            c.x_bits().get(row)
        } else {
            c.z_bits().get(row - n)
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn columns(&self) -> &[PauliOperator] {
        &self.columns
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits,
                found: n,
            });
        }
        Ok(())
    }

    pub fn apply(&self, p: &PauliOperator) -> Result<PauliOperator> {
        self.check_len(p.num_qubits())?;
        let n = self.num_qubits;
        let mut out = PauliOperator::identity(n);
        for a in p.x_bits().iter_ones() {
            out.multiply_assign(&self.columns[a])?;
        }
        for a in p.z_bits().iter_ones() {
            out.multiply_assign(&self.columns[n + a])?;
        }
        Ok(out)
    }

    /// `compose(f, g)` applies `g` first, then `f`.
    pub fn compose(f: &SymplecticMap, g: &SymplecticMap) -> Result<SymplecticMap> {
        f.check_len(g.num_qubits)?;
        let columns = g.columns.iter().map(|c| f.apply(c)).collect::<Result<_>>()?;
        Ok(SymplecticMap {
            num_qubits: f.num_qubits,
            columns,
        })
    }

    fn then_gate(&mut self, gate: &Gate) {
        for c in &mut self.columns {
            gate.apply_in_place(c);
        }
    }

    /// GF(2) inverse by Gauss-Jordan elimination.
    pub fn invert(&self) -> Result<SymplecticMap> {
        let n = self.num_qubits;
        let dim = 2 * n;
        // Augmented rows [A | I].
        let mut rows: Vec<BitVec> = (0..dim)
            .map(|i| {
                let mut r = BitVec::zeros(2 * dim);
                for j in 0..dim {
                    r.set(j, self.entry(i, j));
                }
                r.set(dim + i, true);
                r
            })
            .collect();
        for col in 0..dim {
            let pivot = (col..dim)
                .find(|&r| rows[r].get(col))
                .ok_or_else(|| Error::invalid("matrix", "singular over GF(2)"))?;
            rows.swap(col, pivot);
            let pivot_row = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
        }
        let mut columns = vec![PauliOperator::identity(n); dim];
        for (i, row) in rows.iter().enumerate() {
            for (j, column) in columns.iter_mut().enumerate() {
                if row.get(dim + j) {
                    set_coordinate(column, i, n);
                }
            }
        }
        Ok(SymplecticMap { num_qubits: n, columns })
    }

    /// Checks that every pair of basis images keeps its commutation value.
    pub fn is_symplectic(&self) -> bool {
        let n = self.num_qubits;
        let dim = 2 * n;
        for i in 0..dim {
            for j in i..dim {
                let expected = i != j && i % n == j % n;
                match self.columns[i].anticommutes(&self.columns[j]) {
                    Ok(v) if v == expected => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Precomputed images for the canonical-code fast path.
    pub fn code_map(&self) -> Option<CodeMap> {
        if self.num_qubits > MAX_CODE_QUBITS {
            return None;
        }
        let n = self.num_qubits;
        let mut images = Vec::with_capacity(2 * n);
        for a in 0..n {
            images.push(self.columns[a].to_code()?);
            images.push(self.columns[n + a].to_code()?);
        }
        Some(CodeMap { images })
    }
}

fn set_coordinate(p: &mut PauliOperator, coordinate: usize, n: usize) {
    let q = coordinate % n;
    let (x, z) = p.get(q).bits();
    let pauli = if coordinate < n {
        Pauli::from_bits(!x, z)
    } else {
        Pauli::from_bits(x, !z)
    };
    p.set(q, pauli);
}

impl fmt::Debug for SymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        write!(f, "SymplecticMap[{}]", cols.join(","))
    }
}

/// Symplectic map acting on canonical codes; `images[b]` is the image of
/// the basis operator at code bit `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMap {
    images: Vec<u64>,
}

impl CodeMap {
    #[inline]
    pub fn apply(&self, code: u64) -> u64 {
        let mut out = 0;
        let mut c = code;
        while c != 0 {
            let b = c.trailing_zeros() as usize;
            out ^= self.images[b];
            c &= c - 1;
        }
        out
    }

    pub fn num_qubits(&self) -> usize {
        self.images.len() / 2
    }
}
