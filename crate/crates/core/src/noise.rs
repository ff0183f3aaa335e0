//! Independent, identically distributed Pauli noise.
//!
//! Probabilities are handled as weights `w = -ln P`, with `+inf` standing
//! for an impossible event. Per-qubit weights are indexed by the canonical
//! single-qubit code (`I = 0, X = 1, Z = 2, Y = 3`).

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{deinterleave, Pauli, PauliOperator};

/// Slack allowed when checking that probabilities sum to at most one.
const SUM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidPauliNoise {
    p_x: f64,
    p_y: f64,
    p_z: f64,
    p_i: f64,
    weights: [f64; 4],
}

/// `-ln p`, saturating to `+inf` at zero.
#[inline]
pub fn weight_of(p: f64) -> f64 {
    if p <= 0.0 {
        f64::INFINITY
    } else {
        -p.ln()
    }
}

impl IidPauliNoise {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        for (name, p) in [("px", p_x), ("py", p_y), ("pz", p_z)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(name, format!("{p} is not a probability")));
            }
        }
        let total = p_x + p_y + p_z;
        if total > 1.0 + SUM_SLACK {
            return Err(Error::invalid("p", format!("px + py + pz = {total} exceeds 1")));
        }
        let p_i = (1.0 - total).max(0.0);
        let mut weights = [0.0; 4];
        for pauli in Pauli::ALL {
            let p = match pauli {
                Pauli::I => p_i,
                Pauli::X => p_x,
                Pauli::Y => p_y,
                Pauli::Z => p_z,
            };
            weights[pauli.code() as usize] = weight_of(p);
        }
        Ok(IidPauliNoise {
            p_x,
            p_y,
            p_z,
            p_i,
            weights,
        })
    }

    /// Depolarizing channel of rate `p`: each of X, Y, Z occurs with probability `p`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0 / 3.0 + SUM_SLACK).contains(&p) {
            return Err(Error::invalid("p", format!("depolarizing rate {p} outside [0, 1/3]")));
        }
        IidPauliNoise::new(p, p, p)
    }

    pub fn p_i(&self) -> f64 {
        self.p_i
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn p_y(&self) -> f64 {
        self.p_y
    }

    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    pub fn probability(&self, pauli: Pauli) -> f64 {
        match pauli {
            Pauli::I => self.p_i,
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    #[inline]
    pub fn single_weight(&self, pauli: Pauli) -> f64 {
        self.weights[pauli.code() as usize]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }

    /// `-ln P(p)`, summed qubit by qubit in index order.
    pub fn log_prob(&self, p: &PauliOperator) -> f64 {
        (0..p.num_qubits()).fold(0.0, |acc, q| acc + self.single_weight(p.get(q)))
    }

    /// `-ln P` of a canonical code on `num_qubits` qubits, same summation order as [`Self::log_prob`].
    #[inline]
    pub fn log_prob_code(&self, code: u64, num_qubits: usize) -> f64 {
        let mut acc = 0.0;
        let mut c = code;
        for _ in 0..num_qubits {
            acc += self.weights[(c & 3) as usize];
            c >>= 2;
        }
        acc
    }

    pub fn sample_pauli<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.gen();
        if u < self.p_i {
            Pauli::I
        } else if u < self.p_i + self.p_x {
            Pauli::X
        } else if u < self.p_i + self.p_x + self.p_y {
            Pauli::Y
        } else {
            Pauli::Z
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, num_qubits: usize, rng: &mut R) -> PauliOperator {
        let mut p = PauliOperator::identity(num_qubits);
        for q in 0..num_qubits {
            let pauli = self.sample_pauli(rng);
            if pauli != Pauli::I {
                p.set(q, pauli);
            }
        }
        p
    }
}

/// Number of non-identity positions of a canonical code.
#[inline]
pub fn code_weight(code: u64) -> u32 {
    let (x, z) = deinterleave(code);
    (x | z).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::strategies::pauli;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depolarizing_parameters() {
        let noiseless = IidPauliNoise::depolarizing(0.0).unwrap();
        assert_eq!(noiseless.p_i(), 1.0);
        let n = IidPauliNoise::depolarizing(0.1).unwrap();
        assert!((n.p_i() - 0.7).abs() < 1e-15);
        assert!(IidPauliNoise::depolarizing(0.34).is_err());
        assert!(IidPauliNoise::depolarizing(1.0 / 3.0).is_ok());
        assert!(IidPauliNoise::new(0.5, 0.5, 0.1).is_err());
        assert!(IidPauliNoise::new(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn log_prob_values() {
        let n = IidPauliNoise::depolarizing(0.1).unwrap();
        let id = PauliOperator::identity(5);
        assert!((n.log_prob(&id) - (-5.0 * 0.7f64.ln())).abs() < 1e-12);
        let xi: PauliOperator = "XI".parse().unwrap();
        // -ln(0.1 * 0.7) evaluated directly.
        assert!((n.log_prob(&xi) - 2.659_260_036_932_778).abs() < 1e-12);
        let zero = IidPauliNoise::depolarizing(0.0).unwrap();
        assert_eq!(zero.log_prob(&"X".parse().unwrap()), f64::INFINITY);
        assert_eq!(zero.log_prob(&"I".parse().unwrap()), 0.0);
    }

    #[test]
    fn normalization_over_all_paulis() {
        let n = IidPauliNoise::new(0.05, 0.12, 0.03).unwrap();
        for qubits in 1..=4 {
            let total: f64 = (0..1u64 << (2 * qubits))
                .map(|c| (-n.log_prob_code(c, qubits)).exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "{qubits}: {total}");
        }
    }

    #[test]
    fn sampling() {
        let zero = IidPauliNoise::depolarizing(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(zero.sample(5, &mut rng).is_identity());

        let n = IidPauliNoise::depolarizing(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 100_000;
        let xs = (0..draws).filter(|_| n.sample_pauli(&mut rng) == Pauli::X).count();
        let freq = xs as f64 / draws as f64;
        assert!((freq - 0.1).abs() < 0.003, "{freq}");

        let a = n.sample(200, &mut ChaCha8Rng::seed_from_u64(9));
        let b = n.sample(200, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn log_prob_is_additive(a in pauli(4), b in pauli(6)) {
            let n = IidPauliNoise::new(0.02, 0.07, 0.11).unwrap();
            let lhs = n.log_prob(&a.tensor(&b));
            let rhs = n.log_prob(&a) + n.log_prob(&b);
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert_eq!(n.log_prob_code(a.to_code().unwrap(), 4), n.log_prob(&a));
        }
    }
}
