//! Algebraic invariant checks on random instances, run by `qconv selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agreement::{all_syndromes, check_instance};
use crate::code::{CodeParams, ConvolutionalCode};
use crate::error::Result;
use crate::noise::IidPauliNoise;
use crate::oracle::DEFAULT_CAP;
use crate::pauli::{Pauli, PauliOperator};
use crate::symplectic::{default_depth, random_clifford};
use crate::trellis::{build_frame, DecoderMode};
use crate::viterbi::Decoder;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PauliOperator {
    let mut p = PauliOperator::identity(n);
    for q in 0..n {
        p.set(q, Pauli::from_code(rng.gen_range(0..4)));
    }
    p
}

/// Stabilizers commute pairwise and with logicals; `S_a` anti-commutes with `T_b` iff `a = b`.
pub fn generator_commutation(params: CodeParams, tau: usize, codes: u64, seed: u64) -> Result<CheckResult> {
    let mut pairs = 0u64;
    let mut violations = 0u64;
    for i in 0..codes {
        let (code, _) = ConvolutionalCode::random(params, tau, seed.wrapping_add(i), None)?;
        let g = code.derive_generators();
        let stabs: Vec<_> = g.stabilizers.iter().chain(&g.boundary_stabilizers).collect();
        let pures: Vec<_> = g.pure_errors.iter().chain(&g.boundary_pure_errors).collect();
        let logicals: Vec<_> = g.logicals_x.iter().chain(&g.logicals_z).collect();
        for (a, sa) in stabs.iter().enumerate() {
            for sb in &stabs {
                pairs += 1;
                violations += sa.anticommutes(sb)? as u64;
            }
            for l in &logicals {
                pairs += 1;
                violations += sa.anticommutes(l)? as u64;
            }
            for (b, tb) in pures.iter().enumerate() {
                pairs += 1;
                violations += (sa.anticommutes(tb)? != (a == b)) as u64;
            }
        }
    }
    Ok(CheckResult {
        name: "generator commutation relations",
        passed: violations == 0,
        detail: format!("{params} tau={tau}: {pairs} pairs, {violations} violations"),
    })
}

/// `decompose(e·S) == decompose(e)` for random errors and stabilizer generators.
pub fn degeneracy_invariance(params: CodeParams, tau: usize, samples: u64, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0u64;
    for i in 0..samples {
        let (code, _) = ConvolutionalCode::random(params, tau, seed ^ i, None)?;
        let g = code.derive_generators();
        let e = random_pauli(&mut rng, code.num_physical());
        let base = code.decompose(&e)?;
        for s in g.stabilizers.iter().chain(&g.boundary_stabilizers) {
            let d = code.decompose(&e.multiply(s)?)?;
            violations += (d.logical != base.logical || d.syndrome != base.syndrome) as u64;
        }
    }
    Ok(CheckResult {
        name: "decompose degeneracy invariance",
        passed: violations == 0,
        detail: format!("{params} tau={tau}: {samples} errors, {violations} violations"),
    })
}

/// Merging edges preserves each frame's total probability to `1e-12`.
pub fn mass_conservation(params: CodeParams, noise: &IidPauliNoise, codes: u64, seed: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for i in 0..codes {
        let (code, _) = ConvolutionalCode::random(params, 1, seed.wrapping_add(i), None)?;
        for s_t in 0..1u64 << code.s() {
            let raw = build_frame(&code, noise, s_t, DecoderMode::NonDegenerate)?.mass();
            let merged = build_frame(&code, noise, s_t, DecoderMode::Degenerate)?.mass();
            worst = worst.max((raw - merged).abs());
        }
    }
    Ok(CheckResult {
        name: "per-frame mass conservation",
        passed: worst <= 1e-12,
        detail: format!("{params}: max |raw - merged| = {worst:e}"),
    })
}

/// `Σ_P exp(-log_prob(P)) == 1` over all Paulis on up to `max_qubits` qubits.
pub fn noise_normalization(noise: &IidPauliNoise, max_qubits: usize) -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=max_qubits {
        let total: f64 = (0..1u64 << (2 * n)).map(|c| (-noise.log_prob_code(c, n)).exp()).sum();
        worst = worst.max((total - 1.0).abs());
    }
    CheckResult {
        name: "noise normalization",
        passed: worst <= 1e-12,
        detail: format!("n <= {max_qubits}: max |Σ P - 1| = {worst:e}"),
    }
}

pub fn symplectic_validity(max_qubits: usize, samples: u64, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0u64;
    for i in 0..samples {
        let n = 1 + (i as usize % max_qubits);
        let f = random_clifford(n, &mut rng, default_depth(n))?;
        bad += (!f.is_symplectic() || f.invert().is_err()) as u64;
    }
    Ok(CheckResult {
        name: "random Clifford maps are symplectic",
        passed: bad == 0,
        detail: format!("{samples} maps, {bad} invalid"),
    })
}

pub fn oracle_agreement(params: CodeParams, tau: usize, noise: &IidPauliNoise, codes: u64, seed: u64) -> Result<CheckResult> {
    let mut instances = 0u64;
    let mut failures = 0u64;
    for i in 0..codes {
        let (code, _) = ConvolutionalCode::random(params, tau, seed.wrapping_add(i), None)?;
        let d = Decoder::new(code.clone(), *noise, DecoderMode::Degenerate);
        let nd = Decoder::new(code.clone(), *noise, DecoderMode::NonDegenerate);
        for syn in all_syndromes(&code) {
            instances += 1;
            failures += !check_instance(&d, &nd, noise, &syn, DEFAULT_CAP)?.passed() as u64;
        }
    }
    Ok(CheckResult {
        name: "decoders match exhaustive oracle",
        passed: failures == 0,
        detail: format!("{params} tau={tau}: {instances} instances, {failures} mismatches"),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let noise = IidPauliNoise::new(0.03, 0.05, 0.07)?;
    let p211 = CodeParams::new(2, 1, 1)?;
    let p411 = CodeParams::new(4, 1, 1)?;
    let p312 = CodeParams::new(3, 1, 2)?;
    Ok(vec![
        symplectic_validity(6, 60, seed)?,
        generator_commutation(p411, 3, 10, seed)?,
        generator_commutation(p312, 3, 10, seed)?,
        degeneracy_invariance(p411, 4, 50, seed)?,
        mass_conservation(p411, &noise, 10, seed)?,
        mass_conservation(p312, &noise, 10, seed)?,
        noise_normalization(&noise, 4),
        oracle_agreement(p211, 2, &IidPauliNoise::depolarizing(0.05)?, 10, seed)?,
    ])
}
