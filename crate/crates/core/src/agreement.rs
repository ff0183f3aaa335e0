//! Decoder-versus-oracle comparison on enumerable instances.

use rand::Rng;

use crate::code::{CodeParams, ConvolutionalCode, Syndrome};
use crate::error::Result;
use crate::montecarlo::{trial_rng, Execution};
use crate::noise::IidPauliNoise;
use crate::oracle::{enumerate_coset, OPTIMUM_TOLERANCE};
use crate::trellis::DecoderMode;
use crate::viterbi::Decoder;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceCheck {
    pub degenerate_weight: f64,
    pub merged_objective: f64,
    pub nondegenerate_weight: f64,
    pub single_error_weight: f64,
    /// Degenerate weight equals the merged optimum bit for bit.
    pub merged_bitwise: bool,
    pub merged_weight_ok: bool,
    /// The degenerate path is one of the oracle's merged optima.
    pub merged_labels_ok: bool,
    pub single_weight_ok: bool,
    /// The non-degenerate estimate is one of the oracle's best single errors.
    pub single_error_ok: bool,
    /// Degenerate labels coincide with the true class-marginal argmax.
    pub class_map_agrees: bool,
    pub coset_size: u64,
}

impl InstanceCheck {
    pub fn passed(&self) -> bool {
        self.merged_weight_ok && self.merged_labels_ok && self.single_weight_ok && self.single_error_ok
    }
}

pub fn check_instance(
    degenerate: &Decoder,
    nondegenerate: &Decoder,
    noise: &IidPauliNoise,
    syndrome: &Syndrome,
    cap: u128,
) -> Result<InstanceCheck> {
    debug_assert_eq!(degenerate.mode(), DecoderMode::Degenerate);
    debug_assert_eq!(nondegenerate.mode(), DecoderMode::NonDegenerate);
    let code = degenerate.code();
    let report = enumerate_coset(code, noise, syndrome, cap)?;
    let d = degenerate.decode(syndrome)?;
    let nd = nondegenerate.decode(syndrome)?;
    let estimate = nd.physical_error.as_ref().expect("non-degenerate outcome carries an error");
    let merged = report.best_merged_path.objective;
    Ok(InstanceCheck {
        degenerate_weight: d.path_weight,
        merged_objective: merged,
        nondegenerate_weight: nd.path_weight,
        single_error_weight: report.best_single_weight,
        merged_bitwise: d.path_weight.to_bits() == merged.to_bits(),
        merged_weight_ok: (d.path_weight - merged).abs() <= OPTIMUM_TOLERANCE,
        merged_labels_ok: report.is_merged_optimum(&d.memory_path, &d.logical),
        single_weight_ok: (nd.path_weight - report.best_single_weight).abs() <= OPTIMUM_TOLERANCE,
        single_error_ok: report.is_single_optimum(estimate),
        class_map_agrees: d.logical == report.best_class_labels,
        coset_size: report.coset_size,
    })
}

/// Every `(frame syndromes, boundary)` pair of a code.
pub fn all_syndromes(code: &ConvolutionalCode) -> Vec<Syndrome> {
    let (s, m, tau) = (code.s(), code.m(), code.tau());
    let bits = s * tau + m;
    (0..1u64 << bits)
        .map(|v| {
            let frames = (0..tau).map(|t| (v >> (t * s)) & ((1 << s) - 1)).collect();
            Syndrome::from_masks(code.params(), frames, v >> (s * tau)).expect("masks sized")
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgreementStats {
    pub instances: u64,
    pub merged_weight_matches: u64,
    pub merged_bitwise_matches: u64,
    pub merged_label_matches: u64,
    pub single_weight_matches: u64,
    pub single_error_matches: u64,
    pub class_map_agreements: u64,
    pub max_merged_gap: f64,
    pub max_single_gap: f64,
}

impl AgreementStats {
    pub fn record(&mut self, c: &InstanceCheck) {
        self.instances += 1;
        self.merged_weight_matches += c.merged_weight_ok as u64;
        self.merged_bitwise_matches += c.merged_bitwise as u64;
        self.merged_label_matches += c.merged_labels_ok as u64;
        self.single_weight_matches += c.single_weight_ok as u64;
        self.single_error_matches += c.single_error_ok as u64;
        self.class_map_agreements += c.class_map_agrees as u64;
        self.max_merged_gap = self.max_merged_gap.max((c.degenerate_weight - c.merged_objective).abs());
        self.max_single_gap = self
            .max_single_gap
            .max((c.nondegenerate_weight - c.single_error_weight).abs());
    }

    pub fn merge(&mut self, other: &AgreementStats) {
        self.instances += other.instances;
        self.merged_weight_matches += other.merged_weight_matches;
        self.merged_bitwise_matches += other.merged_bitwise_matches;
        self.merged_label_matches += other.merged_label_matches;
        self.single_weight_matches += other.single_weight_matches;
        self.single_error_matches += other.single_error_matches;
        self.class_map_agreements += other.class_map_agreements;
        self.max_merged_gap = self.max_merged_gap.max(other.max_merged_gap);
        self.max_single_gap = self.max_single_gap.max(other.max_single_gap);
    }

    pub fn all_merged_match(&self) -> bool {
        self.merged_weight_matches == self.instances && self.merged_label_matches == self.instances
    }

    pub fn all_single_match(&self) -> bool {
        self.single_weight_matches == self.instances && self.single_error_matches == self.instances
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheckConfig {
    pub params: CodeParams,
    pub tau: usize,
    pub trials: u64,
    pub seed: u64,
    pub p: f64,
    pub cap: u128,
}

/// One trial: a random code drawn from `(seed, trial)` and a uniformly random syndrome.
fn run_oracle_trial(cfg: &OracleCheckConfig, noise: &IidPauliNoise, trial: u64) -> Result<InstanceCheck> {
    let mut rng = trial_rng(cfg.seed, trial);
    let code_seed: u64 = rng.gen();
    let (code, _) = ConvolutionalCode::random(cfg.params, cfg.tau, code_seed, None)?;
    let frames = (0..cfg.tau).map(|_| rng.gen_range(0..1u64 << cfg.params.s())).collect();
    let syndrome = Syndrome::from_masks(cfg.params, frames, rng.gen_range(0..1u64 << cfg.params.m))?;
    let d = Decoder::new(code.clone(), *noise, DecoderMode::Degenerate);
    let nd = Decoder::new(code, *noise, DecoderMode::NonDegenerate);
    check_instance(&d, &nd, noise, &syndrome, cfg.cap)
}

pub fn oracle_check(cfg: &OracleCheckConfig, exec: Execution) -> Result<AgreementStats> {
    let noise = IidPauliNoise::depolarizing(cfg.p)?;
    let checks: Vec<InstanceCheck> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.trials)
                .into_par_iter()
                .map(|i| run_oracle_trial(cfg, &noise, i))
                .collect::<Result<_>>()?
        }
        _ => (0..cfg.trials)
            .map(|i| run_oracle_trial(cfg, &noise, i))
            .collect::<Result<_>>()?,
    };
    let mut stats = AgreementStats::default();
    for c in &checks {
        stats.record(c);
    }
    Ok(stats)
}
