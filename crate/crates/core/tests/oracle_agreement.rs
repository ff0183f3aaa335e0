use qconv::agreement::{all_syndromes, check_instance, oracle_check, OracleCheckConfig};
use qconv::montecarlo::Execution;
use qconv::oracle::{enumerate_coset, DEFAULT_CAP};
use qconv::{CodeParams, ConvolutionalCode, Decoder, DecoderMode, IidPauliNoise, PauliOperator};

fn exhaustive(params: CodeParams, tau: usize, seeds: std::ops::Range<u64>, noise: IidPauliNoise) {
    for seed in seeds {
        let code = ConvolutionalCode::random(params, tau, seed, None).unwrap().0;
        let d = Decoder::new(code.clone(), noise, DecoderMode::Degenerate);
        let nd = Decoder::new(code.clone(), noise, DecoderMode::NonDegenerate);
        for syn in all_syndromes(&code) {
            let c = check_instance(&d, &nd, &noise, &syn, DEFAULT_CAP).unwrap();
            assert!(c.passed(), "{params} tau={tau} seed={seed} syndrome {:?}: {c:?}", syn.to_text());
        }
    }
}

#[test]
fn two_one_one_all_syndromes() {
    let params = CodeParams::new(2, 1, 1).unwrap();
    for tau in 1..=3 {
        exhaustive(params, tau, 0..10, IidPauliNoise::depolarizing(0.07).unwrap());
    }
}

#[test]
fn asymmetric_noise_agreement() {
    exhaustive(CodeParams::new(2, 1, 1).unwrap(), 2, 20..30, IidPauliNoise::new(0.01, 0.002, 0.08).unwrap());
    exhaustive(CodeParams::new(2, 1, 2).unwrap(), 1, 0..5, IidPauliNoise::new(0.05, 0.03, 0.02).unwrap());
}

#[test]
fn three_one_one_sampled() {
    let cfg = OracleCheckConfig {
        params: CodeParams::new(3, 1, 1).unwrap(),
        tau: 3,
        trials: 40,
        seed: 99,
        p: 0.04,
        cap: DEFAULT_CAP,
    };
    let seq = oracle_check(&cfg, Execution::Sequential).unwrap();
    assert!(seq.all_merged_match() && seq.all_single_match(), "{seq:?}");
    assert_eq!(oracle_check(&cfg, Execution::Parallel).unwrap(), seq);
}

#[test]
fn class_posterior_sums_to_one() {
    let code = ConvolutionalCode::random(CodeParams::new(3, 1, 1).unwrap(), 2, 5, None).unwrap().0;
    let noise = IidPauliNoise::depolarizing(0.05).unwrap();
    for syn in all_syndromes(&code).iter().step_by(5) {
        let r = enumerate_coset(&code, &noise, syn, DEFAULT_CAP).unwrap();
        let total: f64 = r.class_table.keys().map(|l| r.class_posterior(l)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(r.class_posterior(&PauliOperator::identity(5)) <= 1.0);
    }
}
