//! Monte Carlo block-error-rate estimation for both decoders.
//!
//! Each trial samples an error on the whole block, un-encodes it to obtain
//! the syndrome and the true logical class, and runs both decoders on the
//! same syndrome. A decoder fails when its label sequence differs from the
//! true one. Trial `i` draws from its own ChaCha stream `(seed, i)`, and
//! trials are evaluated in fixed-size batches and folded in index order, so
//! results do not depend on how many threads run them.
//!
//! The ratio is `ber_nondeg / ber_deg`; in dB it is `10·log10(ratio)`, so a
//! ratio of about 2.75 corresponds to 4.4 dB.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::code::ConvolutionalCode;
use crate::error::{Error, Result};
use crate::noise::IidPauliNoise;
use crate::trellis::DecoderMode;
use crate::viterbi::Decoder;

/// Trials evaluated per scheduling round.
const BATCH: u64 = 64;

pub const CSV_HEADER: &str =
    "code_id,n,k,m,tau,p,seed,trials,failures_deg,failures_nondeg,ber_deg,ber_nondeg,ratio,ratio_db,resolved";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the ambient rayon pool; identical to `Sequential` without the `parallel` feature.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointConfig {
    pub min_failures: u64,
    pub max_trials: u64,
    pub seed: u64,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig {
            min_failures: 30,
            max_trials: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub degenerate_failed: bool,
    pub nondegenerate_failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPoint {
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub tau: usize,
    pub p: f64,
    pub seed: u64,
    pub trials: u64,
    pub failures_deg: u64,
    pub failures_nondeg: u64,
    /// Trials where only the non-degenerate decoder failed.
    pub nondeg_only: u64,
    /// Trials where only the degenerate decoder failed.
    pub deg_only: u64,
    pub resolved: bool,
}

impl BenchPoint {
    pub fn ber_deg(&self) -> f64 {
        rate(self.failures_deg, self.trials)
    }

    pub fn ber_nondeg(&self) -> f64 {
        rate(self.failures_nondeg, self.trials)
    }

    pub fn stderr_deg(&self) -> f64 {
        binomial_stderr(self.failures_deg, self.trials)
    }

    pub fn stderr_nondeg(&self) -> f64 {
        binomial_stderr(self.failures_nondeg, self.trials)
    }

    /// `ber_nondeg / ber_deg`, defined once the degenerate decoder has failed.
    pub fn ratio(&self) -> Option<f64> {
        (self.failures_deg > 0).then(|| self.failures_nondeg as f64 / self.failures_deg as f64)
    }

    pub fn ratio_db(&self) -> Option<f64> {
        self.ratio().map(|r| 10.0 * r.log10())
    }

    /// Delta-method standard error of the ratio, treating the two rates as independent.
    pub fn stderr_ratio(&self) -> Option<f64> {
        let r = self.ratio()?;
        let rel = |f: u64, se: f64| if f == 0 { 0.0 } else { se / rate(f, self.trials) };
        let a = rel(self.failures_nondeg, self.stderr_nondeg());
        let b = rel(self.failures_deg, self.stderr_deg());
        Some(r * (a * a + b * b).sqrt())
    }

    /// Mean and standard error of the paired difference `fail_nondeg - fail_deg` per trial.
    pub fn paired_difference(&self) -> (f64, f64) {
        if self.trials == 0 {
            return (0.0, 0.0);
        }
        let t = self.trials as f64;
        let mean = (self.nondeg_only as f64 - self.deg_only as f64) / t;
        let second = (self.nondeg_only + self.deg_only) as f64 / t;
        let var = (second - mean * mean).max(0.0);
        (mean, (var / t).sqrt())
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.code_id,
            self.n,
            self.k,
            self.m,
            self.tau,
            self.p,
            self.seed,
            self.trials,
            self.failures_deg,
            self.failures_nondeg,
            self.ber_deg(),
            self.ber_nondeg(),
            opt(self.ratio()),
            opt(self.ratio_db()),
            self.resolved
        )
    }
}

fn rate(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        0.0
    } else {
        failures as f64 / trials as f64
    }
}

fn binomial_stderr(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let b = rate(failures, trials);
    (b * (1.0 - b) / trials as f64).sqrt()
}

/// Independent random stream for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Both decoders for one `(code, noise)` pair.
#[derive(Debug)]
pub struct DecoderPair {
    noise: IidPauliNoise,
    degenerate: Decoder,
    nondegenerate: Decoder,
}

impl DecoderPair {
    pub fn new(code: &ConvolutionalCode, noise: IidPauliNoise) -> Self {
        DecoderPair {
            noise,
            degenerate: Decoder::new(code.clone(), noise, DecoderMode::Degenerate),
            nondegenerate: Decoder::new(code.clone(), noise, DecoderMode::NonDegenerate),
        }
    }

    pub fn code(&self) -> &ConvolutionalCode {
        self.degenerate.code()
    }

    pub fn run_trial(&self, seed: u64, index: u64) -> Result<TrialOutcome> {
        let code = self.code();
        let mut rng = trial_rng(seed, index);
        let error = self.noise.sample(code.num_physical(), &mut rng);
        let truth = code.decompose(&error)?;
        let d = self.degenerate.decode(&truth.syndrome)?;
        let nd = self.nondegenerate.decode(&truth.syndrome)?;
        Ok(TrialOutcome {
            degenerate_failed: d.logical != truth.logical,
            nondegenerate_failed: nd.logical != truth.logical,
        })
    }

    fn run_batch(&self, seed: u64, range: std::ops::Range<u64>, exec: Execution) -> Result<Vec<TrialOutcome>> {
        match exec {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                range.into_par_iter().map(|i| self.run_trial(seed, i)).collect()
            }
            _ => range.map(|i| self.run_trial(seed, i)).collect(),
        }
    }
}

/// Runs trials until both decoders have `min_failures` failures or
/// `max_trials` is reached. Accepts any valid noise model, including a
/// noiseless one.
pub fn run_point_with_noise(
    code: &ConvolutionalCode,
    code_id: &str,
    noise: IidPauliNoise,
    p: f64,
    config: PointConfig,
    exec: Execution,
) -> Result<BenchPoint> {
    if config.max_trials < 1 {
        return Err(Error::invalid("max-trials", "must be at least 1"));
    }
    let pair = DecoderPair::new(code, noise);
    let mut point = BenchPoint {
        code_id: code_id.to_string(),
        n: code.n(),
        k: code.k(),
        m: code.m(),
        tau: code.tau(),
        p,
        seed: config.seed,
        trials: 0,
        failures_deg: 0,
        failures_nondeg: 0,
        nondeg_only: 0,
        deg_only: 0,
        resolved: false,
    };
    let done = |pt: &BenchPoint| pt.failures_deg >= config.min_failures && pt.failures_nondeg >= config.min_failures;
    'outer: while point.trials < config.max_trials {
        let end = (point.trials + BATCH).min(config.max_trials);
        for o in pair.run_batch(config.seed, point.trials..end, exec)? {
            point.trials += 1;
            point.failures_deg += o.degenerate_failed as u64;
            point.failures_nondeg += o.nondegenerate_failed as u64;
            point.nondeg_only += (o.nondegenerate_failed && !o.degenerate_failed) as u64;
            point.deg_only += (o.degenerate_failed && !o.nondegenerate_failed) as u64;
            if done(&point) {
                break 'outer;
            }
        }
    }
    point.resolved = done(&point);
    Ok(point)
}

/// Depolarizing point at rate `p ∈ (0, 1/3]`.
pub fn run_point(
    code: &ConvolutionalCode,
    code_id: &str,
    p: f64,
    config: PointConfig,
    exec: Execution,
) -> Result<BenchPoint> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::invalid("p", format!("depolarizing rate {p} must be positive")));
    }
    run_point_with_noise(code, code_id, IidPauliNoise::depolarizing(p)?, p, config, exec)
}

/// Cartesian sweep over codes and rates, in input order.
pub fn run_sweep(
    codes: &[(String, ConvolutionalCode)],
    p_grid: &[f64],
    config: PointConfig,
    exec: Execution,
) -> Result<Vec<BenchPoint>> {
    if codes.is_empty() {
        return Err(Error::invalid("code", "at least one code is required"));
    }
    if p_grid.is_empty() {
        return Err(Error::invalid("p-list", "at least one rate is required"));
    }
    let mut out = Vec::with_capacity(codes.len() * p_grid.len());
    for (id, code) in codes {
        for &p in p_grid {
            out.push(run_point(code, id, p, config, exec)?);
        }
    }
    Ok(out)
}

/// Runs `f` on a dedicated pool of `workers` threads (sequentially when `workers <= 1`).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce(Execution) -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| f(Execution::Parallel));
        }
    }
    let _ = workers;
    f(Execution::Sequential)
}

pub fn to_csv(points: &[BenchPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, points: &[BenchPoint]) -> Result<()> {
    std::fs::write(path, to_csv(points)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log plot of block error rate against `p`, solid for the degenerate
/// decoder and dashed for the non-degenerate one, with the ratio in an inset.
pub fn to_svg(points: &[BenchPoint]) -> String {
    let (w, h) = (640.0, 480.0);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 50.0);
    let positive = |v: f64| v > 0.0 && v.is_finite();
    let ps: Vec<f64> = points.iter().map(|p| p.p).filter(|&v| positive(v)).collect();
    let bers: Vec<f64> = points
        .iter()
        .flat_map(|p| [p.ber_deg(), p.ber_nondeg()])
        .filter(|&v| positive(v))
        .collect();
    let bounds = |v: &[f64]| -> (f64, f64) {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.1, 1.0)
        } else {
            let (l, h) = (lo.log10().floor(), hi.log10().ceil());
            (10f64.powf(l), 10f64.powf(if h > l { h } else { l + 1.0 }))
        }
    };
    let (px0, px1) = bounds(&ps);
    let (by0, by1) = bounds(&bers);
    let sx = |p: f64| left + (p.log10() - px0.log10()) / (px1.log10() - px0.log10()) * (w - left - right);
    let sy = |b: f64| h - bottom - (b.log10() - by0.log10()) / (by1.log10() - by0.log10()) * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">depolarizing rate p</text>"#, w / 2.0, h - 10.0);
    let _ = writeln!(svg, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">block error rate</text>"#, h / 2.0, h / 2.0);
    let _ = writeln!(svg, r#"<text x="{left}" y="{}">{px0}</text><text x="{}" y="{}" text-anchor="end">{px1}</text>"#, h - bottom + 15.0, w - right, h - bottom + 15.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{by0}</text><text x="{}" y="{}" text-anchor="end">{by1}</text>"#, left - 4.0, h - bottom, left - 4.0, top + 10.0);

    let mut ids: Vec<&str> = Vec::new();
    for p in points {
        if !ids.contains(&p.code_id.as_str()) {
            ids.push(&p.code_id);
        }
    }
    let series = |id: &str| -> Vec<&BenchPoint> {
        let mut v: Vec<&BenchPoint> = points.iter().filter(|p| p.code_id == id && positive(p.p)).collect();
        v.sort_by(|a, b| a.p.total_cmp(&b.p));
        v
    };
    for (ci, id) in ids.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let pts = series(id);
        for (dash, get) in [("", BenchPoint::ber_deg as fn(&BenchPoint) -> f64), ("6,4", BenchPoint::ber_nondeg)] {
            let coords: Vec<String> = pts
                .iter()
                .filter(|p| positive(get(p)))
                .map(|p| format!("{:.2},{:.2}", sx(p.p), sy(get(p))))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-dasharray="{dash}"/>"#,
                coords.join(" ")
            );
            for c in &coords {
                let (x, y) = c.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="{color}">{id}</text>"#, left + 10.0, top + 15.0 + 14.0 * ci as f64);
    }

    // Inset: ratio against p on log-x, linear-y axes.
    let (ix, iy, iw, ih) = (w - right - 210.0, h - bottom - 150.0, 200.0, 140.0);
    let ratios: Vec<f64> = points.iter().filter_map(|p| p.ratio()).filter(|r| r.is_finite()).collect();
    let rmax = ratios.iter().copied().fold(1.0, f64::max).ceil().max(2.0);
    let isx = |p: f64| ix + (p.log10() - px0.log10()) / (px1.log10() - px0.log10()) * iw;
    let isy = |r: f64| iy + ih - (r / rmax) * ih;
    let _ = writeln!(svg, r#"<rect x="{ix}" y="{iy}" width="{iw}" height="{ih}" fill="white" stroke="gray"/>"#);
    let _ = writeln!(svg, r#"<line x1="{ix}" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-dasharray="2,2"/>"#, ix + iw, y = isy(1.0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10">ratio nondeg/deg (max {rmax})</text>"#, ix + 4.0, iy + 12.0);
    for (ci, id) in ids.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let coords: Vec<String> = series(id)
            .iter()
            .filter_map(|p| p.ratio().filter(|r| r.is_finite()).map(|r| format!("{:.2},{:.2}", isx(p.p), isy(r))))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, coords.join(" "));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, points: &[BenchPoint]) -> Result<()> {
    std::fs::write(path, to_svg(points)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeParams;

    fn code(n: usize, k: usize, m: usize, tau: usize, seed: u64) -> ConvolutionalCode {
        ConvolutionalCode::random(CodeParams::new(n, k, m).unwrap(), tau, seed, None)
            .unwrap()
            .0
    }

    #[test]
    fn noiseless_channel_never_fails() {
        let c = code(4, 1, 1, 50, 1);
        let cfg = PointConfig {
            min_failures: 1,
            max_trials: 100,
            seed: 3,
        };
        let pt = run_point_with_noise(&c, "c", IidPauliNoise::depolarizing(0.0).unwrap(), 0.0, cfg, Execution::Sequential).unwrap();
        assert_eq!(pt.trials, 100);
        assert_eq!((pt.failures_deg, pt.failures_nondeg), (0, 0));
        assert!(!pt.resolved);
        assert_eq!(pt.ratio(), None);
        assert!(pt.csv_row().ends_with(",0,0,,,false"));
        assert!(run_point(&c, "c", 0.0, cfg, Execution::Sequential).is_err());
    }

    #[test]
    fn stopping_rule_and_counts() {
        let c = code(3, 1, 1, 40, 2);
        let cfg = PointConfig {
            min_failures: 5,
            max_trials: 10_000,
            seed: 11,
        };
        let pt = run_point(&c, "c", 0.05, cfg, Execution::Sequential).unwrap();
        assert!(pt.resolved);
        assert!(pt.failures_deg >= 5 && pt.failures_nondeg >= 5);
        assert!(pt.failures_deg == 5 || pt.failures_nondeg == 5);
        assert_eq!(pt.failures_nondeg - pt.nondeg_only, pt.failures_deg - pt.deg_only);
        let (mean, se) = pt.paired_difference();
        assert!(se >= 0.0 && mean.abs() <= 1.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = code(4, 1, 1, 30, 5);
        let cfg = PointConfig {
            min_failures: 10,
            max_trials: 2_000,
            seed: 8,
        };
        let a = run_point(&c, "c", 0.06, cfg, Execution::Sequential).unwrap();
        let b = with_workers(3, |exec| run_point(&c, "c", 0.06, cfg, exec)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_rows_and_plot() {
        let codes = vec![("a".to_string(), code(4, 1, 1, 20, 1)), ("b".to_string(), code(3, 1, 1, 20, 2))];
        let cfg = PointConfig {
            min_failures: 3,
            max_trials: 300,
            seed: 1,
        };
        let pts = run_sweep(&codes, &[0.05, 0.1], cfg, Execution::Sequential).unwrap();
        let csv = to_csv(&pts);
        assert_eq!(csv.lines().count(), 1 + 4);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 15));
        let svg = to_svg(&pts);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(run_sweep(&codes, &[], cfg, Execution::Sequential).is_err());
    }

    #[test]
    fn trial_streams_are_distinct() {
        use rand::RngCore;
        let a = trial_rng(1, 0).next_u64();
        let b = trial_rng(1, 1).next_u64();
        let c = trial_rng(2, 0).next_u64();
        assert!(a != b && a != c);
        assert_eq!(a, trial_rng(1, 0).next_u64());
    }
}
