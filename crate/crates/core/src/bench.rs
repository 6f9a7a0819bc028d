//! Timing and accuracy comparison of the tracer against the exact
//! per-step solver over a fixed set of ten plants.

use crate::poly::Polynomial;
use crate::ratfun::{RatfunError, RationalTF};
use crate::scalar::Real;
use crate::tracer::{exact_locus, locus_error, trace_locus, Locus, TraceConfig};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Label stored in every report so the speedup is read against the right
/// reference.
pub const BASELINE_LABEL: &str = "exact all-roots solve at every grid value with nearest-neighbour matching";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
}

#[derive(Debug, Clone)]
pub struct BenchCase<T: Real> {
    pub name: &'static str,
    /// Human-readable factored form.
    pub formula: &'static str,
    pub plant: RationalTF<T>,
    /// Overrides the grid of the run configuration for this case.
    pub grid: Option<(T, T, T)>,
}

fn product<T: Real>(factors: &[&[f64]]) -> Polynomial<Complex<T>> {
    factors.iter().fold(Polynomial::from_real(&[T::one()]), |acc, f| {
        let f: Vec<T> = f.iter().map(|&x| T::lit(x)).collect();
        acc.mul(&Polynomial::from_real(&f))
    })
}

fn case<T: Real>(
    name: &'static str,
    formula: &'static str,
    num: Polynomial<Complex<T>>,
    den: Polynomial<Complex<T>>,
) -> BenchCase<T> {
    BenchCase {
        name,
        formula,
        plant: RationalTF::new(num, den).expect("corpus plants are well formed"),
        grid: None,
    }
}

/// The ten benchmark plants, in order g1..g10.
pub fn corpus<T: Real>() -> Vec<BenchCase<T>> {
    // factors are ascending coefficient lists
    let g10_den = product::<T>(&[&[0.0, 0.0, 1.0], &[2.0, 1.0], &[2.0, 1.0]])
        .add(&product(&[&[0.0, 3.0], &[1.0, 1.0], &[3.0, 1.0]]));
    vec![
        case("g1", "(s+3)/(s(s+2))", product(&[&[3.0, 1.0]]), product(&[&[0.0, 1.0], &[2.0, 1.0]])),
        case(
            "g2",
            "4s/((s+4)((s+1)^2+4))",
            product(&[&[0.0, 4.0]]),
            product(&[&[4.0, 1.0], &[5.0, 2.0, 1.0]]),
        ),
        case(
            "g3",
            "10(s-1)/(s(s+1)(s^2+8s+25))",
            product(&[&[10.0], &[-1.0, 1.0]]),
            product(&[&[0.0, 1.0], &[1.0, 1.0], &[25.0, 8.0, 1.0]]),
        ),
        case(
            "g4",
            "10(s+0.2)/((s-1)(s-2)(s+10))",
            product(&[&[10.0], &[0.2, 1.0]]),
            product(&[&[-1.0, 1.0], &[-2.0, 1.0], &[10.0, 1.0]]),
        ),
        case(
            "g5",
            "0.8/(s((s+2)^2+1))",
            product(&[&[0.8]]),
            product(&[&[0.0, 1.0], &[5.0, 4.0, 1.0]]),
        ),
        case(
            "g6",
            "12/(s(s+1)(s+2)(s+3))",
            product(&[&[12.0]]),
            product(&[&[0.0, 1.0], &[1.0, 1.0], &[2.0, 1.0], &[3.0, 1.0]]),
        ),
        case(
            "g7",
            "12/(s((s+2)^2+1)(s+4))",
            product(&[&[12.0]]),
            product(&[&[0.0, 1.0], &[5.0, 4.0, 1.0], &[4.0, 1.0]]),
        ),
        case(
            "g8",
            "10(s+2)^2/(s^2(s+4)^2)",
            product(&[&[10.0], &[2.0, 1.0], &[2.0, 1.0]]),
            product(&[&[0.0, 0.0, 1.0], &[4.0, 1.0], &[4.0, 1.0]]),
        ),
        case(
            "g9",
            "30(s^2+4s+25)/(s^2(s+2)(s+6))",
            product(&[&[30.0], &[25.0, 4.0, 1.0]]),
            product(&[&[0.0, 0.0, 1.0], &[2.0, 1.0], &[6.0, 1.0]]),
        ),
        case(
            "g10",
            "10(s+2)^2/(s^2(s+2)^2+3s(s+1)(s+3))",
            product(&[&[10.0], &[2.0, 1.0], &[2.0, 1.0]]),
            g10_den,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean_s: f64,
    /// Median over the means of up to five contiguous blocks of runs.
    pub median_of_means_s: f64,
    pub min_s: f64,
}

impl Timing {
    fn from_runs(runs: &[Duration]) -> Self {
        let secs: Vec<f64> = runs.iter().map(Duration::as_secs_f64).collect();
        let mean = secs.iter().sum::<f64>() / secs.len() as f64;
        let min = secs.iter().copied().fold(f64::INFINITY, f64::min);
        let blocks = secs.len().min(5);
        let size = secs.len().div_ceil(blocks);
        let mut means: Vec<f64> = secs.chunks(size).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        means.sort_by(f64::total_cmp);
        let m = means.len() / 2;
        let median = if means.len() % 2 == 1 {
            means[m]
        } else {
            0.5 * (means[m - 1] + means[m])
        };
        Timing {
            mean_s: mean,
            median_of_means_s: median,
            min_s: min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub repetitions: usize,
    pub tracer: Option<Timing>,
    pub exact: Option<Timing>,
    /// Baseline mean time over tracer mean time.
    pub speedup: Option<f64>,
    pub err_mean: Option<f64>,
    pub err_max: Option<f64>,
    pub events: usize,
    /// Whether every repetition produced bit-identical loci.
    pub deterministic: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub baseline: String,
    pub config: TraceConfig<f64>,
    pub environment: String,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Cases where the tracer was faster on average.
    pub fn tracer_wins(&self) -> usize {
        self.rows.iter().filter(|r| r.speedup.is_some_and(|s| s > 1.0)).count()
    }

    /// Fixed-width text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<5} {:>4} {:>12} {:>12} {:>12} {:>12} {:>8} {:>10} {:>10} {:>6}\n",
            "case", "reps", "tracer_mean", "tracer_min", "exact_mean", "exact_min", "speedup", "err_mean", "err_max", "events"
        );
        for r in &self.rows {
            if let Some(f) = &r.failure {
                out.push_str(&format!("{:<5} failed: {f}\n", r.name));
                continue;
            }
            let t = r.tracer.as_ref().unwrap();
            let e = r.exact.as_ref().unwrap();
            out.push_str(&format!(
                "{:<5} {:>4} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>8.2} {:>10.2e} {:>10.2e} {:>6}\n",
                r.name,
                r.repetitions,
                t.mean_s,
                t.min_s,
                e.mean_s,
                e.min_s,
                r.speedup.unwrap_or(f64::NAN),
                r.err_mean.unwrap_or(f64::NAN),
                r.err_max.unwrap_or(f64::NAN),
                r.events
            ));
        }
        out
    }
}

pub fn environment_stamp() -> String {
    let threads = std::thread::available_parallelism().map_or(0, |n| n.get());
    let unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    format!(
        "os={} arch={} threads={threads} build={profile} clock=monotonic unix_time={unix}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn time_runs<F>(reps: usize, mut f: F) -> Result<(Vec<Duration>, Locus<f64>, bool), String>
where
    F: FnMut() -> Result<Locus<f64>, String>,
{
    // warm-up, discarded
    let first = f()?;
    let mut runs = Vec::with_capacity(reps);
    let mut same = true;
    for _ in 0..reps {
        let start = Instant::now();
        let locus = f()?;
        runs.push(start.elapsed());
        same &= locus == first;
    }
    Ok((runs, first, same))
}

fn bench_case(case: &BenchCase<f64>, reps: usize, base: &TraceConfig<f64>) -> BenchRow {
    let mut cfg = *base;
    if let Some((a, b, dk)) = case.grid {
        cfg.k_start = a;
        cfg.k_end = b;
        cfg.dk = dk;
    }
    let mut row = BenchRow {
        name: case.name.to_string(),
        repetitions: reps,
        tracer: None,
        exact: None,
        speedup: None,
        err_mean: None,
        err_max: None,
        events: 0,
        deterministic: false,
        failure: None,
    };
    let traced = time_runs(reps, || trace_locus(&case.plant, &cfg).map_err(|e| e.to_string()));
    let exact = time_runs(reps, || exact_locus(&case.plant, &cfg).map_err(|e| e.to_string()));
    match (traced, exact) {
        (Ok((tr, tl, td)), Ok((er, el, ed))) => {
            let (t, e) = (Timing::from_runs(&tr), Timing::from_runs(&er));
            row.speedup = Some(e.mean_s / t.mean_s);
            row.tracer = Some(t);
            row.exact = Some(e);
            row.events = tl.events.len();
            row.deterministic = td && ed;
            match locus_error(&tl, &el) {
                Ok((mean, max)) => {
                    row.err_mean = Some(mean);
                    row.err_max = Some(max);
                }
                Err(err) => row.failure = Some(err.to_string()),
            }
        }
        (Err(err), _) | (_, Err(err)) => row.failure = Some(err),
    }
    row
}

/// Times both methods on every case, serially. Failures are recorded in
/// the affected row.
pub fn run_cases(cases: &[BenchCase<f64>], reps: usize, cfg: &TraceConfig<f64>) -> Result<BenchReport, BenchError> {
    if reps == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let rows = cases.iter().map(|c| bench_case(c, reps, cfg)).collect();
    Ok(BenchReport {
        baseline: BASELINE_LABEL.to_string(),
        config: *cfg,
        environment: environment_stamp(),
        rows,
    })
}

pub fn run_bench(reps: usize, cfg: &TraceConfig<f64>) -> Result<BenchReport, BenchError> {
    run_cases(&corpus(), reps, cfg)
}

/// Default grid: K from 0 to 10 in steps of 0.01.
pub fn default_config() -> TraceConfig<f64> {
    TraceConfig::new(0.0, 10.0, 0.01)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_cases_in_order() {
        let c = corpus::<f64>();
        let names: Vec<_> = c.iter().map(|c| c.name).collect();
        assert_eq!(names, ["g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8", "g9", "g10"]);
    }

    #[test]
    fn timing_statistics() {
        let runs: Vec<Duration> = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10].iter().map(|&m| Duration::from_millis(m)).collect();
        let t = Timing::from_runs(&runs);
        assert!((t.mean_s - 0.0055).abs() < 1e-12);
        assert!((t.min_s - 0.001).abs() < 1e-12);
        // block means 1.5, 3.5, 5.5, 7.5, 9.5 ms
        assert!((t.median_of_means_s - 0.0055).abs() < 1e-12);
    }

    #[test]
    fn zero_reps_rejected() {
        assert!(matches!(run_bench(0, &default_config()), Err(BenchError::NoRepetitions)));
    }
}
