//! Many generated scenarios run side by side, results kept in input order.

use conic_forge::formation::Target;
use conic_forge::sim::{run, RoundTrace, Scenario, SimConfig, Verdict};

use crate::gen::{generate, GenError, GenOptions, Mode};

pub const CSV_HEADER: &str = "index,f,n,mode,seed,rounds,verdict,final_class,max_residual";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Job {
    pub f: usize,
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    pub options: GenOptions,
}

#[derive(Clone, Debug)]
pub struct JobResult {
    pub job: Job,
    pub scenario: Result<Scenario, GenError>,
    pub trace: Option<RoundTrace>,
}

impl JobResult {
    pub fn passed(&self) -> bool {
        self.trace.as_ref().is_some_and(|t| t.verdict.is_success())
    }

    /// Class of the last recorded target pattern, or `point` for gathering.
    pub fn final_class(&self) -> String {
        let Some(trace) = &self.trace else {
            return "-".into();
        };
        match trace.plans.iter().rev().find_map(|p| p.target.as_ref()) {
            Some(Target::Gather(_)) => "point".into(),
            Some(t) => t
                .conic()
                .map_or("-".into(), |c| c.class().name().to_string()),
            None => "initial".into(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        let (Some(trace), Ok(s)) = (&self.trace, &self.scenario) else {
            return f64::NAN;
        };
        let conic = trace
            .plans
            .iter()
            .rev()
            .find_map(|p| p.target.as_ref().and_then(Target::conic).copied());
        match conic {
            Some(c) => trace
                .final_positions()
                .iter()
                .map(|p| c.residual(*p))
                .fold(0.0, f64::max),
            None if s.f == 1 => 0.0,
            None => f64::NAN,
        }
    }

    pub fn csv_row(&self, index: usize) -> String {
        let j = &self.job;
        let (rounds, verdict) = match (&self.trace, &self.scenario) {
            (Some(t), _) => (
                t.rounds_used().to_string(),
                match &t.verdict {
                    Verdict::Success { .. } => "success".to_string(),
                    Verdict::Failure { reason } => {
                        format!("failure: {}", reason.replace([',', '\n'], ";"))
                    }
                },
            ),
            (None, Err(e)) => (
                "-".into(),
                format!("generation failed: {}", e.to_string().replace(',', ";")),
            ),
            (None, Ok(_)) => ("-".into(), "not run".into()),
        };
        format!(
            "{index},{},{},{},{},{rounds},{verdict},{},{:.3e}",
            j.f,
            j.n,
            j.mode,
            j.seed,
            self.final_class(),
            self.max_residual()
        )
    }
}

pub fn run_job(job: Job, config: &SimConfig) -> JobResult {
    let scenario = generate(job.f, job.n, job.seed, job.mode, job.options);
    let trace = scenario.as_ref().ok().map(|s| run(s, config));
    JobResult {
        job,
        scenario,
        trace,
    }
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn run_batch(jobs: &[Job], config: &SimConfig) -> Vec<JobResult> {
    par_map(jobs, |j| run_job(*j, config))
}

/// `count` jobs for one `(f, mode)`, cycling `n` through `ns` and deriving
/// seeds from `base_seed`.
pub fn jobs_for(
    f: usize,
    mode: Mode,
    ns: &[usize],
    count: usize,
    base_seed: u64,
    options: GenOptions,
) -> Vec<Job> {
    let ns: Vec<usize> = ns
        .iter()
        .copied()
        .filter(|&n| mode.supports_n(f, n))
        .collect();
    if ns.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|i| Job {
            f,
            n: ns[i % ns.len()],
            mode,
            seed: base_seed
                .wrapping_mul(1_000_003)
                .wrapping_add((f as u64) << 40)
                .wrapping_add(i as u64),
            options,
        })
        .collect()
}
