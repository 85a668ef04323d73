//! Experiment pipelines. Each takes a validated [`Config`] and returns a
//! [`Report`]; none of them touch the filesystem.

mod deep;
mod density;
mod dimension;
mod persistence;
mod quadlike;
mod sector;
mod tools;

use dynlab_core::cfrac::{brjuno_sum, schedule_growth, DigitStream, RotationNumber};
use dynlab_core::measure::Bbox;
use num_bigint::BigUint;

use crate::config::{BboxSpec, Config, Params, ScheduleRule};
use crate::error::LabError;
use crate::report::Report;

pub fn run(config: &Config) -> Result<Report, LabError> {
    config.validate()?;
    let hash = config.hash();
    match &config.params {
        Params::Cf(p) => tools::run_cf(config, p, hash),
        Params::Siegel(p) => tools::run_siegel(config, p, hash),
        Params::Area(p) => tools::run_area(config, p, hash),
        Params::Density(p) => density::run(config, p, hash),
        Params::Persistence(p) => persistence::run(config, p, hash),
        Params::DeepPoint(p) => deep::run(config, p, hash),
        Params::QuadraticLike(p) => quadlike::run(config, p, hash),
        Params::Sector(p) => sector::run(config, p, hash),
        Params::Dimension(p) => dimension::run(config, p, hash),
    }
}

pub(crate) fn bbox(b: &BboxSpec) -> Bbox {
    Bbox::new(b[0], b[1], b[2], b[3])
}

/// `alpha_n` with the quantities its schedule is judged by.
pub(crate) struct Member {
    pub n: usize,
    pub q_n: BigUint,
    pub a_n: BigUint,
    pub alpha_n: RotationNumber,
    /// `(log A_n)^(1/q_n)`
    pub log_root: f64,
    /// `A_n^(1/q_n)`
    pub root: f64,
}

impl Member {
    pub fn a_n_log2(&self) -> f64 {
        let bits = self.a_n.bits();
        if bits <= 52 {
            (self.a_n.to_string().parse::<f64>().unwrap_or(f64::NAN)).log2()
        } else {
            let shift = bits - 52;
            let top: f64 = (&self.a_n >> shift as usize).to_string().parse().unwrap_or(f64::NAN);
            top.log2() + shift as f64
        }
    }

    /// Decimal `A_n` when it fits in 64 bits.
    pub fn a_n_text(&self) -> String {
        if self.a_n.bits() <= 64 {
            self.a_n.to_string()
        } else {
            String::new()
        }
    }
}

pub(crate) fn schedule(
    alpha: &RotationNumber,
    tail: &RotationNumber,
    ns: std::ops::RangeInclusive<usize>,
    rule: &ScheduleRule,
) -> Result<Vec<Member>, LabError> {
    let approx = alpha.approximants(*ns.end());
    ns.map(|n| {
        let q_n = approx
            .get(n - 1)
            .ok_or_else(|| LabError::Config(format!("alpha has no convergent of index {n}")))?
            .q
            .clone();
        let a_n = rule.digit(n, &q_n)?;
        if a_n == BigUint::from(0u8) {
            return Err(LabError::Config(format!("A_{n} = 0")));
        }
        let alpha_n = dynlab_core::cfrac::perturbed_rotation(alpha, n, &a_n, tail)?;
        let (log_root, root) = schedule_growth(&a_n, &q_n);
        Ok(Member { n, q_n, a_n, alpha_n, log_root, root })
    })
    .collect()
}

/// Brjuno partial sums at 40 and 80 terms; converged when they agree to 1e-6.
pub(crate) fn brjuno_converged(d: &DigitStream) -> (f64, bool) {
    let (a, b) = (brjuno_sum(d, 40), brjuno_sum(d, 80));
    (b, b.is_finite() && (b - a).abs() < 1e-6 && !d.is_finite())
}

pub(crate) fn require(ok: bool, msg: impl Into<String>) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Config(msg.into()))
    }
}

pub(crate) fn new_report(config: &Config, hash: String, columns: &[&'static str]) -> Report {
    Report::new(config.experiment, hash, columns)
}
