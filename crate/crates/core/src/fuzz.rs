//! Random move trajectories checked against the invariance and degree
//! theorems at every step.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diagram::{generate, random_code, DiagramCode, Family};
use crate::invariant::{certify_with, zeta_of};
use crate::moves::{apply, random_move, MoveLog};
use crate::ring::ZetaPolynomial;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CampaignConfig {
    pub trials: u32,
    pub steps: u32,
    pub seed: u64,
    /// Classical crossings of random starting codes are drawn from `0..=max_classical`.
    pub max_classical: usize,
    pub max_virtual: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            steps: 20,
            seed: DEFAULT_SEED,
            max_classical: 10,
            max_virtual: 4,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_231_010;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FailureKind {
    /// A sampled move could not be applied or produced an invalid code.
    Move,
    /// `ζ` changed by something other than the predicted power of `q`.
    Invariance,
    /// Top `s`-degree of `ζ` above the virtual crossing count.
    DegreeBound,
    /// `det B` differs from the `s^k` coefficient of `ζ`.
    LeadingCoefficient,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Failure {
    /// 1-based index of the offending move; 0 for the starting diagram.
    pub step: usize,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrajectoryReport {
    pub seed: u64,
    pub start: DiagramCode,
    pub end: DiagramCode,
    pub log: MoveLog,
    /// Accumulated exponent: `ζ(end) = q^r·ζ(start)`.
    pub r: i32,
    pub q_kinks: usize,
    pub failure: Option<Failure>,
}

impl TrajectoryReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn check_diagram(code: &DiagramCode) -> Result<ZetaPolynomial, (FailureKind, String)> {
    let d = code
        .decompose()
        .map_err(|e| (FailureKind::Move, e.to_string()))?;
    let z = zeta_of(&d);
    if let Some(top) = z.top_degree() {
        if top > d.virtual_count as i32 {
            return Err((
                FailureKind::DegreeBound,
                format!("top degree {top} exceeds k = {}", d.virtual_count),
            ));
        }
    }
    certify_with(&d, &z).map_err(|e| (FailureKind::LeadingCoefficient, e.to_string()))?;
    Ok(z)
}

/// Walks `steps` random moves from `start`. Every move other than an
/// early-under kink must keep `ζ` exactly; such a kink must multiply it by
/// the predicted power of `q`.
pub fn run_trajectory(start: &DiagramCode, steps: u32, seed: u64) -> TrajectoryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrajectoryReport {
        seed,
        start: start.clone(),
        end: start.clone(),
        log: MoveLog::default(),
        r: 0,
        q_kinks: 0,
        failure: None,
    };
    let mut zeta = match check_diagram(start) {
        Ok(z) => z,
        Err((kind, message)) => {
            report.failure = Some(Failure {
                step: 0,
                kind,
                message,
            });
            return report;
        }
    };
    for step in 1..=steps as usize {
        let m = random_move(&report.end, &mut rng);
        report.log.moves.push(m);
        let next = match apply(&report.end, &m) {
            Ok(c) => c,
            Err(e) => {
                report.failure = Some(Failure {
                    step,
                    kind: FailureKind::Move,
                    message: e.to_string(),
                });
                return report;
            }
        };
        let shift = m.q_shift(&report.end);
        let result = check_diagram(&next).and_then(|z| {
            let expected = zeta.mul_q_power(shift.unwrap_or(0));
            if z == expected {
                Ok(z)
            } else {
                Err((
                    FailureKind::Invariance,
                    format!("{m}: zeta {zeta} became {z}, expected {expected}"),
                ))
            }
        });
        report.end = next;
        match result {
            Ok(z) => {
                zeta = z;
                if let Some(s) = shift {
                    report.q_kinks += 1;
                    report.r += s;
                }
            }
            Err((kind, message)) => {
                report.failure = Some(Failure {
                    step,
                    kind,
                    message,
                });
                return report;
            }
        }
    }
    report
}

fn trial_seed(seed: u64, trial: u32) -> u64 {
    seed ^ (u64::from(trial) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Starting diagram of a trial: every fifth trial takes a built-in diagram,
/// the others a random code.
pub fn starting_code(config: &CampaignConfig, trial: u32) -> DiagramCode {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, trial) ^ 0x5EED);
    if trial.is_multiple_of(5) {
        let corpus = [
            generate(Family::VirtualKink),
            generate(Family::ClassicalTrefoil),
            generate(Family::ClassicalFigure8),
            generate(Family::VirtualKinkChain(2)),
        ];
        return corpus[(trial as usize / 5) % corpus.len()]
            .clone()
            .expect("built-in family");
    }
    let n = rng.gen_range(0..=config.max_classical);
    let k = rng.gen_range(0..=config.max_virtual);
    random_code(n, k, &mut rng)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CampaignReport {
    pub trials: u32,
    pub passed: u32,
    pub max_abs_r: i32,
    pub trajectories_with_q_kinks: u32,
    /// Failing trajectories in trial order.
    pub failures: Vec<TrajectoryReport>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} trajectories invariant; max |r| observed: {}",
            self.passed, self.trials, self.max_abs_r
        )
    }
}

/// Runs the trials in parallel. The report depends only on `config`.
pub fn run_campaign(config: &CampaignConfig) -> CampaignReport {
    let reports: Vec<TrajectoryReport> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            run_trajectory(
                &starting_code(config, trial),
                config.steps,
                trial_seed(config.seed, trial),
            )
        })
        .collect();
    CampaignReport {
        trials: config.trials,
        passed: reports.iter().filter(|r| r.passed()).count() as u32,
        max_abs_r: reports.iter().map(|r| r.r.abs()).max().unwrap_or(0),
        trajectories_with_q_kinks: reports.iter().filter(|r| r.q_kinks > 0).count() as u32,
        failures: reports.into_iter().filter(|r| !r.passed()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_campaign_passes() {
        let config = CampaignConfig {
            trials: 20,
            steps: 8,
            seed: 1,
            ..Default::default()
        };
        let report = run_campaign(&config);
        assert!(report.all_passed(), "{:?}", report.failures.first());
        assert_eq!(report, run_campaign(&config));
    }

    #[test]
    fn trajectory_replays_from_log() {
        let start = generate(Family::VirtualKink).unwrap();
        let t = run_trajectory(&start, 12, 5);
        assert_eq!(t.log.replay(&start).unwrap(), t.end);
    }
}
