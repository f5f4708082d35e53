//! Seeded monotonicity campaigns: does a more binding quota profile ever
//! leave the receiver worse off?

use serde::{Deserialize, Serialize};

use super::gen::{derive_seed, gen_instance, gen_nested_constraints, Filter};
use crate::binary::solve_binary;
use crate::catalog;
use crate::error::{Error, Result};
use crate::model::{ConstraintProfile, ConstraintsFile, Instance, InstanceFile, Solution};
use crate::oracle::{resolution_bound, solve_exante_grid};
use crate::rational::Rational;

pub const DEFAULT_TERNARY_GRID: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzMode {
    /// 2×2 instances, closed-form solver, no slack.
    Theorem2Binary,
    /// 3×3 instances, grid oracle with resolution slack.
    Prop3Ternary,
}

#[derive(Debug, Clone)]
pub struct FuzzOptions {
    pub mode: FuzzMode,
    pub trials: u64,
    pub seed: u64,
    /// Grid resolution for the ternary mode (default 12).
    pub grid: Option<u32>,
    /// Ternary mode only: also require the structural conditions. When off,
    /// the ternary worked example is injected as trial 0.
    pub structural_filter: bool,
    /// Replaces the default slack (0 for binary, `2·L_R·mn/K` for ternary).
    pub slack: Option<Rational>,
}

impl FuzzOptions {
    pub fn new(mode: FuzzMode, trials: u64, seed: u64) -> Self {
        FuzzOptions {
            mode,
            trials,
            seed,
            grid: None,
            structural_filter: true,
            slack: None,
        }
    }
}

/// One trial where the more binding profile gave the receiver less.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub instance: InstanceFile,
    pub more_binding: ConstraintsFile,
    pub less_binding: ConstraintsFile,
    pub receiver_eu_more_binding: Rational,
    pub receiver_eu_less_binding: Rational,
    pub sender_eu_more_binding: Rational,
    pub sender_eu_less_binding: Rational,
    /// `less_binding − more_binding`, positive here.
    pub decrease: Rational,
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub mode: FuzzMode,
    pub trials: u64,
    pub seed: u64,
    pub grid: Option<u32>,
    /// Trials that produced an instance and were evaluated.
    pub checked: u64,
    /// Trials whose generator ran out of draws.
    pub exhausted: u64,
    /// Decreases beyond the slack.
    pub violations: Vec<TrialRecord>,
    /// Strict decreases within the slack.
    pub borderline: Vec<TrialRecord>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn profile_file(c: &ConstraintProfile) -> ConstraintsFile {
    ConstraintsFile {
        lb: c.lower().to_vec(),
        ub: c.upper().to_vec(),
    }
}

struct Trial {
    inst: Instance,
    c: ConstraintProfile,
    c2: ConstraintProfile,
}

fn draw_trial(opts: &FuzzOptions, index: u64) -> Result<Trial> {
    if opts.mode == FuzzMode::Prop3Ternary && !opts.structural_filter && index == 0 {
        return Ok(Trial {
            inst: catalog::ternary_instance(),
            c: catalog::ternary_cap(),
            c2: ConstraintProfile::vacuous(3),
        });
    }
    let trial_seed = derive_seed(opts.seed, index);
    let (n, filters): (usize, &[Filter]) = match opts.mode {
        FuzzMode::Theorem2Binary => (2, &[Filter::StateMatching, Filter::ActionMatching]),
        FuzzMode::Prop3Ternary if opts.structural_filter => (
            3,
            &[Filter::StateMatching, Filter::ActionMatching, Filter::Prop3],
        ),
        FuzzMode::Prop3Ternary => (3, &[Filter::StateMatching, Filter::ActionMatching]),
    };
    let inst = gen_instance(n, trial_seed, filters)?;
    let (c, c2) = gen_nested_constraints(&inst, derive_seed(trial_seed, u64::MAX))?;
    Ok(Trial { inst, c, c2 })
}

pub fn fuzz_monotonicity(opts: &FuzzOptions) -> Result<FuzzReport> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let grid = match opts.mode {
        FuzzMode::Theorem2Binary => None,
        FuzzMode::Prop3Ternary => Some(opts.grid.unwrap_or(DEFAULT_TERNARY_GRID)),
    };
    let mut report = FuzzReport {
        mode: opts.mode,
        trials: opts.trials,
        seed: opts.seed,
        grid,
        checked: 0,
        exhausted: 0,
        violations: Vec::new(),
        borderline: Vec::new(),
    };
    for index in 0..opts.trials {
        let trial = match draw_trial(opts, index) {
            Ok(t) => t,
            Err(Error::GeneratorExhausted { .. }) => {
                report.exhausted += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let Trial { inst, c, c2 } = trial;
        let (tight, loose, slack): (Solution, Solution, Rational) = match grid {
            None => (
                solve_binary(&inst, &c)?,
                solve_binary(&inst, &c2)?,
                Rational::zero(),
            ),
            Some(k) => {
                let band = Some(Rational::zero());
                let slack =
                    &Rational::from(2) * &resolution_bound(&inst.receiver_spread(), &inst, k);
                (
                    solve_exante_grid(&inst, &c, k, band.clone())?.best,
                    solve_exante_grid(&inst, &c2, k, band)?.best,
                    slack,
                )
            }
        };
        let slack = opts.slack.clone().unwrap_or(slack);
        report.checked += 1;
        let decrease = &loose.receiver_eu - &tight.receiver_eu;
        if !decrease.is_positive() {
            continue;
        }
        let record = TrialRecord {
            trial: index,
            instance: InstanceFile::from_instance(&inst, None),
            more_binding: profile_file(&c),
            less_binding: profile_file(&c2),
            receiver_eu_more_binding: tight.receiver_eu,
            receiver_eu_less_binding: loose.receiver_eu,
            sender_eu_more_binding: tight.sender_eu,
            sender_eu_less_binding: loose.sender_eu,
            decrease: decrease.clone(),
            slack: slack.clone(),
        };
        if decrease > slack {
            report.violations.push(record);
        } else {
            report.borderline.push(record);
        }
    }
    Ok(report)
}
