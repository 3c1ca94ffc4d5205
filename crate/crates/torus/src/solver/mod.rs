//! Damped Newton-Krylov for `F(A[u]) = h + c` and the continuity paths.
//!
//! The unknown constant is solved together with `u`: the linear system acts
//! on (mean-zero `v`, `dc`), which is square. GMRES is right-preconditioned
//! by the inverse of the constant-coefficient operator with the averaged
//! linearization coefficients.

mod equation;
mod krylov;
mod problem;

use fnell_core::SymmetricOperator;
use serde::Serialize;

use crate::error::{argument, Result, TorusError};
use crate::field::ScalarField;
use crate::geometry::compute_c;
use crate::monitors::{hmw_ratio, trace_estimate_check, HmwReport, TraceEstimate};

use equation::{Discretization, Evaluation, PathEquation, Preconditioner};
use krylov::gmres;
pub use problem::{normalize, Normalization, PathKind, ProblemSpec, SolveState};

/// Slack for the path-constant bounds.
pub const BOUND_SLACK: f64 = 1e-8;
/// Smallest continuity step before giving up.
pub const MIN_STEP: f64 = 1e-4;
pub const MAX_HALVINGS: usize = 30;

const KRYLOV_RESTART: usize = 60;
const KRYLOV_MAX_ITERATIONS: usize = 600;

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub state: SolveState,
    pub iterations: usize,
    /// Sup-norm residual before each iteration and after the last.
    pub residual_history: Vec<f64>,
    pub krylov_iterations: usize,
    /// Largest relative residual left by an inner linear solve.
    pub worst_krylov_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lower: f64,
    pub upper: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStep {
    pub t: f64,
    pub c: f64,
    pub residual: f64,
    pub admissibility_margin: f64,
    pub newton_iterations: usize,
    pub krylov_iterations: usize,
    pub residual_history: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hmw: Option<HmwReport>,
    pub trace_estimate: TraceEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub path: PathKind,
    pub operator: String,
    pub normalization: Normalization,
    pub completed: bool,
    pub final_t: f64,
    pub c: f64,
    pub residual: f64,
    pub admissibility_margin: f64,
    pub bounds_hold: bool,
    /// Target constant of the quotient path, `∫χ^l∧α^{n-l} / ∫χ^k∧α^{n-k}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_constant: Option<f64>,
    pub steps: Vec<PathStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ReportDiagnostics>,
    /// Final `u` in the requested normalization.
    #[serde(skip)]
    pub u: ScalarField,
}

/// `n + 1` equally spaced values from 0 to 1.
pub fn uniform_schedule(intervals: usize) -> Vec<f64> {
    let n = intervals.max(1);
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

pub struct Solver {
    spec: ProblemSpec,
    disc: Discretization,
    /// `F(A[0])`, when `A[0]` is admissible.
    base: Option<Vec<f64>>,
}

impl Solver {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        let disc = Discretization::new(&spec);
        let probe = PathEquation { op: spec.op.clone(), rhs: vec![0.0; disc.len()], sign: 0.0 };
        let zeros = vec![0.0; disc.len()];
        let base = match probe.evaluate(&disc, &zeros, 0.0, false) {
            Ok(e) => Some(e.residual),
            Err(e) if matches!(spec.path, PathKind::Hessian | PathKind::Riemannian) => return Err(e),
            Err(_) => None,
        };
        Ok(Solver { spec, disc, base })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    /// `h₀ = F(α⁻¹χ)`, if `χ` is admissible.
    pub fn h0(&self) -> Option<ScalarField> {
        self.base.as_ref().map(|b| ScalarField::from_parts(self.spec.chi.grid().clone(), b.clone()))
    }

    pub fn zero_state(&self) -> SolveState {
        SolveState {
            u: ScalarField::zeros(self.spec.chi.grid()),
            c: 0.0,
            t: 0.0,
            residual_norm: f64::INFINITY,
            admissibility_margin: 0.0,
        }
    }

    fn equation(&self, t: f64) -> Result<PathEquation> {
        if !(0.0..=1.0).contains(&t) {
            return Err(argument(format!("path parameter {t} outside [0, 1]")));
        }
        let spec = &self.spec;
        let base = || self.base.as_ref().expect("checked in Solver::new");
        let (op, rhs, sign) = match spec.path {
            PathKind::Fixed => (spec.op.clone(), spec.h.values().to_vec(), 1.0),
            PathKind::Hessian => {
                let offset = spec.op.form_offset();
                // offset + tH + (1-t)H₀ with H₀ = F(A[0]) - offset.
                let rhs = spec.h.values().iter().zip(base()).map(|(h, b)| offset + t * h + (1.0 - t) * (b - offset)).collect();
                (spec.op.clone(), rhs, 1.0)
            }
            PathKind::Quotient => {
                let (l, k) = spec.quotient_degrees().expect("validated in ProblemSpec::new");
                (SymmetricOperator::blended_quotient(spec.op.dimension(), l, k, t)?, vec![0.0; self.disc.len()], -1.0)
            }
            PathKind::Riemannian => (spec.op.clone(), base().iter().map(|b| (1.0 - t) * b).collect(), 1.0),
        };
        Ok(PathEquation { op, rhs, sign })
    }

    fn check_grid(&self, u: &ScalarField) -> Result<()> {
        crate::field::check_grids(self.spec.chi.grid(), u.grid())
    }

    /// Pointwise residual of the path member at `t`.
    pub fn residual(&self, u: &ScalarField, c: f64, t: f64) -> Result<ScalarField> {
        self.check_grid(u)?;
        let eval = self.equation(t)?.evaluate(&self.disc, u.values(), c, false)?;
        Ok(ScalarField::from_parts(u.grid().clone(), eval.residual))
    }

    /// Derivative of the residual at `state` in the direction `(v, dc)`.
    pub fn linearized_apply(&self, state: &SolveState, v: &ScalarField, dc: f64) -> Result<ScalarField> {
        self.check_grid(v)?;
        let eq = self.equation(state.t)?;
        let eval = eq.evaluate(&self.disc, state.u.values(), state.c, true)?;
        Ok(ScalarField::from_parts(v.grid().clone(), eq.linearized(&self.disc, &eval.coefficients, v.values(), dc)))
    }

    /// Damped inexact Newton from `warm` at path parameter `t`.
    pub fn newton_solve(&self, t: f64, warm: &SolveState) -> Result<NewtonOutcome> {
        self.check_grid(&warm.u)?;
        let eq = self.equation(t)?;
        let tol = self.spec.tolerance;
        let mut u = warm.u.values().to_vec();
        let mut c = warm.c;
        let mut eval = eq.evaluate(&self.disc, &u, c, true)?;
        let mut history = vec![eval.sup];
        let mut iterations = 0;
        let mut krylov_iterations = 0;
        let mut worst_krylov_residual = 0.0f64;
        while eval.sup >= tol {
            if iterations == self.spec.max_iterations {
                return Err(TorusError::Stagnation {
                    t,
                    iterations,
                    residual: eval.sup,
                    reason: "iteration limit reached".into(),
                });
            }
            iterations += 1;
            let pre = Preconditioner::new(&self.disc, &eval.coefficients, eq.sign);
            let rhs: Vec<f64> = eval.residual.iter().map(|r| -r).collect();
            let forcing = (0.1 * eval.sup).min(1e-4);
            let coeffs = &eval.coefficients;
            let solve = gmres(
                |y| {
                    let (v, dc) = pre.apply(&self.disc, y);
                    eq.linearized(&self.disc, coeffs, &v, dc)
                },
                &rhs,
                forcing,
                KRYLOV_RESTART,
                KRYLOV_MAX_ITERATIONS,
            );
            krylov_iterations += solve.iterations;
            worst_krylov_residual = worst_krylov_residual.max(solve.relative_residual);
            let (dv, dc) = pre.apply(&self.disc, &solve.x);
            let (next_u, next_c, next_eval) = self.line_search(&eq, &u, c, &dv, dc, &eval).ok_or_else(|| {
                TorusError::Stagnation {
                    t,
                    iterations,
                    residual: eval.sup,
                    reason: format!("line search exhausted {MAX_HALVINGS} halvings"),
                }
            })?;
            u = next_u;
            c = next_c;
            eval = next_eval;
            history.push(eval.sup);
        }
        Ok(NewtonOutcome {
            state: SolveState {
                u: ScalarField::from_parts(warm.u.grid().clone(), u),
                c,
                t,
                residual_norm: eval.sup,
                admissibility_margin: eval.margin,
            },
            iterations,
            residual_history: history,
            krylov_iterations,
            worst_krylov_residual,
        })
    }

    fn line_search(
        &self,
        eq: &PathEquation,
        u: &[f64],
        c: f64,
        dv: &[f64],
        dc: f64,
        current: &Evaluation,
    ) -> Option<(Vec<f64>, f64, Evaluation)> {
        let mut step = 1.0;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(dv).map(|(a, d)| a + step * d).collect();
            let trial_c = c + step * dc;
            if let Ok(e) = eq.evaluate(&self.disc, &trial, trial_c, true) {
                if e.margin > 0.0 && e.sup < current.sup {
                    return Some((trial, trial_c, e));
                }
            }
            step *= 0.5;
        }
        None
    }

    /// March the path over `schedule`, bisecting steps on failure.
    pub fn run_continuity(&self, schedule: &[f64]) -> Result<SolveReport> {
        validate_schedule(schedule)?;
        let spec = &self.spec;
        let quotient_constant = match spec.path {
            PathKind::Quotient => {
                let (l, k) = spec.quotient_degrees().expect("validated");
                Some(compute_c(&spec.chi, &spec.alpha, l, k)?)
            }
            _ => None,
        };
        let h0_range = match (spec.path, &self.base) {
            (PathKind::Riemannian, Some(b)) => {
                Some((b.iter().copied().fold(f64::INFINITY, f64::min), b.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
            }
            _ => None,
        };
        let bound_at = |t: f64, c: f64| -> Option<BoundCheck> {
            if let Some(q) = quotient_constant {
                return Some(BoundCheck { lower: t * q, upper: None, holds: c >= t * q - BOUND_SLACK });
            }
            h0_range.map(|(lo, hi)| BoundCheck {
                lower: t * lo,
                upper: Some(t * hi),
                holds: c >= t * lo - BOUND_SLACK && c <= t * hi + BOUND_SLACK,
            })
        };
        let record = |outcome: &NewtonOutcome| PathStep {
            t: outcome.state.t,
            c: outcome.state.c,
            residual: outcome.state.residual_norm,
            admissibility_margin: outcome.state.admissibility_margin,
            newton_iterations: outcome.iterations,
            krylov_iterations: outcome.krylov_iterations,
            residual_history: outcome.residual_history.clone(),
            bound: bound_at(outcome.state.t, outcome.state.c),
        };

        if spec.path == PathKind::Fixed {
            let outcome = self.newton_solve(1.0, &self.zero_state())?;
            let steps = vec![record(&outcome)];
            return self.finish(outcome.state, steps, true, quotient_constant);
        }

        let start = match spec.path {
            PathKind::Quotient => self.quotient_start()?,
            _ => self.zero_state(),
        };
        let first = self.newton_solve(0.0, &start)?;
        let mut steps = vec![record(&first)];
        let mut state = first.state;
        let mut step = schedule.get(1).copied().unwrap_or(1.0);
        for &target in &schedule[1..] {
            while state.t < target {
                let t_try = (state.t + step).min(target);
                match self.newton_solve(t_try, &state) {
                    Ok(outcome) => {
                        steps.push(record(&outcome));
                        state = outcome.state;
                        step = (2.0 * step).min(1.0);
                    }
                    Err(e @ (TorusError::Stagnation { .. } | TorusError::Inadmissible { .. } | TorusError::Numeric(_))) => {
                        step = 0.5 * (t_try - state.t);
                        if step < MIN_STEP {
                            let report = self.finish(state, steps, false, quotient_constant)?;
                            return Err(TorusError::Aborted { report: Box::new(report), cause: Box::new(e) });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        self.finish(state, steps, true, quotient_constant)
    }

    /// Quotient path at `t = 0` is `σ_k(A)/C(n,k) = 1/c_0`: solve the Hessian
    /// equation `log(σ_k/C(n,k)) = c_h` along its own path, then `c_0 = e^{-c_h}`.
    fn quotient_start(&self) -> Result<SolveState> {
        let spec = &self.spec;
        let (_, k) = spec.quotient_degrees().expect("validated");
        let op = SymmetricOperator::log_sigma_k(spec.op.dimension(), k)?;
        let inner = ProblemSpec::new(
            op,
            spec.alpha.clone(),
            spec.chi.clone(),
            ScalarField::zeros(spec.chi.grid()),
            PathKind::Hessian,
        )?
        .with_tolerance(spec.tolerance)
        .with_max_iterations(spec.max_iterations);
        let report = Solver::new(inner)?.run_continuity(&uniform_schedule(20))?;
        let u = normalize(&report.u, Normalization::MeanZero);
        Ok(SolveState { u, c: (-report.c).exp(), t: 0.0, residual_norm: f64::INFINITY, admissibility_margin: 0.0 })
    }

    fn finish(&self, state: SolveState, steps: Vec<PathStep>, completed: bool, quotient_constant: Option<f64>) -> Result<SolveReport> {
        let bounds_hold = steps.iter().all(|s| s.bound.as_ref().is_none_or(|b| b.holds));
        let u = normalize(&state.u, self.spec.normalization);
        let diagnostics = self.diagnostics(&state).ok();
        Ok(SolveReport {
            path: self.spec.path,
            operator: self.spec.op.name(),
            normalization: self.spec.normalization,
            completed,
            final_t: state.t,
            c: state.c,
            residual: state.residual_norm,
            admissibility_margin: state.admissibility_margin,
            bounds_hold,
            quotient_constant,
            steps,
            diagnostics,
            u,
        })
    }

    fn diagnostics(&self, state: &SolveState) -> Result<ReportDiagnostics> {
        let spec = &self.spec;
        let g = spec.chi.add(&crate::geometry::hessian(&state.u)?)?;
        let hmw = if spec.chi.grid().is_complex() { Some(hmw_ratio(&state.u, &spec.alpha, 1.0)?) } else { None };
        let trace_estimate = trace_estimate_check(&state.u, &g, &spec.alpha, 1.0, f64::INFINITY)?;
        Ok(ReportDiagnostics { hmw, trace_estimate })
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.first() != Some(&0.0) || schedule.last() != Some(&1.0) {
        return Err(argument("the t-schedule must start at 0 and end at 1"));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(argument("the t-schedule must be strictly increasing"));
    }
    Ok(())
}
