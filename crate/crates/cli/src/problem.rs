//! From a validated config to grid, operator, metric and fields.

use fnell_core::linalg::Metric;
use fnell_core::SymmetricOperator;
use fnell_torus::generators::{chi_perturbed, chi_scaled, metric_scaled, smooth_field};
use fnell_torus::geometry::{constant_metric, nminus1_background};
use fnell_torus::grid::GridMode;
use fnell_torus::io::{read_matrix_field, read_scalar_field};
use fnell_torus::{MatrixField, PeriodicGrid, ScalarField, TorusError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigErrors, Expr, Mode, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_STAGNATION: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_REFUTED: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Torus(e) => torus_exit_code(e),
            RunError::Io(_) | RunError::Json(_) => EXIT_IO,
        }
    }
}

pub fn torus_exit_code(e: &TorusError) -> i32 {
    use fnell_core::Error as Core;
    match e.root() {
        TorusError::Stagnation { .. } | TorusError::Numeric(_) | TorusError::Core(Core::Numeric(_)) => EXIT_STAGNATION,
        TorusError::Inadmissible { .. } | TorusError::DegenerateClass(_) | TorusError::Mode(_) => EXIT_DOMAIN,
        TorusError::Core(Core::Domain(_) | Core::OutsideCone { .. } | Core::NotHermitian { .. }) => EXIT_DOMAIN,
        TorusError::Io(_) | TorusError::Format(_) => EXIT_IO,
        TorusError::Argument(_) | TorusError::Core(Core::Argument(_)) => EXIT_CONFIG,
        TorusError::Aborted { .. } => unreachable!("root looks through Aborted"),
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: PeriodicGrid,
    pub op: SymmetricOperator,
    pub alpha: Metric,
    pub chi: MatrixField,
    pub h: ScalarField,
}

fn num(args: &[Expr], i: usize) -> f64 {
    args[i].number().expect("checked by parse_config")
}

fn load_matrix(cfg: &RunConfig, grid: &PeriodicGrid, path: &std::path::Path) -> Result<MatrixField, RunError> {
    let f = read_matrix_field(&cfg.resolve(path))?;
    if !f.grid().same_shape(grid) {
        return Err(TorusError::Argument(format!("{} was written on a different grid", path.display())).into());
    }
    Ok(f)
}

fn build_chi(cfg: &RunConfig, grid: &PeriodicGrid, alpha: &Metric, e: &Expr) -> Result<MatrixField, RunError> {
    Ok(match e {
        Expr::File(p) => load_matrix(cfg, grid, p)?,
        Expr::Call { name, args } => match name.as_str() {
            "chi_scaled" => chi_scaled(grid, alpha, num(args, 0))?,
            "chi_perturbed" => chi_perturbed(grid, alpha, num(args, 0), num(args, 1), num(args, 2) as u64)?,
            "nminus1_background" => nminus1_background(&build_chi(cfg, grid, alpha, &args[0])?, alpha)?,
            other => unreachable!("generator {other} passed validation"),
        },
        Expr::Number(_) => unreachable!("rejected by parse_config"),
    })
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem, RunError> {
    let g = &cfg.grid;
    let mode = match g.mode {
        Mode::Complex => GridMode::Complex { n: g.dimension, resolve_imaginary: g.resolve_imaginary },
        Mode::Real => GridMode::Real { m: g.dimension },
    };
    let grid = PeriodicGrid::new(mode, g.points_per_axis, g.periods.clone())?;
    let o = &cfg.operator;
    let op = SymmetricOperator::from_name(&o.kind, g.dimension, o.k, o.l, o.inner.as_deref()).map_err(TorusError::from)?;
    let alpha = match &cfg.background.alpha {
        Expr::File(p) => constant_metric(&load_matrix(cfg, &grid, p)?)?,
        Expr::Call { args, .. } => metric_scaled(g.dimension, num(args, 0))?,
        Expr::Number(_) => unreachable!("rejected by parse_config"),
    };
    let chi = build_chi(cfg, &grid, &alpha, &cfg.background.chi)?;
    let h = match &cfg.rhs {
        Expr::File(p) => {
            let f = read_scalar_field(&cfg.resolve(p))?;
            if !f.grid().same_shape(&grid) {
                return Err(TorusError::Argument(format!("{} was written on a different grid", p.display())).into());
            }
            f
        }
        Expr::Call { name, args } => match name.as_str() {
            "zero" => ScalarField::zeros(&grid),
            "constant" => ScalarField::constant(&grid, num(args, 0)),
            "smooth" => {
                let seed = args.get(2).and_then(Expr::number).map_or(cfg.seed, |s| s as u64);
                smooth_field(&grid, num(args, 0) as usize, num(args, 1), &mut ChaCha8Rng::seed_from_u64(seed))?
            }
            other => unreachable!("generator {other} passed validation"),
        },
        Expr::Number(_) => unreachable!("rejected by parse_config"),
    };
    Ok(Problem { grid, op, alpha, chi, h })
}
