//! Run configuration: a TOML file with sections, checked in one pass so that
//! every problem is reported together.
//!
//! ```toml
//! seed = 7
//!
//! [grid]
//! mode = "complex"          # or "real"
//! dimension = 2             # n for complex, m for real
//! points_per_axis = 32
//!
//! [operator]
//! kind = "hessian_quotient"
//! k = 2
//! l = 1
//!
//! [background]
//! alpha = "alpha_scaled(1)"
//! chi = "chi_perturbed(2, 0.1, 7)"
//!
//! [path]
//! kind = "quotient"
//! intervals = 10
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use fnell_torus::solver::{Normalization, PathKind};
use serde::{Serialize, Serializer};
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Complex,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub mode: Mode,
    pub dimension: usize,
    pub points_per_axis: usize,
    /// One per real coordinate.
    pub periods: Vec<f64>,
    pub resolve_imaginary: bool,
}

impl GridConfig {
    pub fn real_dimension(&self) -> usize {
        match self.mode {
            Mode::Complex => 2 * self.dimension,
            Mode::Real => self.dimension,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
}

/// A named generator such as `chi_perturbed(2, 0.1, 7)`, a number, or a
/// `file:` reference to a field written by this tool.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Call { name: String, args: Vec<Expr> },
    File(PathBuf),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::File(p) => write!(f, "file:{}", p.display()),
            Expr::Call { name, args } if args.is_empty() => write!(f, "{name}"),
            Expr::Call { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, String> {
        let mut p = ExprParser { s: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("unexpected '{}' in '{text}'", &text[p.pos..]));
        }
        Ok(e)
    }

    pub fn number(&self) -> Option<f64> {
        match self {
            Expr::Number(x) => Some(*x),
            _ => None,
        }
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &str {
        std::str::from_utf8(&self.s[self.pos..]).unwrap_or("")
    }

    fn expr(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        if let Some(path) = self.rest().strip_prefix("file:") {
            let path = path.trim().to_string();
            self.pos = self.s.len();
            return if path.is_empty() { Err("empty file path".into()) } else { Ok(Expr::File(path.into())) };
        }
        let start = self.pos;
        match self.s.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                self.skip_ws();
                let mut args = Vec::new();
                if self.s.get(self.pos) == Some(&b'(') {
                    self.pos += 1;
                    self.skip_ws();
                    if self.s.get(self.pos) == Some(&b')') {
                        self.pos += 1;
                    } else {
                        loop {
                            args.push(self.expr()?);
                            self.skip_ws();
                            match self.s.get(self.pos) {
                                Some(b',') => self.pos += 1,
                                Some(b')') => {
                                    self.pos += 1;
                                    break;
                                }
                                _ => return Err(format!("expected ',' or ')' in call to '{name}'")),
                            }
                        }
                    }
                }
                Ok(Expr::Call { name, args })
            }
            Some(_) => {
                while self.pos < self.s.len() && !matches!(self.s[self.pos], b',' | b')') && !self.s[self.pos].is_ascii_whitespace() {
                    self.pos += 1;
                }
                let token = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                token.parse().map(Expr::Number).map_err(|_| format!("'{token}' is not a number"))
            }
            None => Err("empty expression".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackgroundConfig {
    pub alpha: Expr,
    pub chi: Expr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathConfig {
    pub kind: PathKind,
    pub schedule: Vec<f64>,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyConfig {
    /// Certify the trivial subsolution `u̲ = 0`.
    pub subsolution: bool,
    pub kappa_samples: usize,
    pub delta_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub grid: GridConfig,
    pub operator: OperatorConfig,
    pub background: BackgroundConfig,
    pub rhs: Expr,
    pub path: PathConfig,
    pub solver: SolverConfig,
    pub certify: CertifyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Directory that relative `file:` references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

/// Every problem found in a config file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

const TOP_KEYS: &[&str] = &["seed", "grid", "operator", "background", "rhs", "path", "solver", "certify", "output"];
const GRID_KEYS: &[&str] = &["mode", "dimension", "points_per_axis", "periods", "resolve_imaginary"];
const OPERATOR_KEYS: &[&str] = &["kind", "k", "l", "inner"];
const BACKGROUND_KEYS: &[&str] = &["alpha", "chi"];
const RHS_KEYS: &[&str] = &["h"];
const PATH_KEYS: &[&str] = &["kind", "intervals", "schedule", "normalization"];
const SOLVER_KEYS: &[&str] = &["tolerance", "max_iterations"];
const CERTIFY_KEYS: &[&str] = &["subsolution", "kappa_samples", "delta_grid"];
const OUTPUT_KEYS: &[&str] = &["directory"];

pub const OPERATOR_NAMES: &[&str] = &["log_sigma_k", "monge_ampere", "hessian_quotient", "inverse_sigma_k", "composed_with_T"];

struct Walker {
    errors: Vec<String>,
}

impl Walker {
    fn section<'t>(&mut self, root: &'t Table, name: &str, allowed: &[&str]) -> Option<&'t Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                for key in t.keys() {
                    if !allowed.contains(&key.as_str()) {
                        self.errors.push(format!("unknown key '{name}.{key}'"));
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.errors.push(format!("'{name}' must be a section"));
                None
            }
        }
    }

    fn get<'t>(&mut self, table: Option<&'t Table>, section: &str, key: &str, required: bool) -> Option<&'t Value> {
        let v = table.and_then(|t| t.get(key));
        if v.is_none() && required {
            self.errors.push(format!("missing required key {section}.{key}"));
        }
        v
    }

    fn usize(&mut self, table: Option<&Table>, section: &str, key: &str, required: bool) -> Option<usize> {
        match self.get(table, section, key, required)? {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            _ => {
                self.errors.push(format!("{section}.{key} must be a non-negative integer"));
                None
            }
        }
    }

    fn float(&mut self, table: Option<&Table>, section: &str, key: &str) -> Option<f64> {
        match self.get(table, section, key, false)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.errors.push(format!("{section}.{key} must be a number"));
                None
            }
        }
    }

    fn string<'t>(&mut self, table: Option<&'t Table>, section: &str, key: &str, required: bool) -> Option<&'t str> {
        match self.get(table, section, key, required)? {
            Value::String(s) => Some(s),
            _ => {
                self.errors.push(format!("{section}.{key} must be a string"));
                None
            }
        }
    }

    fn floats(&mut self, table: Option<&Table>, section: &str, key: &str) -> Option<Vec<f64>> {
        let v = self.get(table, section, key, false)?;
        let parsed = v.as_array().and_then(|a| {
            a.iter()
                .map(|x| x.as_float().or_else(|| x.as_integer().map(|i| i as f64)))
                .collect::<Option<Vec<f64>>>()
        });
        if parsed.is_none() {
            self.errors.push(format!("{section}.{key} must be an array of numbers"));
        }
        parsed
    }

    fn expr(&mut self, table: Option<&Table>, section: &str, key: &str, default: &str) -> Expr {
        let text = self.string(table, section, key, false).unwrap_or(default);
        match Expr::parse(text) {
            Ok(e) => e,
            Err(msg) => {
                self.errors.push(format!("{section}.{key}: {msg}"));
                Expr::Call { name: default.into(), args: vec![] }
            }
        }
    }
}

/// Which generators a source slot accepts, with their arities.
#[derive(Clone, Copy)]
enum Role {
    Alpha,
    Chi,
    Rhs,
}

fn check_expr(role: Role, e: &Expr, key: &str, n: Option<usize>, errors: &mut Vec<String>) {
    let (name, args) = match e {
        Expr::File(_) => return,
        Expr::Number(_) => {
            errors.push(format!("{key}: expected a generator or file:PATH, found a number"));
            return;
        }
        Expr::Call { name, args } => (name.as_str(), args),
    };
    let numeric = |count: &[usize], errors: &mut Vec<String>| {
        if !count.contains(&args.len()) {
            errors.push(format!("{key}: {name} takes {} argument(s), got {}", count.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" or "), args.len()));
        } else if args.iter().any(|a| a.number().is_none()) {
            errors.push(format!("{key}: arguments of {name} must be numbers"));
        }
    };
    match (role, name) {
        (Role::Alpha, "alpha_scaled") | (Role::Chi, "chi_scaled") | (Role::Rhs, "constant") => numeric(&[1], errors),
        (Role::Chi, "chi_perturbed") => numeric(&[3], errors),
        (Role::Rhs, "zero") => numeric(&[0], errors),
        (Role::Rhs, "smooth") => numeric(&[2, 3], errors),
        (Role::Chi, "nminus1_background") => {
            if n.is_some_and(|n| n < 2) {
                errors.push(format!("{key}: nminus1_background needs dimension ≥ 2"));
            }
            match args.as_slice() {
                [inner] => check_expr(Role::Chi, inner, key, n, errors),
                _ => errors.push(format!("{key}: nminus1_background takes one background expression")),
            }
        }
        _ => {
            let known = match role {
                Role::Alpha => "alpha_scaled(s)",
                Role::Chi => "chi_scaled(s), chi_perturbed(s, amplitude, seed), nminus1_background(eta)",
                Role::Rhs => "zero, constant(v), smooth(max_mode, amplitude[, seed])",
            };
            errors.push(format!("{key}: unknown generator '{name}' (expected {known} or file:PATH)"));
        }
    }
}

fn path_kind(name: &str) -> Option<PathKind> {
    Some(match name {
        "fixed" => PathKind::Fixed,
        "hessian" => PathKind::Hessian,
        "quotient" => PathKind::Quotient,
        "riemannian" => PathKind::Riemannian,
        _ => return None,
    })
}

/// Parse and validate; `file:` references resolve against the working directory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    parse_config_in(text, Path::new("."))
}

pub fn parse_config_file(path: &Path) -> Result<RunConfig, ConfigErrors> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigErrors(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_config_in(text: &str, base_dir: &Path) -> Result<RunConfig, ConfigErrors> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigErrors(vec![format!("not valid TOML: {}", e.message())]))?;
    let mut w = Walker { errors: Vec::new() };
    for key in root.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            w.errors.push(format!("unknown key '{key}'"));
        }
    }
    let seed = match root.get("seed") {
        None => 0,
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(_) => {
            w.errors.push("seed must be a non-negative integer".into());
            0
        }
    };

    // grid
    let g = w.section(&root, "grid", GRID_KEYS);
    let mode = match w.string(g, "grid", "mode", false).unwrap_or("complex") {
        "complex" => Mode::Complex,
        "real" => Mode::Real,
        other => {
            w.errors.push(format!("grid.mode must be \"complex\" or \"real\", got \"{other}\""));
            Mode::Complex
        }
    };
    let dimension = w.usize(g, "grid", "dimension", true);
    if let Some(d) = dimension {
        if !(1..=3).contains(&d) {
            w.errors.push(format!("grid.dimension must be 1, 2 or 3, got {d}"));
        }
    }
    let points = w.usize(g, "grid", "points_per_axis", true);
    if let Some(p) = points {
        if p < 4 || p % 2 != 0 {
            w.errors.push(format!("grid.points_per_axis must be even and at least 4, got {p}"));
        }
    }
    let resolve_imaginary = match w.get(g, "grid", "resolve_imaginary", false) {
        None => false,
        Some(Value::Boolean(b)) => *b,
        Some(_) => {
            w.errors.push("grid.resolve_imaginary must be a boolean".into());
            false
        }
    };
    if resolve_imaginary && mode == Mode::Real {
        w.errors.push("grid.resolve_imaginary only applies to complex mode".into());
    }
    let n = dimension.filter(|d| (1..=3).contains(d));
    let real_dim = n.map(|d| if mode == Mode::Complex { 2 * d } else { d });
    let periods = w.floats(g, "grid", "periods");
    if let (Some(p), Some(r)) = (&periods, real_dim) {
        if p.len() != r {
            w.errors.push(format!("grid.periods needs {r} entries (one per real coordinate), got {}", p.len()));
        }
        if p.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            w.errors.push("grid.periods must be positive".into());
        }
    }

    // operator
    let o = w.section(&root, "operator", OPERATOR_KEYS);
    let kind = w.string(o, "operator", "kind", true).unwrap_or("").to_string();
    let k = w.usize(o, "operator", "k", false);
    let l = w.usize(o, "operator", "l", false);
    let inner = w.string(o, "operator", "inner", false).map(str::to_string);
    let mut operator_ok = !kind.is_empty();
    if !kind.is_empty() && !OPERATOR_NAMES.contains(&kind.as_str()) {
        w.errors.push(format!("operator.kind '{kind}' is not one of {}", OPERATOR_NAMES.join(", ")));
        operator_ok = false;
    }
    if inner.is_some() && kind != "composed_with_T" {
        w.errors.push("operator.inner only applies to composed_with_T".into());
    }
    let effective = if kind == "composed_with_T" { inner.clone().unwrap_or_else(|| "monge_ampere".into()) } else { kind.clone() };
    if matches!(effective.as_str(), "log_sigma_k" | "hessian_quotient" | "inverse_sigma_k") && k.is_none() {
        w.errors.push(format!("missing required key operator.k for {effective}"));
        operator_ok = false;
    }
    if effective == "hessian_quotient" {
        match (l, k) {
            (None, _) => {
                w.errors.push("missing required key operator.l for hessian_quotient".into());
                operator_ok = false;
            }
            (Some(l), Some(k)) if l >= k => {
                w.errors.push(format!("hessian_quotient: require l < k (1 ≤ l < k ≤ n), got l = {l}, k = {k}"));
                operator_ok = false;
            }
            (Some(0), _) => {
                w.errors.push("hessian_quotient: require l ≥ 1".into());
                operator_ok = false;
            }
            _ => {}
        }
    }
    if let (Some(k), Some(n)) = (k, n) {
        if k == 0 || k > n {
            w.errors.push(format!("operator.k = {k} must lie in 1..={n} (the grid dimension)"));
            operator_ok = false;
        }
    }
    if operator_ok {
        if let Some(n) = n {
            if let Err(e) = fnell_core::SymmetricOperator::from_name(&kind, n, k, l, inner.as_deref()) {
                w.errors.push(format!("operator: {e}"));
            }
        }
    }

    // background and right-hand side
    let b = w.section(&root, "background", BACKGROUND_KEYS);
    let alpha = w.expr(b, "background", "alpha", "alpha_scaled(1)");
    let chi = w.expr(b, "background", "chi", "chi_scaled(1)");
    let r = w.section(&root, "rhs", RHS_KEYS);
    let rhs = w.expr(r, "rhs", "h", "zero");
    check_expr(Role::Alpha, &alpha, "background.alpha", n, &mut w.errors);
    check_expr(Role::Chi, &chi, "background.chi", n, &mut w.errors);
    check_expr(Role::Rhs, &rhs, "rhs.h", n, &mut w.errors);

    // path
    let p = w.section(&root, "path", PATH_KEYS);
    let path_name = w.string(p, "path", "kind", false).unwrap_or("hessian");
    let kind_path = path_kind(path_name).unwrap_or_else(|| {
        w.errors.push(format!("path.kind must be fixed, hessian, quotient or riemannian, got \"{path_name}\""));
        PathKind::Hessian
    });
    if kind_path == PathKind::Quotient && !kind.is_empty() && kind != "hessian_quotient" {
        w.errors.push(format!("path.kind = \"quotient\" needs operator.kind = \"hessian_quotient\", got \"{kind}\""));
    }
    let intervals = w.usize(p, "path", "intervals", false);
    let explicit = w.floats(p, "path", "schedule");
    let schedule = match (intervals, explicit) {
        (Some(_), Some(_)) => {
            w.errors.push("path.intervals and path.schedule are mutually exclusive".into());
            vec![0.0, 1.0]
        }
        (Some(0), None) => {
            w.errors.push("path.intervals must be at least 1".into());
            vec![0.0, 1.0]
        }
        (Some(i), None) => fnell_torus::solver::uniform_schedule(i),
        (None, Some(s)) => {
            let valid = s.first() == Some(&0.0) && s.last() == Some(&1.0) && s.windows(2).all(|w| w[0] < w[1]);
            if !valid {
                w.errors.push("path.schedule must increase strictly from 0 to 1".into());
            }
            s
        }
        (None, None) => fnell_torus::solver::uniform_schedule(10),
    };
    let normalization = match w.string(p, "path", "normalization", false).unwrap_or("mean_zero") {
        "mean_zero" => Normalization::MeanZero,
        "sup_zero" => Normalization::SupZero,
        other => {
            w.errors.push(format!("path.normalization must be mean_zero or sup_zero, got \"{other}\""));
            Normalization::MeanZero
        }
    };

    // solver
    let s = w.section(&root, "solver", SOLVER_KEYS);
    let tolerance = w.float(s, "solver", "tolerance").unwrap_or(1e-10);
    if !(tolerance > 0.0) {
        w.errors.push("solver.tolerance must be positive".into());
    }
    let max_iterations = w.usize(s, "solver", "max_iterations", false).unwrap_or(50);
    if max_iterations == 0 {
        w.errors.push("solver.max_iterations must be at least 1".into());
    }

    // certify
    let c = w.section(&root, "certify", CERTIFY_KEYS);
    let subsolution = match w.string(c, "certify", "subsolution", false).unwrap_or("zero") {
        "zero" => true,
        "none" => false,
        other => {
            w.errors.push(format!("certify.subsolution must be \"zero\" or \"none\", got \"{other}\""));
            false
        }
    };
    let kappa_samples = w.usize(c, "certify", "kappa_samples", false).unwrap_or(200);
    let delta_grid = w.floats(c, "certify", "delta_grid").unwrap_or_else(|| vec![0.1, 0.03, 0.01, 0.003, 0.001]);
    if delta_grid.is_empty() || delta_grid.iter().any(|d| !(*d > 0.0)) {
        w.errors.push("certify.delta_grid must be a nonempty list of positive numbers".into());
    }

    let out = w.section(&root, "output", OUTPUT_KEYS);
    let output = w.string(out, "output", "directory", false).map(PathBuf::from);

    if !w.errors.is_empty() {
        return Err(ConfigErrors(w.errors));
    }
    let n = n.expect("validated");
    let real_dim = real_dim.expect("validated");
    Ok(RunConfig {
        seed,
        grid: GridConfig {
            mode,
            dimension: n,
            points_per_axis: points.expect("validated"),
            periods: periods.unwrap_or_else(|| vec![1.0; real_dim]),
            resolve_imaginary,
        },
        operator: OperatorConfig { kind, k, l, inner },
        background: BackgroundConfig { alpha, chi },
        rhs,
        path: PathConfig { kind: kind_path, schedule, normalization },
        solver: SolverConfig { tolerance, max_iterations },
        certify: CertifyConfig { subsolution, kappa_samples, delta_grid },
        output,
        base_dir: base_dir.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_round_trip() {
        for text in ["chi_perturbed(2, 0.1, 7)", "zero", "nminus1_background(chi_scaled(1))", "file:data/chi", "smooth(2, 0.3)"] {
            assert_eq!(Expr::parse(text).unwrap().to_string(), text);
        }
        assert_eq!(Expr::parse(" constant( -1.5 ) ").unwrap(), Expr::Call { name: "constant".into(), args: vec![Expr::Number(-1.5)] });
        assert!(Expr::parse("chi_scaled(1").is_err());
        assert!(Expr::parse("chi_scaled(1) x").is_err());
        assert!(Expr::parse("smooth(a b)").is_err());
    }
}
