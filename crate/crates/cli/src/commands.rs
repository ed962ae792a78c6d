use serde::Serialize;
use serde_json::Value;

use kitaev_core::correlations::{
    mean_particle_number, solve_eigenstate, z_analytic, z_saturated, EigenTarget,
    SaturationConfig,
};
use kitaev_core::quadratic::{analytic_periodic_energies, build_coupling_matrix, schur_decompose, KitaevParams};
use kitaev_core::tensor_state::{Parity, TruncationConfig};
use kitaev_core::KitaevError;

use crate::output::{Cell, Table};
use crate::{Failure, OutputArgs, SpectrumArgs, SurfaceArgs, ZscanArgs};

pub type CmdResult = Result<(), Failure>;

pub fn config_json<T: Serialize>(args: &T, output: &OutputArgs) -> Value {
    let mut v = serde_json::to_value(args).unwrap_or(Value::Null);
    if let Value::Object(map) = &mut v {
        map.insert("format".into(), serde_json::to_value(output.format).unwrap_or(Value::Null));
    }
    v
}

pub fn emit(table: &Table, config: Value, output: &OutputArgs) -> CmdResult {
    table
        .emit(output.format, &config, output.out.as_deref())
        .map_err(|e| Failure::Numerical(format!("cannot write output: {e}")))
}

pub fn check_phase(phi: f64) -> CmdResult {
    if phi != 0.0 {
        return Err(Failure::Usage(format!("--phi {phi}: only a zero pairing phase is supported")));
    }
    Ok(())
}

pub fn truncation(trunc: f64) -> Result<TruncationConfig, Failure> {
    let cfg = TruncationConfig { threshold: trunc, ..TruncationConfig::default() };
    cfg.validate()?;
    Ok(cfg)
}

/// Evaluates `f` on every point, in parallel, keeping the input order.
pub fn run_points<P, R, F>(points: &[P], jobs: Option<usize>, f: F) -> Result<Vec<R>, Failure>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> R + Sync,
{
    use rayon::prelude::*;
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(&f).collect()))
}

fn grid_points(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn error_cell(e: &KitaevError) -> Cell {
    Cell::Text(e.to_string())
}

pub fn spectrum(a: &SpectrumArgs) -> CmdResult {
    check_phase(a.phi)?;
    let params = KitaevParams::new(a.n, a.w, a.mu, a.delta, a.boundary.into())?;
    let schur = schur_decompose(&build_coupling_matrix(&params)?)?;
    let mut table = Table::new(&["quantity", "index", "value"]);
    for (k, &e) in schur.epsilons.iter().enumerate() {
        table.push(vec![Cell::Text("epsilon".into()), Cell::Int(k as u64), Cell::Float(e)]);
    }
    table.push(vec![Cell::Text("ground_energy".into()), Cell::Empty, Cell::Float(schur.ground_energy())]);
    table.push(vec![Cell::Text("degenerate".into()), Cell::Empty, Cell::Bool(schur.is_degenerate())]);
    if params.boundary == kitaev_core::quadratic::Boundary::Periodic {
        let mut analytic: Vec<f64> = analytic_periodic_energies(&params)?.iter().map(|e| e.abs()).collect();
        analytic.sort_by(|x, y| y.total_cmp(x));
        let dev = analytic.iter().zip(&schur.epsilons).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        for (k, &e) in analytic.iter().enumerate() {
            table.push(vec![Cell::Text("epsilon_analytic".into()), Cell::Int(k as u64), Cell::Float(e)]);
        }
        table.push(vec![Cell::Text("max_deviation".into()), Cell::Empty, Cell::Sci(dev)]);
    }
    emit(&table, config_json(a, &a.output), &a.output)
}

pub fn zscan(a: &ZscanArgs) -> CmdResult {
    check_phase(a.phi)?;
    if a.boundary != crate::BoundaryArg::Open {
        return Err(Failure::Usage("zscan needs open chains".into()));
    }
    let config = SaturationConfig {
        schedule: a.n_schedule.clone(),
        tol: a.tol,
        target: EigenTarget::from(a.target),
        truncation: truncation(a.trunc)?,
    };
    config.validate()?;
    KitaevParams::open(a.n_schedule[0], 1.0, 0.0, a.delta)?;
    let points = grid_points(a.mu.values(), a.two_w.values());
    let results = run_points(&points, a.output.jobs, |&(mu, two_w)| {
        let template = KitaevParams::open(a.n_schedule[0], two_w / 2.0, mu, a.delta)?;
        Ok::<_, KitaevError>((z_saturated(&template, &config)?, z_analytic(&template)))
    })?;
    let mut table = Table::new(&[
        "mu", "two_w", "z", "converged", "n_used", "z_analytic", "abs_diff", "degenerate", "error",
    ]);
    for (&(mu, two_w), r) in points.iter().zip(results) {
        let row = match r {
            Ok((z, za)) => vec![
                Cell::Float(mu),
                Cell::Float(two_w),
                Cell::Z(z.z),
                Cell::Bool(z.converged),
                Cell::Int(z.n_used as u64),
                Cell::Z(za),
                if z.converged { Cell::Sci((z.z - za).abs()) } else { Cell::Empty },
                Cell::Bool(z.degenerate),
                Cell::Empty,
            ],
            Err(e) => {
                let mut row = vec![Cell::Float(mu), Cell::Float(two_w)];
                row.extend(std::iter::repeat_with(|| Cell::Empty).take(6));
                row.push(error_cell(&e));
                row
            }
        };
        table.push(row);
    }
    emit(&table, config_json(a, &a.output), &a.output)
}

struct EnergyPoint {
    e_tensor: Option<f64>,
    e_exact: f64,
    degenerate: bool,
}

pub fn energy_accuracy(a: &SurfaceArgs) -> CmdResult {
    check_phase(a.phi)?;
    let cfg = truncation(a.trunc)?;
    KitaevParams::new(a.n, 1.0, 0.0, a.delta, a.boundary.into())?;
    let points = grid_points(a.mu.values(), a.w.values());
    let results = run_points(&points, a.output.jobs, |&(mu, w)| {
        let params = KitaevParams::new(a.n, w, mu, a.delta, a.boundary.into())?;
        let schur = schur_decompose(&build_coupling_matrix(&params)?)?;
        let e_exact = schur.ground_energy();
        if schur.is_degenerate() {
            return Ok(EnergyPoint { e_tensor: None, e_exact, degenerate: true });
        }
        let solved = solve_eigenstate(&params, EigenTarget::Ground, &cfg)?;
        let e_tensor = solved.state.energy_expectation(&params)?;
        Ok::<_, KitaevError>(EnergyPoint { e_tensor: Some(e_tensor), e_exact, degenerate: false })
    })?;
    let mut table =
        Table::new(&["mu", "w", "e_tensor", "e_exact", "abs_diff", "degenerate", "skipped", "error"]);
    for (&(mu, w), r) in points.iter().zip(results) {
        let row = match r {
            Ok(p) => vec![
                Cell::Float(mu),
                Cell::Float(w),
                p.e_tensor.map_or(Cell::Empty, Cell::Float),
                Cell::Float(p.e_exact),
                p.e_tensor.map_or(Cell::Empty, |e| Cell::Sci((e - p.e_exact).abs())),
                Cell::Bool(p.degenerate),
                Cell::Bool(p.e_tensor.is_none()),
                Cell::Empty,
            ],
            Err(e) => vec![
                Cell::Float(mu),
                Cell::Float(w),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Bool(true),
                error_cell(&e),
            ],
        };
        table.push(row);
    }
    emit(&table, config_json(a, &a.output), &a.output)
}

pub fn parity_label(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

pub fn particles(a: &SurfaceArgs) -> CmdResult {
    check_phase(a.phi)?;
    let cfg = truncation(a.trunc)?;
    KitaevParams::new(a.n, 1.0, 0.0, a.delta, a.boundary.into())?;
    let points = grid_points(a.mu.values(), a.w.values());
    let results = run_points(&points, a.output.jobs, |&(mu, w)| {
        let params = KitaevParams::new(a.n, w, mu, a.delta, a.boundary.into())?;
        let solved = solve_eigenstate(&params, EigenTarget::Ground, &cfg)?;
        let n = mean_particle_number(&solved.state)?;
        Ok::<_, KitaevError>((n, solved.parity, solved.degenerate))
    })?;
    let mut table = Table::new(&["mu", "w", "mean_n", "parity", "degenerate", "error"]);
    for (&(mu, w), r) in points.iter().zip(results) {
        let row = match r {
            Ok((n, parity, degenerate)) => vec![
                Cell::Float(mu),
                Cell::Float(w),
                Cell::Float(n),
                Cell::Text(parity_label(parity).into()),
                Cell::Bool(degenerate),
                Cell::Empty,
            ],
            Err(e) => vec![
                Cell::Float(mu),
                Cell::Float(w),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                error_cell(&e),
            ],
        };
        table.push(row);
    }
    emit(&table, config_json(a, &a.output), &a.output)
}
