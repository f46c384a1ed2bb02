use serde::Serialize;

use super::config::{OutputFormat, PresetKind, RunConfig};
use super::output::{comment, csv_row, emit, format_float, format_opt, json, target};
use super::CliError;
use crate::ladder::{
    apply_minus_differential, apply_plus_differential, casimir_check, commutator_check,
    default_y_grid, CasimirReport, CommutatorReport, LadderCoeffs, LadderFit, LadderNormalization,
};
use crate::oracle::{
    adaptive_config, bound_state_census, convergence_study, default_config, solve_bound_states,
    ConvergenceStatus, DEFAULT_CELLS, STUDY_CELLS,
};
use crate::par;
use crate::potential::{Potential, PotentialParams};
use crate::spectrum::{k_ell_n, BoundState, QuantumNumbers};
use crate::wavefunction::{
    node_count, norm_check, ode_residual, overlap_r, sample, verification_grid, y_extent,
    RadialGrid,
};

pub const ALGEBRA_TOL: f64 = 1e-12;
pub const FIT_TOL: f64 = 1e-9;
pub const ENERGY_ABS_TOL: f64 = 5e-5;
pub const ENERGY_REL_TOL: f64 = 5e-5;
pub const ORDER_TARGET: f64 = 2.0;
pub const ORDER_BAND: f64 = 0.2;
pub const NORM_TOL: f64 = 1e-10;
pub const ODE_TOL: f64 = 1e-6;
/// `verify --coarsen` divides the oracle cell count by this.
pub const COARSEN_FACTOR: usize = 100;

fn closed_form(config: &RunConfig) -> Result<PotentialParams, CliError> {
    match config.build_potential()? {
        Potential::Mie(p) => Ok(p),
        Potential::General { .. } => Err(CliError::Domain(crate::Error::Domain(
            "the two-exponent Mie preset has no closed-form spectrum; use verify".into(),
        ))),
    }
}

/// `(N, ℓ)` pairs in report order.
fn channels(config: &RunConfig) -> Vec<(u32, u32)> {
    let mut dims = config.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .flat_map(|d| (0..=config.ell_max).map(move |l| (d, l)))
        .collect()
}

fn invalid_rows(bad: usize, total: usize, first: &str) -> CliError {
    CliError::Domain(crate::Error::Domain(format!(
        "{bad} of {total} requested channels are invalid (first: {first})"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLine {
    #[serde(rename = "N")]
    pub dim: u32,
    pub ell: u32,
    pub n: u32,
    pub k: Option<f64>,
    pub eps: Option<f64>,
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    pub status: String,
}

pub fn spectrum_rows(config: &RunConfig) -> Result<Vec<SpectrumLine>, CliError> {
    let p = closed_form(config)?;
    let nested = par::map(&channels(config), |&(dim, ell)| {
        let k = k_ell_n(&p, ell, dim).ok();
        (0..=config.n_max)
            .map(
                |n| match BoundState::new(p, QuantumNumbers::new(n, ell, dim)) {
                    Ok(s) => SpectrumLine {
                        dim,
                        ell,
                        n,
                        k: Some(s.k),
                        eps: Some(s.eps),
                        energy: Some(s.energy),
                        status: "ok".into(),
                    },
                    Err(e) => SpectrumLine {
                        dim,
                        ell,
                        n,
                        k,
                        eps: None,
                        energy: None,
                        status: e.kind().into(),
                    },
                },
            )
            .collect::<Vec<_>>()
    });
    Ok(nested.into_iter().flatten().collect())
}

pub(crate) fn cmd_spectrum(config: &RunConfig) -> Result<(), CliError> {
    let rows = spectrum_rows(config)?;
    let text = match config.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            csv_row(&mut out, &["N", "ell", "n", "k", "eps", "E", "status"]);
            for r in &rows {
                csv_row(
                    &mut out,
                    &[
                        r.dim.to_string(),
                        r.ell.to_string(),
                        r.n.to_string(),
                        format_opt(r.k),
                        format_opt(r.eps),
                        format_opt(r.energy),
                        r.status.clone(),
                    ],
                );
            }
            out
        }
        OutputFormat::Json => json(&serde_json::json!({ "config": config, "rows": rows })),
    };
    let name = match config.format {
        OutputFormat::Csv => "spectrum.csv",
        OutputFormat::Json => "spectrum.json",
    };
    emit(&target(config, name), &text)?;
    match rows.iter().find(|r| r.status != "ok") {
        Some(first) => {
            let bad = rows.iter().filter(|r| r.status != "ok").count();
            Err(invalid_rows(bad, rows.len(), &first.status))
        }
        None => Ok(()),
    }
}

/// Grid used by `wavefunction` when no override is given: `y = 2εr` from
/// 0.01 to past the decayed envelope.
pub fn wavefunction_grid(state: &BoundState) -> RadialGrid {
    let scale = 2.0 * state.eps;
    RadialGrid {
        r_min: 0.01 / scale,
        r_max: y_extent(state.q.n, state.alpha) / scale,
        count: 2001,
    }
}

pub(crate) fn cmd_wavefunction(
    config: &RunConfig,
    n: u32,
    ell: u32,
    dim: u32,
    with_residual: bool,
) -> Result<(), CliError> {
    let p = closed_form(config)?;
    let state = BoundState::new(p, QuantumNumbers::new(n, ell, dim))?;
    let grid = config.grid.radial(wavefunction_grid(&state))?;
    let samples = sample(&state, &grid);
    let residual: Option<Vec<Option<f64>>> = if with_residual {
        let rep = ode_residual(&state, &grid)?;
        let mut column = vec![None; grid.count];
        for (i, v) in rep.residual.values.iter().enumerate() {
            column[i + 2] = Some(*v);
        }
        Some(column)
    } else {
        None
    };
    let points = grid.points();
    let text = match config.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            comment(
                &mut out,
                &format!(
                    "n={n} ell={ell} N={dim} zeta={} k={} eps={} E={}",
                    format_float(state.zeta),
                    format_float(state.k),
                    format_float(state.eps),
                    format_float(state.energy)
                ),
            );
            match &residual {
                Some(_) => csv_row(&mut out, &["r", "R", "residual"]),
                None => csv_row(&mut out, &["r", "R"]),
            }
            for (i, (r, v)) in points.iter().zip(&samples.values).enumerate() {
                let mut cells = vec![format_float(*r), format_float(*v)];
                if let Some(col) = &residual {
                    cells.push(format_opt(col[i]));
                }
                csv_row(&mut out, &cells);
            }
            out
        }
        OutputFormat::Json => json(&serde_json::json!({
            "config": config,
            "state": state,
            "grid": grid,
            "r": points,
            "R": samples.values,
            "residual": residual,
        })),
    };
    let ext = match config.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    emit(
        &target(config, &format!("wavefunction_n{n}_l{ell}_N{dim}.{ext}")),
        &text,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitEntry {
    pub normalization: LadderNormalization,
    pub fitted: f64,
    pub residual: f64,
    pub lambda: f64,
    pub derived: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<f64>,
}

impl From<&LadderFit> for FitEntry {
    fn from(f: &LadderFit) -> Self {
        Self {
            normalization: f.normalization,
            fitted: f.fitted,
            residual: f.residual,
            lambda: f.lambda,
            derived: f.derived,
            printed: f.printed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderLevel {
    #[serde(flatten)]
    pub coefficients: LadderCoeffs,
    pub lowering: Vec<FitEntry>,
    pub raising: Vec<FitEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderChannel {
    #[serde(rename = "N")]
    pub dim: u32,
    pub ell: u32,
    pub status: String,
    pub k: Option<f64>,
    pub levels: Vec<LadderLevel>,
    pub commutator: Option<CommutatorReport>,
    pub casimir: Option<CasimirReport>,
    pub max_algebra_residual: f64,
    pub max_fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub config: RunConfig,
    pub algebra_tolerance: f64,
    pub fit_tolerance: f64,
    pub channels: Vec<LadderChannel>,
    pub pass: bool,
}

fn ladder_channel(
    p: PotentialParams,
    dim: u32,
    ell: u32,
    n_max: u32,
) -> crate::Result<LadderChannel> {
    let ground = BoundState::new(p, QuantumNumbers::new(0, ell, dim))?;
    let (k, top) = (ground.k, n_max.max(1) + 1);
    let commutator = commutator_check(k, dim, top)?;
    let casimir = casimir_check(k, dim, top)?;
    let grid = default_y_grid(n_max, ground.alpha);
    let levels = (0..=n_max)
        .map(|n| {
            let s = ground.with_n(n)?;
            let mut lowering = Vec::new();
            let mut raising = Vec::new();
            for norm in LadderNormalization::ALL {
                lowering.push(FitEntry::from(&apply_minus_differential(&s, &grid, norm)?));
                raising.push(FitEntry::from(&apply_plus_differential(&s, &grid, norm)?));
            }
            Ok(LadderLevel {
                coefficients: LadderCoeffs::new(n, k, dim)?,
                lowering,
                raising,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let max_fit_residual = levels
        .iter()
        .flat_map(|l| l.lowering.iter().chain(&l.raising))
        .map(|f| f.residual)
        .fold(0.0, f64::max);
    Ok(LadderChannel {
        dim,
        ell,
        status: "ok".into(),
        k: Some(k),
        levels,
        max_algebra_residual: commutator.max_residual.max(casimir.max_residual),
        commutator: Some(commutator),
        casimir: Some(casimir),
        max_fit_residual,
    })
}

pub fn ladder_report(config: &RunConfig) -> Result<LadderReport, CliError> {
    let p = closed_form(config)?;
    let channels = par::map(&channels(config), |&(dim, ell)| {
        ladder_channel(p, dim, ell, config.n_max).unwrap_or_else(|e| LadderChannel {
            dim,
            ell,
            status: e.kind().into(),
            k: k_ell_n(&p, ell, dim).ok(),
            levels: Vec::new(),
            commutator: None,
            casimir: None,
            max_algebra_residual: 0.0,
            max_fit_residual: 0.0,
        })
    });
    let pass = channels.iter().all(|c| {
        c.status == "ok" && c.max_algebra_residual <= ALGEBRA_TOL && c.max_fit_residual <= FIT_TOL
    });
    Ok(LadderReport {
        config: config.clone(),
        algebra_tolerance: ALGEBRA_TOL,
        fit_tolerance: FIT_TOL,
        channels,
        pass,
    })
}

pub(crate) fn cmd_ladder_check(config: &RunConfig) -> Result<(), CliError> {
    let report = ladder_report(config)?;
    emit(&target(config, "ladder_check.json"), &json(&report))?;
    let invalid: Vec<_> = report
        .channels
        .iter()
        .filter(|c| c.status != "ok")
        .collect();
    if let Some(first) = invalid.first() {
        return Err(invalid_rows(
            invalid.len(),
            report.channels.len(),
            &first.status,
        ));
    }
    if !report.pass {
        return Err(CliError::ChecksFailed(
            "ladder residuals exceed tolerance; see report".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub status: ConvergenceStatus,
    pub orders: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyLevel {
    pub n: u32,
    pub closed_form: f64,
    pub finite_difference: Option<f64>,
    pub delta: Option<f64>,
    pub tolerance: f64,
    pub convergence: Option<Convergence>,
    pub norm: f64,
    pub ode_residual: f64,
    pub nodes: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyChannel {
    pub potential: String,
    #[serde(rename = "N")]
    pub dim: u32,
    pub ell: u32,
    pub status: String,
    pub levels: Vec<VerifyLevel>,
    /// Largest `|∫ R_m R_n r^{N−1} dr|` over `m ≠ n ≤ n_max`.
    pub max_overlap: Option<f64>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericLevel {
    pub n: u32,
    pub finite_difference: f64,
    /// Richardson extrapolation from the two finest study grids.
    pub extrapolated: f64,
    pub convergence: Convergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericChannel {
    pub potential: String,
    #[serde(rename = "N")]
    pub dim: u32,
    pub ell: u32,
    pub r_outer: f64,
    /// Sturm count of eigenvalues below the threshold.
    pub census: usize,
    pub levels: Vec<NumericLevel>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub energy_abs: f64,
    pub energy_rel: f64,
    pub order_target: f64,
    pub order_band: f64,
    pub norm: f64,
    pub overlap: f64,
    pub ode_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub suite: Vec<String>,
    pub cells: usize,
    pub study_cells: usize,
    pub coarsened: bool,
    pub tolerances: Tolerances,
    pub closed_form: Vec<VerifyChannel>,
    pub numeric_only: Vec<NumericChannel>,
    pub failures: Vec<String>,
    pub pass: bool,
}

fn order_ok(c: &Convergence) -> bool {
    match c.status {
        ConvergenceStatus::AtFloor => true,
        ConvergenceStatus::NonMonotone => false,
        ConvergenceStatus::Estimated => c
            .orders
            .iter()
            .all(|p| (p - ORDER_TARGET).abs() <= ORDER_BAND),
    }
}

struct Grids {
    cells: usize,
    study: usize,
}

fn verify_closed(
    name: &str,
    p: PotentialParams,
    dim: u32,
    ell: u32,
    n_max: u32,
    grids: &Grids,
) -> VerifyChannel {
    let mut ch = VerifyChannel {
        potential: name.into(),
        dim,
        ell,
        status: "ok".into(),
        levels: Vec::new(),
        max_overlap: None,
        failures: Vec::new(),
    };
    let states: crate::Result<Vec<BoundState>> = (0..=n_max)
        .map(|n| BoundState::new(p, QuantumNumbers::new(n, ell, dim)))
        .collect();
    let states = match states {
        Ok(s) => s,
        Err(e) => {
            ch.status = e.kind().into();
            return ch;
        }
    };
    let pot = Potential::Mie(p);
    let fd = default_config(&pot, ell, dim, n_max, grids.cells)
        .and_then(|c| solve_bound_states(&pot, ell, dim, &c));
    let fd = match fd {
        Ok(v) => v,
        Err(e) => {
            ch.failures.push(format!("oracle: {e}"));
            Vec::new()
        }
    };
    let study = default_config(&pot, ell, dim, n_max, grids.study);
    for s in &states {
        let n = s.q.n;
        let tolerance = ENERGY_ABS_TOL.max(ENERGY_REL_TOL * s.energy.abs());
        let e_fd = fd.get(n as usize).copied();
        let delta = e_fd.map(|e| (e - s.energy).abs());
        let convergence = study.as_ref().ok().and_then(|base| {
            convergence_study(&pot, ell, dim, base, 2, n as usize, Some(s.energy))
                .ok()
                .map(|r| Convergence {
                    status: r.status,
                    orders: r.orders,
                })
        });
        let norm = norm_check(s);
        let ode = ode_residual(s, &verification_grid(s))
            .map(|r| r.relative)
            .unwrap_or(f64::INFINITY);
        let nodes = node_count(s);
        let mut fails = Vec::new();
        match delta {
            None => fails.push("no bound finite-difference level".to_string()),
            Some(d) if d > tolerance => fails.push(format!("|dE| = {d:.3e} > {tolerance:.1e}")),
            _ => {}
        }
        match &convergence {
            None => fails.push("convergence study failed".into()),
            Some(c) if !order_ok(c) => {
                fails.push(format!("convergence {:?} {:?}", c.status, c.orders))
            }
            _ => {}
        }
        if (norm - 1.0).abs() > NORM_TOL {
            fails.push(format!("norm {norm}"));
        }
        if ode > ODE_TOL {
            fails.push(format!("ODE residual {ode:.2e}"));
        }
        if nodes != n as usize {
            fails.push(format!("{nodes} nodes"));
        }
        for f in &fails {
            ch.failures
                .push(format!("{name} N={dim} l={ell} n={n}: {f}"));
        }
        ch.levels.push(VerifyLevel {
            n,
            closed_form: s.energy,
            finite_difference: e_fd,
            delta,
            tolerance,
            convergence,
            norm,
            ode_residual: ode,
            nodes,
            pass: fails.is_empty(),
        });
    }
    let mut max_overlap = 0.0_f64;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            max_overlap = max_overlap.max(overlap_r(a, b).map(f64::abs).unwrap_or(f64::INFINITY));
        }
    }
    if max_overlap > NORM_TOL {
        ch.failures
            .push(format!("{name} N={dim} l={ell}: overlap {max_overlap:.2e}"));
    }
    ch.max_overlap = Some(max_overlap);
    ch
}

fn verify_numeric(
    name: &str,
    pot: Potential,
    dim: u32,
    ell: u32,
    n_max: u32,
    grids: &Grids,
) -> NumericChannel {
    let mut ch = NumericChannel {
        potential: name.into(),
        dim,
        ell,
        r_outer: 0.0,
        census: 0,
        levels: Vec::new(),
        failures: Vec::new(),
    };
    let result = (|| -> crate::Result<()> {
        let config = adaptive_config(&pot, ell, dim, n_max, grids.cells)?;
        let h = config.grid.spacing();
        ch.r_outer = config.grid.r_max + 0.5 * h;
        ch.census = bound_state_census(&pot, ell, dim, &config)?;
        let fd = solve_bound_states(&pot, ell, dim, &config)?;
        let base =
            crate::oracle::OracleConfig::cell_centered(ch.r_outer, grids.study, config.count)?;
        for (n, &e) in fd.iter().enumerate() {
            let study = convergence_study(&pot, ell, dim, &base, 3, n, None)?;
            let k = study.energies.len();
            let extrapolated = (4.0 * study.energies[k - 1] - study.energies[k - 2]) / 3.0;
            let convergence = Convergence {
                status: study.status,
                orders: study.orders,
            };
            if !order_ok(&convergence) {
                ch.failures.push(format!(
                    "{name} N={dim} l={ell} n={n}: convergence {:?} {:?}",
                    convergence.status, convergence.orders
                ));
            }
            ch.levels.push(NumericLevel {
                n: n as u32,
                finite_difference: e,
                extrapolated,
                convergence,
            });
        }
        Ok(())
    })();
    if let Err(e) = result {
        ch.failures.push(format!("{name} N={dim} l={ell}: {e}"));
    }
    ch
}

/// Runs the closed-form and numeric-only verification. `suite` replaces the
/// configured potential by the standard set (Coulomb, Kratzer-Fues and the
/// two-exponent Mie form with exponents 4 and 2).
pub fn verify_report(
    config: &RunConfig,
    suite: bool,
    coarsen: bool,
) -> Result<VerifyReport, CliError> {
    let specs = if suite {
        vec![
            PresetKind::Coulomb.defaults(),
            PresetKind::KratzerFues.defaults(),
            PresetKind::Mie.defaults(),
        ]
    } else {
        vec![config.potential]
    };
    let base_cells = config.grid.cells.unwrap_or(DEFAULT_CELLS);
    let grids = Grids {
        cells: if coarsen {
            (base_cells / COARSEN_FACTOR).max(3)
        } else {
            base_cells
        },
        study: STUDY_CELLS.min(base_cells),
    };
    let mut jobs = Vec::new();
    for spec in &specs {
        let pot = spec.build(config.units)?;
        for (dim, ell) in channels(config) {
            jobs.push((spec.preset.name(), pot, dim, ell));
        }
    }
    let closed_jobs: Vec<_> = jobs.iter().filter(|j| j.1.as_mie().is_some()).collect();
    let numeric_jobs: Vec<_> = jobs.iter().filter(|j| j.1.as_mie().is_none()).collect();
    let closed_form = par::map(&closed_jobs, |&&(name, pot, dim, ell)| {
        let p = *pot.as_mie().expect("filtered");
        verify_closed(name, p, dim, ell, config.n_max, &grids)
    });
    let numeric_only = par::map(&numeric_jobs, |&&(name, pot, dim, ell)| {
        verify_numeric(name, pot, dim, ell, config.n_max, &grids)
    });
    let failures: Vec<String> = closed_form
        .iter()
        .flat_map(|c| c.failures.iter())
        .chain(numeric_only.iter().flat_map(|c| c.failures.iter()))
        .cloned()
        .collect();
    let pass = failures.is_empty() && closed_form.iter().all(|c| c.status == "ok");
    Ok(VerifyReport {
        config: config.clone(),
        suite: specs.iter().map(|s| s.preset.name().to_string()).collect(),
        cells: grids.cells,
        study_cells: grids.study,
        coarsened: coarsen,
        tolerances: Tolerances {
            energy_abs: ENERGY_ABS_TOL,
            energy_rel: ENERGY_REL_TOL,
            order_target: ORDER_TARGET,
            order_band: ORDER_BAND,
            norm: NORM_TOL,
            overlap: NORM_TOL,
            ode_residual: ODE_TOL,
        },
        closed_form,
        numeric_only,
        failures,
        pass,
    })
}

pub(crate) fn cmd_verify(config: &RunConfig, suite: bool, coarsen: bool) -> Result<(), CliError> {
    let report = verify_report(config, suite, coarsen)?;
    emit(&target(config, "verify.json"), &json(&report))?;
    let invalid: Vec<_> = report
        .closed_form
        .iter()
        .filter(|c| c.status != "ok")
        .collect();
    if let Some(first) = invalid.first() {
        return Err(invalid_rows(
            invalid.len(),
            report.closed_form.len(),
            &first.status,
        ));
    }
    if !report.pass {
        let listed: Vec<&str> = report
            .failures
            .iter()
            .take(10)
            .map(String::as_str)
            .collect();
        return Err(CliError::ChecksFailed(format!(
            "{} verification failures:\n  {}",
            report.failures.len(),
            listed.join("\n  ")
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct PresetEntry {
    name: &'static str,
    parameters: super::PotentialSpec,
    potential: Potential,
}

pub(crate) fn cmd_presets() -> Result<(), CliError> {
    let entries: Vec<PresetEntry> = PresetKind::ALL
        .iter()
        .map(|&kind| {
            let parameters = kind.defaults();
            Ok(PresetEntry {
                name: kind.name(),
                parameters,
                potential: parameters.build(Default::default())?,
            })
        })
        .collect::<crate::Result<_>>()?;
    emit(&super::output::Target::Stdout, &json(&entries))
}
