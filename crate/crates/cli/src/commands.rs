//! The four subcommands, each a pure function of the resolved configuration.

use std::fmt::Write as _;

use qes_core::qes::{solve_exact_spectrum, QesModel};
use qes_core::reference::{reference_spectrum, ReferenceSpectrum};
use qes_core::validation::validation_log;
use qes_core::variational::{identify_states, MinimumKind, Parity};
use qes_core::{DeltaMode, QesError, VariationalError};
use thiserror::Error;

use crate::config::{ConfigError, GridConfig, RunConfig};
use crate::report::{
    fmt9, sig9, Approximation, ClosedFormRow, ExactSection, ExactState, ReferenceLevel, ReferenceSection, Report,
    ValidationRow, VariationalRow, VariationalSection,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(#[from] qes_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("cannot serialize output: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn compute(e: impl Into<qes_core::Error>) -> CliError {
    CliError::Compute(e.into())
}

fn variational(e: VariationalError) -> CliError {
    match e {
        VariationalError::InconsistentDegree { .. } | VariationalError::OddParityWithBarrier => {
            ConfigError::Model(e.to_string()).into()
        }
        VariationalError::EmptyWindow { lo, hi, step } => ConfigError::Window { lo, hi, step }.into(),
        other => compute(other),
    }
}

fn mode_name(mode: DeltaMode) -> &'static str {
    match mode {
        DeltaMode::Raw => "raw",
        DeltaMode::Normalized => "normalized",
    }
}

pub fn exact(config: &RunConfig) -> Result<ExactSection, CliError> {
    let model = config.model.qes_model()?;
    let s = solve_exact_spectrum(&model).map_err(|e| match e {
        QesError::OddSectorUnavailable(_) => ConfigError::Model(e.to_string()).into(),
        other => compute(other),
    })?;
    let var = if s.energy_shift == 0.0 { "E" } else { "E~" };
    let termination = s.termination.display_with(var).to_string();
    Ok(ExactSection {
        termination,
        energy_shift: sig9(s.energy_shift),
        exact_arithmetic: s.exact_arithmetic,
        states: s
            .entries
            .iter()
            .map(|e| ExactState {
                energy: sig9(e.energy),
                energy_exact: e.energy_exact.as_ref().map(|r| r.to_string()),
                node_count: e.node_count,
                coefficients: e.polynomial.coeffs().iter().map(|c| c.to_string()).collect(),
                polynomial: e.polynomial.to_string(),
            })
            .collect(),
        closed_form_checks: s
            .closed_form_checks
            .iter()
            .map(|c| ClosedFormRow {
                label: c.label.clone(),
                closed_form: c.closed_form.iter().copied().map(sig9).collect(),
                solved: c.solved.iter().copied().map(sig9).collect(),
                max_abs_diff: sig9(c.max_abs_diff),
                agrees: c.agrees,
            })
            .collect(),
    })
}

/// Curve text: `# E delta`, one sample per line, then a commented minima block.
pub fn scan(config: &RunConfig) -> Result<String, CliError> {
    let model = config.model.qes_model()?;
    config.scan.validate()?;
    let s = &config.scan;
    let id = identify_states(&model, s.parity.into(), s.degree, s.window(), s.step, s.mode()).map_err(variational)?;
    let mut out = String::from("# E delta\n");
    for p in &id.curve.samples {
        let _ = writeln!(out, "{} {}", fmt9(p.energy), fmt9(p.delta));
    }
    let _ = writeln!(out, "# minima: E delta nodes kind physical");
    for m in &id.curve.minima {
        let kind = match m.kind {
            MinimumKind::ZeroCrossing => "zero_crossing",
            MinimumKind::LocalMinimum => "local_minimum",
        };
        let _ = writeln!(out, "# {} {} {} {kind} {}", fmt9(m.energy), fmt9(m.delta), m.node_count, m.physical);
    }
    let _ = writeln!(out, "# states: level E delta");
    for st in &id.states {
        let _ = writeln!(out, "# {} {} {}", st.level, fmt9(st.energy), fmt9(st.delta));
    }
    Ok(out)
}

fn reference_levels(model: &QesModel, grid: &GridConfig, count: usize) -> Result<ReferenceSpectrum, CliError> {
    grid.validate()?;
    reference_spectrum(model, grid.length, grid.points, count, grid.tol).map_err(compute)
}

fn reference_section(grid: &GridConfig, spectrum: Option<&ReferenceSpectrum>, half_line: bool) -> ReferenceSection {
    ReferenceSection {
        enabled: spectrum.is_some(),
        length: grid.length,
        points: grid.points,
        fine_points: 2 * grid.points + 1,
        tol: grid.tol,
        half_line,
        labels_verified: spectrum.is_some_and(|s| s.labels_verified()),
        levels: spectrum
            .map(|s| {
                s.eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(level, &e)| ReferenceLevel { level, energy: sig9(e) })
                    .collect()
            })
            .unwrap_or_default(),
    }
}

pub fn reference(config: &RunConfig) -> Result<ReferenceSection, CliError> {
    let model = config.model.model()?;
    let spectrum = reference_levels(&model, &config.grid, config.grid.levels)?;
    Ok(reference_section(&config.grid, Some(&spectrum), model.has_barrier()))
}

fn variational_rows(model: &QesModel, config: &RunConfig, spectrum: Option<&ReferenceSpectrum>) -> Result<Vec<VariationalRow>, CliError> {
    let mode = config.scan.mode();
    let mut rows = Vec::new();
    for lw in &config.report.levels {
        let parity = if model.has_barrier() || lw.level % 2 == 0 { Parity::Even } else { Parity::Odd };
        let bit = usize::from(parity == Parity::Odd);
        let e_ref = spectrum.and_then(|s| s.eigenvalues.get(lw.level).copied());
        let mut approximations = Vec::new();
        for &degree in config.report.degrees.iter().filter(|&&d| d % 2 == bit) {
            let window = (lw.window[0], lw.window[1]);
            let id = identify_states(model, parity, degree, window, config.scan.step, mode).map_err(variational)?;
            let found = id.states.iter().find(|s| s.level == lw.level);
            let deviation = match (found, e_ref) {
                (Some(s), Some(r)) => Some((s.energy - r).abs() / r.abs()),
                _ => None,
            };
            approximations.push(Approximation {
                degree,
                energy: found.map(|s| sig9(s.energy)),
                delta: found.map(|s| sig9(s.delta)),
                deviation: deviation.map(sig9),
                deviation_percent: deviation.map(|d| sig9(100.0 * d)),
            });
        }
        rows.push(VariationalRow {
            level: lw.level,
            window: lw.window,
            reference: e_ref.map(sig9),
            approximations,
        });
    }
    Ok(rows)
}

pub fn report(config: &RunConfig) -> Result<Report, CliError> {
    let model = config.model.qes_model()?;
    config.report.validate()?;
    if !(config.scan.step > 0.0 && config.scan.step.is_finite()) {
        let [lo, hi] = config.scan.window;
        return Err(ConfigError::Window { lo, hi, step: config.scan.step }.into());
    }
    let exact = exact(config)?;
    let spectrum = if config.report.reference {
        let needed = config.report.levels.iter().map(|l| l.level + 1).max().unwrap_or(0);
        Some(reference_levels(&model, &config.grid, config.grid.levels.max(needed))?)
    } else {
        None
    };
    let rows = variational_rows(&model, config, spectrum.as_ref())?;
    let validation = validation_log()
        .map_err(compute)?
        .into_iter()
        .map(|v| ValidationRow {
            name: v.name,
            quoted: v.quoted,
            derived: v.derived,
            status: v.status.as_str().to_string(),
            detail: v.detail,
        })
        .collect();
    Ok(Report {
        model: config.model,
        exact,
        variational: VariationalSection {
            mode: mode_name(config.scan.mode()).to_string(),
            step: config.scan.step,
            reference_available: spectrum.is_some(),
            rows,
        },
        reference: reference_section(&config.grid, spectrum.as_ref(), model.has_barrier()),
        validation,
    })
}
