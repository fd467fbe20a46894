//! Subcommand implementations. Each writes its files into `out` and returns
//! the computed data so callers (and tests) can inspect it.

use std::path::{Path, PathBuf};

use eitgap::bandstructure::{band_edges, band_scan, BandEdges, BandPoint, GapSearch};
use eitgap::dynamics::{evolve as run_evolve, fields_from_polariton, write_binary, EvolveOptions, Snapshot, TraceRow};
use eitgap::protocol::{run_protocol, validity_report, ProtocolResult, ValidityReport};
use eitgap::reflection::{reflection_spectrum, summarize, SpectrumSummary};
use eitgap::{angular_to_hz, PeriodCell, PolaritonState, Sample, SpectrumPoint, Trajectory};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::{num, write_atomic, write_csv, write_key_values, Column, Metadata};
use crate::svg;

fn svg_on(cfg: &Config) -> bool {
    cfg.output().svg.unwrap_or(true)
}

fn write_svg(path: &Path, doc: String) -> CliResult<()> {
    write_atomic(path, |w| w.write_all(doc.as_bytes()))
}

pub struct BandOutput {
    /// (analytic, numeric) per grid frequency.
    pub rows: Vec<(BandPoint, BandPoint)>,
    /// `None` when the light shift is zero.
    pub edges: Option<BandEdges>,
    pub files: Vec<PathBuf>,
}

pub fn band(cfg: &Config, out: &Path) -> CliResult<BandOutput> {
    let mm = cfg.modulated_medium()?;
    let omegas = cfg.spectrum_grid()?;
    let cell = PeriodCell::new(&mm, cfg.slabs()).map_err(|e| CliError::from_core("spectrum", e))?;
    let rows = band_scan(&omegas, &cell, &mm)?;
    let edges = if mm.light_shift() != 0.0 {
        Some(band_edges(&cell, &mm)?)
    } else {
        None
    };

    let mut meta = Metadata::new("band", cfg);
    meta.derived("light_shift_rad_s", mm.light_shift())
        .derived("period_m", mm.period())
        .derived("slowdown", mm.slowdown()?)
        .derived("slabs", cell.slab_count);
    match edges.map(|e| e.numeric) {
        Some(GapSearch::Resolved { lower, upper }) => {
            meta.derived("numeric_gap_rad_s", format!("{lower} {upper}"));
        }
        Some(GapSearch::NoGapResolved) => {
            meta.derived("numeric_gap_rad_s", "unresolved");
        }
        None => {}
    }
    let cols: [Column; 7] = [
        ("omega", "rad/s"),
        ("k_real_offset", "rad/m"),
        ("k_imag", "rad/m"),
        ("in_gap", "bool"),
        ("numeric_k_real_offset", "rad/m"),
        ("numeric_k_imag", "rad/m"),
        ("numeric_in_gap", "bool"),
    ];
    let csv = out.join("band.csv");
    write_csv(
        &csv,
        &meta,
        &cols,
        rows.iter().map(|(a, n)| {
            vec![
                num(a.omega),
                num(a.k_real),
                num(a.k_imag),
                a.in_gap.to_string(),
                num(n.k_real),
                num(n.k_imag),
                n.in_gap.to_string(),
            ]
        }),
    )?;
    let mut files = vec![csv];
    if svg_on(cfg) {
        let p = out.join("band.svg");
        let pts = |f: fn(&BandPoint) -> f64, numeric: bool| -> Vec<(f64, f64)> {
            rows.iter()
                .map(|r| if numeric { &r.1 } else { &r.0 })
                .map(|b| (angular_to_hz(b.omega), f(b)))
                .collect()
        };
        write_svg(
            &p,
            svg::line_chart(
                "Bloch attenuation Im K",
                "detuning (Hz)",
                "Im K (rad/m)",
                &[("analytic", pts(|b| b.k_imag, false)), ("numeric", pts(|b| b.k_imag, true))],
            ),
        )?;
        files.push(p);
    }
    Ok(BandOutput { rows, edges, files })
}

pub struct ReflectOutput {
    pub spectrum: Vec<SpectrumPoint>,
    pub summary: Option<SpectrumSummary>,
    pub periods: u64,
    pub files: Vec<PathBuf>,
}

pub fn reflect(cfg: &Config, out: &Path) -> CliResult<ReflectOutput> {
    let mm = cfg.modulated_medium()?;
    let omegas = cfg.spectrum_grid()?;
    let mut sample = Sample::new(mm, cfg.slabs()).map_err(|e| CliError::from_core("spectrum", e))?;
    if let Some(n) = cfg.periods() {
        sample = sample.with_periods(n).map_err(|e| CliError::from_core("spectrum", e))?;
    }
    let spectrum = reflection_spectrum(&omegas, &sample)?;
    let summary = summarize(&spectrum);

    let mut meta = Metadata::new("reflect", cfg);
    meta.derived("light_shift_rad_s", mm.light_shift())
        .derived("period_m", mm.period())
        .derived("periods", sample.periods)
        .derived("effective_length_m", sample.effective_length())
        .derived("slowdown", mm.slowdown()?)
        .derived("slabs", sample.cell.slab_count);
    if let Some(s) = &summary {
        meta.derived("peak_reflectivity", s.peak_reflectivity)
            .derived("peak_omega_rad_s", s.peak_omega);
        if let Some(w) = s.fwhm {
            meta.derived("fwhm_rad_s", w);
        }
    }
    let cols: [Column; 8] = [
        ("omega", "rad/s"),
        ("re_r", "1"),
        ("im_r", "1"),
        ("re_t", "1"),
        ("im_t", "1"),
        ("reflectivity", "1"),
        ("transmissivity", "1"),
        ("absorption", "1"),
    ];
    let csv = out.join("reflect.csv");
    write_csv(
        &csv,
        &meta,
        &cols,
        spectrum.iter().map(|p| {
            vec![
                num(p.omega),
                num(p.r.re),
                num(p.r.im),
                num(p.t.re),
                num(p.t.im),
                num(p.reflectivity),
                num(p.transmissivity),
                num(p.absorption),
            ]
        }),
    )?;
    let mut files = vec![csv];
    if svg_on(cfg) {
        let p = out.join("reflect.svg");
        let series = |f: fn(&SpectrumPoint) -> f64| -> Vec<(f64, f64)> {
            spectrum.iter().map(|s| (angular_to_hz(s.omega), f(s))).collect()
        };
        write_svg(
            &p,
            svg::line_chart(
                "Reflection spectrum",
                "detuning (Hz)",
                "power fraction",
                &[
                    ("reflectivity", series(|s| s.reflectivity)),
                    ("transmissivity", series(|s| s.transmissivity)),
                ],
            ),
        )?;
        files.push(p);
    }
    Ok(ReflectOutput {
        spectrum,
        summary,
        periods: sample.periods,
        files,
    })
}

const TRACE_COLS: [Column; 8] = [
    ("t", "s"),
    ("tau", "s"),
    ("theta", "rad"),
    ("omega_c", "rad/s"),
    ("omega_s", "rad/s"),
    ("delta_s", "rad/s"),
    ("norm", "1"),
    ("forward_norm", "1"),
];

const TRAJECTORY_COLS: [Column; 8] = [
    ("t", "s"),
    ("z", "m"),
    ("re_psi_plus", "m^-1/2"),
    ("im_psi_plus", "m^-1/2"),
    ("re_psi_minus", "m^-1/2"),
    ("im_psi_minus", "m^-1/2"),
    ("e_plus_sq", "m^-1"),
    ("e_minus_sq", "m^-1"),
];

/// Trace, trajectory, binary dump and heatmap shared by `evolve` and
/// `protocol`.
fn write_dynamics(
    cfg: &Config,
    out: &Path,
    meta: &Metadata,
    snapshots: &[Snapshot],
    trace: &[TraceRow],
) -> CliResult<Vec<PathBuf>> {
    let o = cfg.output();
    let mut files = Vec::new();
    let p = out.join("trace.csv");
    write_csv(
        &p,
        meta,
        &TRACE_COLS,
        trace.iter().map(|r| {
            vec![
                num(r.time),
                num(r.tau),
                num(r.theta),
                num(r.omega_c),
                num(r.omega_s),
                num(r.delta_s),
                num(r.norm),
                num(r.forward_norm),
            ]
        }),
    )?;
    files.push(p);
    if o.trajectory_csv.unwrap_or(true) {
        let p = out.join("trajectory.csv");
        let rows = snapshots.iter().flat_map(|s| {
            let f = fields_from_polariton(&s.state, s.theta);
            let g = s.state.grid;
            (0..g.n_points)
                .map(|i| {
                    let (pp, pm) = (s.state.psi_plus[i], s.state.psi_minus[i]);
                    vec![
                        num(s.time),
                        num(g.z(i)),
                        num(pp.re),
                        num(pp.im),
                        num(pm.re),
                        num(pm.im),
                        num(f.e_plus[i].norm_sqr()),
                        num(f.e_minus[i].norm_sqr()),
                    ]
                })
                .collect::<Vec<_>>()
        });
        write_csv(&p, meta, &TRAJECTORY_COLS, rows)?;
        files.push(p);
    }
    if o.binary.unwrap_or(false) {
        let p = out.join("trajectory.bin");
        write_atomic(&p, |w| write_binary(w, snapshots))?;
        files.push(p);
    }
    if svg_on(cfg) && !snapshots.is_empty() {
        let p = out.join("intensity.svg");
        let grid = snapshots[0].state.grid;
        let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
        let values: Vec<Vec<f64>> = snapshots
            .iter()
            .map(|s| {
                let f = fields_from_polariton(&s.state, s.theta);
                f.e_plus.iter().zip(&f.e_minus).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
            })
            .collect();
        write_svg(
            &p,
            svg::heatmap("|E|^2 (z, t)", "z (m)", "t (s)", &grid.positions(), &times, &values),
        )?;
        files.push(p);
    }
    Ok(files)
}

pub struct EvolveOutput {
    pub trajectory: Trajectory,
    pub files: Vec<PathBuf>,
}

pub fn evolve(cfg: &Config, out: &Path) -> CliResult<EvolveOutput> {
    let m = cfg.medium_params()?;
    let schedule = cfg.schedule(&m)?;
    let grid = cfg.grid()?;
    let (pulse, k0) = cfg.pulse()?;
    let (t0, t1, dt) = cfg.evolve_window()?;
    let state = PolaritonState::gaussian(grid, pulse.center, pulse.rms_width, k0, t0)
        .map_err(|e| CliError::from_core("pulse", e))?;
    let opts = EvolveOptions {
        snapshot_stride: cfg.output().snapshot_stride.unwrap_or(0),
        ..EvolveOptions::default()
    };
    let trajectory = run_evolve(&state, &schedule, &m, t0, t1, dt, &opts).map_err(|e| CliError::from_core("evolve", e))?;
    let mut meta = Metadata::new("evolve", cfg);
    meta.derived("steps", ((t1 - t0) / dt).round())
        .derived("final_tau_s", trajectory.final_tau)
        .derived("final_norm", trajectory.final_state.norm());
    for w in &trajectory.warnings {
        meta.derived("warning", w);
    }
    let files = write_dynamics(cfg, out, &meta, &trajectory.snapshots, &trajectory.trace)?;
    Ok(EvolveOutput { trajectory, files })
}

fn validity_csv(path: &Path, meta: &Metadata, report: &ValidityReport) -> CliResult<()> {
    let cols: [Column; 5] = [
        ("check", "name"),
        ("value", "native"),
        ("bound", "native"),
        ("ratio", "1"),
        ("status", "pass|warn|fail"),
    ];
    write_csv(
        path,
        meta,
        &cols,
        report.checks.iter().map(|c| {
            vec![
                c.name.to_string(),
                num(c.value),
                num(c.bound),
                num(c.ratio),
                c.status.as_str().to_string(),
            ]
        }),
    )
}

pub struct ProtocolOutput {
    pub result: ProtocolResult,
    pub report: ValidityReport,
    pub files: Vec<PathBuf>,
}

/// Summary pairs for the `summary.txt`/`summary.csv` records.
pub fn summary_pairs(result: &ProtocolResult, report: &ValidityReport) -> Vec<(String, String)> {
    let m = &result.metrics;
    let mut v = vec![
        ("initial_norm".to_string(), num(m.initial_norm)),
        ("in_medium_release".into(), num(m.in_medium_release)),
        ("in_medium_trap_end".into(), num(m.in_medium_trap_end)),
        ("in_medium_final".into(), num(m.in_medium_final)),
        ("trapped_fraction".into(), num(m.trapped_fraction)),
        ("centroid_drift_m".into(), num(m.centroid_drift)),
        (
            "oscillation_period_s".into(),
            m.oscillation_period.map(num).unwrap_or_else(|| "none".into()),
        ),
        ("expected_period_s".into(), num(m.expected_period)),
        ("max_norm_drift".into(), num(m.max_norm_drift)),
        ("all_checks_pass".into(), report.all_pass().to_string()),
    ];
    v.extend(result.warnings.iter().map(|w| ("warning".to_string(), w.clone())));
    v
}

pub fn protocol(cfg: &Config, out: &Path) -> CliResult<ProtocolOutput> {
    let scenario = cfg.scenario()?;
    let report = validity_report(&scenario);
    let result = run_protocol(&scenario).map_err(|e| CliError::from_core("scenario", e))?;
    let mut meta = Metadata::new("protocol", cfg);
    meta.derived("trap_light_shift_rad_s", scenario.trap_light_shift())
        .derived("trap_coupling_chi_rad_s", scenario.trap_coupling());
    let mut files = write_dynamics(cfg, out, &meta, &result.snapshots, &result.trace)?;
    let pairs = summary_pairs(&result, &report);
    let p = out.join("summary.txt");
    write_key_values(&p, &meta, &pairs)?;
    files.push(p);
    let p = out.join("summary.csv");
    write_csv(
        &p,
        &meta,
        &[("key", "name"), ("value", "native")],
        pairs.iter().map(|(k, v)| vec![k.clone(), v.clone()]),
    )?;
    files.push(p);
    let p = out.join("validity.csv");
    validity_csv(&p, &meta, &report)?;
    files.push(p);
    Ok(ProtocolOutput { result, report, files })
}

pub struct CheckOutput {
    pub report: ValidityReport,
    pub files: Vec<PathBuf>,
}

pub fn check(cfg: &Config, out: &Path) -> CliResult<CheckOutput> {
    let scenario = cfg.scenario()?;
    let report = validity_report(&scenario);
    let meta = Metadata::new("check", cfg);
    let p = out.join("validity.csv");
    validity_csv(&p, &meta, &report)?;
    Ok(CheckOutput { report, files: vec![p] })
}
