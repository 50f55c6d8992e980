use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fanofit::synth::gallery_phases;
use fanofit::uncertainty::log_couplings;
use fanofit::{
    calibrate_trajectory, fit_pipeline, leakage_db_to_linear, leakage_linear_to_db, qi_range, synth_background_pattern,
    synth_lineshape_gallery, synth_trace, trajectory_report, uncertainty_band, CableMedium, CenterTrajectory64,
    Complex64, DelayRemoval, FanoBackground64, FitConfig64, LeakageBound, MeasurementMode, OffResonantEstimator,
    Quality, ResonatorParams64, SynthSpec64, TrajectoryWarning,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::{BandsArgs, Baseline, FitArgs, FitOptions, SweepArgs, SynthArgs, TrajectoryArgs};
use crate::error::{CliError, CliResult, ErrorKind, ErrorRecord};
use crate::report::{
    mode_name, to_json, CalibrationReport, ComplexValue, FitReport, FlaggedRun, SummaryRow, SweepRecord, SweepReport,
    TrajectoryPoint, Warning, Q,
};
use crate::traceio::{fmt_num, format_trace, read_trace, write_text};

/// Default background path length for `synth --background` (m).
const DEFAULT_PATH_LENGTH_M: f64 = 0.1;

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_delay(s: &str) -> CliResult<DelayRemoval<f64>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(DelayRemoval::Auto),
        "off" | "none" => Ok(DelayRemoval::Off),
        v => v
            .parse::<f64>()
            .ok()
            .filter(|d| d.is_finite())
            .map(DelayRemoval::Fixed)
            .ok_or_else(|| CliError::parse(format!("--delay must be auto, off or seconds, got {s:?}"))),
    }
}

/// Pipeline settings and the leakage bound as an amplitude.
fn fit_setup(opts: &FitOptions) -> CliResult<(FitConfig64, f64)> {
    let b = match opts.bound {
        Some(b) => b,
        None => leakage_db_to_linear(opts.bound_db).map_err(CliError::from_fit)?,
    };
    if !(0.0..1.0).contains(&b) {
        return Err(CliError::parse(format!(
            "leakage bound must satisfy 0 <= b < 1 (below 0 dB), got {b}"
        )));
    }
    let cfg = FitConfig64 {
        mode: opts.mode.into(),
        delay_removal: parse_delay(&opts.delay)?,
        off_resonant: match opts.baseline {
            Baseline::Circle => OffResonantEstimator::CircleIntersection,
            Baseline::Edge => OffResonantEstimator::EdgeMean,
        },
        refine: !opts.no_refine,
    };
    Ok((cfg, b))
}

fn fit_file(path: &Path, label: Option<String>, cfg: &FitConfig64, b: f64) -> CliResult<FitReport> {
    let trace = read_trace(path)?;
    let fit_err = |e: fanofit::Error| CliError::new(ErrorKind::Fit, format!("{}: {e}", path.display()));
    let fit = fit_pipeline(&trace, cfg).map_err(fit_err)?;
    let range = qi_range(&fit, LeakageBound::Amplitude(b), cfg.mode).map_err(fit_err)?;
    let label = label.or_else(|| trace.meta.get("label").cloned());
    Ok(FitReport::new(&path.display().to_string(), label, &fit, &range))
}

pub fn fit(args: &FitArgs) -> CliResult<i32> {
    let (cfg, b) = fit_setup(&args.opts)?;
    let report = fit_file(&args.input, None, &cfg, b)?;
    emit(args.out.as_deref(), &to_json(&report))?;
    Ok(0)
}

/// One batch entry: trace path and optional label.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub path: PathBuf,
    pub label: Option<String>,
}

/// Reads a manifest CSV with a `path` column and an optional `label` column.
/// Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> CliResult<Vec<Entry>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let p = col("path").ok_or_else(|| CliError::parse(format!("{}: manifest needs a path column", path.display())))?;
    let l = col("label");
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let file = record.get(p).unwrap_or("");
        if file.is_empty() {
            return Err(CliError::parse(format!("{}: empty path in manifest", path.display())));
        }
        entries.push(Entry {
            path: base.join(file),
            label: l
                .and_then(|i| record.get(i))
                .filter(|s| !s.is_empty())
                .map(str::to_owned),
        });
    }
    Ok(entries)
}

/// Expands glob patterns; plain paths pass through even when missing so that
/// the failure is reported per file.
fn expand_inputs(inputs: &[String]) -> CliResult<Vec<Entry>> {
    let mut entries = Vec::new();
    for input in inputs {
        let is_pattern = input.contains(['*', '?', '[']) && !Path::new(input).exists();
        if !is_pattern {
            entries.push(Entry {
                path: input.into(),
                label: None,
            });
            continue;
        }
        let paths = glob::glob(input).map_err(|e| CliError::parse(format!("bad pattern {input:?}: {e}")))?;
        let mut matched: Vec<PathBuf> = paths.filter_map(|p| p.ok()).collect();
        matched.sort();
        entries.extend(matched.into_iter().map(|path| Entry { path, label: None }));
    }
    Ok(entries)
}

fn entries(inputs: &[String], manifest: Option<&Path>) -> CliResult<Vec<Entry>> {
    let list = match manifest {
        Some(m) => read_manifest(m)?,
        None => expand_inputs(inputs)?,
    };
    if list.is_empty() {
        return Err(CliError::parse("no input traces"));
    }
    Ok(list)
}

pub fn sweep(args: &SweepArgs) -> CliResult<i32> {
    let (cfg, b) = fit_setup(&args.opts)?;
    let list = entries(&args.inputs, args.manifest.as_deref())?;
    let results: Vec<(String, CliResult<FitReport>)> = list
        .par_iter()
        .map(|e| {
            (
                e.path.display().to_string(),
                fit_file(&e.path, e.label.clone(), &cfg, b),
            )
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut summary = Vec::new();
    let mut first_failure = None;
    for (path, result) in results {
        match result {
            Ok(report) => {
                summary.push(SummaryRow {
                    label: report.label.clone().unwrap_or_default(),
                    input_path: path,
                    q_i: report.q_i,
                });
                records.push(SweepRecord::Ok(Box::new(report)));
            }
            Err(e) => {
                first_failure.get_or_insert(e.exit_code());
                records.push(SweepRecord::Error(e.record(Some(&path))));
            }
        }
    }
    let failed = records.iter().filter(|r| matches!(r, SweepRecord::Error(_))).count();
    let doc = SweepReport {
        records,
        summary,
        failed,
    };
    if let Some(p) = &args.summary {
        write_text(p, &summary_csv(&doc.summary))?;
    }
    emit(args.out.as_deref(), &to_json(&doc))?;
    Ok(match first_failure {
        Some(code) if !args.keep_going => code,
        _ => 0,
    })
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["label", "input_path", "q_i_min", "q_i_mid", "q_i_max"]);
    for r in rows {
        let _ = w.write_record([
            r.label.clone(),
            r.input_path.clone(),
            fmt_num(r.q_i.min.0),
            fmt_num(r.q_i.mid.0),
            fmt_num(r.q_i.max.0),
        ]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

struct Center {
    label: f64,
    path: Option<String>,
    m: Complex64,
    q_l: f64,
}

fn parse_label(label: Option<&str>, path: &Path) -> CliResult<f64> {
    let s =
        label.ok_or_else(|| CliError::parse(format!("{}: trajectory traces need a numeric label", path.display())))?;
    s.trim()
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| CliError::parse(format!("{}: label {s:?} is not a number", path.display())))
}

fn read_centers(path: &Path) -> CliResult<Vec<Center>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let idx: Vec<usize> = ["label", "re", "im", "q_l"]
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CliError::parse(format!("{}: missing {name} column", path.display())))
        })
        .collect::<CliResult<_>>()?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let v: Vec<f64> = idx
            .iter()
            .map(|&i| {
                let s = record.get(i).unwrap_or("");
                s.parse()
                    .map_err(|_| CliError::parse(format!("{}: cannot parse {s:?} as a number", path.display())))
            })
            .collect::<CliResult<_>>()?;
        out.push(Center {
            label: v[0],
            path: None,
            m: Complex64::new(v[1], v[2]),
            q_l: v[3],
        });
    }
    Ok(out)
}

pub fn trajectory(args: &TrajectoryArgs) -> CliResult<i32> {
    let (cfg, _) = fit_setup(&args.opts)?;
    let mut skipped: Vec<ErrorRecord> = Vec::new();
    let centers = match &args.centers {
        Some(p) => read_centers(p)?,
        None => {
            let list = entries(&args.inputs, args.manifest.as_deref())?;
            let fitted: Vec<CliResult<Center>> = list
                .par_iter()
                .map(|e| {
                    let trace = read_trace(&e.path)?;
                    let label = parse_label(
                        e.label.as_deref().or(trace.meta.get("label").map(String::as_str)),
                        &e.path,
                    )?;
                    let fit = fit_pipeline(&trace, &cfg)
                        .map_err(|err| CliError::new(ErrorKind::Fit, format!("{}: {err}", e.path.display())))?;
                    Ok(Center {
                        label,
                        path: Some(e.path.display().to_string()),
                        m: fit.m_prime,
                        q_l: fit.q_l,
                    })
                })
                .collect();
            let mut ok = Vec::new();
            for (e, r) in list.iter().zip(fitted) {
                match r {
                    Ok(c) => ok.push(c),
                    Err(err) if args.keep_going => skipped.push(err.record(Some(&e.path.display().to_string()))),
                    Err(err) => return Err(err),
                }
            }
            ok
        }
    };

    let traj = CenterTrajectory64::new(
        centers.iter().map(|c| c.label).collect(),
        centers.iter().map(|c| c.m).collect(),
        centers.iter().map(|c| c.q_l).collect(),
    )
    .map_err(CliError::from_fit)?;
    let mode: MeasurementMode = args.opts.mode.into();
    let cal =
        calibrate_trajectory(&traj, args.robust, mode).map_err(|e| CliError::new(ErrorKind::Fit, e.to_string()))?;
    let rep = trajectory_report(&traj, &cal.fit);

    let mut order: Vec<usize> = (0..traj.len()).collect();
    order.sort_by(|&a, &b| traj.labels[a].partial_cmp(&traj.labels[b]).unwrap_or(Ordering::Equal));
    let points = order
        .iter()
        .enumerate()
        .map(|(k, &i)| TrajectoryPoint {
            label: traj.labels[i],
            input_path: centers[i].path.clone(),
            m_prime: traj.centers[i].into(),
            q_l: traj.q_l[i],
            residual: rep.residuals[k],
            inlier: cal.fit.inliers[i],
            flagged: rep.large[k],
        })
        .collect();

    let warnings = rep
        .warnings
        .iter()
        .map(|w| {
            let message = match w {
                TrajectoryWarning::LowArc => format!(
                    "trajectory covers {:.3} rad of arc; the leakage amplitude is poorly conditioned",
                    cal.arc_coverage
                ),
                TrajectoryWarning::Nonstationary => format!(
                    "{} run(s) of consecutive off-circle points; Q_i or b may change along the sweep",
                    rep.runs.len()
                ),
                TrajectoryWarning::Drift => format!(
                    "residuals trend with the label (Kendall tau {:.3}); b or Q_i drifts",
                    rep.kendall_tau
                ),
            };
            Warning::new(w.code(), message)
        })
        .collect();

    let doc = CalibrationReport {
        mode: mode_name(mode),
        robust: args.robust,
        b: cal.b,
        b_db: leakage_linear_to_db(cal.b),
        m_true: cal.m_true,
        q_i_true: cal.q_i.into(),
        q_c_true: cal.q_c.into(),
        q_l_median: cal.q_l,
        x_c: cal.fit.x_c,
        r_c: cal.fit.r_c,
        arc_coverage_rad: cal.arc_coverage,
        rms: cal.rms,
        residual_threshold: rep.threshold,
        kendall_tau: rep.kendall_tau,
        points,
        runs: rep
            .runs
            .iter()
            .map(|r| FlaggedRun {
                first_label: r.first_label,
                last_label: r.last_label,
                len: r.len,
            })
            .collect(),
        skipped,
        warnings,
    };
    emit(args.out.as_deref(), &to_json(&doc))?;
    Ok(0)
}

pub fn bands(args: &BandsArgs) -> CliResult<i32> {
    let [lo, hi] = args.coupling_range[..] else {
        return Err(CliError::parse("--coupling-range takes exactly two values lo,hi"));
    };
    let couplings = log_couplings(lo, hi, args.points).map_err(CliError::from_fit)?;
    let b_list = match &args.b_list {
        Some(list) => list.clone(),
        None => args
            .b_list_db
            .iter()
            .map(|&db| leakage_db_to_linear(db))
            .collect::<Result<_, _>>()
            .map_err(CliError::from_fit)?,
    };
    let rows = uncertainty_band(&couplings, &b_list, args.mode.into()).map_err(CliError::from_fit)?;
    let mut out =
        String::from("coupling_mid,b,b_db,qi_rel_min,qi_rel_max,dip_reflection,dip_transmission,s21_at_resonance\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_num(r.coupling),
            fmt_num(r.b),
            fmt_num(r.b_db),
            fmt_num(r.rel_min),
            fmt_num(r.rel_max),
            fmt_num(r.dip_reflection),
            fmt_num(r.dip_transmission),
            fmt_num(r.s21_at_resonance),
        );
    }
    emit(args.out.as_deref(), &out)?;
    Ok(0)
}

/// Synthetic trace parameters; also the `--spec` file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub f_r_hz: f64,
    pub q_l: f64,
    /// Q_i/Q_c.
    pub coupling: Q,
    pub mode: String,
    pub b: f64,
    pub phi: f64,
    pub path_length_m: Option<f64>,
    pub gain: ComplexValue,
    pub delay_s: f64,
    pub f_start_hz: Option<f64>,
    pub f_stop_hz: Option<f64>,
    pub span_linewidths: f64,
    pub n_points: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub label: Option<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            f_r_hz: 6e9,
            q_l: 2e4,
            coupling: Q(1.0),
            mode: MeasurementMode::Reflection.name().into(),
            b: 0.0,
            phi: 0.0,
            path_length_m: None,
            gain: ComplexValue { re: 1.0, im: 0.0 },
            delay_s: 0.0,
            f_start_hz: None,
            f_stop_hz: None,
            span_linewidths: fanofit::synth::DEFAULT_HALF_SPAN_LINEWIDTHS,
            n_points: fanofit::synth::DEFAULT_POINTS,
            noise_sigma: 0.0,
            seed: 0,
            label: None,
        }
    }
}

/// Ground truth written next to a synthetic trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub spec: SynthConfig,
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub kappa_hz: f64,
    pub q_i: Q,
    pub q_c: f64,
    pub radius: f64,
    pub b_db: f64,
}

fn parse_mode(name: &str) -> CliResult<MeasurementMode> {
    match name {
        "reflection" => Ok(MeasurementMode::Reflection),
        "notch" => Ok(MeasurementMode::NotchTransmission),
        _ => Err(CliError::parse(format!(
            "mode must be reflection or notch, got {name:?}"
        ))),
    }
}

fn parse_quality(s: &str) -> CliResult<Q> {
    match s.trim() {
        "inf" => Ok(Q(f64::INFINITY)),
        v => v
            .parse()
            .map(Q)
            .map_err(|_| CliError::parse(format!("expected a number or inf, got {s:?}"))),
    }
}

fn synth_config(args: &SynthArgs) -> CliResult<SynthConfig> {
    if let Some(path) = &args.spec {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: SynthConfig =
            serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        return Ok(cfg);
    }
    let b = match args.b_db {
        Some(db) => leakage_db_to_linear(db).map_err(CliError::from_fit)?,
        None => args.b,
    };
    Ok(SynthConfig {
        f_r_hz: args.f_r,
        q_l: args.q_l,
        coupling: parse_quality(&args.coupling)?,
        mode: MeasurementMode::from(args.mode).name().into(),
        b,
        phi: args.phi,
        path_length_m: args.path_length,
        gain: ComplexValue {
            re: args.gain_re,
            im: args.gain_im,
        },
        delay_s: args.delay,
        f_start_hz: args.f_start,
        f_stop_hz: args.f_stop,
        span_linewidths: args.span_linewidths,
        n_points: args.points,
        noise_sigma: args.noise,
        seed: args.seed.unwrap_or(0),
        label: args.label.clone(),
    })
}

pub fn build_synth(cfg: &SynthConfig) -> CliResult<(fanofit::Trace64, SynthTruth)> {
    let mode = parse_mode(&cfg.mode)?;
    let params = ResonatorParams64::from_loaded(cfg.f_r_hz, cfg.q_l, Quality::new(cfg.coupling.0), mode)
        .map_err(CliError::from_fit)?;
    let mut bg = FanoBackground64::new(cfg.b, cfg.phi).map_err(CliError::from_fit)?;
    if let Some(l) = cfg.path_length_m {
        bg = bg.with_path_length(l).map_err(CliError::from_fit)?;
    }
    let half = cfg.span_linewidths * params.kappa();
    let spec = SynthSpec64 {
        gain: Complex64::new(cfg.gain.re, cfg.gain.im),
        delay: cfg.delay_s,
        f_start: cfg.f_start_hz.unwrap_or(params.f_r - half),
        f_stop: cfg.f_stop_hz.unwrap_or(params.f_r + half),
        n_points: cfg.n_points,
        noise_sigma: cfg.noise_sigma,
        seed: cfg.seed,
        ..SynthSpec64::around_resonance(params, bg)
    };
    let mut trace = synth_trace(&spec).map_err(CliError::from_fit)?;
    if let Some(label) = &cfg.label {
        trace.meta.insert("label".into(), label.clone());
    }
    trace.meta.insert("seed".into(), cfg.seed.to_string());
    let truth = SynthTruth {
        spec: cfg.clone(),
        f_start_hz: spec.f_start,
        f_stop_hz: spec.f_stop,
        kappa_hz: params.kappa(),
        q_i: params.q_i.into(),
        q_c: params.q_c,
        radius: params.radius(),
        b_db: leakage_linear_to_db(cfg.b),
    };
    Ok((trace, truth))
}

fn gallery(args: &SynthArgs) -> CliResult<String> {
    let b = match args.b_db {
        Some(db) => leakage_db_to_linear(db).map_err(CliError::from_fit)?,
        None => args.b,
    };
    let shapes = synth_lineshape_gallery(b, &gallery_phases::<f64>(), args.points).map_err(CliError::from_fit)?;
    let mut out = format!("# b: {b}\nphi_rad,detuning,amplitude\n");
    for s in shapes {
        for (x, y) in s.curve.x.iter().zip(&s.curve.y) {
            let _ = writeln!(out, "{},{x},{y}", s.phi);
        }
    }
    Ok(out)
}

fn background(args: &SynthArgs) -> CliResult<String> {
    let b = match args.b_db {
        Some(db) => leakage_db_to_linear(db).map_err(CliError::from_fit)?,
        None => args.b,
    };
    let l = args.path_length.unwrap_or(DEFAULT_PATH_LENGTH_M);
    let f_start = args.f_start.unwrap_or(args.f_r - 1e9);
    let f_stop = args.f_stop.unwrap_or(args.f_r + 1e9);
    let curve = synth_background_pattern(b, l, CableMedium::default(), f_start, f_stop, args.points)
        .map_err(CliError::from_fit)?;
    let mut out = format!("# b: {b}\n# path_length_m: {l}\nfrequency_hz,amplitude\n");
    for (x, y) in curve.x.iter().zip(&curve.y) {
        let _ = writeln!(out, "{x},{y}");
    }
    Ok(out)
}

pub fn synth(args: &SynthArgs) -> CliResult<i32> {
    if args.gallery {
        emit(args.out.as_deref(), &gallery(args)?)?;
        return Ok(0);
    }
    if args.background {
        emit(args.out.as_deref(), &background(args)?)?;
        return Ok(0);
    }
    let cfg = synth_config(args)?;
    let (trace, truth) = build_synth(&cfg)?;
    emit(args.out.as_deref(), &format_trace(&trace))?;
    let truth_path = args.truth.clone().or_else(|| {
        args.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".truth.json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = truth_path {
        write_text(&p, &to_json(&truth))?;
    }
    Ok(0)
}
