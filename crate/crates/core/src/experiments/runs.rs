use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ScenarioConfig, TwoBallsSetting};
use super::svg::{Chart, Series};
use super::{check_diagnostics, median, quantile, results_csv, timing_csv, write_file, ResultRow};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::inference::{attack, AttackReport};
use crate::rng::Stream;
use crate::strategies::{
    calibrate_random_radius, generate_observations, obfuscate_tracks, sample_sps, CalibrationResult, ExitObservationSet, StrategySpec,
};
use crate::trajectory::{CutResult, Trajectory};

// Stream layout: [experiment, setting, role, replicate, ...].
const TABLE1: u64 = 1;
const CURVE: u64 = 2;
const ATTACK: u64 = 3;
const OBFUSCATE: u64 = 4;
const BENCH: u64 = 5;

const CALIBRATION: u64 = 0;
const TB_OBS: u64 = 1;
const TB_ATTACK: u64 = 2;
const RR_OBS: u64 = 3;
const RR_ATTACK: u64 = 4;
const TB_HIST: u64 = 5;
const RR_HIST: u64 = 6;

const TB_COLOR: &str = "#c0392b";
const RR_COLOR: &str = "#2471a3";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub setting: usize,
    pub params: TwoBallsSetting,
    pub analytic_sp_mean: f64,
    pub result: CalibrationResult,
}

impl CalibrationRow {
    pub fn random_radius(&self) -> StrategySpec {
        self.result.random_radius()
    }
}

fn calibration_csv(rows: &[CalibrationRow]) -> String {
    let mut s = String::from("setting,r,R,alpha,beta,n_draws,sp_mean,sp_var,analytic_sp_mean,rr_alpha,rr_beta\n");
    for c in rows {
        let p = c.params;
        let g = c.result.matched_gamma;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.setting,
            p.r,
            p.big_r,
            p.alpha,
            p.beta,
            c.result.n_draws,
            c.result.sp_mean,
            c.result.sp_var,
            c.analytic_sp_mean,
            g.alpha,
            g.beta
        );
    }
    s
}

fn calibrate_setting(cfg: &ScenarioConfig, experiment: u64, setting: usize, params: TwoBallsSetting) -> Result<CalibrationRow> {
    let tb = params.spec()?;
    let mut rng = Stream::new(cfg.master_seed).path(&[experiment, setting as u64, CALIBRATION]).rng();
    Ok(CalibrationRow {
        setting,
        params,
        analytic_sp_mean: tb.mean_sp(),
        result: calibrate_random_radius(&tb, cfg.calibration_draws, &mut rng)?,
    })
}

/// Calibration only, with the same streams as [`run_table1`].
#[derive(Debug, Clone)]
pub struct CalibrationOutput {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationOutput {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_file(dir, "calibration.csv", &calibration_csv(&self.rows))
    }
}

pub fn run_calibrate(cfg: &ScenarioConfig) -> Result<CalibrationOutput> {
    cfg.validate()?;
    let rows = cfg
        .settings
        .par_iter()
        .enumerate()
        .map(|(i, p)| calibrate_setting(cfg, TABLE1, i + 1, *p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationOutput { rows })
}

fn attack_once(
    cfg: &ScenarioConfig,
    spec: &StrategySpec,
    n: usize,
    obs_stream: Stream,
    attack_stream: Stream,
) -> Result<(ExitObservationSet, AttackReport)> {
    let theta = Point::ORIGIN;
    let obs = generate_observations(&theta, spec, n, cfg.observation_mode, &mut obs_stream.rng())?;
    let report = attack(&obs, &theta, &cfg.attack, &mut attack_stream.rng())?;
    Ok((obs, report))
}

/// Per-setting medians and 5%/95% quantiles of the posterior MSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingSummary {
    pub setting: usize,
    pub params: TwoBallsSetting,
    pub analytic_sp_mean: f64,
    /// Monte Carlo mean SP from the calibration draws.
    pub sp_mean: f64,
    pub tb_median: f64,
    pub tb_q05: f64,
    pub tb_q95: f64,
    pub rr_median: f64,
    pub rr_q05: f64,
    pub rr_q95: f64,
}

impl SettingSummary {
    pub fn ratio(&self) -> f64 {
        self.tb_median / self.rr_median
    }
}

fn mses(rows: &[ResultRow], setting: usize, strategy: &str, n: usize) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.setting == setting && r.strategy == strategy && r.n == n)
        .map(|r| r.posterior_mse)
        .collect()
}

#[derive(Debug, Clone)]
pub struct Table1Output {
    pub calibration: Vec<CalibrationRow>,
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SettingSummary>,
}

impl Table1Output {
    /// Summary table recomputed from `rows`.
    pub fn summarize(calibration: &[CalibrationRow], rows: &[ResultRow], n: usize) -> Vec<SettingSummary> {
        calibration
            .iter()
            .map(|c| {
                let tb = mses(rows, c.setting, "TB", n);
                let rr = mses(rows, c.setting, "RR", n);
                SettingSummary {
                    setting: c.setting,
                    params: c.params,
                    analytic_sp_mean: c.analytic_sp_mean,
                    sp_mean: c.result.sp_mean,
                    tb_median: median(&tb),
                    tb_q05: quantile(&tb, 0.05),
                    tb_q95: quantile(&tb, 0.95),
                    rr_median: median(&rr),
                    rr_q05: quantile(&rr, 0.05),
                    rr_q95: quantile(&rr, 0.95),
                }
            })
            .collect()
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("setting,r,R,alpha,beta,analytic_sp_mean,sp_mean,tb_mse_median,tb_mse_q05,tb_mse_q95,rr_mse_median,rr_mse_q05,rr_mse_q95,ratio\n");
        for m in &self.summary {
            let p = m.params;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                m.setting,
                p.r,
                p.big_r,
                p.alpha,
                p.beta,
                m.analytic_sp_mean,
                m.sp_mean,
                m.tb_median,
                m.tb_q05,
                m.tb_q95,
                m.rr_median,
                m.rr_q05,
                m.rr_q95,
                m.ratio()
            );
        }
        s
    }

    pub fn chart(&self) -> Chart {
        let pick = |f: fn(&SettingSummary) -> f64| self.summary.iter().map(|m| (m.setting as f64, f(m))).collect::<Vec<_>>();
        Chart {
            title: "Posterior MSE with 50 tracks per setting".into(),
            x_label: "setting".into(),
            y_label: "posterior MSE".into(),
            log_y: true,
            series: vec![
                Series::line("two-balls", pick(|m| m.tb_median), TB_COLOR),
                Series::line("", pick(|m| m.tb_q05), TB_COLOR).dashed(),
                Series::line("", pick(|m| m.tb_q95), TB_COLOR).dashed(),
                Series::line("random-radius", pick(|m| m.rr_median), RR_COLOR),
                Series::line("", pick(|m| m.rr_q05), RR_COLOR).dashed(),
                Series::line("", pick(|m| m.rr_q95), RR_COLOR).dashed(),
            ],
            ..Default::default()
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_file(dir, "results.csv", &results_csv(&self.rows))?;
        write_file(dir, "timing.csv", &timing_csv(&self.rows))?;
        write_file(dir, "summary.csv", &self.summary_csv())?;
        write_file(dir, "calibration.csv", &calibration_csv(&self.calibration))?;
        write_file(dir, "table1.svg", &self.chart().render())
    }

    pub fn check_diagnostics(&self, cfg: &ScenarioConfig) -> Result<()> {
        check_diagnostics(&self.rows, &cfg.diagnostics)
    }
}

/// Two-balls vs calibrated random-radius, `n_replicates` attacks with `n_trajectories`
/// exits per setting.
pub fn run_table1(cfg: &ScenarioConfig) -> Result<Table1Output> {
    let calibration = run_calibrate(cfg)?.rows;
    let n = cfg.n_trajectories;
    let jobs: Vec<(usize, usize)> = (1..=cfg.settings.len())
        .flat_map(|s| (0..cfg.n_replicates).map(move |rep| (s, rep)))
        .collect();
    let pairs = jobs
        .par_iter()
        .map(|&(s, rep)| {
            let base = Stream::new(cfg.master_seed).path(&[TABLE1, s as u64]);
            let r = rep as u64;
            let tb = cfg.settings[s - 1].spec()?;
            let rr = calibration[s - 1].random_radius();
            let (o1, a1) = attack_once(cfg, &tb, n, base.path(&[TB_OBS, r]), base.path(&[TB_ATTACK, r]))?;
            let (o2, a2) = attack_once(cfg, &rr, n, base.path(&[RR_OBS, r]), base.path(&[RR_ATTACK, r]))?;
            Ok((ResultRow::new(s, rep, &o1, &a1), ResultRow::new(s, rep, &o2, &a2)))
        })
        .collect::<Result<Vec<_>>>()?;
    // Order: setting, strategy (TB then RR), replicate.
    let mut rows = Vec::with_capacity(2 * pairs.len());
    for s in 1..=cfg.settings.len() {
        let block = &pairs[(s - 1) * cfg.n_replicates..s * cfg.n_replicates];
        rows.extend(block.iter().map(|p| p.0.clone()));
        rows.extend(block.iter().map(|p| p.1.clone()));
    }
    let summary = Table1Output::summarize(&calibration, &rows, n);
    Ok(Table1Output {
        calibration,
        rows,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSummaryRow {
    pub strategy: &'static str,
    pub n: usize,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

#[derive(Debug, Clone)]
pub struct CurveOutput {
    pub calibration: CalibrationRow,
    pub rows: Vec<ResultRow>,
    pub summary: Vec<CurveSummaryRow>,
    /// `(bin_lo, bin_hi, two-balls density, random-radius density)`.
    pub sp_histogram: Vec<(f64, f64, f64, f64)>,
}

impl CurveOutput {
    pub fn summarize(rows: &[ResultRow], sizes: &[usize]) -> Vec<CurveSummaryRow> {
        ["TB", "RR"]
            .iter()
            .flat_map(|&tag| {
                sizes.iter().map(move |&n| {
                    let v = mses(rows, 1, tag, n);
                    CurveSummaryRow {
                        strategy: tag,
                        n,
                        median: median(&v),
                        q05: quantile(&v, 0.05),
                        q95: quantile(&v, 0.95),
                    }
                })
            })
            .collect()
    }

    pub fn medians(&self, strategy: &str) -> Vec<f64> {
        self.summary.iter().filter(|r| r.strategy == strategy).map(|r| r.median).collect()
    }

    fn summary_csv(&self) -> String {
        let mut s = String::from("strategy,n,mse_median,mse_q05,mse_q95\n");
        for r in &self.summary {
            let _ = writeln!(s, "{},{},{},{},{}", r.strategy, r.n, r.median, r.q05, r.q95);
        }
        s
    }

    fn histogram_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,tb_density,rr_density\n");
        for (lo, hi, a, b) in &self.sp_histogram {
            let _ = writeln!(s, "{lo},{hi},{a},{b}");
        }
        s
    }

    pub fn chart(&self) -> Chart {
        let mut series = vec![];
        for (tag, label, color) in [("TB", "two-balls", TB_COLOR), ("RR", "random-radius", RR_COLOR)] {
            let rows: Vec<&CurveSummaryRow> = self.summary.iter().filter(|r| r.strategy == tag).collect();
            let pick = |f: fn(&CurveSummaryRow) -> f64| rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>();
            series.push(Series::line(label, pick(|r| r.median), color));
            series.push(Series::line("", pick(|r| r.q05), color).dashed());
            series.push(Series::line("", pick(|r| r.q95), color).dashed());
        }
        Chart {
            title: "Posterior MSE against the number of tracks".into(),
            x_label: "n".into(),
            y_label: "posterior MSE".into(),
            log_x: true,
            log_y: true,
            series,
        }
    }

    pub fn histogram_chart(&self) -> Chart {
        let mid = |(lo, hi, _, _): &(f64, f64, f64, f64)| 0.5 * (lo + hi);
        Chart {
            title: "SP density at matched moments".into(),
            x_label: "squared perturbation".into(),
            y_label: "density".into(),
            series: vec![
                Series::line("two-balls", self.sp_histogram.iter().map(|b| (mid(b), b.2)).collect(), TB_COLOR),
                Series::line("random-radius", self.sp_histogram.iter().map(|b| (mid(b), b.3)).collect(), RR_COLOR),
            ],
            ..Default::default()
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_file(dir, "results.csv", &results_csv(&self.rows))?;
        write_file(dir, "timing.csv", &timing_csv(&self.rows))?;
        write_file(dir, "summary.csv", &self.summary_csv())?;
        write_file(dir, "calibration.csv", &calibration_csv(&[self.calibration]))?;
        write_file(dir, "sp_density.csv", &self.histogram_csv())?;
        write_file(dir, "curve.svg", &self.chart().render())?;
        write_file(dir, "sp_density.svg", &self.histogram_chart().render())
    }

    pub fn check_diagnostics(&self, cfg: &ScenarioConfig) -> Result<()> {
        check_diagnostics(&self.rows, &cfg.diagnostics)
    }
}

const HISTOGRAM_BINS: usize = 60;

fn sp_histogram(tb: &[f64], rr: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    let all: Vec<f64> = tb.iter().chain(rr).copied().collect();
    let hi = quantile(&all, 0.995);
    let w = hi / HISTOGRAM_BINS as f64;
    let density = |xs: &[f64]| {
        let mut counts = vec![0usize; HISTOGRAM_BINS];
        for &x in xs {
            let k = (x / w) as usize;
            if k < HISTOGRAM_BINS {
                counts[k] += 1;
            }
        }
        counts.into_iter().map(|c| c as f64 / (xs.len() as f64 * w)).collect::<Vec<_>>()
    };
    let (a, b) = (density(tb), density(rr));
    (0..HISTOGRAM_BINS)
        .map(|k| (k as f64 * w, (k + 1) as f64 * w, a[k], b[k]))
        .collect()
}

/// Posterior MSE against sample size for the curve setting. Each replicate draws the
/// largest sample once and attacks its nested prefixes.
pub fn run_curve(cfg: &ScenarioConfig) -> Result<CurveOutput> {
    cfg.validate()?;
    let calibration = calibrate_setting(cfg, CURVE, 1, cfg.curve_setting)?;
    let tb = cfg.curve_setting.spec()?;
    let rr = calibration.random_radius();
    let n_max = *cfg.sample_sizes.last().expect("validated non-empty");
    let base = Stream::new(cfg.master_seed).path(&[CURVE, 1]);
    let theta = Point::ORIGIN;
    let blocks = [(tb, TB_OBS, TB_ATTACK), (rr, RR_OBS, RR_ATTACK)]
        .iter()
        .map(|&(spec, obs_role, attack_role)| {
            let per_rep = (0..cfg.n_replicates)
                .into_par_iter()
                .map(|rep| {
                    let r = rep as u64;
                    let full = generate_observations(&theta, &spec, n_max, cfg.observation_mode, &mut base.path(&[obs_role, r]).rng())?;
                    cfg.sample_sizes
                        .iter()
                        .map(|&n| {
                            let obs = full.prefix(n);
                            let mut rng = base.path(&[attack_role, r, n as u64]).rng();
                            let report = attack(&obs, &theta, &cfg.attack, &mut rng)?;
                            Ok(ResultRow::new(1, rep, &obs, &report))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(per_rep.into_iter().flatten().collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ResultRow> = blocks.into_iter().flatten().collect();
    let tb_sps = sample_sps(&tb, cfg.histogram_draws, &mut base.child(TB_HIST).rng())?;
    let rr_sps = sample_sps(&rr, cfg.histogram_draws, &mut base.child(RR_HIST).rng())?;
    Ok(CurveOutput {
        calibration,
        summary: CurveOutput::summarize(&rows, &cfg.sample_sizes),
        rows,
        sp_histogram: sp_histogram(&tb_sps, &rr_sps),
    })
}

/// One attack with its observations, for inspection.
#[derive(Debug, Clone)]
pub struct AttackOutput {
    pub theta: Point,
    pub obs: ExitObservationSet,
    pub report: AttackReport,
}

impl AttackOutput {
    fn report_csv(&self) -> String {
        let r = &self.report;
        let d = r.mse_decomposition;
        let (rhat, ess, acc) = r.samples.as_ref().map_or((String::new(), String::new(), String::new()), |s| {
            (s.max_rhat().to_string(), s.min_ess().to_string(), s.acceptance_rate.to_string())
        });
        format!(
            "strategy,n,method,theta_x,theta_y,mean_x,mean_y,posterior_mse,bias2,variance,max_rhat,min_ess,acceptance_rate,wall_time\n\
             {},{},{:?},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.obs.strategy.tag(),
            self.obs.len(),
            r.method,
            self.theta.x,
            self.theta.y,
            r.posterior_mean.x,
            r.posterior_mean.y,
            d.mse,
            d.bias2,
            d.variance,
            rhat,
            ess,
            acc,
            r.wall_time
        )
    }

    fn exits_csv(&self) -> String {
        let mut s = String::from("x,y,region_x,region_y,region_radius,sp\n");
        for (e, sp) in self.obs.exits.iter().zip(&self.obs.sps) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                e.pos.x, e.pos.y, e.region.center.x, e.region.center.y, e.region.radius, sp
            );
        }
        s
    }

    fn draws_csv(&self) -> Option<String> {
        let samples = self.report.samples.as_ref()?;
        let mut s = String::from("chain,draw,x,y\n");
        for (c, chain) in samples.chains.iter().enumerate() {
            for (i, p) in chain.iter().enumerate() {
                let _ = writeln!(s, "{c},{i},{},{}", p.x, p.y);
            }
        }
        Some(s)
    }

    pub fn chart(&self) -> Chart {
        let mut series = vec![];
        if let Some(samples) = &self.report.samples {
            let step = (samples.n_draws() / 2000).max(1);
            let pts = samples.draws().step_by(step).map(|p| (p.x, p.y)).collect();
            series.push(Series::line("posterior draws", pts, RR_COLOR).markers());
        }
        series.push(Series::line("exits", self.obs.exits.iter().map(|e| (e.pos.x, e.pos.y)).collect(), TB_COLOR).markers());
        series.push(Series::line("true home", vec![(self.theta.x, self.theta.y)], "black").markers());
        Chart {
            title: format!("{} attack, n = {}", self.obs.strategy.tag(), self.obs.len()),
            x_label: "x".into(),
            y_label: "y".into(),
            series,
            ..Default::default()
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_file(dir, "attack_report.csv", &self.report_csv())?;
        write_file(dir, "exits.csv", &self.exits_csv())?;
        if let Some(d) = self.draws_csv() {
            write_file(dir, "posterior_draws.csv", &d)?;
        }
        write_file(dir, "posterior.svg", &self.chart().render())
    }

    pub fn check_diagnostics(&self, cfg: &ScenarioConfig) -> Result<()> {
        let row = ResultRow::new(1, 0, &self.obs, &self.report);
        check_diagnostics(&[row], &cfg.diagnostics)
    }
}

/// The single attack described by `cfg.single`.
pub fn run_attack(cfg: &ScenarioConfig) -> Result<AttackOutput> {
    cfg.validate()?;
    let s = cfg.single;
    let base = Stream::new(cfg.master_seed).child(ATTACK);
    let obs = generate_observations(&s.theta, &s.strategy, s.n, cfg.observation_mode, &mut base.child(1).rng())?;
    let report = attack(&obs, &s.theta, &cfg.attack, &mut base.child(2).rng())?;
    Ok(AttackOutput {
        theta: s.theta,
        obs,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObfuscateRow {
    pub file: PathBuf,
    pub published: bool,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub sp: f64,
}

#[derive(Debug, Clone)]
pub struct ObfuscateOutput {
    pub rows: Vec<ObfuscateRow>,
    pub cuts: Vec<CutResult>,
}

fn output_name(path: &Path) -> String {
    let stem = path.file_stem().map_or("track".into(), |s| s.to_string_lossy().into_owned());
    format!("{stem}.published.csv")
}

impl ObfuscateOutput {
    pub fn report_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut s = String::from("file,published,t1,t2,sp\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.file.display(), r.published, opt(r.t1), opt(r.t2), r.sp);
        }
        s
    }

    /// Writes `<stem>.published.csv` per input (header only when nothing is published)
    /// and `obfuscation_report.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (row, cut) in self.rows.iter().zip(&self.cuts) {
            let text = cut
                .published
                .as_ref()
                .map_or_else(|| "t,x,y\n".to_string(), Trajectory::to_csv_string);
            write_file(dir, &output_name(&row.file), &text)?;
        }
        write_file(dir, "obfuscation_report.csv", &self.report_csv())
    }
}

/// Cut one user's tracks (`cfg.obfuscate.tracks`) with the configured strategy.
pub fn run_obfuscate(cfg: &ScenarioConfig) -> Result<ObfuscateOutput> {
    cfg.validate()?;
    let o = &cfg.obfuscate;
    if o.tracks.is_empty() {
        return Err(Error::Config("no input tracks given".into()));
    }
    let mut names: Vec<String> = o.tracks.iter().map(|p| output_name(p)).collect();
    names.sort();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("input tracks must have distinct file names".into()));
    }
    let tracks = o.tracks.iter().map(|p| Trajectory::read_csv(p)).collect::<Result<Vec<_>>>()?;
    let mut rng = Stream::new(cfg.master_seed).child(OBFUSCATE).rng();
    let cuts = obfuscate_tracks(&tracks, &o.theta, &o.strategy, &mut rng);
    let rows = o
        .tracks
        .iter()
        .zip(&cuts)
        .map(|(p, c)| ObfuscateRow {
            file: p.clone(),
            published: c.published.is_some(),
            t1: c.t1,
            t2: c.t2,
            sp: c.sp,
        })
        .collect();
    Ok(ObfuscateOutput { rows, cuts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub strategy: &'static str,
    pub n: usize,
    pub repeat: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
}

impl BenchOutput {
    /// Median wall time per `(strategy, n)`, in config order.
    pub fn medians(&self, strategy: &str) -> Vec<(usize, f64)> {
        let mut ns: Vec<usize> = self.rows.iter().filter(|r| r.strategy == strategy).map(|r| r.n).collect();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let t: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.strategy == strategy && r.n == n)
                    .map(|r| r.wall_time)
                    .collect();
                (n, median(&t))
            })
            .collect()
    }

    /// Least-squares `(slope, intercept)` of median time on n.
    pub fn linear_fit(&self, strategy: &str) -> (f64, f64) {
        let m = self.medians(strategy);
        let k = m.len() as f64;
        let mx = m.iter().map(|p| p.0 as f64).sum::<f64>() / k;
        let my = m.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = m.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
        let sxx: f64 = m.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        (slope, my - slope * mx)
    }

    /// `time(n_hi) / time(n_lo)` from medians, if both sizes were run.
    pub fn ratio(&self, strategy: &str, n_lo: usize, n_hi: usize) -> Option<f64> {
        let m = self.medians(strategy);
        let get = |n| m.iter().find(|p| p.0 == n).map(|p| p.1);
        Some(get(n_hi)? / get(n_lo)?)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut s = String::from("strategy,n,repeat,wall_time\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.strategy, r.n, r.repeat, r.wall_time);
        }
        write_file(dir, "bench.csv", &s)?;
        let mut s = String::from("strategy,slope_s_per_track,intercept_s,ratio_200_50\n");
        for tag in ["TB", "RR"] {
            let (slope, intercept) = self.linear_fit(tag);
            let ratio = self.ratio(tag, 50, 200).map_or(String::new(), |r| r.to_string());
            let _ = writeln!(s, "{tag},{slope},{intercept},{ratio}");
        }
        write_file(dir, "bench_summary.csv", &s)?;
        let pts = |tag| self.medians(tag).into_iter().map(|(n, t)| (n as f64, t)).collect();
        let chart = Chart {
            title: "Attack wall time".into(),
            x_label: "n".into(),
            y_label: "seconds (median)".into(),
            series: vec![
                Series::line("two-balls", pts("TB"), TB_COLOR),
                Series::line("random-radius", pts("RR"), RR_COLOR),
            ],
            ..Default::default()
        };
        write_file(dir, "bench.svg", &chart.render())
    }
}

/// Wall time of attacks on the curve setting, run one at a time.
pub fn run_bench(cfg: &ScenarioConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let calibration = calibrate_setting(cfg, BENCH, 1, cfg.curve_setting)?;
    let specs = [
        (cfg.curve_setting.spec()?, TB_OBS, TB_ATTACK),
        (calibration.random_radius(), RR_OBS, RR_ATTACK),
    ];
    let base = Stream::new(cfg.master_seed).path(&[BENCH, 1]);
    let mut rows = vec![];
    for (spec, obs_role, attack_role) in specs {
        for &n in &cfg.bench.sizes {
            for repeat in 0..cfg.bench.repeats {
                let key = [n as u64, repeat as u64];
                let (_, report) = attack_once(cfg, &spec, n, base.child(obs_role).path(&key), base.child(attack_role).path(&key))?;
                rows.push(BenchRow {
                    strategy: spec.tag(),
                    n,
                    repeat,
                    wall_time: report.wall_time,
                });
            }
        }
    }
    Ok(BenchOutput { rows })
}
