//! One function per subcommand, each returning a finished report.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qsd_core::circuit::{parse_circuit, Circuit};
use qsd_core::linalg::io::parse_matrices;
use qsd_core::linalg::io::parse_matrix;
use qsd_core::linalg::{fidelity, trace_distance};
use qsd_core::polarize::{polarize_bounds, PolarizationParams};
use qsd_core::protocols::{
    closeness_test_on_circuits, distance_test_on_states, sample_acceptance,
    simulator_views_closeness_on_circuits, simulator_views_distance_on_states, ProtocolKind,
    ProverStrategy,
};
use qsd_core::reduction::{
    build_qsd, check_complete1, max_accept_certified, parse_qps, reduction_states,
};
use qsd_core::states::{prepare_mixed, QsdInstance};
use qsd_core::tna::{trace_norm_approx, TnaMethod};
use qsd_core::{Capacity, ComplexMatrix};

use crate::report::{num, sha256_hex, Report};
use crate::ParamArgs;

/// Accuracy claimed for values computed from exact density matrices.
const EXACT_TOL: f64 = 1e-10;
/// Slack in bound checks.
const CHECK_TOL: f64 = 1e-8;
/// Gap the reduction must stay under for a zero-error accepting system.
const YES_GAP: f64 = 1e-3;

fn read(report: &mut Report, path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn read_circuit(report: &mut Report, path: &Path) -> Result<Circuit> {
    let text = read(report, path)?;
    parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Digest of a matrix rounded to the report precision, so it does not
/// depend on the last bits of the arithmetic.
fn matrix_digest(m: &ComplexMatrix) -> String {
    let mut text = format!("{}x{}\n", m.rows(), m.cols());
    for z in m.as_slice() {
        text.push_str(&num(z.re));
        text.push(' ');
        text.push_str(&num(z.im));
        text.push('\n');
    }
    sha256_hex(text.as_bytes())
}

fn emitted_text(params: &PolarizationParams, c: &Circuit) -> String {
    format!("{}\n{}", params.to_header(), c.to_text())
}

pub fn dist(echo: &str, p0: &Path, p1: &Path) -> Result<Report> {
    let mut report = Report::new(echo);
    let q0 = read_circuit(&mut report, p0)?;
    let q1 = read_circuit(&mut report, p1)?;
    let cap = Capacity::from_env()?;
    let r0 = prepare_mixed(&q0, &cap)?;
    let r1 = prepare_mixed(&q1, &cap)?;
    if r0.rows() != r1.rows() {
        bail!(
            "circuits output {} and {} qubits",
            q0.num_outputs(),
            q1.num_outputs()
        );
    }
    let d = trace_distance(&r0, &r1)?;
    let f = fidelity(&r0, &r1)?;
    let (lo, hi) = (1.0 - f, (1.0 - f * f).max(0.0).sqrt());
    report.number("trace_distance", d, EXACT_TOL);
    report.number("fidelity", f, EXACT_TOL);
    report.number("fvdg_lower", lo, EXACT_TOL);
    // √(1 − F²) amplifies an error δ in F to at most min(2δ/hi, √(2δ))
    let hi_tol = (2.0 * EXACT_TOL / hi).min((2.0 * EXACT_TOL).sqrt());
    report.number("fvdg_upper", hi, round_up_tol(hi_tol));
    report.check(
        "fuchs_van_de_graaf",
        lo - CHECK_TOL <= d && d <= hi + CHECK_TOL,
        format!("1 - F <= D <= sqrt(1 - F^2) within {CHECK_TOL:e}"),
    );
    Ok(report)
}

/// `x` rounded up to one significant digit, so it prints cleanly.
fn round_up_tol(x: f64) -> f64 {
    let exp = x.log10().floor() as i32;
    let mantissa = (x / 10f64.powi(exp)).ceil();
    format!("{mantissa}e{exp}").parse().unwrap_or(x)
}

/// Parameters from the flags: explicit `--r --s --n`, thresholds with
/// `--alpha --beta --n`, or `fallback` when neither is given.
fn params_from(
    args: &ParamArgs,
    fallback: Option<PolarizationParams>,
    closeness: bool,
) -> Result<PolarizationParams> {
    match (args.r, args.s, args.alpha, args.beta) {
        (Some(r), Some(s), None, None) => Ok(PolarizationParams::with_override(
            r,
            s,
            args.n.unwrap_or(1),
        )?),
        (None, None, Some(a), Some(b)) => {
            let n = args.n.context("--n is required with --alpha and --beta")?;
            Ok(if closeness {
                PolarizationParams::for_closeness(a, b, n)?
            } else {
                PolarizationParams::derive(a, b, n)?
            })
        }
        (None, None, None, None) => match fallback {
            Some(p) => Ok(match args.n {
                Some(n) => PolarizationParams::with_override(p.r, p.s, n)?,
                None => p,
            }),
            None => bail!("give either --alpha and --beta, or --r and --s"),
        },
        _ => bail!("give either --alpha and --beta, or --r and --s, not a mix"),
    }
}

fn report_params(report: &mut Report, p: &PolarizationParams) {
    report.text("params.n", p.n.to_string());
    report.text("params.r", p.r.to_string());
    report.text("params.s", p.s.to_string());
    if p.s_capped {
        report.text("params.s_capped", "true");
    }
}

pub fn polarize(
    echo: &str,
    p0: &Path,
    p1: &Path,
    args: &ParamArgs,
    out: Option<&Path>,
) -> Result<Report> {
    let mut report = Report::new(echo);
    let q0 = read_circuit(&mut report, p0)?;
    let q1 = read_circuit(&mut report, p1)?;
    if q0.num_outputs() != q1.num_outputs() {
        bail!(
            "circuits output {} and {} qubits",
            q0.num_outputs(),
            q1.num_outputs()
        );
    }
    let params = params_from(args, None, false)?;
    report_params(&mut report, &params);
    let cap = Capacity::from_env()?;
    let width = params.emitted_width(q0.width().max(q1.width()));
    report.text("emitted_width", width.to_string());
    if width > cap.max_emit_qubits {
        report.note(format!(
            "emitted width {width} exceeds the limit of {} qubits; parameters only",
            cap.max_emit_qubits
        ));
        return Ok(report);
    }
    let (r0, r1) = qsd_core::polarize::polarize(&q0, &q1, &params, &cap)?;
    if let Some(dir) = out {
        write(dir, "r0.qc", &emitted_text(&params, &r0))?;
        write(dir, "r1.qc", &emitted_text(&params, &r1))?;
        report.text("wrote", "r0.qc r1.qc");
    }
    if width > cap.max_qubits {
        report.note(format!(
            "emitted width {width} is above the simulation limit of {} qubits; distances not computed",
            cap.max_qubits
        ));
        return Ok(report);
    }
    let d_in = trace_distance(&prepare_mixed(&q0, &cap)?, &prepare_mixed(&q1, &cap)?)?;
    let d_out = trace_distance(&prepare_mixed(&r0, &cap)?, &prepare_mixed(&r1, &cap)?)?;
    let (lo, hi) = polarize_bounds(d_in, &params)?;
    report.number("distance_in", d_in, EXACT_TOL);
    report.number("distance_out", d_out, EXACT_TOL);
    report.number("bound_lower", lo, EXACT_TOL);
    report.number("bound_upper", hi, EXACT_TOL);
    report.check(
        "polarize_bounds",
        lo - CHECK_TOL <= d_out && d_out <= hi + CHECK_TOL,
        format!("lower <= distance_out <= upper within {CHECK_TOL:e}"),
    );
    Ok(report)
}

fn prover_from(report: &mut Report, spec: &str) -> Result<ProverStrategy> {
    if spec == "honest" {
        return Ok(ProverStrategy::HonestOptimal);
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed = seed
            .parse()
            .with_context(|| format!("bad seed in `--prover {spec}`"))?;
        return Ok(ProverStrategy::Random(seed));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = read(report, Path::new(path))?;
        let ks = parse_matrices(&text).with_context(|| format!("parsing {path}"))?;
        return Ok(ProverStrategy::FixedChannel(ks));
    }
    bail!("unknown prover `{spec}` (expected honest, random:<seed> or file:<path>)")
}

#[allow(clippy::too_many_arguments)]
pub fn protocol(
    echo: &str,
    kind: ProtocolKind,
    p0: &Path,
    p1: &Path,
    prover_spec: &str,
    args: &ParamArgs,
    shots: Option<u64>,
    seed: u64,
) -> Result<Report> {
    let mut report = Report::new(echo);
    let q0 = read_circuit(&mut report, p0)?;
    let q1 = read_circuit(&mut report, p1)?;
    let prover = prover_from(&mut report, prover_spec)?;
    let trivial = PolarizationParams::with_override(1, 1, 1)?;
    let params = params_from(args, Some(trivial), kind == ProtocolKind::Closeness)?;
    let inst = QsdInstance::new(q0, q1, args.alpha.unwrap_or(0.0), args.beta.unwrap_or(1.0))?;
    let cap = Capacity::from_env()?;
    report.text("protocol", kind.name());
    report_params(&mut report, &params);
    let (r0, r1) = qsd_core::polarize::polarize(&inst.q0, &inst.q1, &params, &cap)?;
    let (t, sim) = match kind {
        ProtocolKind::Distance => {
            let xi0 = prepare_mixed(&r0, &cap)?;
            let xi1 = prepare_mixed(&r1, &cap)?;
            let t = distance_test_on_states(&xi0, &xi1, &prover, &params)?;
            (t, simulator_views_distance_on_states(&xi0, &xi1)?)
        }
        ProtocolKind::Closeness => {
            let t = closeness_test_on_circuits(&r0, &r1, &prover, &params, &cap)?;
            (t, simulator_views_closeness_on_circuits(&r0, &r1, &cap)?)
        }
    };
    report.number("acceptance", t.acceptance, EXACT_TOL);
    report.number("optimum", t.optimum, EXACT_TOL);
    report.number("completeness_error", t.completeness_error(), EXACT_TOL);
    if let Some(b) = t.completeness_bound {
        report.number("completeness_bound", b, EXACT_TOL);
    }
    for (i, v) in t.views.iter().enumerate() {
        report.text(&format!("view.{}.sha256", i + 1), matrix_digest(v));
    }
    if prover == ProverStrategy::HonestOptimal {
        for (i, (v, s)) in t.views.iter().zip(&sim).enumerate() {
            report.number(
                &format!("view.{}.simulator_gap", i + 1),
                trace_distance(v, s)?,
                EXACT_TOL,
            );
        }
    }
    if let Some(shots) = shots {
        report.text("shots", shots.to_string());
        report.text(
            "sampled_acceptance",
            num(sample_acceptance(t.acceptance, shots, seed)?),
        );
    }
    report.check(
        "acceptance_at_most_optimum",
        t.acceptance <= t.optimum + CHECK_TOL,
        format!("acceptance <= optimum + {CHECK_TOL:e}"),
    );
    if prover == ProverStrategy::HonestOptimal {
        report.check(
            "honest_reaches_optimum",
            (t.acceptance - t.optimum).abs() <= CHECK_TOL,
            format!("|acceptance - optimum| <= {CHECK_TOL:e}"),
        );
    }
    if let Some(b) = t.completeness_bound {
        report.check(
            "completeness_bound",
            t.acceptance >= b - CHECK_TOL,
            format!("acceptance >= completeness_bound - {CHECK_TOL:e}"),
        );
    }
    Ok(report)
}

pub fn reduce(echo: &str, path: &Path, out: Option<&Path>, epsilon: Option<f64>) -> Result<Report> {
    let mut report = Report::new(echo);
    let text = read(&mut report, path)?;
    let (ps, sim) = parse_qps(&text).with_context(|| format!("parsing {}", path.display()))?;
    let cap = Capacity::from_env()?;
    report.text("messages", ps.messages.to_string());
    report.text("k", ps.k().to_string());
    let acceptance = ps.acceptance_probability(&cap)?;
    report.number("honest_acceptance", acceptance, EXACT_TOL);
    let (q0, q1) = build_qsd(&ps, &sim, &cap)?;
    report.text("q0_width", q0.width().to_string());
    report.text("q1_width", q1.width().to_string());
    if let Some(dir) = out {
        write(dir, "q0.qc", &q0.to_text())?;
        write(dir, "q1.qc", &q1.to_text())?;
        report.text("wrote", "q0.qc q1.qc");
    }
    let gap = trace_distance(&prepare_mixed(&q0, &cap)?, &prepare_mixed(&q1, &cap)?)?;
    report.number("gap", gap, EXACT_TOL);
    let epsilon = match epsilon {
        Some(e) => Some(e),
        None if ps.messages == 2 => {
            let m = max_accept_certified(&ps, &cap)?;
            report.number("max_accept", m.value, m.gap().max(EXACT_TOL));
            report.number("max_accept_upper", m.upper_bound, EXACT_TOL);
            Some(m.upper_bound)
        }
        None => None,
    };
    if acceptance >= 1.0 - 1e-9 {
        report.check(
            "yes_side_gap",
            gap < YES_GAP,
            format!("gap < {YES_GAP:e} for a system accepting with certainty"),
        );
    } else if let Some(eps) = epsilon {
        let rhos = reduction_states(&ps, &sim, &cap)?;
        let c = check_complete1(&ps, &rhos, eps)?;
        report.number("epsilon", eps, EXACT_TOL);
        report.number("complete1_lhs", c.lhs, EXACT_TOL);
        report.number("complete1_rhs", c.rhs, EXACT_TOL);
        report.check(
            "complete1",
            c.lhs >= c.rhs - CHECK_TOL,
            format!("gap >= (1 - sqrt(eps))^2 / (3(k-1)) - {CHECK_TOL:e}"),
        );
    } else {
        report.note("no maximum-acceptance bound for this system; pass --epsilon to check the gap");
    }
    Ok(report)
}

pub fn tna(echo: &str, path: &Path, k: u32, method: TnaMethod) -> Result<Report> {
    let mut report = Report::new(echo);
    let text = read(&mut report, path)?;
    let x = parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))?;
    let r = trace_norm_approx(&x, k, method)?;
    let target = (-(k as f64)).exp2();
    report.text(
        "method",
        match method {
            TnaMethod::CharPoly => "charpoly",
            TnaMethod::Eig => "eig",
        },
    );
    report.number("trace_norm", r.value, target);
    report.bound("error_bound", r.error_bound);
    report.check(
        "precision",
        r.error_bound < target,
        format!("error bound below 2^-{k}"),
    );
    Ok(report)
}
