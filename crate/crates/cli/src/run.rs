//! Dispatch from a parsed [`CommandSpec`] to the library, and report output.

use std::io::Write;
use std::time::Instant;

use grassmann_invariants::quadrature::HistBin;
use grassmann_invariants::{
    density_report, haar_grassmann, invariance_test, lift, spectral_coords, stiefel_volume,
    theorem2_constants, verify_bistiefel, verify_theorem1, verify_theorem2, verify_zhang,
    Convention, DenseMatrix, Error, Frame, InvariantFn, McPlan, Params, RngState, Subspace,
    VerifyReport, VERSION,
};
use serde::Serialize;

use crate::args::{
    Command, CommandSpec, Format, FrameFn, Identity, McArgs, Nil, OutArgs, SampleKind, SubspaceFn,
};

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Largest deviation accepted by `verify invariance`.
pub const INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or a violated hypothesis; exit code 2.
    Usage(String),
    /// A numerical or I/O failure while running; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_FAIL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::HypothesisViolated(_) | Error::DimensionMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Error report written in place of the normal output.
#[derive(Serialize)]
pub struct ErrorJson<'a> {
    pub command: Option<&'a str>,
    pub version: &'static str,
    pub error: &'a str,
    pub exit_code: u8,
}

pub fn error_json(command: Option<&str>, err: &CliError) -> String {
    let body = ErrorJson {
        command,
        version: VERSION,
        error: err.message(),
        exit_code: err.code(),
    };
    serde_json::to_string_pretty(&body).expect("error report serializes") + "\n"
}

/// Runs the command, writes its report, and returns the exit code.
pub fn run(spec: &CommandSpec) -> u8 {
    let name = command_name(&spec.command);
    let started = Instant::now();
    match execute(&spec.command, started) {
        Ok((body, pass, out)) => match write_out(out, &body) {
            Ok(()) if pass => EXIT_PASS,
            Ok(()) => EXIT_FAIL,
            Err(e) => report_error(&name, &e),
        },
        Err(e) => report_error(&name, &e),
    }
}

fn report_error(name: &str, e: &CliError) -> u8 {
    eprintln!("grassmann {name}: {}", e.message());
    print!("{}", error_json(Some(name), e));
    e.code()
}

fn write_out(out: &OutArgs, body: &str) -> CliResult<()> {
    match &out.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
        }
    }
}

pub fn command_name(c: &Command) -> String {
    match c {
        Command::Constants { .. } => "constants".into(),
        Command::Sample {
            kind: SampleKind::Stiefel { .. },
        } => "sample stiefel".into(),
        Command::Sample {
            kind: SampleKind::Grassmann { .. },
        } => "sample grassmann".into(),
        Command::Angles { .. } => "angles".into(),
        Command::Density { .. } => "density".into(),
        Command::Volume { .. } => "volume".into(),
        Command::Verify { identity } => format!(
            "verify {}",
            match identity {
                Identity::Theorem1 { .. } => "theorem1",
                Identity::Theorem2 { .. } => "theorem2",
                Identity::Bistiefel { .. } => "bistiefel",
                Identity::Zhang { .. } => "zhang",
                Identity::Invariance { .. } => "invariance",
            }
        ),
    }
}

fn plan(mc: &McArgs) -> CliResult<McPlan> {
    Ok(McPlan::new(mc.seed, mc.threads)?)
}

fn elapsed(out: &OutArgs, started: Instant) -> Option<f64> {
    out.timing.then(|| started.elapsed().as_secs_f64() * 1e3)
}

/// `i + l <= n`, checked before any work is done.
fn hypothesis(d: &Nil) -> CliResult<()> {
    if d.i >= d.n || d.l >= d.n {
        return Err(CliError::Usage(format!(
            "need 1 <= i, l <= n - 1, got n={}, i={}, l={}",
            d.n, d.i, d.l
        )));
    }
    if d.i + d.l > d.n {
        return Err(CliError::Usage(format!(
            "hypothesis i + l <= n violated: i={}, l={}, n={}",
            d.i, d.l, d.n
        )));
    }
    Ok(())
}

fn nil_params(d: &Nil) -> Params {
    Params {
        n: Some(d.n),
        i: Some(d.i),
        l: Some(d.l),
        ..Params::default()
    }
}

/// Renders either format: `json` is serialized as is, `csv` fills a writer.
fn render<T: Serialize>(
    format: Format,
    json: &T,
    csv_rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(json)? + "\n"),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            csv_rows(&mut w)?;
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

type Executed<'a> = (String, bool, &'a OutArgs);

fn execute(c: &Command, started: Instant) -> CliResult<Executed<'_>> {
    let name = command_name(c);
    match c {
        Command::Constants { dims, out } => constants(&name, dims, out),
        Command::Volume { n, m, out } => volume(&name, *n, *m, out),
        Command::Sample { kind } => sample(&name, kind, started),
        Command::Angles { dims, mc, out } => angles(&name, dims, mc, out, started),
        Command::Density {
            dims,
            bins,
            mc,
            out,
        } => density(&name, dims, *bins, mc, out, started),
        Command::Verify { identity } => verify(&name, identity, started),
    }
}

#[derive(Serialize)]
struct ConstantsJson<'a> {
    command: &'a str,
    version: &'static str,
    params: Params,
    m: usize,
    alpha: f64,
    beta: f64,
    c_m: f64,
    c: f64,
    c_simplex: f64,
}

fn constants<'a>(name: &str, d: &Nil, out: &'a OutArgs) -> CliResult<Executed<'a>> {
    hypothesis(d)?;
    let k = theorem2_constants(d.n, d.i, d.l)?;
    let json = ConstantsJson {
        command: name,
        version: VERSION,
        params: nil_params(d),
        m: k.m,
        alpha: k.alpha,
        beta: k.beta,
        c_m: k.c_m,
        c: k.c,
        c_simplex: k.c_simplex,
    };
    let body = render(out.format, &json, |w| {
        w.write_record(["n", "i", "l", "m", "alpha", "beta", "c_m", "c", "c_simplex"])?;
        w.write_record([
            d.n.to_string(),
            d.i.to_string(),
            d.l.to_string(),
            k.m.to_string(),
            k.alpha.to_string(),
            k.beta.to_string(),
            k.c_m.to_string(),
            k.c.to_string(),
            k.c_simplex.to_string(),
        ])
    })?;
    Ok((body, true, out))
}

#[derive(Serialize)]
struct VolumeJson<'a> {
    command: &'a str,
    version: &'static str,
    params: Params,
    volume: f64,
    log_volume: f64,
}

fn volume<'a>(name: &str, n: usize, m: usize, out: &'a OutArgs) -> CliResult<Executed<'a>> {
    let v = stiefel_volume(n, m)?;
    let json = VolumeJson {
        command: name,
        version: VERSION,
        params: Params {
            n: Some(n),
            m: Some(m),
            ..Params::default()
        },
        volume: v,
        log_volume: v.ln(),
    };
    let body = render(out.format, &json, |w| {
        w.write_record(["n", "m", "volume", "log_volume"])?;
        w.write_record([
            n.to_string(),
            m.to_string(),
            v.to_string(),
            v.ln().to_string(),
        ])
    })?;
    Ok((body, true, out))
}

#[derive(Serialize)]
struct SampleJson<'a> {
    command: &'a str,
    version: &'static str,
    params: Params,
    seed: u64,
    samples: usize,
    redraws: u64,
    elapsed_ms: Option<f64>,
    /// Row-major matrices, one per draw.
    draws: Vec<Vec<Vec<f64>>>,
}

fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn sample<'a>(name: &str, kind: &'a SampleKind, started: Instant) -> CliResult<Executed<'a>> {
    let (n, cols, mc, out, params) = match kind {
        SampleKind::Stiefel { n, m, mc, out } => (
            *n,
            *m,
            mc,
            out,
            Params {
                n: Some(*n),
                m: Some(*m),
                threads: Some(mc.threads),
                ..Params::default()
            },
        ),
        SampleKind::Grassmann { n, i, mc, out } => (
            *n,
            *i,
            mc,
            out,
            Params {
                n: Some(*n),
                i: Some(*i),
                threads: Some(mc.threads),
                ..Params::default()
            },
        ),
    };
    let grassmann = matches!(kind, SampleKind::Grassmann { .. });
    if cols > n || (grassmann && cols >= n) {
        return Err(CliError::Usage(format!(
            "dimension out of range: n={n}, {}={cols}",
            if grassmann { "i" } else { "m" }
        )));
    }
    let parts = plan(mc)?.fan_out(0, mc.samples, |rng: &mut RngState, count| {
        let mut draws = Vec::with_capacity(count);
        let mut redraws = 0;
        for _ in 0..count {
            let (frame, r) = grassmann_invariants::sampler::haar_stiefel_counted(n, cols, rng);
            redraws += r;
            draws.push(if grassmann {
                rows_of(Subspace::from_frame(&frame).projection().as_dense())
            } else {
                rows_of(frame.matrix())
            });
        }
        (draws, redraws)
    });
    let mut draws = Vec::with_capacity(mc.samples);
    let mut redraws = 0;
    for (d, r) in parts {
        draws.extend(d);
        redraws += r;
    }
    let width = draws.first().map_or(0, |d| d[0].len());
    let json = SampleJson {
        command: name,
        version: VERSION,
        params,
        seed: mc.seed,
        samples: mc.samples,
        redraws,
        elapsed_ms: elapsed(out, started),
        draws,
    };
    let body = render(out.format, &json, |w| {
        let mut header = vec!["sample".to_string(), "row".to_string()];
        header.extend((1..=width).map(|c| format!("c{c}")));
        w.write_record(&header)?;
        for (s, d) in json.draws.iter().enumerate() {
            for (r, row) in d.iter().enumerate() {
                let mut rec = vec![s.to_string(), r.to_string()];
                rec.extend(row.iter().map(f64::to_string));
                w.write_record(&rec)?;
            }
        }
        Ok(())
    })?;
    Ok((body, true, out))
}

#[derive(Serialize)]
struct AnglesJson<'a> {
    command: &'a str,
    version: &'static str,
    params: Params,
    seed: u64,
    samples: usize,
    redraws: u64,
    elapsed_ms: Option<f64>,
    /// Squared cosines, descending.
    lambda: Vec<Vec<f64>>,
    /// Canonical angles `arccos(sqrt(lambda))`, ascending.
    omega: Vec<Vec<f64>>,
}

fn angles<'a>(
    name: &str,
    d: &Nil,
    mc: &McArgs,
    out: &'a OutArgs,
    started: Instant,
) -> CliResult<Executed<'a>> {
    if d.i >= d.n || d.l >= d.n {
        return Err(CliError::Usage(format!(
            "need 1 <= i, l <= n - 1, got n={}, i={}, l={}",
            d.n, d.i, d.l
        )));
    }
    let parts = plan(mc)?.fan_out(0, mc.samples, |rng: &mut RngState, count| -> CliResult<_> {
        let mut lam = Vec::with_capacity(count);
        let mut redraws = 0;
        for _ in 0..count {
            let (frame, r) = grassmann_invariants::sampler::haar_stiefel_counted(d.n, d.i, rng);
            redraws += r;
            lam.push(spectral_coords(&Subspace::from_frame(&frame), d.l)?);
        }
        Ok((lam, redraws))
    });
    let mut lambda = Vec::with_capacity(mc.samples);
    let mut omega = Vec::with_capacity(mc.samples);
    let mut redraws = 0;
    for part in parts {
        let (pts, r) = part?;
        redraws += r;
        for p in pts {
            omega.push(p.angles());
            lambda.push(p.lambda().to_vec());
        }
    }
    let mut params = nil_params(d);
    params.threads = Some(mc.threads);
    let m = d.i.min(d.l);
    let json = AnglesJson {
        command: name,
        version: VERSION,
        params,
        seed: mc.seed,
        samples: mc.samples,
        redraws,
        elapsed_ms: elapsed(out, started),
        lambda,
        omega,
    };
    let body = render(out.format, &json, |w| {
        let mut header = vec!["sample".to_string()];
        header.extend((1..=m).map(|j| format!("lambda_{j}")));
        header.extend((1..=m).map(|j| format!("omega_{j}")));
        w.write_record(&header)?;
        for (s, (l, o)) in json.lambda.iter().zip(&json.omega).enumerate() {
            let mut rec = vec![s.to_string()];
            rec.extend(l.iter().chain(o).map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    Ok((body, true, out))
}

#[derive(Serialize)]
struct DensityJson<'a> {
    command: &'a str,
    version: &'static str,
    params: Params,
    seed: u64,
    samples: usize,
    convention: &'static str,
    redraws: u64,
    ks_as_stated: Option<f64>,
    ks_complement_swapped: Option<f64>,
    elapsed_ms: Option<f64>,
    bins: &'a [HistBin],
}

fn density<'a>(
    name: &str,
    d: &Nil,
    bins: usize,
    mc: &McArgs,
    out: &'a OutArgs,
    started: Instant,
) -> CliResult<Executed<'a>> {
    hypothesis(d)?;
    let r = density_report(d.n, d.i, d.l, mc.samples, bins, &plan(mc)?)?;
    let mut params = nil_params(d);
    params.m = Some(r.m);
    params.threads = Some(mc.threads);
    let json = DensityJson {
        command: name,
        version: VERSION,
        params,
        seed: mc.seed,
        samples: mc.samples,
        convention: Convention::DEFAULT.name(),
        redraws: r.redraws,
        ks_as_stated: r.ks_as_stated,
        ks_complement_swapped: r.ks_complement_swapped,
        elapsed_ms: elapsed(out, started),
        bins: &r.bins,
    };
    let with_expected = r.m == 1;
    let body = render(out.format, &json, |w| {
        let mut header = vec!["bin".to_string(), "lo".to_string(), "hi".to_string()];
        header.extend((1..=r.m).map(|j| format!("count_{j}")));
        if with_expected {
            header.push("expected_as_stated".into());
            header.push("expected_complement_swapped".into());
        }
        w.write_record(&header)?;
        for (k, b) in r.bins.iter().enumerate() {
            let mut rec = vec![k.to_string(), b.lo.to_string(), b.hi.to_string()];
            rec.extend(b.counts.iter().map(u64::to_string));
            if with_expected {
                rec.push(opt(b.expected_as_stated));
                rec.push(opt(b.expected_complement_swapped));
            }
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    Ok((body, true, out))
}

/// Stable key order for every verification report.
#[derive(Serialize)]
struct VerifyJson<'a> {
    command: &'a str,
    version: &'static str,
    params: &'a Params,
    seed: u64,
    samples: usize,
    quad_order: Option<usize>,
    convention: Option<&'a str>,
    lhs: f64,
    rhs: f64,
    stderr: f64,
    z: Option<f64>,
    pass: bool,
    redraws: u64,
    elapsed_ms: Option<f64>,
    exact: Option<f64>,
}

const VERIFY_COLUMNS: [&str; 23] = [
    "command",
    "version",
    "n",
    "i",
    "l",
    "m",
    "k",
    "a",
    "b",
    "f",
    "threads",
    "seed",
    "samples",
    "quad_order",
    "convention",
    "lhs",
    "rhs",
    "stderr",
    "z",
    "pass",
    "redraws",
    "elapsed_ms",
    "exact",
];

fn render_report<'a>(
    name: &str,
    r: &VerifyReport,
    out: &'a OutArgs,
    started: Instant,
) -> CliResult<Executed<'a>> {
    let json = VerifyJson {
        command: name,
        version: VERSION,
        params: &r.params,
        seed: r.seed,
        samples: r.samples,
        quad_order: r.quad_order,
        convention: r.convention.as_deref(),
        lhs: r.lhs,
        rhs: r.rhs,
        stderr: r.stderr,
        z: r.z,
        pass: r.pass,
        redraws: r.redraws,
        elapsed_ms: elapsed(out, started),
        exact: r.exact,
    };
    let p = &r.params;
    let body = render(out.format, &json, |w| {
        w.write_record(VERIFY_COLUMNS)?;
        w.write_record([
            name.to_string(),
            VERSION.to_string(),
            opt(p.n),
            opt(p.i),
            opt(p.l),
            opt(p.m),
            opt(p.k),
            opt(p.a),
            opt(p.b),
            opt(p.f.clone()),
            opt(p.threads),
            r.seed.to_string(),
            r.samples.to_string(),
            opt(r.quad_order),
            opt(r.convention.clone()),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.stderr.to_string(),
            opt(r.z),
            r.pass.to_string(),
            r.redraws.to_string(),
            opt(json.elapsed_ms),
            opt(r.exact),
        ])
    })?;
    Ok((body, r.pass, out))
}

fn frame_fn(f: FrameFn, n: usize, k: usize) -> impl Fn(&Frame) -> f64 + Sync {
    move |v: &Frame| match f {
        FrameFn::One => 1.0,
        FrameFn::TopTrace => v.matrix().row_block(0, n - k).gram().trace(),
        FrameFn::V11Sq => v.matrix()[(0, 0)].powi(2),
    }
}

fn verify<'a>(name: &str, identity: &'a Identity, started: Instant) -> CliResult<Executed<'a>> {
    let (mut report, mc, out) = match identity {
        Identity::Theorem1 {
            n,
            l,
            f0,
            q,
            mc,
            out,
        } => {
            if l >= n {
                return Err(CliError::Usage(format!(
                    "need 1 <= l <= n - 1, got n={n}, l={l}"
                )));
            }
            (
                verify_theorem1(*n, *l, f0, mc.samples, *q, &plan(mc)?)?,
                mc,
                out,
            )
        }
        Identity::Theorem2 {
            dims,
            f0,
            q,
            convention,
            mc,
            out,
        } => {
            hypothesis(dims)?;
            let r = verify_theorem2(
                dims.n,
                dims.i,
                dims.l,
                f0,
                mc.samples,
                *q,
                (*convention).into(),
                &plan(mc)?,
            )?;
            (r, mc, out)
        }
        Identity::Bistiefel {
            n,
            m,
            k,
            func,
            mc,
            out,
        } => {
            if k >= n {
                return Err(CliError::Usage(format!(
                    "need 1 <= k <= n - 1, got n={n}, k={k}"
                )));
            }
            let f = frame_fn(*func, *n, *k);
            let mut r = verify_bistiefel(*n, *m, *k, &f, mc.samples, &plan(mc)?)?;
            r.params.f = Some(func.name().into());
            (r, mc, out)
        }
        Identity::Zhang {
            m,
            a,
            b,
            q,
            mc,
            out,
        } => (
            verify_zhang(*m, *a, *b, mc.samples, *q, &plan(mc)?)?,
            mc,
            out,
        ),
        Identity::Invariance {
            dims,
            func,
            mc,
            out,
        } => {
            if dims.i >= dims.n || dims.l >= dims.n {
                return Err(CliError::Usage(format!(
                    "need 1 <= i, l <= n - 1, got n={}, i={}, l={}",
                    dims.n, dims.i, dims.l
                )));
            }
            let (n, i, l) = (dims.n, dims.i, dims.l);
            let f: Box<dyn InvariantFn> = match func {
                SubspaceFn::TraceProj => Box::new(move |xi: &Subspace| {
                    grassmann_invariants::invariants::trace_against_reference(xi, l)
                }),
                SubspaceFn::E1 => Box::new(|xi: &Subspace| xi.projection()[(0, 0)]),
                SubspaceFn::One => Box::new(|_: &Subspace| 1.0),
                SubspaceFn::Lift(f0) => Box::new(lift(f0.clone(), n, i, l)),
            };
            let mut rng = RngState::new(mc.seed, 0);
            // draw once up front so dimension errors surface as usage errors
            haar_grassmann(n, i, &mut RngState::new(mc.seed, 0))?;
            let mut r = invariance_test(f.as_ref(), n, i, l, mc.samples, &mut rng, INVARIANCE_TOL)?;
            r.params.f = Some(func.name());
            (r, mc, out)
        }
    };
    report.params.threads = Some(mc.threads);
    if let Identity::Theorem1 { f0, .. } | Identity::Theorem2 { f0, .. } = identity {
        report.params.f = Some(f0.to_string());
    }
    render_report(name, &report, out, started)
}
