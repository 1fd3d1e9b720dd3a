use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gtcode::binmat::{load_path, reference_design, write_gtmx, ReferenceKind};
use gtcode::bounds::{bounds_table, ConstructionRow, Row};
use gtcode::construct::{
    build_recipe, compare_designs, crt_sieve, greedy_w_sweep, import_code, lookup, tabulated_set, write_comparison,
    BuildOptions, Declared, GreedyParams, PrimePowerSet, Recipe, Registry, StopReason, Transform, GRID_SIDES,
};
use gtcode::decode::{
    burst_decode, cover_decode, lookup_decode_1, read_tdc_csv, window_decode, write_burst_report, write_report,
    DecodeOutcome,
};
use gtcode::sim::{
    decode_firings, detect, gen_events, import_photons, support_trials, sweep, write_photons, write_stats,
    write_support, write_sweep, ScintParams, SensorParams,
};
use gtcode::verify::{check_overlap_certificate, check_separable, exact_check, random_check, Verdict, VerdictKind, Witness};
use gtcode::{BinaryCode, TestVector};

use crate::config::Header;
use crate::{
    BoundsArgs, Cmd, CompareArgs, ConstructArgs, DecodeArgs, ImportArgs, Layout, Mode, ScintArgs, SimulateArgs,
    SweepArgs, VerifyArgs, Violation,
};

pub(crate) fn dispatch(cmd: Cmd, sep: char, header: Header) -> Result<Option<Violation>> {
    match cmd {
        Cmd::Construct(a) => construct(a, header).map(|_| None),
        Cmd::Import(a) => import(a, header).map(|_| None),
        Cmd::Verify(a) => verify(a, header),
        Cmd::Bounds(a) => bounds(a, sep, header).map(|_| None),
        Cmd::Decode(a) => decode(a, sep, header).map(|_| None),
        Cmd::Simulate(a) => simulate(a, sep, header).map(|_| None),
        Cmd::Sweep(a) => sweep_cmd(a, sep, header).map(|_| None),
        Cmd::Compare(a) => compare(a, sep, header).map(|_| None),
    }
}

/// The given seed, or a fresh one that is printed and logged.
fn resolve_seed(seed: Option<u64>, header: &mut Header) -> u64 {
    let s = seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed={s}");
        s
    });
    header.set("seed", s);
    s
}

fn emit(out: Option<&Path>, header: &Header, body: &[u8]) -> Result<()> {
    let mut buf = header.render().into_bytes();
    buf.extend_from_slice(body);
    match out {
        Some(p) => std::fs::write(p, buf).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(&buf).context("writing to stdout"),
    }
}

fn load_code(path: &Path) -> Result<BinaryCode> {
    load_path(path).with_context(|| format!("loading {}", path.display()))
}

fn code_summary(code: &BinaryCode) -> String {
    let m = code.meta();
    let opt = |v: Option<u32>| v.map_or("?".to_string(), |x| x.to_string());
    format!("{}: t={} n={} d={} w={} mu={}", m.descriptor, code.t(), code.n(), opt(m.certified_d), opt(m.weight), opt(m.max_overlap))
}

fn construct(a: ConstructArgs, mut header: Header) -> Result<()> {
    let code = if let Some(desc) = &a.recipe {
        let recipe: Recipe = desc.parse()?;
        let n = a.n.context("--recipe needs --n")?;
        let mut registry = Registry::default();
        for spec in &a.inner {
            let (name, file) = spec.split_once('=').context("--inner expects NAME=FILE")?;
            registry.register(name, load_code(Path::new(file))?);
        }
        let mut opts = BuildOptions::new(n);
        opts.max_draws = a.max_draws;
        if recipe.transforms.iter().any(|t| matches!(t, Transform::Extend(_))) {
            opts.seed = resolve_seed(a.seed, &mut header);
        }
        let built = build_recipe(&recipe, &opts, &registry)?;
        for (stage, cols) in &built.stages {
            eprintln!("{stage}: {cols} columns");
        }
        built.code
    } else if let Some(kind) = &a.reference {
        let kind = ReferenceKind::parse(kind).with_context(|| format!("unknown reference design {kind:?}"))?;
        reference_design(kind, a.grid.context("--reference needs --grid")?)?
    } else if a.greedy {
        let (t, d) = (a.t.context("--greedy needs --t")?, a.d.context("--greedy needs --d")?);
        let ws: Vec<usize> = parse_range(a.w.as_deref().context("--greedy needs --w")?)?.into_iter().map(|w| w as usize).collect();
        let n = a.n.context("--greedy needs --n")?;
        let seed = resolve_seed(a.seed, &mut header);
        let p = GreedyParams { t, w: 0, d, target_n: n, seed, max_draws: a.max_draws };
        let (w, out) = greedy_w_sweep(p, &ws)?;
        let stop = match out.stop {
            StopReason::Target => "target reached",
            StopReason::Budget => "draw budget used up",
        };
        eprintln!("w={w}: {} columns after {} draws, {stop}", out.code.n(), out.draws);
        out.code
    } else {
        let set = match (a.sieve, &a.moduli) {
            (Some(d), _) => tabulated_set(d).with_context(|| format!("no tabulated prime powers for d = {d}"))?,
            (None, Some(m)) => PrimePowerSet::new(m.clone())?,
            _ => unreachable!("clap requires one source"),
        };
        crt_sieve(&set, a.n.context("the sieve needs --n")?)?
    };
    eprintln!("{}", code_summary(&code));
    let mut body = Vec::new();
    write_gtmx(&code, &mut body)?;
    emit(a.out.as_deref(), &header, &body)
}

fn import(a: ImportArgs, header: Header) -> Result<()> {
    let text = std::fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let declared = Declared { length: a.length, weight: a.weight, distance: a.distance, overlap: a.overlap };
    let desc = a
        .desc
        .clone()
        .unwrap_or_else(|| a.file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let code = import_code(&text, &declared, &desc)?;
    eprintln!("{}", code_summary(&code));
    let mut body = Vec::new();
    write_gtmx(&code, &mut body)?;
    emit(a.out.as_deref(), &header, &body)
}

fn verify(a: VerifyArgs, mut header: Header) -> Result<Option<Violation>> {
    let code = load_code(&a.code)?;
    let v: Verdict = match a.mode {
        Mode::Cert => check_overlap_certificate(&code, a.d)?,
        Mode::Random => random_check(&code, a.d, a.trials, resolve_seed(a.seed, &mut header))?,
        Mode::Separable => check_separable(&code, a.d, a.budget)?,
        Mode::Exact => match a.targets {
            Some(k) => {
                ensure!(k >= 1 && k <= code.n(), "--targets must lie in 1..={}", code.n());
                let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(a.seed, &mut header));
                let mut targets = sample(&mut rng, code.n(), k).into_vec();
                targets.sort_unstable();
                exact_check(&code, a.d, Some(&targets), a.budget)?
            }
            None => exact_check(&code, a.d, None, a.budget)?,
        },
    };
    let kind = match v.kind {
        VerdictKind::CertifiedTrue => "certified",
        VerdictKind::CertifiedFalse => "violation",
        VerdictKind::NoViolationFound => "no_violation_found",
    };
    let property = if a.mode == Mode::Separable { "separable" } else { "disjunct" };
    let mut report = format!(
        "property={property} d={} verdict={kind} effort={} targets={}\n",
        a.d, v.effort, v.targets
    );
    let list = |s: &[usize]| s.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(",");
    match &v.witness {
        Some(Witness::Cover { target, cover }) => {
            report.push_str(&format!("witness target={target} cover={}\n", list(cover)))
        }
        Some(Witness::Collision { a, b }) => {
            report.push_str(&format!("witness a={} b={}\n", list(a), list(b)))
        }
        None => {}
    }
    if a.out.is_some() {
        eprint!("{report}");
    }
    emit(a.out.as_deref(), &header, report.as_bytes())?;
    Ok(v.is_violation().then_some(Violation))
}

/// `2..6`, `2..=6` and `2,4,5` all give inclusive lists.
fn parse_range(s: &str) -> Result<Vec<u64>> {
    let num = |x: &str| -> Result<u64> { x.trim().parse().map_err(|_| anyhow::anyhow!("bad number {x:?} in {s:?}")) };
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        ensure!(lo <= hi, "empty range {s:?}");
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

fn bounds(a: BoundsArgs, sep: char, header: Header) -> Result<()> {
    let ds: Vec<u32> = parse_range(&a.d)?.into_iter().map(|d| u32::try_from(d)).collect::<Result<_, _>>()?;
    let rows: Vec<Row> = match a.rows.as_deref() {
        None | Some("all") => Row::ALL.to_vec(),
        Some("computed") => Row::COMPUTED.to_vec(),
        Some(list) => list
            .split(',')
            .map(|r| {
                let mut c = r.trim().chars();
                match (c.next(), c.next()) {
                    (Some(id), None) => Row::from_id(id).with_context(|| format!("unknown row {r:?}")),
                    _ => bail!("rows are single letters, found {r:?}"),
                }
            })
            .collect::<Result<_>>()?,
    };
    let mut constructions = Vec::new();
    for &d in &ds {
        if rows.contains(&Row::N) {
            if let Some(e) = usize::try_from(a.n).ok().and_then(|n| lookup(n, d)) {
                constructions.push(ConstructionRow { row: Row::N, d, t: e.t as u64, label: e.descriptor.to_string() });
            }
        }
        if rows.contains(&Row::M) {
            if let Some(set) = tabulated_set(d).filter(|s| s.certified_d(a.n as usize) >= d) {
                let label = format!("sieve over {:?}", set.entries());
                constructions.push(ConstructionRow { row: Row::M, d, t: set.sum(), label });
            }
        }
    }
    let table = bounds_table(a.n, &ds, &rows, &constructions)?;
    for r in &table.non_monotone {
        eprintln!("warning: row {r} decreases somewhere in d");
    }
    if !table.sandwich {
        eprintln!("warning: a lower bound exceeds an upper bound");
    }
    let mut body = Vec::new();
    match a.layout {
        Layout::Long => table.write_long(&mut body, sep)?,
        Layout::Wide => table.write_wide(&mut body, sep)?,
    }
    emit(a.out.as_deref(), &header, &body)
}

fn decode(a: DecodeArgs, sep: char, header: Header) -> Result<()> {
    let code = load_code(&a.code)?;
    let single = |y: &TestVector| -> Result<DecodeOutcome> {
        Ok(if a.lookup { lookup_decode_1(&code, y)? } else { cover_decode(&code, y)? })
    };
    let mut body = Vec::new();
    if let Some(rows) = &a.vector {
        let y = TestVector::new(code.t(), rows.clone())?;
        let out = single(&y)?;
        let support: Vec<String> = out.support.iter().map(|j| j.to_string()).collect();
        writeln!(body, "outcome{sep}support")?;
        writeln!(body, "{}{sep}{}", out.kind.as_str(), support.join(" "))?;
    } else {
        let path = a.tdc.as_ref().expect("clap requires an input");
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let stream = read_tdc_csv(file, code.t(), a.interval_ps).with_context(|| format!("reading {}", path.display()))?;
        ensure!(!a.lookup, "--lookup decodes single vectors only");
        match a.burst_gap {
            Some(g) => write_burst_report(&mut body, &burst_decode(&code, &stream, g)?, sep)?,
            None => write_report(&mut body, &window_decode(&code, &stream)?, sep)?,
        }
    }
    emit(a.out.as_deref(), &header, &body)
}

fn params(s: &ScintArgs, dead_ns: f64, tdc_ps: u64) -> (ScintParams, SensorParams) {
    let scint = ScintParams {
        yield_per_mev: s.yield_per_mev,
        energy_mev: s.energy_mev,
        decay_ns: s.decay_ns,
        events: s.events,
        event_gap_ns: s.event_gap_ns,
    };
    let sensor = SensorParams {
        grid_m: s.grid,
        fill_factor: s.fill_factor,
        quantum_eff: s.quantum_eff,
        dead_time_ns: dead_ns,
        tdc_interval_ps: tdc_ps,
    };
    (scint, sensor)
}

fn simulate(a: SimulateArgs, sep: char, mut header: Header) -> Result<()> {
    let code = load_code(&a.code)?;
    let seed = resolve_seed(a.seed, &mut header);
    let mut body = Vec::new();
    if let Some(sizes) = &a.support_sizes {
        let rows = sizes
            .iter()
            .map(|&s| Ok((s, support_trials(&code, s, a.trials, seed)?)))
            .collect::<Result<Vec<_>>>()?;
        write_support(&mut body, &rows, sep)?;
        return emit(a.out.as_deref(), &header, &body);
    }
    let (scint, sensor) = params(&a.scint, a.dead_ns, a.tdc_ps);
    ensure!(code.n() >= sensor.pixels(), "code has {} columns, a {}x{} grid needs {}", code.n(), sensor.grid_m, sensor.grid_m, sensor.pixels());
    let photons = match &a.photons {
        Some(p) => {
            let f = std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
            import_photons(f).with_context(|| format!("reading {}", p.display()))?
        }
        None => gen_events(&scint, seed)?,
    };
    if let Some(p) = &a.export_photons {
        let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_photons(std::io::BufWriter::new(f), &photons)?;
    }
    let firings = detect(&photons, &sensor, seed)?;
    let stats = decode_firings(&code, &firings, sensor.tdc_interval_ps)?;
    eprintln!("{} firings, {:.3}% missed", stats.total_firings, stats.missed_pct());
    write_stats(&mut body, &stats, sep)?;
    emit(a.out.as_deref(), &header, &body)
}

fn sweep_cmd(a: SweepArgs, sep: char, mut header: Header) -> Result<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.codes)
        .with_context(|| format!("listing {}", a.codes.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "gtmx"));
    ensure!(!files.is_empty(), "no .gtmx files in {}", a.codes.display());
    let mut codes = files.iter().map(|p| Ok((load_code(p)?, p))).collect::<Result<Vec<_>>>()?;
    codes.sort_by(|(a, pa), (b, pb)| (a.meta().certified_d, pa).cmp(&(b.meta().certified_d, pb)));
    let labels: Vec<String> = codes
        .iter()
        .map(|(c, p)| {
            let d = c.meta().certified_d.map_or("?".into(), |d| d.to_string());
            format!("d={d}:{}", p.file_stem().unwrap_or_default().to_string_lossy())
        })
        .collect();
    header.set("code_files", labels.join(" "));
    let seed = resolve_seed(a.seed, &mut header);
    let (scint, sensor) = params(&a.scint, 0.0, 1);
    let refs: Vec<&BinaryCode> = codes.iter().map(|(c, _)| c).collect();
    let rows = sweep(&scint, &sensor, &a.dead_ns, &a.tdc_ps, &refs, seed)?;
    let mut body = Vec::new();
    write_sweep(&mut body, &rows, &labels, sep)?;
    emit(a.out.as_deref(), &header, &body)
}

fn compare(a: CompareArgs, sep: char, header: Header) -> Result<()> {
    let sides = a.sides.unwrap_or_else(|| GRID_SIDES.to_vec());
    let rows = compare_designs(&sides)?;
    let mut body = Vec::new();
    write_comparison(&mut body, &rows, sep)?;
    emit(a.out.as_deref(), &header, &body)
}
