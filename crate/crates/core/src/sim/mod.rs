//! Statistical scintillation events and a SiPM/TDC detector model.
//!
//! Photon counts are Poisson, arrival times exponential, and pixels are
//! drawn uniformly; each event uses its own random streams so results do
//! not depend on how events are scheduled across threads.

mod photons;

pub use photons::{import_photons, write_photons};

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;

use crate::binmat::BinaryCode;
use crate::decode::{DecodeKind, Decoder};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScintParams {
    pub yield_per_mev: f64,
    pub energy_mev: f64,
    /// Fast decay constant; 0 puts every photon at the event start.
    pub decay_ns: f64,
    pub events: usize,
    /// Spacing between event starts.
    pub event_gap_ns: u64,
}

impl Default for ScintParams {
    fn default() -> Self {
        Self { yield_per_mev: 26_000.0, energy_mev: 0.511, decay_ns: 40.0, events: 1_000, event_gap_ns: 10_000 }
    }
}

impl ScintParams {
    pub fn mean_photons(&self) -> f64 {
        self.yield_per_mev * self.energy_mev
    }

    fn check(&self) -> Result<()> {
        if !(self.yield_per_mev > 0.0 && self.energy_mev > 0.0 && self.decay_ns >= 0.0) || self.event_gap_ns == 0 {
            return Err(Error::Invalid("scintillation parameters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorParams {
    pub grid_m: usize,
    pub fill_factor: f64,
    pub quantum_eff: f64,
    pub dead_time_ns: f64,
    pub tdc_interval_ps: u64,
}

impl Default for SensorParams {
    fn default() -> Self {
        Self { grid_m: 60, fill_factor: 0.70, quantum_eff: 0.50, dead_time_ns: 20.0, tdc_interval_ps: 40 }
    }
}

impl SensorParams {
    pub fn pixels(&self) -> usize {
        self.grid_m * self.grid_m
    }

    fn check(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if self.grid_m == 0 || !unit(self.fill_factor) || !unit(self.quantum_eff) {
            return Err(Error::Invalid("need grid_m >= 1 and 0 < fill factor, quantum efficiency <= 1".into()));
        }
        if self.dead_time_ns < 0.0 || self.tdc_interval_ps == 0 {
            return Err(Error::Invalid("dead time must be >= 0 and the TDC interval positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Photon {
    pub event: u32,
    /// Absolute arrival time.
    pub time_ps: u64,
    /// Preassigned pixel (row-major), bypassing uniform assignment.
    pub pixel: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Firing {
    pub event: u32,
    pub time_ps: u64,
    pub pixel: u32,
}

const GEN: u64 = 0;
const DETECT: u64 = 1;

fn event_rng(seed: u64, event: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(event * 2 + purpose);
    rng
}

pub fn gen_events(scint: &ScintParams, seed: u64) -> Result<Vec<Photon>> {
    scint.check()?;
    let count = Poisson::new(scint.mean_photons()).map_err(|e| Error::Invalid(e.to_string()))?;
    let decay = (scint.decay_ns > 0.0).then(|| Exp::new(1.0 / (scint.decay_ns * 1e3)).expect("positive rate"));
    let per_event: Vec<Vec<Photon>> = (0..scint.events)
        .into_par_iter()
        .map(|e| {
            let mut rng = event_rng(seed, e as u64, GEN);
            let start = e as u64 * scint.event_gap_ns * 1_000;
            let n = count.sample(&mut rng) as usize;
            let mut v: Vec<Photon> = (0..n)
                .map(|_| {
                    let dt = decay.as_ref().map_or(0.0, |d| d.sample(&mut rng));
                    Photon { event: e as u32, time_ps: start + dt as u64, pixel: None }
                })
                .collect();
            v.sort_unstable();
            v
        })
        .collect();
    Ok(per_event.concat())
}

fn group_by_event<T: Copy>(items: &[T], key: impl Fn(&T) -> u32) -> BTreeMap<u32, Vec<T>> {
    let mut map: BTreeMap<u32, Vec<T>> = BTreeMap::new();
    for it in items {
        map.entry(key(it)).or_default().push(*it);
    }
    map
}

/// Applies photon detection efficiency, pixel assignment and dead time.
/// Events are treated as independent: dead time never carries across.
pub fn detect(photons: &[Photon], sensor: &SensorParams, seed: u64) -> Result<Vec<Firing>> {
    sensor.check()?;
    let pixels = sensor.pixels() as u32;
    if let Some(p) = photons.iter().find_map(|p| p.pixel.filter(|&x| x >= pixels)) {
        return Err(Error::Invalid(format!("photon pixel {p} outside a {0}x{0} grid", sensor.grid_m)));
    }
    let pde = sensor.fill_factor * sensor.quantum_eff;
    let dead = (sensor.dead_time_ns * 1e3).round() as u64;
    let groups: Vec<(u32, Vec<Photon>)> = group_by_event(photons, |p| p.event).into_iter().collect();
    let per_event: Vec<Vec<Firing>> = groups
        .into_par_iter()
        .map(|(event, mut ph)| {
            ph.sort_unstable();
            let mut rng = event_rng(seed, event as u64, DETECT);
            let mut busy_until: HashMap<u32, u64> = HashMap::new();
            let mut out = Vec::new();
            for p in ph {
                // Draw both numbers for every photon so the stream stays aligned.
                let keep = rng.gen::<f64>() < pde;
                let drawn = rng.gen_range(0..pixels);
                if !keep {
                    continue;
                }
                let pixel = p.pixel.unwrap_or(drawn);
                match busy_until.get(&pixel) {
                    Some(&until) if p.time_ps < until => continue,
                    _ => {
                        busy_until.insert(pixel, p.time_ps + dead);
                        out.push(Firing { event, time_ps: p.time_ps, pixel });
                    }
                }
            }
            out
        })
        .collect();
    Ok(per_event.concat())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiplicityRow {
    pub multiplicity: usize,
    pub windows: u64,
    pub decoded: u64,
}

impl MultiplicityRow {
    pub fn decoded_pct(&self) -> f64 {
        100.0 * self.decoded as f64 / self.windows.max(1) as f64
    }

    /// Empirical failure rate at this multiplicity.
    pub fn alpha(&self) -> f64 {
        1.0 - self.decoded as f64 / self.windows.max(1) as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    /// Indexed by multiplicity, starting at 1.
    pub rows: Vec<MultiplicityRow>,
    pub total_firings: u64,
    pub missed_firings: u64,
    /// Success windows whose support differs from the truth; always 0.
    pub wrong_successes: u64,
    pub max_simultaneous: usize,
}

impl SimStats {
    pub fn missed_pct(&self) -> f64 {
        100.0 * self.missed_firings as f64 / self.total_firings.max(1) as f64
    }

    pub fn row(&self, multiplicity: usize) -> Option<&MultiplicityRow> {
        self.rows.get(multiplicity.checked_sub(1)?)
    }

    fn record(&mut self, s: usize, ok: bool) {
        if self.rows.len() < s {
            self.rows.extend((self.rows.len() + 1..=s).map(|m| MultiplicityRow { multiplicity: m, ..Default::default() }));
        }
        let row = &mut self.rows[s - 1];
        row.windows += 1;
        self.total_firings += s as u64;
        if ok {
            row.decoded += 1;
        } else {
            self.missed_firings += s as u64;
        }
        self.max_simultaneous = self.max_simultaneous.max(s);
    }

    fn merge(mut self, other: SimStats) -> SimStats {
        for r in other.rows {
            if self.rows.len() < r.multiplicity {
                let m = r.multiplicity;
                self.rows
                    .extend((self.rows.len() + 1..=m).map(|k| MultiplicityRow { multiplicity: k, ..Default::default() }));
            }
            let row = &mut self.rows[r.multiplicity - 1];
            row.windows += r.windows;
            row.decoded += r.decoded;
        }
        self.total_firings += other.total_firings;
        self.missed_firings += other.missed_firings;
        self.wrong_successes += other.wrong_successes;
        self.max_simultaneous = self.max_simultaneous.max(other.max_simultaneous);
        self
    }
}

/// Bins firings into TDC windows, decodes each window and compares with the
/// firing pixels. Pixel `j` drives code column `j`.
pub fn decode_firings(code: &BinaryCode, firings: &[Firing], interval_ps: u64) -> Result<SimStats> {
    if interval_ps == 0 {
        return Err(Error::Invalid("TDC interval must be positive".into()));
    }
    if let Some(f) = firings.iter().find(|f| f.pixel as usize >= code.n()) {
        return Err(Error::TooFewColumns { needed: f.pixel as usize + 1, n: code.n() });
    }
    let dec = Decoder::new(code);
    let groups: Vec<(u32, Vec<Firing>)> = group_by_event(firings, |f| f.event).into_iter().collect();
    Ok(groups
        .into_par_iter()
        .map(|(_, mut fs)| {
            fs.sort_unstable_by_key(|f| (f.time_ps / interval_ps, f.pixel));
            let mut stats = SimStats::default();
            for win in fs.chunk_by(|a, b| a.time_ps / interval_ps == b.time_ps / interval_ps) {
                let mut truth: Vec<usize> = win.iter().map(|f| f.pixel as usize).collect();
                truth.dedup();
                let y = code.superimpose(&truth).expect("pixels checked against n");
                let out = dec.decode(&y);
                let ok = out.kind == DecodeKind::Success;
                if ok && out.support != truth {
                    stats.wrong_successes += 1;
                }
                stats.record(win.len(), ok);
            }
            stats
        })
        .reduce(SimStats::default, SimStats::merge))
}

/// Generation, detection, TDC binning and decoding in one pass.
pub fn run(scint: &ScintParams, sensor: &SensorParams, code: &BinaryCode, seed: u64) -> Result<SimStats> {
    if code.n() < sensor.pixels() {
        return Err(Error::TooFewColumns { needed: sensor.pixels(), n: code.n() });
    }
    let photons = gen_events(scint, seed)?;
    let firings = detect(&photons, sensor, seed)?;
    decode_firings(code, &firings, sensor.tdc_interval_ps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportCounts {
    pub trials: u64,
    pub successes: u64,
    pub wrong_successes: u64,
}

impl SupportCounts {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials.max(1) as f64
    }
}

/// Decodes the superposition of `trials` uniform random `s`-subsets.
pub fn support_trials(code: &BinaryCode, s: usize, trials: u64, seed: u64) -> Result<SupportCounts> {
    if s == 0 || s > code.n() {
        return Err(Error::Invalid(format!("support size {s} outside 1..={}", code.n())));
    }
    const CHUNK: u64 = 1024;
    let dec = Decoder::new(code);
    let chunks = trials.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut acc = SupportCounts { trials: 0, successes: 0, wrong_successes: 0 };
            for _ in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut sup = sample(&mut rng, code.n(), s).into_vec();
                sup.sort_unstable();
                let out = dec.decode(&code.superimpose(&sup).expect("indices below n"));
                acc.trials += 1;
                if out.kind == DecodeKind::Success {
                    acc.successes += 1;
                    if out.support != sup {
                        acc.wrong_successes += 1;
                    }
                }
            }
            acc
        })
        .reduce(
            || SupportCounts { trials: 0, successes: 0, wrong_successes: 0 },
            |a, b| SupportCounts {
                trials: a.trials + b.trials,
                successes: a.successes + b.successes,
                wrong_successes: a.wrong_successes + b.wrong_successes,
            },
        ))
}

pub fn random_support_success(code: &BinaryCode, s: usize, trials: u64, seed: u64) -> Result<f64> {
    Ok(support_trials(code, s, trials, seed)?.fraction())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub dead_time_ns: f64,
    pub tdc_interval_ps: u64,
    pub firings: u64,
    pub max_simultaneous: usize,
    /// One entry per code, in the order given.
    pub missed_pct: Vec<f64>,
}

/// Missed-firing percentages over a dead time × TDC interval grid. Photons
/// and detection are shared across intervals and codes at each dead time.
pub fn sweep(
    scint: &ScintParams,
    sensor: &SensorParams,
    dead_times_ns: &[f64],
    intervals_ps: &[u64],
    codes: &[&BinaryCode],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if let Some(c) = codes.iter().find(|c| c.n() < sensor.pixels()) {
        return Err(Error::TooFewColumns { needed: sensor.pixels(), n: c.n() });
    }
    let photons = gen_events(scint, seed)?;
    let mut rows = Vec::new();
    for &dead in dead_times_ns {
        let firings = detect(&photons, &SensorParams { dead_time_ns: dead, ..sensor.clone() }, seed)?;
        for &iv in intervals_ps {
            let mut row = SweepRow {
                dead_time_ns: dead,
                tdc_interval_ps: iv,
                firings: firings.len() as u64,
                max_simultaneous: 0,
                missed_pct: Vec::new(),
            };
            for code in codes {
                let st = decode_firings(code, &firings, iv)?;
                row.max_simultaneous = st.max_simultaneous;
                row.missed_pct.push(st.missed_pct());
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Per-multiplicity table followed by `#` summary lines.
pub fn write_stats<W: std::io::Write>(mut w: W, stats: &SimStats, sep: char) -> Result<()> {
    writeln!(w, "multiplicity{sep}windows{sep}decoded{sep}decoded_pct{sep}alpha")?;
    for r in &stats.rows {
        writeln!(
            w,
            "{}{sep}{}{sep}{}{sep}{:.3}{sep}{:.5}",
            r.multiplicity,
            r.windows,
            r.decoded,
            r.decoded_pct(),
            r.alpha()
        )?;
    }
    writeln!(w, "# firings={} missed={} missed_pct={:.3}", stats.total_firings, stats.missed_firings, stats.missed_pct())?;
    writeln!(w, "# max_simultaneous={} wrong_successes={}", stats.max_simultaneous, stats.wrong_successes)?;
    Ok(())
}

/// One line per sweep point with a missed-percentage column per code.
pub fn write_sweep<W: std::io::Write>(mut w: W, rows: &[SweepRow], labels: &[String], sep: char) -> Result<()> {
    write!(w, "dead_ns{sep}tdc_ps{sep}firings{sep}max_simultaneous")?;
    for l in labels {
        write!(w, "{sep}missed_pct:{l}")?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{}{sep}{}{sep}{}{sep}{}", r.dead_time_ns, r.tdc_interval_ps, r.firings, r.max_simultaneous)?;
        for m in &r.missed_pct {
            write!(w, "{sep}{m:.3}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `s, trials, successes, fraction, wrong_successes` per support size.
pub fn write_support<W: std::io::Write>(mut w: W, rows: &[(usize, SupportCounts)], sep: char) -> Result<()> {
    writeln!(w, "s{sep}trials{sep}successes{sep}fraction{sep}wrong_successes")?;
    for (s, c) in rows {
        writeln!(w, "{s}{sep}{}{sep}{}{sep}{:.5}{sep}{}", c.trials, c.successes, c.fraction(), c.wrong_successes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_descriptor, BuildOptions, Registry};

    fn small_code(n: usize) -> BinaryCode {
        build_descriptor("(6,3,4)_7^Iq", &BuildOptions::new(n), &Registry::default()).unwrap().code
    }

    #[test]
    fn photon_counts_scale_with_yield() {
        let s = ScintParams { events: 200, ..ScintParams::default() };
        let a = gen_events(&s, 1).unwrap().len() as f64 / 200.0;
        let b = gen_events(&ScintParams { yield_per_mev: 52_000.0, ..s.clone() }, 1).unwrap().len() as f64 / 200.0;
        assert!((a / s.mean_photons() - 1.0).abs() < 0.01, "{a}");
        assert!((b / a - 2.0).abs() < 0.02);
        let zero = gen_events(&ScintParams { decay_ns: 0.0, events: 3, ..s }, 1).unwrap();
        let code = small_code(343);
        let sensor = SensorParams { grid_m: 18, ..SensorParams::default() };
        let f = detect(&zero, &sensor, 1).unwrap();
        let st = decode_firings(&code, &f, 40).unwrap();
        assert_eq!(st.rows.iter().map(|r| r.windows).sum::<u64>(), 3);
    }

    #[test]
    fn dead_time_and_lossless_limit() {
        let ph = vec![
            Photon { event: 0, time_ps: 0, pixel: Some(4) },
            Photon { event: 0, time_ps: 5_000, pixel: Some(4) },
            Photon { event: 0, time_ps: 25_000, pixel: Some(4) },
        ];
        let lossless = SensorParams { grid_m: 3, fill_factor: 1.0, quantum_eff: 1.0, ..SensorParams::default() };
        let f = detect(&ph, &lossless, 9).unwrap();
        assert_eq!(f.iter().map(|f| f.time_ps).collect::<Vec<_>>(), vec![0, 25_000]);
        let f = detect(&ph, &SensorParams { dead_time_ns: 0.0, ..lossless.clone() }, 9).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.iter().all(|f| f.pixel == 4));
        let gen = gen_events(&ScintParams { events: 5, ..ScintParams::default() }, 2).unwrap();
        let f = detect(&gen, &SensorParams { grid_m: 100, dead_time_ns: 0.0, ..lossless }, 2).unwrap();
        assert_eq!(f.len(), gen.len());
    }

    #[test]
    fn run_is_deterministic_and_conserves_firings() {
        let code = small_code(343);
        let scint = ScintParams { events: 20, ..ScintParams::default() };
        let sensor = SensorParams { grid_m: 18, ..SensorParams::default() };
        let a = run(&scint, &sensor, &code, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run(&scint, &sensor, &code, 11).unwrap());
        assert_eq!(a, b);
        let by_rows: u64 = a.rows.iter().map(|r| r.windows * r.multiplicity as u64).sum();
        assert_eq!(by_rows, a.total_firings);
        let decoded: u64 = a.rows.iter().map(|r| r.decoded * r.multiplicity as u64).sum();
        assert_eq!(decoded + a.missed_firings, a.total_firings);
        assert_eq!(a.wrong_successes, 0);
        for r in a.rows.iter().take(code.meta().certified_d.unwrap() as usize) {
            assert_eq!(r.decoded, r.windows);
        }
        assert!(run(&scint, &SensorParams { grid_m: 19, ..sensor }, &code, 1).is_err());
    }

    #[test]
    fn random_supports() {
        let code = small_code(343);
        assert_eq!(random_support_success(&code, 2, 2_000, 5).unwrap(), 1.0);
        let c = support_trials(&code, 6, 3_000, 5).unwrap();
        assert_eq!((c.trials, c.wrong_successes), (3_000, 0));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        assert_eq!(pool.install(|| support_trials(&code, 6, 3_000, 5).unwrap()), c);
        // Independent seed stays within 3 sigma of the first estimate.
        let p = c.fraction();
        let q = random_support_success(&code, 6, 3_000, 6).unwrap();
        let sigma = (p * (1.0 - p) / 3_000.0).sqrt() * 2f64.sqrt();
        assert!((p - q).abs() <= 3.0 * sigma + 1e-9, "{p} {q}");
        assert!(random_support_success(&code, 0, 10, 1).is_err());
    }
}
