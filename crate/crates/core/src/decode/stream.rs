use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use super::{DecodeOutcome, Decoder};
use crate::binmat::{BinaryCode, TestVector};
use crate::error::{Error, Result};

/// Timestamps (integer picoseconds) recorded by each TDC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdcStream {
    times: Vec<Vec<u64>>,
    interval: u64,
}

impl TdcStream {
    /// Sorts each list; `interval` is the TDC sampling interval in ps.
    pub fn new(mut times: Vec<Vec<u64>>, interval: u64) -> Result<Self> {
        if interval == 0 {
            return Err(Error::Invalid("TDC interval must be positive".into()));
        }
        for l in times.iter_mut() {
            l.sort_unstable();
        }
        Ok(Self { times, interval })
    }

    pub fn tdcs(&self) -> usize {
        self.times.len()
    }

    pub fn interval(&self) -> u64 {
        self.interval
    }

    pub fn times(&self, tdc: usize) -> &[u64] {
        &self.times[tdc]
    }

    /// Nonempty windows in order, each with the TDCs that fired in it.
    pub fn windows(&self) -> Vec<(u64, Vec<u32>)> {
        let mut map: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (tdc, l) in self.times.iter().enumerate() {
            let mut last = None;
            for &ts in l {
                let w = ts / self.interval;
                if last != Some(w) {
                    map.entry(w).or_default().push(tdc as u32);
                    last = Some(w);
                }
            }
        }
        map.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowOutcome {
    pub window: u64,
    pub start_ps: u64,
    pub outcome: DecodeOutcome,
}

/// A run of merged windows `first..=last` decoded as one union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurstOutcome {
    pub first: u64,
    pub last: u64,
    pub start_ps: u64,
    pub outcome: DecodeOutcome,
}

fn check_t(code: &BinaryCode, stream: &TdcStream) -> Result<()> {
    if stream.tdcs() != code.t() {
        return Err(Error::Invalid(format!("stream has {} TDCs, code has t = {}", stream.tdcs(), code.t())));
    }
    Ok(())
}

pub fn window_decode(code: &BinaryCode, stream: &TdcStream) -> Result<Vec<WindowOutcome>> {
    check_t(code, stream)?;
    let dec = Decoder::new(code);
    let t = code.t();
    Ok(stream
        .windows()
        .into_par_iter()
        .map(|(w, rows)| WindowOutcome {
            window: w,
            start_ps: w * stream.interval,
            outcome: dec.decode(&TestVector::new(t, rows).expect("rows below t")),
        })
        .collect())
}

/// Merges nonempty windows separated by at most `max_gap` empty windows and
/// decodes each union once.
pub fn burst_decode(code: &BinaryCode, stream: &TdcStream, max_gap: u64) -> Result<Vec<BurstOutcome>> {
    check_t(code, stream)?;
    let t = code.t();
    let mut bursts: Vec<(u64, u64, Vec<u32>)> = Vec::new();
    for (w, rows) in stream.windows() {
        match bursts.last_mut() {
            Some((_, last, acc)) if w - *last <= max_gap + 1 => {
                *last = w;
                acc.extend(rows);
            }
            _ => bursts.push((w, w, rows)),
        }
    }
    let dec = Decoder::new(code);
    Ok(bursts
        .into_par_iter()
        .map(|(first, last, rows)| BurstOutcome {
            first,
            last,
            start_ps: first * stream.interval,
            outcome: dec.decode(&TestVector::new(t, rows).expect("rows below t")),
        })
        .collect())
}

/// Reads `tdc_id,time_ps` rows after a mandatory header.
pub fn read_tdc_csv<R: Read>(reader: R, t: usize, interval: u64) -> Result<TdcStream> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if header.iter().collect::<Vec<_>>() != ["tdc_id", "time_ps"] {
        return Err(Error::Parse { line: 1, msg: "expected header `tdc_id,time_ps`".into() });
    }
    let mut times = vec![Vec::new(); t];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let id: usize = rec[0].parse().map_err(|_| Error::Parse { line, msg: format!("bad tdc_id {:?}", &rec[0]) })?;
        let ts: u64 = rec[1].parse().map_err(|_| Error::Parse { line, msg: format!("bad time_ps {:?}", &rec[1]) })?;
        if id >= t {
            return Err(Error::Parse { line, msg: format!("tdc_id {id} out of range for t = {t}") });
        }
        times[id].push(ts);
    }
    TdcStream::new(times, interval)
}

/// Writes `window,start_ps,outcome,support` rows; support lists column
/// indices separated by spaces.
pub fn write_report<W: Write>(mut w: W, rows: &[WindowOutcome], sep: char) -> Result<()> {
    writeln!(w, "window{sep}start_ps{sep}outcome{sep}support")?;
    for r in rows {
        writeln!(w, "{}{sep}{}{sep}{}{sep}{}", r.window, r.start_ps, r.outcome.kind.as_str(), joined(&r.outcome.support))?;
    }
    Ok(())
}

/// Like [`write_report`], with the first and last window of each burst.
pub fn write_burst_report<W: Write>(mut w: W, rows: &[BurstOutcome], sep: char) -> Result<()> {
    writeln!(w, "first{sep}last{sep}start_ps{sep}outcome{sep}support")?;
    for r in rows {
        writeln!(
            w,
            "{}{sep}{}{sep}{}{sep}{}{sep}{}",
            r.first,
            r.last,
            r.start_ps,
            r.outcome.kind.as_str(),
            joined(&r.outcome.support)
        )?;
    }
    Ok(())
}

fn joined(support: &[usize]) -> String {
    support.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_descriptor, BuildOptions, Registry};
    use crate::decode::DecodeKind;

    fn code() -> BinaryCode {
        build_descriptor("(6,3,4)_7^Iq", &BuildOptions::new(300), &Registry::default()).unwrap().code
    }

    fn fire(code: &BinaryCode, times: &mut [Vec<u64>], j: usize, at: u64) {
        for &r in code.column(j) {
            times[r as usize].push(at);
        }
    }

    #[test]
    fn windows_and_bursts() {
        let c = code();
        let mut times = vec![Vec::new(); c.t()];
        fire(&c, &mut times, 5, 1_010);
        fire(&c, &mut times, 9, 5_000);
        let s = TdcStream::new(times.clone(), 40).unwrap();
        let out = window_decode(&c, &s).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!((out[0].window, out[0].start_ps), (25, 1_000));
        assert_eq!(out[0].outcome.support, vec![5]);
        assert_eq!(out[1].outcome.kind, DecodeKind::Success);
        let bursts = burst_decode(&c, &s, 0).unwrap();
        let flat: Vec<_> = bursts.iter().map(|b| (b.first, b.outcome.clone())).collect();
        let plain: Vec<_> = out.iter().map(|w| (w.window, w.outcome.clone())).collect();
        assert_eq!(flat, plain);

        // Skew: half of column 7's rows land one window late.
        let col = c.column(7).to_vec();
        let mut skew = vec![Vec::new(); c.t()];
        for (i, &r) in col.iter().enumerate() {
            skew[r as usize].push(if i < col.len() / 2 { 2_030 } else { 2_050 });
        }
        let s = TdcStream::new(skew, 40).unwrap();
        let out = window_decode(&c, &s).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|w| w.outcome.kind == DecodeKind::Inconsistent));
        let b = burst_decode(&c, &s, 0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!((b[0].first, b[0].last), (50, 51));
        assert_eq!((b[0].outcome.kind, b[0].outcome.support.clone()), (DecodeKind::Success, vec![7]));

        // Two codewords in adjacent windows read as one double firing.
        let mut two = vec![Vec::new(); c.t()];
        fire(&c, &mut two, 3, 400);
        fire(&c, &mut two, 11, 440);
        let s = TdcStream::new(two, 40).unwrap();
        let b = burst_decode(&c, &s, 0).unwrap();
        assert_eq!(b[0].outcome.support, vec![3, 11]);
        assert_eq!(window_decode(&c, &s).unwrap().len(), 2);
    }

    #[test]
    fn csv_and_report() {
        let text = "tdc_id,time_ps\n0,100\n2,90\n0,5\n";
        let s = read_tdc_csv(text.as_bytes(), 3, 40).unwrap();
        assert_eq!(s.times(0), &[5, 100]);
        assert_eq!(s.windows(), vec![(0, vec![0]), (2, vec![0, 2])]);
        assert!(read_tdc_csv("0,100\n".as_bytes(), 3, 40).is_err());
        let e = read_tdc_csv("tdc_id,time_ps\n0,-4\n".as_bytes(), 3, 40).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(read_tdc_csv("tdc_id,time_ps\n3,4\n".as_bytes(), 3, 40).is_err());

        let c = crate::binmat::tests::printed_example();
        let out = window_decode(&c, &s).unwrap();
        let mut buf = Vec::new();
        write_report(&mut buf, &out, '\t').unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "window\tstart_ps\toutcome\tsupport");
        assert_eq!(text.lines().nth(1).unwrap(), "0\t0\tsuccess\t4");
    }
}
