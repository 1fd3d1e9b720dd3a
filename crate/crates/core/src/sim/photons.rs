use std::io::{Read, Write};

use super::Photon;
use crate::error::{Error, Result};

/// Reads `event_id,time_ps[,pixel_id]` rows; the header is required and
/// `pixel_id` may be blank per row.
pub fn import_photons<R: Read>(reader: R) -> Result<Vec<Photon>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).flexible(true).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .iter()
        .map(str::to_owned)
        .collect();
    let with_pixel = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["event_id", "time_ps"] => false,
        ["event_id", "time_ps", "pixel_id"] => true,
        _ => return Err(Error::Parse { line: 1, msg: "expected header `event_id,time_ps[,pixel_id]`".into() }),
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |msg: String| Error::Parse { line, msg };
        if rec.len() != header.len() {
            return Err(bad(format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let event: u32 = rec[0].parse().map_err(|_| bad(format!("bad event_id {:?}", &rec[0])))?;
        let time_ps: u64 = rec[1].parse().map_err(|_| bad(format!("bad time_ps {:?}", &rec[1])))?;
        let pixel = match (with_pixel, rec.get(2)) {
            (true, Some(p)) if !p.is_empty() => Some(p.parse().map_err(|_| bad(format!("bad pixel_id {p:?}")))?),
            _ => None,
        };
        out.push(Photon { event, time_ps, pixel });
    }
    Ok(out)
}

pub fn write_photons<W: Write>(mut w: W, photons: &[Photon]) -> Result<()> {
    let with_pixel = photons.iter().any(|p| p.pixel.is_some());
    writeln!(w, "{}", if with_pixel { "event_id,time_ps,pixel_id" } else { "event_id,time_ps" })?;
    for p in photons {
        match (with_pixel, p.pixel) {
            (false, _) => writeln!(w, "{},{}", p.event, p.time_ps)?,
            (true, Some(x)) => writeln!(w, "{},{},{}", p.event, p.time_ps, x)?,
            (true, None) => writeln!(w, "{},{},", p.event, p.time_ps)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{detect, gen_events, ScintParams, SensorParams};

    #[test]
    fn round_trip_and_validation() {
        let ph = gen_events(&ScintParams { events: 4, ..ScintParams::default() }, 3).unwrap();
        let mut buf = Vec::new();
        write_photons(&mut buf, &ph).unwrap();
        let back = import_photons(buf.as_slice()).unwrap();
        assert_eq!(back, ph);
        let s = SensorParams::default();
        assert_eq!(detect(&back, &s, 3).unwrap(), detect(&ph, &s, 3).unwrap());

        let e = import_photons("event_id,time_ps\n0,5\n0,-3\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(import_photons("0,5\n".as_bytes()).is_err());

        let pinned = import_photons("event_id,time_ps,pixel_id\n0,5,7\n0,9,\n".as_bytes()).unwrap();
        assert_eq!(pinned[0].pixel, Some(7));
        assert_eq!(pinned[1].pixel, None);
        let all = SensorParams { grid_m: 3, fill_factor: 1.0, quantum_eff: 1.0, ..s };
        assert_eq!(detect(&pinned[..1], &all, 0).unwrap()[0].pixel, 7);
    }
}
