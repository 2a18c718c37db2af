//! Point-set CSV: a header line `dim,<d>` followed by one row of `d`
//! coordinates per point.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rgg_limits::PointSet;

pub fn read(r: impl Read) -> Result<PointSet> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut rows = rd.records();
    let header = rows.next().context("empty point file")??;
    let dim: usize = match (header.get(0), header.get(1)) {
        (Some("dim"), Some(d)) => d.parse().with_context(|| format!("bad dimension {d:?}"))?,
        _ => bail!("point file must start with `dim,<d>`"),
    };
    let mut coords = Vec::new();
    for (line, rec) in rows.enumerate() {
        let rec = rec?;
        if rec.len() != dim {
            bail!("row {} has {} fields, expected {dim}", line + 2, rec.len());
        }
        for f in rec.iter() {
            coords.push(f.parse::<f64>().with_context(|| format!("row {}: bad number {f:?}", line + 2))?);
        }
    }
    Ok(PointSet::from_flat(dim, coords)?)
}

pub fn read_path(path: &Path) -> Result<PointSet> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read(f).with_context(|| format!("reading {}", path.display()))
}

pub fn write(ps: &PointSet, w: impl Write) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().flexible(true).from_writer(w);
    wr.write_record(["dim", &ps.dim().to_string()])?;
    for p in ps.iter() {
        // `{:?}` prints the shortest representation that round-trips.
        wr.write_record(p.iter().map(|c| format!("{c:?}")))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let ps = PointSet::from_points(2, &[[0.1, -3.0], [1e-17, 2.5]]).unwrap();
        let mut buf = Vec::new();
        write(&ps, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("dim,2\n"));
        assert_eq!(read(buf.as_slice()).unwrap(), ps);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read("".as_bytes()).is_err());
        assert!(read("x,y\n1,2\n".as_bytes()).is_err());
        assert!(read("dim,2\n1\n".as_bytes()).is_err());
        assert!(read("dim,1\n1\n1\n".as_bytes()).is_err());
        assert_eq!(read("dim,1\n# note\n0.5\n".as_bytes()).unwrap().len(), 1);
    }
}
