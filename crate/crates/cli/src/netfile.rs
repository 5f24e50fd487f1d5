//! Plain-text net files.
//!
//! ```text
//! SPHNET 1
//! n=2 count=3 mode=full seed=7 k=3 l=5
//! <n+1 coordinates> <multiplicity>
//! ...
//! ```
//!
//! Coordinates are written with 17 significant digits, which round-trips `f64`.

use std::fmt::Write as _;

use spherenet::geometry::UnitVector;
use spherenet::netgen::{NetMeta, NetMode, DEFAULT_DEDUPE_TOLERANCE};
use spherenet::SphericalNet;
use thiserror::Error;

pub const MAGIC: &str = "SPHNET 1";

#[derive(Debug, Error, PartialEq)]
pub enum NetFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("net file is empty")]
    Empty,
}

fn parse_err(line: usize, message: impl Into<String>) -> NetFileError {
    NetFileError::Parse {
        line,
        message: message.into(),
    }
}

pub fn to_string(net: &SphericalNet) -> String {
    let meta = net.meta();
    let mut out = String::with_capacity(net.len() * (net.dim() + 2) * 25);
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(
        out,
        "n={} count={} mode={} seed={} k={} l={}",
        net.dim(),
        net.len(),
        meta.mode.as_str(),
        meta.seed,
        meta.k,
        meta.l
    );
    for (p, m) in net.points().iter().zip(net.multiplicities()) {
        for c in p.coords() {
            let _ = write!(out, "{c:.16e} ");
        }
        let _ = writeln!(out, "{m}");
    }
    out
}

struct Header {
    n: usize,
    count: usize,
    mode: NetMode,
    seed: u64,
    k: usize,
    l: usize,
}

fn parse_header(line: &str) -> Result<Header, NetFileError> {
    let mut fields = std::collections::HashMap::new();
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(2, format!("expected key=value, found {token:?}")))?;
        if fields.insert(key, value).is_some() {
            return Err(parse_err(2, format!("duplicate field {key:?}")));
        }
    }
    fn get<V: std::str::FromStr>(fields: &std::collections::HashMap<&str, &str>, key: &str) -> Result<V, NetFileError> {
        let raw = fields
            .get(key)
            .ok_or_else(|| parse_err(2, format!("missing field {key:?}")))?;
        raw.parse()
            .map_err(|_| parse_err(2, format!("bad value for {key}: {raw:?}")))
    }
    let header = Header {
        n: get(&fields, "n")?,
        count: get(&fields, "count")?,
        mode: get(&fields, "mode")?,
        seed: get(&fields, "seed")?,
        k: get(&fields, "k")?,
        l: get(&fields, "l")?,
    };
    if header.n == 0 {
        return Err(parse_err(2, "n must be at least 1"));
    }
    if fields.len() != 6 {
        return Err(parse_err(2, "unexpected extra header fields"));
    }
    Ok(header)
}

pub fn parse(text: &str) -> Result<SphericalNet, NetFileError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, magic) = lines.next().ok_or(NetFileError::Empty)?;
    if magic.trim_end() != MAGIC {
        return Err(parse_err(1, format!("expected {MAGIC:?}, found {magic:?}")));
    }
    let (_, header) = lines.next().ok_or_else(|| parse_err(2, "missing header line"))?;
    let header = parse_header(header)?;
    let d = header.n + 1;

    let mut points = Vec::with_capacity(header.count);
    let mut mults = Vec::with_capacity(header.count);
    let mut last_line = 2;
    for (line, raw) in lines {
        last_line = line;
        if raw.trim().is_empty() {
            continue;
        }
        if points.len() == header.count {
            return Err(parse_err(line, format!("more than count={} points", header.count)));
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != d + 1 {
            return Err(parse_err(
                line,
                format!("expected {} coordinates and a multiplicity, found {} fields", d, tokens.len()),
            ));
        }
        let coords = tokens[..d]
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("bad coordinate {t:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let mult: u64 = tokens[d]
            .parse()
            .ok()
            .filter(|&m| m > 0)
            .ok_or_else(|| parse_err(line, format!("bad multiplicity {:?}", tokens[d])))?;
        let point = UnitVector::new(coords).map_err(|e| parse_err(line, e.to_string()))?;
        points.push(point);
        mults.push(mult);
    }
    if points.len() != header.count {
        return Err(parse_err(
            last_line,
            format!("header promises {} points, found {}", header.count, points.len()),
        ));
    }
    let mut x0 = vec![0.0; d];
    x0[header.n] = 1.0;
    let meta = NetMeta {
        k: header.k,
        l: header.l,
        seed: header.seed,
        x0,
        mode: header.mode,
        dedupe_tolerance: DEFAULT_DEDUPE_TOLERANCE,
    };
    SphericalNet::from_parts(points, mults, meta).map_err(|e| parse_err(2, e.to_string()))
}
