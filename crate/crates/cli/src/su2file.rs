//! One `SU(2)` matrix per line: `re, im` of the four entries in row-major order.

use std::fmt::Write as _;

use anyhow::{bail, Context};
use spherenet::Su2Matrix;

pub fn to_string(mats: &[Su2Matrix]) -> String {
    let mut out = String::with_capacity(mats.len() * 8 * 25);
    for m in mats {
        let flat = m.to_flat();
        for (i, v) in flat.iter().enumerate() {
            let sep = if i + 1 == flat.len() { '\n' } else { ' ' };
            let _ = write!(out, "{v:.16e}{sep}");
        }
    }
    out
}

pub fn parse(text: &str) -> anyhow::Result<Vec<Su2Matrix>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let values = l
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("line {}: bad number", i + 1))?;
            let Ok(flat) = <[f64; 8]>::try_from(values) else {
                bail!("line {}: expected 8 numbers", i + 1);
            };
            Ok(Su2Matrix::from_flat(flat))
        })
        .collect()
}
