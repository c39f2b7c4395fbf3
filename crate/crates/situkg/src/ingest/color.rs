//! Snapping raw RGB colors to named CSS3 web colors.

use crate::error::{Error, Result};

/// Squared distance at which a color is considered too far from every named
/// color and discarded (50 squared).
const DISCARD_D2: u32 = 50 * 50;

/// The 147 extended CSS3 color names with their RGB values, shipped as a
/// data file and kept sorted by name.
#[derive(Debug, Clone)]
pub struct Css3ColorTable {
    entries: Vec<(String, [u8; 3])>,
}

impl Css3ColorTable {
    /// The table bundled with the crate.
    pub fn bundled() -> Self {
        Css3ColorTable::parse(include_str!("../../data/css3_colors.tsv"))
            .expect("bundled color table is well-formed")
    }

    /// Parse `name<TAB>r<TAB>g<TAB>b` lines. Names must be unique.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let bad = || Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("expected name<TAB>r<TAB>g<TAB>b, got {line:?}"),
            };
            let name = parts.next().ok_or_else(bad)?.to_string();
            let mut rgb = [0u8; 3];
            for channel in &mut rgb {
                *channel = parts
                    .next()
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(bad)?;
            }
            entries.push((name, rgb));
        }
        if entries.is_empty() {
            return Err(Error::Invalid("color table is empty".into()));
        }
        entries.sort_by(|(a, _), (b, _)| a.cmp(b));
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Invalid(format!(
                    "duplicate color name {:?}",
                    pair[0].0
                )));
            }
        }
        Ok(Css3ColorTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, [u8; 3])> {
        self.entries.iter().map(|(n, rgb)| (n.as_str(), *rgb))
    }
}

fn d2(a: [u8; 3], b: [u8; 3]) -> u32 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            let d = x as i32 - y as i32;
            (d * d) as u32
        })
        .sum()
}

/// The named color closest to `rgb` in plain Euclidean RGB distance, or
/// `None` when even the closest is at distance >= 50. Ties go to the
/// lexicographically smallest name. Distances are compared on exact integer
/// squares, so thresholding and tie-breaking are never subject to rounding.
pub fn nearest_css3_color(rgb: [u8; 3], table: &Css3ColorTable) -> Option<(&str, f64)> {
    let best = table
        .entries
        .iter()
        .map(|(name, entry)| (d2(rgb, *entry), name.as_str()))
        // entries are sorted by name, so min_by_key keeps the first (smallest
        // name) among equal distances
        .min_by_key(|(dist, _)| *dist)?;
    if best.0 >= DISCARD_D2 {
        return None;
    }
    Some((best.1, (best.0 as f64).sqrt()))
}
