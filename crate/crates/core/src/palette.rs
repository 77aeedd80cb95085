//! Color-scheme catalog, accessibility filters and custom palettes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{OnceLock, RwLock};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reclassify::write_atomic;

pub const DEFAULT_PALETTE: &str = "viridis";
pub const DEFAULT_NODATA_COLOR: &str = "#cccccc";
/// Tried in order when a palette already uses the default no-data color.
const NODATA_FALLBACKS: [&str; 4] = [DEFAULT_NODATA_COLOR, "#bfbfbf", "#a0a0a0", "#808080"];
/// Largest bin count sampled from an interpolated palette.
pub const INTERPOLATED_CAPACITY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleType {
    Categorical,
    SequentialSingleHue,
    SequentialMultiHue,
    Diverging,
    Cyclical,
}

impl std::str::FromStr for ScaleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidRequest(format!("unknown scale type '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    #[serde(default)]
    pub web_friendly: bool,
    #[serde(default)]
    pub colorblind_friendly: bool,
    #[serde(default)]
    pub print_friendly: bool,
}

impl Flags {
    /// True when every flag set in `required` is also set here.
    pub fn satisfies(&self, required: &Flags) -> bool {
        (!required.web_friendly || self.web_friendly)
            && (!required.colorblind_friendly || self.colorblind_friendly)
            && (!required.print_friendly || self.print_friendly)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpolator {
    pub stops: Vec<String>,
}

/// How a palette turns a bin count into colors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Swatches {
    /// Hand-picked lists per bin count.
    Colors(BTreeMap<String, Vec<String>>),
    /// Evenly spaced samples of a piecewise-linear ramp.
    Interpolator(Interpolator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Palette {
    pub name: String,
    pub scale_type: ScaleType,
    pub flags: Flags,
    #[serde(flatten)]
    pub swatches: Swatches,
    #[serde(default)]
    pub custom: bool,
    #[serde(default = "default_nodata")]
    pub nodata_color: String,
}

fn default_nodata() -> String {
    DEFAULT_NODATA_COLOR.to_string()
}

fn parse_hex(hex: &str) -> Result<[u8; 3]> {
    let bad = || Error::InvalidHex(hex.to_string());
    let digits = hex.strip_prefix('#').ok_or_else(bad)?;
    if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).map_err(|_| bad());
    Ok([channel(0)?, channel(2)?, channel(4)?])
}

fn to_hex(rgb: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

/// Checks and lower-cases a `#rrggbb` color.
pub fn normalize_hex(hex: &str) -> Result<String> {
    parse_hex(hex).map(to_hex)
}

/// Color at `t` in `[0, 1]` on the ramp through evenly spaced `stops`,
/// interpolated linearly in RGB.
pub fn interpolate(stops: &[String], t: f64) -> Result<String> {
    let rgb: Vec<[u8; 3]> = stops.iter().map(|s| parse_hex(s)).collect::<Result<_>>()?;
    if rgb.len() == 1 {
        return Ok(to_hex(rgb[0]));
    }
    let x = t.clamp(0.0, 1.0) * (rgb.len() - 1) as f64;
    let i = (x.floor() as usize).min(rgb.len() - 2);
    let f = x - i as f64;
    let mix = |c: usize| {
        let (a, b) = (rgb[i][c] as f64, rgb[i + 1][c] as f64);
        (a + (b - a) * f).round() as u8
    };
    Ok(to_hex([mix(0), mix(1), mix(2)]))
}

/// Picks `k` of `colors`, spread evenly and keeping both ends when k > 1.
fn spread(colors: &[String], k: usize) -> Vec<String> {
    let n = colors.len();
    if k == 1 {
        return vec![colors[(n - 1) / 2].clone()];
    }
    (0..k)
        .map(|i| colors[((i * (n - 1)) as f64 / (k - 1) as f64).round() as usize].clone())
        .collect()
}

impl Palette {
    /// Largest bin count this palette can color with distinct colors.
    pub fn capacity(&self) -> usize {
        match &self.swatches {
            Swatches::Colors(sets) if self.custom => sets.values().map(Vec::len).max().unwrap_or(0),
            Swatches::Colors(sets) => sets
                .keys()
                .filter_map(|k| k.parse().ok())
                .max()
                .unwrap_or(0),
            Swatches::Interpolator(_) => INTERPOLATED_CAPACITY,
        }
    }

    fn all_colors(&self) -> Vec<&String> {
        match &self.swatches {
            Swatches::Colors(sets) => sets.values().flatten().collect(),
            Swatches::Interpolator(i) => i.stops.iter().collect(),
        }
    }

    /// `k` colors for `k` bins, lowest bin first unless `reversed`.
    pub fn colors_for(&self, k: usize, reversed: bool) -> Result<Vec<String>> {
        let capacity = self.capacity();
        if k == 0 {
            return Err(Error::InvalidBinCount(0));
        }
        if k > capacity {
            return Err(Error::BinCountExceedsPalette {
                palette: self.name.clone(),
                requested: k,
                capacity,
            });
        }
        let mut colors = match &self.swatches {
            Swatches::Colors(sets) if self.custom => {
                let all = sets.values().next().expect("custom palettes hold one list");
                spread(all, k)
            }
            Swatches::Colors(sets) => match sets.get(&k.to_string()) {
                Some(exact) => exact.clone(),
                None => {
                    let smallest = sets
                        .iter()
                        .filter_map(|(n, c)| n.parse::<usize>().ok().map(|n| (n, c)))
                        .min_by_key(|(n, _)| *n)
                        .map(|(_, c)| c)
                        .expect("capacity is positive");
                    spread(smallest, k)
                }
            },
            Swatches::Interpolator(ramp) => {
                let cyclical = self.scale_type == ScaleType::Cyclical;
                (0..k)
                    .map(|i| {
                        let t = match (cyclical, k) {
                            (true, _) => i as f64 / k as f64,
                            (false, 1) => 0.5,
                            (false, _) => i as f64 / (k - 1) as f64,
                        };
                        interpolate(&ramp.stops, t)
                    })
                    .collect::<Result<_>>()?
            }
        };
        if reversed {
            colors.reverse();
        }
        Ok(colors)
    }

    fn with_nodata(mut self) -> Self {
        let used = self
            .all_colors()
            .into_iter()
            .map(|c| c.to_ascii_lowercase())
            .collect::<Vec<_>>();
        self.nodata_color = NODATA_FALLBACKS
            .iter()
            .find(|c| !used.iter().any(|u| u == *c))
            .unwrap_or(&NODATA_FALLBACKS[0])
            .to_string();
        self
    }
}

/// The built-in catalog, in file order.
pub fn builtin_palettes() -> &'static [Palette] {
    static CATALOG: OnceLock<Vec<Palette>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let raw: Vec<Palette> = serde_json::from_str(include_str!("../data/palettes.json"))
            .expect("bundled palette catalog parses");
        raw.into_iter().map(Palette::with_nodata).collect()
    })
}

/// Conjunctive filter over palettes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PaletteFilter {
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub scale_type: Option<ScaleType>,
}

impl PaletteFilter {
    pub fn matches(&self, p: &Palette) -> bool {
        p.flags.satisfies(&self.flags) && self.scale_type.is_none_or(|t| t == p.scale_type)
    }

    /// Parses a comma-separated flag list such as `colorblind,print`.
    pub fn parse_flags(list: &str) -> Result<Flags> {
        let mut flags = Flags::default();
        for f in list.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match f {
                "web" | "webFriendly" => flags.web_friendly = true,
                "colorblind" | "colorblindFriendly" => flags.colorblind_friendly = true,
                "print" | "printFriendly" => flags.print_friendly = true,
                other => {
                    return Err(Error::InvalidRequest(format!(
                        "unknown palette flag '{other}'"
                    )))
                }
            }
        }
        Ok(flags)
    }
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    palettes: Vec<Palette>,
}

/// Built-in palettes plus user-added ones, optionally persisted to a JSON
/// file.
#[derive(Debug, Default)]
pub struct PaletteStore {
    custom: RwLock<IndexMap<String, Palette>>,
    path: Option<PathBuf>,
}

impl PaletteStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut custom = IndexMap::new();
        if path.exists() {
            let file: StoreFile = serde_json::from_slice(&std::fs::read(&path)?)?;
            for p in file.palettes {
                custom.insert(p.name.clone(), p);
            }
        }
        Ok(PaletteStore {
            custom: RwLock::new(custom),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, name: &str) -> Result<Palette> {
        builtin_palettes()
            .iter()
            .find(|p| p.name == name)
            .cloned()
            .or_else(|| self.custom.read().unwrap().get(name).cloned())
            .ok_or_else(|| Error::UnknownPalette(name.to_string()))
    }

    pub fn list(&self, filter: &PaletteFilter) -> Vec<Palette> {
        let custom = self.custom.read().unwrap();
        builtin_palettes()
            .iter()
            .chain(custom.values())
            .filter(|p| filter.matches(p))
            .cloned()
            .collect()
    }

    pub fn colors_for(&self, name: &str, k: usize, reversed: bool) -> Result<Vec<String>> {
        self.get(name)?.colors_for(k, reversed)
    }

    pub fn add_custom(
        &self,
        name: &str,
        colors: &[String],
        flags: Flags,
        scale_type: ScaleType,
    ) -> Result<Palette> {
        if name.trim().is_empty() {
            return Err(Error::InvalidName("name must not be empty".into()));
        }
        if colors.is_empty() {
            return Err(Error::InvalidRequest(
                "a palette needs at least one color".into(),
            ));
        }
        let colors = colors
            .iter()
            .map(|c| normalize_hex(c))
            .collect::<Result<Vec<_>>>()?;
        let mut custom = self.custom.write().unwrap();
        if custom.contains_key(name) || builtin_palettes().iter().any(|p| p.name == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let palette = Palette {
            name: name.to_string(),
            scale_type,
            flags,
            swatches: Swatches::Colors(BTreeMap::from([(colors.len().to_string(), colors)])),
            custom: true,
            nodata_color: default_nodata(),
        }
        .with_nodata();
        custom.insert(name.to_string(), palette.clone());
        if let Some(path) = &self.path {
            let doc = StoreFile {
                palettes: custom.values().cloned().collect(),
            };
            if let Err(e) = write_atomic(path, &serde_json::to_vec_pretty(&doc)?) {
                custom.shift_remove(name);
                return Err(e);
            }
        }
        Ok(palette)
    }
}
