//! Breaks, sizes, map specifications, SVG legends and code snippets.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::GeometryCollection;
use crate::error::{Error, Result};
use crate::palette::{Palette, DEFAULT_PALETTE};
use crate::result::BinningResult;
use crate::series::FeatureSeries;
use crate::spec::MethodId;

/// Version stamped into every exported JSON document.
pub const SCHEMA_VERSION: u32 = 1;
pub const VEGA_LITE_SCHEMA: &str = "https://vega.github.io/schema/vega-lite/v6.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportTarget {
    Breaks,
    Sizes,
    Mapspec,
    LegendSvg,
    CodeStub,
}

impl ExportTarget {
    pub const ALL: [ExportTarget; 5] = [
        ExportTarget::Breaks,
        ExportTarget::Sizes,
        ExportTarget::Mapspec,
        ExportTarget::LegendSvg,
        ExportTarget::CodeStub,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportTarget::Breaks => "breaks",
            ExportTarget::Sizes => "sizes",
            ExportTarget::Mapspec => "mapspec",
            ExportTarget::LegendSvg => "legend_svg",
            ExportTarget::CodeStub => "code_stub",
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            ExportTarget::Breaks | ExportTarget::Sizes | ExportTarget::Mapspec => {
                "application/json"
            }
            ExportTarget::LegendSvg => "image/svg+xml",
            ExportTarget::CodeStub => "text/plain; charset=utf-8",
        }
    }

    /// File name used when writing the export for `method`.
    pub fn file_name(self, method: &MethodId) -> String {
        let stem = method.to_string().replace(':', "_");
        match self {
            ExportTarget::Breaks => format!("{stem}.breaks.json"),
            ExportTarget::Sizes => format!("{stem}.sizes.json"),
            ExportTarget::Mapspec => format!("{stem}.mapspec.json"),
            ExportTarget::LegendSvg => format!("{stem}.legend.svg"),
            ExportTarget::CodeStub => format!("{stem}.code.rs"),
        }
    }
}

impl std::str::FromStr for ExportTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "breaks" => Ok(ExportTarget::Breaks),
            "sizes" => Ok(ExportTarget::Sizes),
            "mapspec" => Ok(ExportTarget::Mapspec),
            "legend_svg" | "legend" => Ok(ExportTarget::LegendSvg),
            "code_stub" | "code" => Ok(ExportTarget::CodeStub),
            other => Err(Error::UnsupportedTarget(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ExportOptions {
    pub palette: String,
    pub reversed: bool,
    /// Where the map specification loads geometry from. Without it the
    /// geometry is inlined, or left as a named data source when there is none.
    pub geometry_url: Option<String>,
    pub projection: String,
    pub width: u32,
    pub height: u32,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            palette: DEFAULT_PALETTE.to_string(),
            reversed: false,
            geometry_url: None,
            projection: "albersUsa".to_string(),
            width: 800,
            height: 500,
        }
    }
}

/// What an export is computed from besides the result itself.
pub struct ExportContext<'a> {
    pub series: &'a FeatureSeries,
    pub geometry: Option<&'a GeometryCollection>,
    pub palette: &'a Palette,
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Colors per bin; the unclassed ramp uses the two ends.
fn bin_colors(
    result: &BinningResult,
    ctx: &ExportContext,
    options: &ExportOptions,
) -> Result<Vec<String>> {
    let k = if result.method.method_id == MethodId::Unclassed {
        2
    } else {
        result.bin_count()
    };
    ctx.palette.colors_for(k, options.reversed)
}

pub fn export_result(
    result: &BinningResult,
    target: ExportTarget,
    ctx: &ExportContext,
    options: &ExportOptions,
) -> Result<String> {
    if result.feature_ids.as_slice() != ctx.series.feature_ids() {
        return Err(Error::MismatchedInputs(
            "result and series cover different features".into(),
        ));
    }
    match target {
        ExportTarget::Breaks => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "method": result.method,
            "attribute": ctx.series.attribute_name(),
            "extents": result.extents,
            "breaks": result.breaks(),
        })),
        ExportTarget::Sizes => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "method": result.method,
            "attribute": ctx.series.attribute_name(),
            "binSizes": result.bin_sizes,
            "intervals": result.intervals(),
            "validCount": result.valid_count(),
            "missingCount": ctx.series.missing_count(),
        })),
        ExportTarget::Mapspec => pretty(&mapspec(result, ctx, options)?),
        ExportTarget::LegendSvg => legend_svg(result, ctx, options),
        ExportTarget::CodeStub => Ok(code_stub(result, ctx.series)),
    }
}

/// A Vega-Lite geoshape map: geometry joined to the values by a lookup
/// transform and colored with a threshold scale on the breaks.
fn mapspec(result: &BinningResult, ctx: &ExportContext, options: &ExportOptions) -> Result<Value> {
    let colors = bin_colors(result, ctx, options)?;
    let attribute = ctx.series.attribute_name();
    let id_property = ctx.geometry.map_or("id", |g| g.id_property.as_str());
    let data = match (&options.geometry_url, ctx.geometry) {
        (Some(url), _) => json!({"url": url, "format": {"type": "json", "property": "features"}}),
        (None, Some(g)) => {
            json!({"values": g.to_feature_collection(), "format": {"type": "json", "property": "features"}})
        }
        (None, None) => json!({"name": "geometry"}),
    };
    let rows: Vec<Value> = (0..ctx.series.len())
        .map(|i| {
            json!({
                "id": ctx.series.feature_ids()[i],
                "value": ctx.series.value(i),
                "bin": result.assignments[i],
            })
        })
        .collect();
    let scale = if result.method.method_id == MethodId::Unclassed {
        json!({"type": "linear", "domain": [result.extents[0], result.extents[1]], "range": colors})
    } else {
        json!({"type": "threshold", "domain": result.breaks(), "range": colors})
    };
    Ok(json!({
        "$schema": VEGA_LITE_SCHEMA,
        "description": format!("{} of {}", result.method.method_id, attribute),
        "width": options.width,
        "height": options.height,
        "data": data,
        "transform": [{
            "lookup": format!("properties.{id_property}"),
            "from": {"data": {"values": rows}, "key": "id", "fields": ["value", "bin"]}
        }],
        "projection": {"type": options.projection},
        "mark": {"type": "geoshape", "stroke": "#ffffff", "strokeWidth": 0.25},
        "encoding": {
            "color": {
                "condition": {"test": "!isValid(datum.value)", "value": ctx.palette.nodata_color},
                "field": "value",
                "type": "quantitative",
                "title": attribute,
                "scale": scale
            },
            "tooltip": [
                {"field": format!("properties.{id_property}"), "type": "nominal", "title": "id"},
                {"field": "value", "type": "quantitative", "title": attribute},
                {"field": "bin", "type": "ordinal", "title": "bin"}
            ]
        },
        "usermeta": {
            "schema_version": SCHEMA_VERSION,
            "method": result.method,
            "extents": result.extents,
            "binSizes": result.bin_sizes,
            "notes": result.notes
        }
    }))
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const SWATCH: u32 = 18;
const ROW: u32 = 22;

/// Standalone SVG 1.1 legend: one swatch per bin with its extent, then a
/// no-data swatch.
fn legend_svg(
    result: &BinningResult,
    ctx: &ExportContext,
    options: &ExportOptions,
) -> Result<String> {
    let colors = bin_colors(result, ctx, options)?;
    let e = &result.extents;
    let k = result.bin_count();
    let mut rows: Vec<(String, String)> = if result.method.method_id == MethodId::Unclassed {
        vec![
            (colors[0].clone(), format!("{}", e[0])),
            (colors[1].clone(), format!("{}", e[1])),
        ]
    } else {
        (0..k)
            .map(|j| {
                let close = if j + 1 == k { ']' } else { ')' };
                (colors[j].clone(), format!("[{}, {}{close}", e[j], e[j + 1]))
            })
            .collect()
    };
    rows.push((ctx.palette.nodata_color.clone(), "No data".to_string()));
    let longest = rows.iter().map(|r| r.1.chars().count()).max().unwrap_or(0) as u32;
    let width = SWATCH + 8 + longest * 7 + 8;
    let height = ROW * rows.len() as u32 + 26;
    let title = format!(
        "{}: {}",
        result.method.method_id,
        ctx.series.attribute_name()
    );
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(svg, "  <title>{}</title>", escape_xml(&title));
    let _ = writeln!(
        svg,
        "  <g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">"
    );
    let _ = writeln!(
        svg,
        "    <text x=\"0\" y=\"14\" font-weight=\"bold\">{}</text>",
        escape_xml(ctx.series.attribute_name())
    );
    for (i, (color, label)) in rows.iter().enumerate() {
        let y = 24 + ROW * i as u32;
        let _ = writeln!(
            svg,
            "    <rect x=\"0\" y=\"{y}\" width=\"{SWATCH}\" height=\"{SWATCH}\" fill=\"{color}\" stroke=\"#333333\" stroke-width=\"0.5\"/>"
        );
        let _ = writeln!(
            svg,
            "    <text x=\"{}\" y=\"{}\">{}</text>",
            SWATCH + 8,
            y + 13,
            escape_xml(label)
        );
    }
    svg.push_str("  </g>\n</svg>\n");
    Ok(svg)
}

/// Rust snippet that rebuilds the bins with `manual_interval`.
fn code_stub(result: &BinningResult, series: &FeatureSeries) -> String {
    let breaks: Vec<String> = result.breaks().iter().map(|b| format!("{b:?}")).collect();
    format!(
        "// {method} on {attribute}: {k} bin(s), extents {extents:?}\n\
         use binx_core::{{manual_interval, BinningResult, FeatureSeries, Result}};\n\
         \n\
         pub fn reclassify(series: &FeatureSeries) -> Result<BinningResult> {{\n\
         \x20   let breaks = [{breaks}];\n\
         \x20   manual_interval(series, &breaks)\n\
         }}\n",
        method = result.method.method_id,
        attribute = series.attribute_name(),
        k = result.bin_count(),
        extents = result.extents,
        breaks = breaks.join(", "),
    )
}

/// Interior breaks read back from a breaks export.
pub fn breaks_from_export(json: &str) -> Result<Vec<f64>> {
    let doc: Value = serde_json::from_str(json)?;
    if doc.get("schema_version").and_then(Value::as_u64) != Some(SCHEMA_VERSION as u64) {
        return Err(Error::InvalidRequest(
            "unsupported breaks export version".into(),
        ));
    }
    doc.get("breaks")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidRequest("breaks export has no 'breaks' array".into()))?
        .iter()
        .map(|b| {
            b.as_f64()
                .ok_or_else(|| Error::InvalidRequest("breaks must be numbers".into()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::{manual_interval, quantile, unclassed};
    use crate::palette::PaletteStore;

    fn series() -> FeatureSeries {
        FeatureSeries::from_values(&[1.5, 3.0, 4.25, 8.0, 9.5, 12.0, 13.0, 20.0, 21.0, 40.0])
    }

    fn run(result: &BinningResult, target: ExportTarget) -> String {
        let s = series();
        let palette = PaletteStore::new().get("viridis").unwrap();
        let ctx = ExportContext {
            series: &s,
            geometry: None,
            palette: &palette,
        };
        export_result(result, target, &ctx, &ExportOptions::default()).unwrap()
    }

    #[test]
    fn breaks_round_trip_through_manual_interval() {
        let s = series();
        let r = quantile(&s, 5).unwrap();
        let breaks = breaks_from_export(&run(&r, ExportTarget::Breaks)).unwrap();
        assert_eq!(breaks, r.breaks());
        assert_eq!(
            manual_interval(&s, &breaks).unwrap().assignments,
            r.assignments
        );
    }

    #[test]
    fn legend_has_a_swatch_per_bin_plus_nodata() {
        let r = quantile(&series(), 5).unwrap();
        let svg = run(&r, ExportTarget::LegendSvg);
        assert_eq!(svg.matches("<rect").count(), 6);
        assert!(svg.contains("No data") && svg.contains("#cccccc"));
        assert!(svg.contains("#440154") && svg.contains("#fde725"));
    }

    #[test]
    fn mapspec_uses_threshold_scale_on_breaks() {
        let r = quantile(&series(), 4).unwrap();
        let spec: Value = serde_json::from_str(&run(&r, ExportTarget::Mapspec)).unwrap();
        let scale = &spec["encoding"]["color"]["scale"];
        assert_eq!(scale["type"], "threshold");
        assert_eq!(scale["domain"].as_array().unwrap().len(), 3);
        assert_eq!(scale["range"].as_array().unwrap().len(), 4);
        assert_eq!(spec["usermeta"]["schema_version"], 1);
        assert_eq!(spec["data"]["name"], "geometry");
    }

    #[test]
    fn unclassed_exports_a_continuous_ramp() {
        let r = unclassed(&series()).unwrap();
        let spec: Value = serde_json::from_str(&run(&r, ExportTarget::Mapspec)).unwrap();
        assert_eq!(spec["encoding"]["color"]["scale"]["type"], "linear");
        assert_eq!(run(&r, ExportTarget::LegendSvg).matches("<rect").count(), 3);
    }

    #[test]
    fn code_stub_lists_the_breaks() {
        let r = quantile(&series(), 2).unwrap();
        let code = run(&r, ExportTarget::CodeStub);
        assert!(
            code.contains(&format!("let breaks = [{:?}];", r.breaks()[0])),
            "{code}"
        );
        assert!(code.contains("manual_interval(series, &breaks)"));
    }

    #[test]
    fn target_names() {
        assert_eq!(
            "legend_svg".parse::<ExportTarget>().unwrap(),
            ExportTarget::LegendSvg
        );
        assert!(
            matches!("png".parse::<ExportTarget>(), Err(Error::UnsupportedTarget(t)) if t == "png")
        );
    }
}
