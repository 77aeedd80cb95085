//! `binx`: batch front-end over the choropleth binning engine.
//!
//! Every command loads the data into an in-memory workbench and calls the
//! same request functions as the HTTP service, so files written here match
//! the service's response bodies byte for byte.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use binx_core::api::{
    to_body, BinRequest, CombineRequest, CompareRequest, DatasetUpload, ExportRequest,
    PaintRequest, TableFormat, UploadConfig, Workbench, DEFAULT_COMBINE_BINS,
    DEFAULT_HISTOGRAM_BINS,
};
use binx_core::export::{ExportOptions, ExportTarget};
use binx_core::palette::DEFAULT_PALETTE;
use binx_core::profile::Profile;
use binx_core::{
    misuse_warning, run_all, CustomMethodStore, Error, ErrorKind, MethodId, MethodSpec,
    PinConstraint, StdDevStep,
};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

const DATASET: &str = "cli";

#[derive(Debug, Parser)]
#[command(
    name = "binx",
    version,
    about = "Choropleth data binning from the command line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary statistics, histogram and density of one attribute.
    Profile(Flags),
    /// Run one method, or all sixteen with --all.
    Bin(Flags),
    /// Bin count, widths and sizes of several methods side by side.
    Compare(Flags),
    /// Consensus matrix and resiliency result across member methods.
    Combine(Flags),
    /// Move breaks so pinned values land in chosen bins.
    Paint(Flags),
    /// Write breaks, sizes, map specification, legend or code snippet.
    Export(Flags),
}

/// Flags shared by all commands. Each can also come from the JSON file
/// given with --config; a flag on the command line wins.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
struct Flags {
    /// Attribute table (CSV with a header row).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Geometry (GeoJSON FeatureCollection) joined to the table.
    #[arg(long)]
    geo: Option<PathBuf>,
    /// Column holding the feature id.
    #[arg(long)]
    id_col: Option<String>,
    /// Column to bin.
    #[arg(long)]
    value_col: Option<String>,
    /// GeoJSON property holding the feature id (defaults to --id-col).
    #[arg(long)]
    id_property: Option<String>,
    /// Method id, e.g. quantile or custom:<name>.
    #[arg(long)]
    method: Option<String>,
    /// Bin count (histogram bins for profile).
    #[arg(long)]
    bins: Option<usize>,
    /// Bin width for defined_interval.
    #[arg(long)]
    interval_size: Option<f64>,
    /// Interior breaks for manual_interval, comma separated.
    #[arg(long, value_delimiter = ',')]
    manual_breaks: Option<Vec<f64>>,
    /// whole or half, for std_deviation.
    #[arg(long)]
    std_dev_step: Option<String>,
    /// Fence factor for box_plot.
    #[arg(long)]
    iqr_factor: Option<f64>,
    /// Head share threshold for head_tail_breaks.
    #[arg(long)]
    head_tail_threshold: Option<f64>,
    /// Growth factor for exponential_bin_sizes.
    #[arg(long)]
    exp_growth: Option<f64>,
    /// Member or compared method ids, comma separated.
    #[arg(long, value_delimiter = ',')]
    members: Option<Vec<String>>,
    /// Pin `value:bin` (repeatable).
    #[arg(long = "pin")]
    pins: Option<Vec<String>>,
    /// Pin feature `id:bin` (repeatable).
    #[arg(long = "pin-feature")]
    pin_features: Option<Vec<String>>,
    /// Extents to paint on, comma separated; defaults to the --method result.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    extents: Option<Vec<f64>>,
    /// Custom-method store (JSON) for `custom:<name>` methods.
    #[arg(long)]
    custom_store: Option<PathBuf>,
    /// Output directory; results go to stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or table (profile), json or csv (compare), export targets
    /// (export, comma separated).
    #[arg(long)]
    format: Option<String>,
    /// Run every built-in method (bin).
    #[arg(long)]
    #[serde(default)]
    all: bool,
    /// Palette for exports.
    #[arg(long)]
    palette: Option<String>,
    /// Reverse the palette.
    #[arg(long)]
    #[serde(default)]
    reversed: bool,
    /// Report statistics without counting missing values.
    #[arg(long)]
    #[serde(default)]
    no_missing: bool,
    /// JSON file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

macro_rules! prefer {
    ($flag:expr, $config:expr, $($field:ident),+) => {
        $( if $flag.$field.is_none() { $flag.$field = $config.$field.take(); } )+
    };
}

impl Flags {
    fn resolve(mut self) -> Result<Flags, Error> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read(&path)?;
        let mut file: Flags = serde_json::from_slice(&text)
            .map_err(|e| Error::InvalidRequest(format!("config {}: {e}", path.display())))?;
        prefer!(
            self,
            file,
            data,
            geo,
            id_col,
            value_col,
            id_property,
            method,
            bins,
            interval_size,
            manual_breaks,
            std_dev_step,
            iqr_factor,
            head_tail_threshold,
            exp_growth,
            members,
            pins,
            pin_features,
            extents,
            custom_store,
            out,
            format,
            palette
        );
        self.all |= file.all;
        self.reversed |= file.reversed;
        self.no_missing |= file.no_missing;
        Ok(self)
    }

    fn required<'a>(&self, value: &'a Option<String>, flag: &str) -> Result<&'a str, Error> {
        value
            .as_deref()
            .ok_or_else(|| Error::InvalidRequest(format!("--{flag} is required")))
    }

    fn load(&self) -> Result<Workbench, Error> {
        let data = self
            .data
            .as_ref()
            .ok_or_else(|| Error::InvalidRequest("--data is required".into()))?;
        let id_col = self.required(&self.id_col, "id-col")?.to_string();
        let mut workbench = Workbench::new();
        if let Some(path) = &self.custom_store {
            workbench.customs = CustomMethodStore::open(path)?;
        }
        workbench.datasets.upload(&DatasetUpload {
            config: UploadConfig {
                dataset_id: Some(DATASET.to_string()),
                id_column: id_col,
                value_column: self.value_col.clone(),
                id_property: self.id_property.clone(),
            },
            attributes: read(data)?,
            geometry: self.geo.as_deref().map(read).transpose()?,
        })?;
        Ok(workbench)
    }

    fn attribute(&self) -> Result<String, Error> {
        Ok(self.required(&self.value_col, "value-col")?.to_string())
    }

    fn spec_for(&self, id: MethodId) -> Result<MethodSpec, Error> {
        let std_dev_step = match self.std_dev_step.as_deref() {
            None => None,
            Some("whole") => Some(StdDevStep::Whole),
            Some("half") => Some(StdDevStep::Half),
            Some(other) => {
                return Err(Error::InvalidRequest(format!(
                    "--std-dev-step must be whole or half, got '{other}'"
                )))
            }
        };
        let member_methods = match (&id, &self.members) {
            (MethodId::Resiliency, Some(m)) => Some(parse_methods(m)?),
            _ => None,
        };
        Ok(MethodSpec {
            method_id: id,
            bin_count: self.bins,
            defined_interval_size: self.interval_size,
            manual_breaks: self.manual_breaks.clone(),
            std_dev_step,
            iqr_factor: self.iqr_factor,
            head_tail_threshold: self.head_tail_threshold,
            member_methods,
            exp_growth: self.exp_growth,
        }
        .relevant())
    }

    fn spec(&self) -> Result<MethodSpec, Error> {
        let id: MethodId = self.required(&self.method, "method")?.parse()?;
        self.spec_for(id)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path)
        .map_err(|e| Error::InvalidRequest(format!("cannot read {}: {e}", path.display())))
}

fn parse_methods(list: &[String]) -> Result<Vec<MethodId>, Error> {
    list.iter().map(|m| m.trim().parse()).collect()
}

fn parse_pin<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, usize), Error> {
    let bad = || Error::InvalidRequest(format!("{what} '{text}' must look like <{what}>:<bin>"));
    let (left, bin) = text.rsplit_once(':').ok_or_else(bad)?;
    Ok((
        left.trim().parse().map_err(|_| bad())?,
        bin.trim().parse().map_err(|_| bad())?,
    ))
}

/// Writes `body` to `out/name`, or to stdout without an output directory.
fn emit(out: Option<&Path>, name: &str, body: &str) -> Result<(), Error> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), body)?;
            eprintln!("wrote {}", dir.join(name).display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn profile_table(p: &Profile) -> String {
    let rows = [
        ("attribute", p.attribute.clone()),
        ("count", p.count.to_string()),
        ("valid", p.valid_count.to_string()),
        ("missing", p.missing_count.to_string()),
        ("min", p.min.to_string()),
        ("max", p.max.to_string()),
        ("mean", p.mean.to_string()),
        ("median", p.median.to_string()),
        ("std_dev", p.std_dev.to_string()),
        ("skewness", p.skewness.to_string()),
        ("kde_bandwidth", p.kde.bandwidth.to_string()),
    ];
    let mut out: String = rows.iter().map(|(k, v)| format!("{k:<14}{v}\n")).collect();
    out.push_str("histogram\n");
    for (j, n) in p.histogram.counts.iter().enumerate() {
        out.push_str(&format!(
            "  [{}, {}{} {n}\n",
            p.histogram.edges[j],
            p.histogram.edges[j + 1],
            if j + 1 == p.histogram.counts.len() {
                "]"
            } else {
                ")"
            }
        ));
    }
    out
}

fn cmd_profile(f: &Flags) -> Result<(), Error> {
    let wb = f.load()?;
    let attribute = match &f.value_col {
        Some(a) => a.clone(),
        None => wb.datasets.get(DATASET)?.attributes.attribute_names()[0].to_string(),
    };
    let body = wb.profile(
        DATASET,
        &attribute,
        f.bins.unwrap_or(DEFAULT_HISTOGRAM_BINS),
        !f.no_missing,
    )?;
    match f.format.as_deref().unwrap_or("json") {
        "json" => emit(f.out.as_deref(), "profile.json", &body),
        "table" => {
            let p: Profile = serde_json::from_str(&body)?;
            emit(f.out.as_deref(), "profile.txt", &profile_table(&p))
        }
        other => Err(Error::InvalidRequest(format!(
            "profile --format must be json or table, got '{other}'"
        ))),
    }
}

fn fixed_count_warning(spec: &MethodSpec, requested: Option<usize>) {
    if let (Some(fixed), Some(k)) = (spec.method_id.fixed_bin_count(), requested) {
        if fixed != k {
            eprintln!(
                "warning: {} always uses {fixed} bins; --bins {k} is ignored",
                spec.method_id
            );
        }
    }
}

fn file_stem(id: &MethodId) -> String {
    id.to_string().replace(':', "_")
}

fn cmd_bin(f: &Flags) -> Result<(), Error> {
    let wb = f.load()?;
    let attribute = f.attribute()?;
    if f.all {
        let out = f
            .out
            .as_deref()
            .ok_or_else(|| Error::InvalidRequest("--all needs --out <dir>".into()))?;
        let series = wb.series(DATASET, &attribute)?;
        let base = MethodSpec {
            bin_count: f.bins,
            defined_interval_size: f.interval_size,
            ..MethodSpec::new(MethodId::EqualInterval)
        };
        let mut failed = None;
        for (id, result) in run_all(&series, &base, &wb.customs) {
            match result {
                Ok(r) => emit(
                    Some(out),
                    &format!("{}.json", file_stem(&id)),
                    &to_body(&r)?,
                )?,
                Err(e) => {
                    eprintln!("{id}: {e}");
                    failed.get_or_insert(e);
                }
            }
        }
        return failed.map_or(Ok(()), Err);
    }
    let spec = f.spec()?;
    fixed_count_warning(&spec, f.bins);
    let name = format!("{}.json", file_stem(&spec.method_id));
    let body = wb.bin(&BinRequest {
        dataset_id: DATASET.into(),
        attribute,
        spec,
    })?;
    emit(f.out.as_deref(), &name, &body)
}

fn compare_specs(f: &Flags) -> Result<Vec<MethodSpec>, Error> {
    let ids = match &f.members {
        Some(m) => parse_methods(m)?,
        None => MethodId::BUILTIN.to_vec(),
    };
    ids.into_iter()
        .map(|id| {
            let mut spec = f.spec_for(id)?;
            spec.bin_count = None;
            Ok(spec)
        })
        .collect()
}

fn cmd_compare(f: &Flags) -> Result<(), Error> {
    let wb = f.load()?;
    let format = match f.format.as_deref().unwrap_or("json") {
        "json" => TableFormat::Json,
        "csv" => TableFormat::Csv,
        other => {
            return Err(Error::InvalidRequest(format!(
                "compare --format must be json or csv, got '{other}'"
            )))
        }
    };
    let req = CompareRequest {
        dataset_id: DATASET.into(),
        attribute: f.attribute()?,
        methods: compare_specs(f)?,
        bin_count: f.bins,
    };
    let payload = wb.compare(&req, format)?;
    let name = match format {
        TableFormat::Json => "compare.json",
        TableFormat::Csv => "compare.csv",
    };
    emit(f.out.as_deref(), name, &payload.body)
}

fn cmd_combine(f: &Flags) -> Result<(), Error> {
    let wb = f.load()?;
    let req = CombineRequest {
        dataset_id: DATASET.into(),
        attribute: f.attribute()?,
        members: f.members.as_deref().map(parse_methods).transpose()?,
        k: Some(f.bins.unwrap_or(DEFAULT_COMBINE_BINS)),
    };
    let response = wb.combine_response(&req)?;
    let body = to_body(&response)?;
    emit(f.out.as_deref(), "combine.json", &body)?;
    if let Some(out) = f.out.as_deref() {
        emit(Some(out), "matrix.json", &to_body(&response.matrix)?)?;
        emit(
            Some(out),
            "resiliency.json",
            &to_body(&response.resiliency)?,
        )?;
    }
    Ok(())
}

fn cmd_paint(f: &Flags) -> Result<(), Error> {
    eprintln!("{}", misuse_warning());
    let wb = f.load()?;
    let attribute = f.attribute()?;
    let extents = match (&f.extents, &f.method) {
        (Some(e), _) => e.clone(),
        (None, Some(_)) => {
            wb.bin_result(&BinRequest {
                dataset_id: DATASET.into(),
                attribute: attribute.clone(),
                spec: f.spec()?,
            })?
            .extents
        }
        (None, None) => {
            return Err(Error::InvalidRequest(
                "paint needs --extents or --method".into(),
            ))
        }
    };
    let mut constraints = Vec::new();
    for p in f.pins.iter().flatten() {
        let (v, bin) = parse_pin::<f64>(p, "value")?;
        constraints.push(PinConstraint::value(v, bin));
    }
    for p in f.pin_features.iter().flatten() {
        let (id, bin) = parse_pin::<String>(p, "id")?;
        constraints.push(PinConstraint::feature(id, bin));
    }
    let body = wb.paint(&PaintRequest {
        dataset_id: DATASET.into(),
        attribute,
        extents,
        constraints,
    })?;
    emit(f.out.as_deref(), "paint.json", &body)
}

fn cmd_export(f: &Flags) -> Result<(), Error> {
    let wb = f.load()?;
    let spec = f.spec()?;
    let targets: Vec<ExportTarget> = f
        .format
        .as_deref()
        .unwrap_or("breaks")
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()?;
    let options = ExportOptions {
        palette: f
            .palette
            .clone()
            .unwrap_or_else(|| DEFAULT_PALETTE.to_string()),
        reversed: f.reversed,
        ..ExportOptions::default()
    };
    for target in targets {
        let payload = wb.export(&ExportRequest {
            dataset_id: DATASET.into(),
            attribute: f.attribute()?,
            spec: spec.clone(),
            target,
            options: options.clone(),
        })?;
        emit(
            f.out.as_deref(),
            &target.file_name(&spec.method_id),
            &payload.body,
        )?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Infeasible => 3,
        ErrorKind::Input | ErrorKind::Conflict => 2,
        ErrorKind::Internal => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run =
        |flags: Flags, cmd: fn(&Flags) -> Result<(), Error>| flags.resolve().and_then(|f| cmd(&f));
    let outcome = match cli.command {
        Command::Profile(f) => run(f, cmd_profile),
        Command::Bin(f) => run(f, cmd_bin),
        Command::Compare(f) => run(f, cmd_compare),
        Command::Combine(f) => run(f, cmd_combine),
        Command::Paint(f) => run(f, cmd_paint),
        Command::Export(f) => run(f, cmd_export),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
