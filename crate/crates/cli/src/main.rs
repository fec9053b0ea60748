//! `aqm` — quantization matrix generation and evaluation.
//!
//! Subcommands cover the whole pipeline: `fwm` prints the perceptual
//! weighting matrix, `qm`/`aqm` derive integer matrices (optionally
//! adapted to a display), `wcurve` tabulates the resolution parameter,
//! `scaling-list` emits signaling documents, `simulate` runs the codec
//! harness over a QP ladder, and `bdrate` compares two rate-distortion
//! curves. All outputs are deterministic: identical invocations produce
//! byte-identical bytes.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use aqm_core::adapt::{adapt_fwm, ExponentField};
use aqm_core::csf::{build_fwm, CsfParams, FrequencyWeightingMatrix};
use aqm_core::qm::scaling_list::ScalingListDocument;
use aqm_core::qm::{
    derive_inter, derive_qm, replicate, InterModelParams, MatrixKind, QuantizationMatrix,
    QM_SCALE,
};
use aqm_core::simulate::image::{read_yuv420, PlaneSelector};
use aqm_core::simulate::{bd_rate, code_image, ssim, ImagePlane, QuantConfig, RdPoint};
use aqm_core::DisplayGeometry;

#[derive(Parser)]
#[command(
    name = "aqm",
    version,
    about = "Generate HVS-based and display-adaptive quantization matrices and evaluate them in a DCT codec harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the base frequency weighting matrix
    Fwm(FwmArgs),
    /// Derive intra and inter quantization matrices, optionally adapted to a display
    Qm(QmArgs),
    /// Derive display-adaptive quantization matrices (qm with --display required)
    Aqm(AqmArgs),
    /// Tabulate the display resolution parameter w against the normalized hypotenuse p
    Wcurve(WcurveArgs),
    /// Emit a scaling-list document with intra/inter matrices at 8, 16 and 32
    ScalingList(ScalingListArgs),
    /// Code an image over a QP ladder per matrix choice and report quality metrics
    Simulate(SimulateArgs),
    /// Bjontegaard delta rate between two rate-distortion curve files
    Bdrate(BdrateArgs),
}

#[derive(Args, Clone)]
struct CsfArgs {
    /// Display dot pitch in millimeters
    #[arg(long)]
    dot_pitch: Option<f64>,
    /// Viewing distance in millimeters
    #[arg(long)]
    distance: Option<f64>,
    /// Angular symmetry parameter in (0, 1]
    #[arg(long)]
    symmetry: Option<f64>,
    /// Lowpass cutoff in cycles per degree
    #[arg(long)]
    f_max: Option<f64>,
}

impl CsfArgs {
    fn resolve(&self, file: &config::FileConfig, n: usize) -> CsfParams {
        let defaults = CsfParams::default();
        CsfParams {
            dot_pitch: self.dot_pitch.or(file.dot_pitch).unwrap_or(defaults.dot_pitch),
            viewing_distance: self
                .distance
                .or(file.distance)
                .unwrap_or(defaults.viewing_distance),
            symmetry: self.symmetry.or(file.symmetry).unwrap_or(defaults.symmetry),
            f_max: self.f_max.or(file.f_max).unwrap_or(defaults.f_max),
            n,
            ..defaults
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct FwmArgs {
    #[command(flatten)]
    csf: CsfArgs,
    /// Matrix dimension
    #[arg(long, default_value_t = 8)]
    size: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct QmArgs {
    /// Target display as WxH; omit for the default matrices
    #[arg(long, value_parser = parse_dimensions)]
    display: Option<Dimensions>,
    /// Theoretical display maxima as WxH
    #[arg(long, value_parser = parse_dimensions)]
    max: Option<Dimensions>,
    /// Inter model: "identity", "hevc", or "slope,intercept"
    #[arg(long, default_value = "identity")]
    inter_model: String,
    #[command(flatten)]
    csf: CsfArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AqmArgs {
    /// Target display as WxH
    #[arg(long, value_parser = parse_dimensions)]
    display: Dimensions,
    /// Theoretical display maxima as WxH
    #[arg(long, value_parser = parse_dimensions)]
    max: Option<Dimensions>,
    /// Inter model: "identity", "hevc", or "slope,intercept"
    #[arg(long, default_value = "identity")]
    inter_model: String,
    #[command(flatten)]
    csf: CsfArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct WcurveArgs {
    /// Number of p samples over (0, 1]
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Also include the row for this display's p
    #[arg(long, value_parser = parse_dimensions)]
    display: Option<Dimensions>,
    /// Theoretical display maxima as WxH
    #[arg(long, value_parser = parse_dimensions)]
    max: Option<Dimensions>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScalingListArgs {
    /// Target display as WxH; omit for the default matrices
    #[arg(long, value_parser = parse_dimensions)]
    display: Option<Dimensions>,
    /// Theoretical display maxima as WxH
    #[arg(long, value_parser = parse_dimensions)]
    max: Option<Dimensions>,
    /// Layer id recorded in each section
    #[arg(long, default_value_t = 0)]
    layer_id: u32,
    /// Inter model: "identity", "hevc", or "slope,intercept"
    #[arg(long, default_value = "identity")]
    inter_model: String,
    #[command(flatten)]
    csf: CsfArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Input image: binary PGM, or raw YUV 4:2:0 with --yuv-size
    #[arg(long)]
    input: PathBuf,
    /// Treat the input as raw YUV 4:2:0 with these luma dimensions
    #[arg(long, value_parser = parse_dimensions)]
    yuv_size: Option<Dimensions>,
    /// Frame index for YUV input
    #[arg(long, default_value_t = 0)]
    frame: usize,
    /// Plane to code for YUV input
    #[arg(long, value_enum, default_value_t = PlaneArg::Y)]
    plane: PlaneArg,
    /// Target display for the adaptive matrix as WxH
    #[arg(long, value_parser = parse_dimensions)]
    display: Option<Dimensions>,
    /// Theoretical display maxima as WxH
    #[arg(long, value_parser = parse_dimensions)]
    max: Option<Dimensions>,
    /// Comma-separated QP ladder
    #[arg(long)]
    qp_ladder: Option<String>,
    /// Transform block size (8, 16 or 32; derived matrices are replicated above 8)
    #[arg(long, default_value_t = 8)]
    block_size: usize,
    #[command(flatten)]
    csf: CsfArgs,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlaneArg {
    Y,
    U,
    V,
}

#[derive(Args)]
struct BdrateArgs {
    /// Anchor curve: JSON array of {"rate": .., "quality": ..} points
    #[arg(long)]
    anchor: PathBuf,
    /// Test curve: JSON array of {"rate": .., "quality": ..} points
    #[arg(long)]
    test: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dimensions {
    width: u32,
    height: u32,
}

fn parse_dimensions(s: &str) -> Result<Dimensions, String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let width = w.parse().map_err(|_| format!("invalid width '{w}'"))?;
    let height = h.parse().map_err(|_| format!("invalid height '{h}'"))?;
    Ok(Dimensions { width, height })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    let file = config::load()?;
    match command {
        Command::Fwm(args) => cmd_fwm(args, &file),
        Command::Qm(args) => cmd_qm(args, &file),
        Command::Aqm(args) => cmd_qm(
            QmArgs {
                display: Some(args.display),
                max: args.max,
                inter_model: args.inter_model,
                csf: args.csf,
                out: args.out,
            },
            &file,
        ),
        Command::Wcurve(args) => cmd_wcurve(args, &file),
        Command::ScalingList(args) => cmd_scaling_list(args, &file),
        Command::Simulate(args) => cmd_simulate(args, &file),
        Command::Bdrate(args) => cmd_bdrate(args, &file),
    }
}

// ---------------------------------------------------------------------------
// shared resolution helpers
// ---------------------------------------------------------------------------

fn resolve_format(out: &OutputArgs, file: &config::FileConfig) -> Result<OutputFormat> {
    if let Some(f) = out.format {
        return Ok(f);
    }
    match file.format.as_deref() {
        None => Ok(OutputFormat::Text),
        Some("text") => Ok(OutputFormat::Text),
        Some("json") => Ok(OutputFormat::Json),
        Some(other) => bail!("config file: unknown format '{other}'"),
    }
}

fn resolve_maxima(flag: Option<Dimensions>, file: &config::FileConfig) -> Result<Dimensions> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match &file.max {
        None => Ok(Dimensions {
            width: aqm_core::adapt::DEFAULT_MAX_DIMENSION,
            height: aqm_core::adapt::DEFAULT_MAX_DIMENSION,
        }),
        Some(s) => parse_dimensions(s).map_err(|e| anyhow::anyhow!("config file: {e}")),
    }
}

fn resolve_qp_ladder(flag: Option<&str>, file: &config::FileConfig) -> Result<Vec<u8>> {
    let text = match flag {
        Some(s) => s.to_string(),
        None => file
            .qp_ladder
            .clone()
            .unwrap_or_else(|| "22,27,32,37".to_string()),
    };
    let ladder: Vec<u8> = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let qp: u8 = tok
                .parse()
                .map_err(|_| anyhow::anyhow!("invalid qp '{tok}'"))?;
            if qp > 51 {
                bail!("qp {qp} out of range [0, 51]");
            }
            Ok(qp)
        })
        .collect::<Result<_>>()?;
    if ladder.is_empty() {
        bail!("qp ladder is empty");
    }
    Ok(ladder)
}

fn geometry_for(display: Dimensions, maxima: Dimensions) -> Result<DisplayGeometry> {
    DisplayGeometry::with_maxima(display.width, display.height, maxima.width, maxima.height)
        .context("invalid display geometry")
}

fn parse_inter_model(spec: &str) -> Result<InterModelParams> {
    match spec {
        "identity" => Ok(InterModelParams::IDENTITY),
        "hevc" => Ok(InterModelParams::hevc_fit()),
        other => {
            let (s, i) = other
                .split_once(',')
                .ok_or_else(|| anyhow::anyhow!("inter model must be 'identity', 'hevc' or 'slope,intercept', got '{other}'"))?;
            Ok(InterModelParams {
                slope: s.trim().parse().context("invalid inter model slope")?,
                intercept: i.trim().parse().context("invalid inter model intercept")?,
            })
        }
    }
}

/// All output goes through here: the full content is materialized before
/// anything touches the filesystem, so a failed run leaves no partial
/// file behind.
fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// matrix rendering
// ---------------------------------------------------------------------------

fn render_fwm_text(fwm: &FrequencyWeightingMatrix) -> String {
    let mut out = String::new();
    for row in fwm.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

fn render_qm_text(qm: &QuantizationMatrix) -> String {
    let width = qm
        .rows()
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in qm.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_fwm(args: FwmArgs, file: &config::FileConfig) -> Result<()> {
    let params = args.csf.resolve(file, args.size);
    let fwm = build_fwm(&params)?;
    let content = match resolve_format(&args.out, file)? {
        OutputFormat::Text => render_fwm_text(&fwm),
        OutputFormat::Json => to_json_line(&fwm)?,
    };
    write_output(args.out.output.as_deref(), &content)
}

#[derive(Serialize)]
struct QmOutput {
    intra: QuantizationMatrix,
    inter: QuantizationMatrix,
}

fn derive_pair(
    csf: &CsfArgs,
    display: Option<Dimensions>,
    max: Option<Dimensions>,
    inter_model: &str,
    file: &config::FileConfig,
) -> Result<QmOutput> {
    let params = csf.resolve(file, 8);
    let base = build_fwm(&params)?;
    let fwm = match display {
        None => base,
        Some(d) => {
            let geometry = geometry_for(d, resolve_maxima(max, file)?)?;
            adapt_fwm(&base, &ExponentField::new(geometry, params.n))?
        }
    };
    let intra = derive_qm(&fwm, QM_SCALE)?;
    let inter = derive_inter(&intra, &parse_inter_model(inter_model)?)?;
    Ok(QmOutput { intra, inter })
}

fn cmd_qm(args: QmArgs, file: &config::FileConfig) -> Result<()> {
    let pair = derive_pair(&args.csf, args.display, args.max, &args.inter_model, file)?;
    let content = match resolve_format(&args.out, file)? {
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "intra {0}x{0}", pair.intra.size());
            out.push_str(&render_qm_text(&pair.intra));
            out.push('\n');
            let _ = writeln!(out, "inter {0}x{0}", pair.inter.size());
            out.push_str(&render_qm_text(&pair.inter));
            out
        }
        OutputFormat::Json => to_json_line(&pair)?,
    };
    write_output(args.out.output.as_deref(), &content)
}

#[derive(Serialize)]
struct WcurveOutput {
    max_width: u32,
    max_height: u32,
    points: Vec<WcurvePoint>,
}

#[derive(Serialize)]
struct WcurvePoint {
    p: f64,
    w: f64,
}

fn cmd_wcurve(args: WcurveArgs, file: &config::FileConfig) -> Result<()> {
    if args.samples < 2 {
        bail!("wcurve needs at least 2 samples, got {}", args.samples);
    }
    let maxima = resolve_maxima(args.max, file)?;
    let h_t = f64::from(maxima.width).hypot(f64::from(maxima.height));

    let mut ps: Vec<f64> = (1..=args.samples)
        .map(|k| k as f64 / args.samples as f64)
        .collect();
    if let Some(d) = args.display {
        ps.push(geometry_for(d, maxima)?.normalized_hypotenuse());
    }
    ps.sort_by(f64::total_cmp);
    ps.dedup();

    let points: Vec<WcurvePoint> = ps
        .iter()
        .map(|&p| WcurvePoint {
            p,
            w: h_t.powf(-p),
        })
        .collect();

    let content = match resolve_format(&args.out, file)? {
        OutputFormat::Text => {
            let mut out = String::from("# p w\n");
            for pt in &points {
                let _ = writeln!(out, "{:.6} {:.6}", pt.p, pt.w);
            }
            out
        }
        OutputFormat::Json => to_json_line(&WcurveOutput {
            max_width: maxima.width,
            max_height: maxima.height,
            points,
        })?,
    };
    write_output(args.out.output.as_deref(), &content)
}

fn cmd_scaling_list(args: ScalingListArgs, file: &config::FileConfig) -> Result<()> {
    let pair = derive_pair(&args.csf, args.display, args.max, &args.inter_model, file)?;
    let matrices = vec![
        pair.intra.clone(),
        pair.inter.clone(),
        replicate(&pair.intra, 16)?,
        replicate(&pair.inter, 16)?,
        replicate(&pair.intra, 32)?,
        replicate(&pair.inter, 32)?,
    ];
    let doc = ScalingListDocument::new(&matrices, args.layer_id)?;
    let content = match resolve_format(&args.out, file)? {
        OutputFormat::Text => doc.to_text(),
        OutputFormat::Json => {
            let mut s = doc.to_json_string();
            s.push('\n');
            s
        }
    };
    write_output(args.out.output.as_deref(), &content)
}

#[derive(Serialize)]
struct SimulationReport {
    input: String,
    width: usize,
    height: usize,
    plane: String,
    block_size: usize,
    qp_ladder: Vec<u8>,
    geometry: Option<DisplayGeometry>,
    runs: Vec<MatrixRun>,
    bd_rate_adaptive_vs_default: Option<f64>,
}

#[derive(Serialize)]
struct MatrixRun {
    matrix: String,
    points: Vec<ReportPoint>,
}

#[derive(Serialize)]
struct ReportPoint {
    qp: u8,
    rate: f64,
    /// PSNR in dB; null when the reconstruction is lossless.
    psnr: Option<f64>,
    ssim: f64,
}

fn load_input_plane(args: &SimulateArgs) -> Result<(ImagePlane, String)> {
    match args.yuv_size {
        None => {
            let file = fs::File::open(&args.input)
                .with_context(|| format!("opening {}", args.input.display()))?;
            let plane = ImagePlane::read_pgm(&mut BufReader::new(file))
                .with_context(|| format!("reading PGM {}", args.input.display()))?;
            Ok((plane, "luma".to_string()))
        }
        Some(dims) => {
            let mut file = fs::File::open(&args.input)
                .with_context(|| format!("opening {}", args.input.display()))?;
            let frame = read_yuv420(
                &mut file,
                dims.width as usize,
                dims.height as usize,
                args.frame,
            )
            .with_context(|| format!("reading YUV frame {}", args.frame))?;
            let (selector, name) = match args.plane {
                PlaneArg::Y => (PlaneSelector::Y, "y"),
                PlaneArg::U => (PlaneSelector::U, "u"),
                PlaneArg::V => (PlaneSelector::V, "v"),
            };
            Ok((frame.plane(selector).clone(), name.to_string()))
        }
    }
}

fn matrix_for_block_size(qm8: &QuantizationMatrix, block_size: usize) -> Result<QuantizationMatrix> {
    if block_size == 8 {
        Ok(qm8.clone())
    } else {
        Ok(replicate(qm8, block_size)?)
    }
}

fn cmd_simulate(args: SimulateArgs, file: &config::FileConfig) -> Result<()> {
    if !matches!(args.block_size, 8 | 16 | 32) {
        bail!(
            "block size {} has no derived matrices; use 8, 16 or 32",
            args.block_size
        );
    }
    let ladder = resolve_qp_ladder(args.qp_ladder.as_deref(), file)?;
    let (plane, plane_name) = load_input_plane(&args)?;

    let params = args.csf.resolve(file, 8);
    let base = build_fwm(&params)?;
    let default8 = derive_qm(&base, QM_SCALE)?;
    let geometry = match args.display {
        None => None,
        Some(d) => Some(geometry_for(d, resolve_maxima(args.max, file)?)?),
    };

    let mut choices: Vec<(String, QuantizationMatrix)> = vec![
        (
            "flat".to_string(),
            QuantizationMatrix::flat(args.block_size, MatrixKind::Intra, 16)?,
        ),
        (
            "default".to_string(),
            matrix_for_block_size(&default8, args.block_size)?,
        ),
    ];
    if let Some(g) = geometry {
        let adapted = adapt_fwm(&base, &ExponentField::new(g, params.n))?;
        let aqm8 = derive_qm(&adapted, QM_SCALE)?;
        choices.push((
            "adaptive".to_string(),
            matrix_for_block_size(&aqm8, args.block_size)?,
        ));
    }

    let mut runs = Vec::new();
    let mut curves: Vec<(String, Vec<RdPoint>)> = Vec::new();
    for (name, qm) in choices {
        let mut points = Vec::new();
        let mut curve = Vec::new();
        for &qp in &ladder {
            let config = QuantConfig::new(qp, qm.clone())?;
            let (recon, rd) = code_image(&plane, &config);
            let structural = ssim(&plane, &recon)?;
            points.push(ReportPoint {
                qp,
                rate: rd.rate,
                psnr: rd.quality.is_finite().then_some(rd.quality),
                ssim: structural,
            });
            curve.push(rd);
        }
        runs.push(MatrixRun {
            matrix: name.clone(),
            points,
        });
        curves.push((name, curve));
    }

    let find = |name: &str| curves.iter().find(|(n, _)| n == name).map(|(_, c)| c);
    let bd = match (find("default"), find("adaptive")) {
        (Some(anchor), Some(test)) => bd_rate(anchor, test).ok(),
        _ => None,
    };

    let report = SimulationReport {
        input: args.input.display().to_string(),
        width: plane.width(),
        height: plane.height(),
        plane: plane_name,
        block_size: args.block_size,
        qp_ladder: ladder,
        geometry,
        runs,
        bd_rate_adaptive_vs_default: bd,
    };
    write_output(args.output.as_deref(), &to_json_line(&report)?)
}

fn cmd_bdrate(args: BdrateArgs, file: &config::FileConfig) -> Result<()> {
    let read_curve = |path: &Path| -> Result<Vec<RdPoint>> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing curve {}", path.display()))
    };
    let anchor = read_curve(&args.anchor)?;
    let test = read_curve(&args.test)?;
    let delta = bd_rate(&anchor, &test)?;

    #[derive(Serialize)]
    struct BdrateOutput {
        bd_rate_percent: f64,
    }

    let content = match resolve_format(&args.out, file)? {
        OutputFormat::Text => format!("bd-rate: {delta:.6}%\n"),
        OutputFormat::Json => to_json_line(&BdrateOutput {
            bd_rate_percent: delta,
        })?,
    };
    write_output(args.out.output.as_deref(), &content)
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
