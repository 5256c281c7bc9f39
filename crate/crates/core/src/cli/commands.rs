use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::*;
use crate::cnn::{load_weights, ClassScores, CompiledNetwork, Shape3};
use crate::config::{parse_thresholds, PipelineConfig};
use crate::fusion::{assess_grid, read_danger_csv};
use crate::fwi::{run_series, FwiReport, FwiState, LatitudeBand, WeatherObservation};
use crate::imaging::{
    augment, scan_directory, split_dataset, tile, tile_file_name, EdgePolicy, FillMode, Interpolation, RasterImage,
    SplitFractions, TileGrid,
};
use crate::regress::{
    correlation_matrix, run_study, Distance, ForestParams, RegressorKind, StudyConfig, TabularDataset, FWI_TARGETS,
};
use crate::render::render_levels;
use crate::weather::{
    fwi_report_csv, read_weather_csv, DateRange, FixtureProvider, LiveProvider, UreqTransport, WeatherProvider,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fwi(a) => fwi(a),
        Command::EvalReg(a) => eval_reg(a),
        Command::Tile(a) => tile_cmd(a),
        Command::Infer(a) => infer(a),
        Command::Assess(a) => assess(a),
        Command::Split(a) => split(a),
        Command::Augment(a) => augment_cmd(a),
        Command::Render(a) => render(a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn config(common: &CommonArgs) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::resolve_file(common.config.as_deref()).map_err(|e| usage(e.to_string()))?;
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        cfg.augment.seed = seed;
    }
    cfg.strict |= common.strict;
    Ok(cfg)
}

fn apply_tiling(cfg: &mut PipelineConfig, t: &TilingArgs) {
    if let Some(size) = t.tile_size {
        cfg.tile_size = size;
    }
    if let Some(p) = t.edge_policy {
        cfg.edge_policy = match p {
            EdgeArg::PadZero => EdgePolicy::PadZero,
            EdgeArg::PadReflect => EdgePolicy::PadReflect,
            EdgeArg::DropPartial => EdgePolicy::DropPartial,
        };
    }
}

fn apply_fusion(cfg: &mut PipelineConfig, f: &FusionArgs) -> Result<()> {
    if let Some(g) = f.gamma {
        cfg.fusion.gamma = g;
    }
    if let Some(t) = f.tau {
        cfg.fusion.tau = t;
    }
    if let Some(t) = &f.thresholds {
        cfg.fusion.thresholds = parse_thresholds(t).map_err(usage)?;
    }
    Ok(())
}

/// Validates the config, creates the output directory and records the
/// effective settings in it.
fn prepare_out(cfg: &PipelineConfig) -> Result<PathBuf> {
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let dir = cfg.out.clone().ok_or_else(|| usage("no output directory: pass --out or set PYRORISK_OUT"))?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    cfg.echo_into(&dir).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => usage(format!("{}: not found", path.display())),
        _ => data(format!("{}: {e}", path.display())),
    })
}

fn load_image(path: &Path) -> Result<RasterImage> {
    if !path.exists() {
        return Err(usage(format!("{}: not found", path.display())));
    }
    RasterImage::load(path).map_err(data)
}

fn load_network(path: Option<&Path>, tile_size: usize) -> Result<CompiledNetwork> {
    let path = path.ok_or_else(|| usage("no weights: pass --weights or set PYRORISK_WEIGHTS"))?;
    let net = load_weights(&read_input(path)?).map_err(|e| data(format!("{}: {e}", path.display())))?;
    net.compile(Shape3::new(tile_size, tile_size, 3))
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Observations plus the station latitude.
fn load_weather(w: &WeatherArgs) -> Result<(Vec<WeatherObservation>, f64)> {
    if let Some(path) = &w.weather_csv {
        let text = String::from_utf8(read_input(path)?).map_err(|e| data(format!("{}: {e}", path.display())))?;
        let rows = read_weather_csv(&text).map_err(|e| data(format!("{}: {e}", path.display())))?;
        let lat = w.lat.unwrap_or(rows[0].lat);
        return Ok((rows.into_iter().map(|r| r.obs).collect(), lat));
    }
    let Some(spec) = &w.provider else {
        return Err(usage("no weather source: pass --weather-csv or --provider"));
    };
    let missing = || usage("--provider needs --lat, --lon, --from and --to");
    let (lat, lon) = (w.lat.ok_or_else(missing)?, w.lon.ok_or_else(missing)?);
    let range = DateRange::new(w.from.ok_or_else(missing)?, w.to.ok_or_else(missing)?).map_err(|e| usage(e.to_string()))?;
    let provider: Box<dyn WeatherProvider> = if let Some(dir) = spec.strip_prefix("fixture:") {
        Box::new(FixtureProvider::new(dir))
    } else if spec.starts_with("http://") || spec.starts_with("https://") {
        let mut live = LiveProvider::new(spec.clone(), Box::new(UreqTransport));
        live.record_dir = w.record.clone();
        Box::new(live)
    } else {
        return Err(usage(format!("provider `{spec}` is neither `fixture:<dir>` nor an http(s) URL")));
    };
    let series = provider
        .fetch(lat, lon, range)
        .map_err(|e| CliError::Provider(format!("{}: {e}", provider.id())))?;
    if !series.gaps.is_empty() {
        let days: Vec<_> = series.gaps.iter().map(ToString::to_string).collect();
        eprintln!("warning: no weather for {} day(s): {}", days.len(), days.join(", "));
    }
    if series.observations.is_empty() {
        return Err(data("weather provider returned no observations in range"));
    }
    Ok((series.observations, lat))
}

fn fwi_chain(w: &WeatherArgs) -> Result<(Vec<WeatherObservation>, Vec<FwiReport>)> {
    let (obs, lat) = load_weather(w)?;
    let band = LatitudeBand::from_latitude(lat).map_err(data)?;
    let start = FwiState {
        ffmc: w.ffmc0,
        dmc: w.dmc0,
        dc: w.dc0,
    };
    let reports = run_series(start, &obs, band).map_err(data)?;
    Ok((obs, reports))
}

fn fwi(a: FwiArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let (_, reports) = fwi_chain(&a.weather)?;
    let dir = prepare_out(&cfg)?;
    write(&dir, "fwi_report.csv", fwi_report_csv(&reports))
}

fn eval_reg(a: EvalRegArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let (obs, reports) = fwi_chain(&a.weather)?;
    let dataset = TabularDataset::from_weather(&obs, &reports).map_err(data)?;
    let study = StudyConfig {
        train_fraction: a.train_fraction,
        split_seed: cfg.seed,
        regressors: vec![
            RegressorKind::RandomForest(ForestParams {
                n_trees: a.trees,
                seed: cfg.seed,
                ..ForestParams::default()
            }),
            RegressorKind::Knn {
                k: a.k,
                distance: Distance::Euclidean,
            },
        ],
    };
    let table = run_study(&dataset, &FWI_TARGETS, &study).map_err(data)?;
    let corr = correlation_matrix(&dataset, true).map_err(data)?;
    let dir = prepare_out(&cfg)?;
    write(&dir, "mae.csv", table.to_csv())?;
    write(&dir, "correlation.csv", corr.to_csv())?;
    print!("{}", table.to_csv());
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "image".into(), |s| s.to_string_lossy().into_owned())
}

fn tile_cmd(a: TileArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    apply_tiling(&mut cfg, &a.tiling);
    let image = load_image(&a.image)?;
    let grid = tile(&image, cfg.tile_size, cfg.edge_policy).map_err(data)?;
    let dir = prepare_out(&cfg)?;
    let name = stem(&a.image);
    let mut index = String::from("row,col,y,x,valid_width,valid_height,file\n");
    for t in &grid.tiles {
        let file = tile_file_name(&name, t.row, t.col);
        t.image
            .save_png(&dir.join(&file))
            .map_err(|e| CliError::Output(e.to_string()))?;
        index.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            t.row, t.col, t.origin.0, t.origin.1, t.valid_width, t.valid_height, file
        ));
    }
    write(&dir, "tiles.csv", index)
}

/// Scores in grid order. Tiles are classified in parallel.
fn classify(net: &CompiledNetwork, grid: &TileGrid) -> Result<Vec<ClassScores>> {
    grid.tiles
        .par_iter()
        .map(|t| net.forward(&t.image.to_tensor()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(data)
}

fn infer(a: InferArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    apply_tiling(&mut cfg, &a.tiling);
    if a.weights.is_some() {
        cfg.weights = a.weights.clone();
    }
    let net = load_network(cfg.weights.as_deref(), cfg.tile_size)?;
    let grid = tile(&load_image(&a.image)?, cfg.tile_size, cfg.edge_policy).map_err(data)?;
    let scores = classify(&net, &grid)?;
    let dir = prepare_out(&cfg)?;
    let mut out = format!("row,col,{},p_burn\n", net.labels().join(","));
    for (t, s) in grid.tiles.iter().zip(&scores) {
        let probs: Vec<_> = s.probabilities.iter().map(|p| format!("{p:.6}")).collect();
        out.push_str(&format!("{},{},{},{:.6}\n", t.row, t.col, probs.join(","), s.p_burn()));
    }
    write(&dir, "scores.csv", out)
}

fn assess(a: AssessArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    apply_tiling(&mut cfg, &a.tiling);
    apply_fusion(&mut cfg, &a.fusion)?;
    if a.weights.is_some() {
        cfg.weights = a.weights.clone();
    }
    cfg.fusion.validate().map_err(|e| usage(e.to_string()))?;
    let (_, reports) = fwi_chain(&a.weather)?;
    let report = match a.date {
        Some(d) => reports
            .iter()
            .find(|r| r.date == d)
            .ok_or_else(|| data(format!("no weather for scene date {d}")))?,
        None => reports.last().expect("weather series is non-empty"),
    };
    let net = load_network(cfg.weights.as_deref(), cfg.tile_size)?;
    let grid = tile(&load_image(&a.image)?, cfg.tile_size, cfg.edge_policy).map_err(data)?;
    let scores = classify(&net, &grid)?;
    let map = assess_grid(&grid, &scores, report, &cfg.fusion).map_err(data)?;
    let dir = prepare_out(&cfg)?;
    write(&dir, "fwi_report.csv", fwi_report_csv(&reports))?;
    write(&dir, "danger_map.csv", map.to_csv())?;
    if a.png {
        let img = render_levels(&map.cells, a.cell_size).ok_or_else(|| usage("--cell-size must be positive"))?;
        img.save_png(&dir.join("danger_map.png"))
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    let hist = map.histogram();
    eprintln!(
        "{}: fwi {:.1}, base level {}, tiles per level {:?}",
        report.date, report.fwi, map.base_level, hist
    );
    Ok(())
}

fn split(a: SplitArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    if a.dataset_root.is_some() {
        cfg.dataset_root = a.dataset_root.clone();
    }
    let parts = a
        .fractions
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("--fractions: {e}")))?;
    let [train, test, val] = parts[..] else {
        return Err(usage("--fractions needs three values"));
    };
    let root = cfg
        .dataset_root
        .clone()
        .ok_or_else(|| usage("no dataset root: pass --dataset-root"))?;
    if !root.is_dir() {
        return Err(usage(format!("{}: not a directory", root.display())));
    }
    let entries = scan_directory(&root).map_err(data)?;
    let entries: Vec<_> = entries
        .into_iter()
        .map(|(p, l)| (p.strip_prefix(&root).map(Path::to_path_buf).unwrap_or(p), l))
        .collect();
    let manifest = split_dataset(&entries, SplitFractions { train, test, val }, cfg.seed).map_err(data)?;
    let dir = prepare_out(&cfg)?;
    write(&dir, "manifest.csv", manifest.to_csv().map_err(data)?)?;
    let [tr, te, va] = manifest.split_sizes();
    println!("train {tr}, test {te}, val {va}");
    Ok(())
}

fn augment_cmd(a: AugmentArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    let aug = &mut cfg.augment;
    if let Some(v) = a.rotation {
        aug.rotation_deg = v;
    }
    if let Some(v) = a.width_shift {
        aug.width_shift = v;
    }
    if let Some(v) = a.height_shift {
        aug.height_shift = v;
    }
    if let Some(v) = a.zoom {
        aug.zoom_range = v;
    }
    aug.horizontal_flip |= a.hflip;
    if a.bilinear {
        aug.interpolation = Interpolation::Bilinear;
    }
    if a.fill_nearest {
        aug.fill = FillMode::Nearest;
    }
    let image = load_image(&a.image)?;
    let dir = prepare_out(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.augment.seed);
    let name = stem(&a.image);
    for i in 0..a.count {
        augment(&image, &cfg.augment, &mut rng)
            .save_png(&dir.join(format!("{name}_aug{i}.png")))
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let text = String::from_utf8(read_input(&a.danger_map)?).map_err(data)?;
    let cells = read_danger_csv(&text).map_err(data)?;
    let img = render_levels(&cells, a.cell_size).ok_or_else(|| data("danger map is empty or --cell-size is 0"))?;
    let dir = prepare_out(&cfg)?;
    img.save_png(&dir.join("danger_map.png"))
        .map_err(|e| CliError::Output(e.to_string()))
}
