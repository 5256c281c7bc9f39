mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data_dir;
use pyrorisk::imaging::RasterImage;
use pyrorisk::render::PALETTE;

fn pyrorisk(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pyrorisk"));
    for var in ["PYRORISK_CONFIG", "PYRORISK_OUT", "PYRORISK_SEED", "PYRORISK_WEIGHTS", "PYRORISK_TILE_SIZE",
        "PYRORISK_GAMMA", "PYRORISK_TAU", "PYRORISK_THRESHOLDS", "PYRORISK_WEATHER_TOKEN"]
    {
        cmd.env_remove(var);
    }
    cmd.args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scene(name: &str) -> String {
    data_dir().join("scene").join(name).to_string_lossy().into_owned()
}

#[test]
fn assess_reproduces_committed_map() {
    let tmp = tempfile::tempdir().unwrap();
    let expected = std::fs::read(scene("expected_danger_map.csv")).unwrap();
    for (i, weather) in [
        vec!["--weather-csv".to_string(), scene("weather.csv")],
        vec![
            "--provider".into(),
            format!("fixture:{}", scene("provider")),
            "--lat=46.81".into(),
            "--lon=-71.21".into(),
            "--from=2018-04-13".into(),
            "--to=2018-04-28".into(),
        ],
    ]
    .iter()
    .enumerate()
    {
        let out_dir = tmp.path().join(format!("run{i}"));
        let (weights, image) = (scene("zero.cnnw"), scene("scene.png"));
        let mut args = vec!["assess", "--weights", &weights, "--image", &image];
        args.extend(weather.iter().map(String::as_str));
        args.extend(["--out", p(&out_dir), "--png"]);
        let out = pyrorisk(&args);
        ok(&out);
        assert_eq!(std::fs::read(out_dir.join("danger_map.csv")).unwrap(), expected);
        assert!(out_dir.join("effective_config.toml").exists());
    }
    // reruns are byte-identical, image included
    for f in ["danger_map.csv", "danger_map.png", "fwi_report.csv"] {
        assert_eq!(
            std::fs::read(tmp.path().join("run0").join(f)).unwrap(),
            std::fs::read(tmp.path().join("run1").join(f)).unwrap()
        );
    }
}

#[test]
fn fwi_command_matches_reference() {
    let tmp = tempfile::tempdir().unwrap();
    let weather = tmp.path().join("weather.csv");
    let reference = std::fs::read_to_string(data_dir().join("fwi_reference.csv")).unwrap();
    let trimmed: String = reference
        .lines()
        .map(|l| l.split(',').take(7).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(&weather, trimmed).unwrap();
    ok(&pyrorisk(&["fwi", "--weather-csv", p(&weather), "--out", p(tmp.path())]));
    let report = std::fs::read_to_string(tmp.path().join("fwi_report.csv")).unwrap();
    assert!(report.starts_with("date,ffmc,dmc,dc,isi,bui,fwi\n"));
    for (got, want) in report.lines().skip(1).zip(reference.lines().skip(1)) {
        let g: Vec<f64> = got.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        let w: Vec<f64> = want.split(',').skip(7).map(|v| v.parse().unwrap()).collect();
        for (a, b) in g.iter().zip(&w) {
            assert!((a - b).abs() <= 0.1, "{got} vs {want}");
        }
    }
}

#[test]
fn render_paints_palette_at_centroids() {
    let tmp = tempfile::tempdir().unwrap();
    let map = tmp.path().join("map.csv");
    std::fs::write(
        &map,
        "row,col,base_level,p_burn,level\n0,0,5,0.0,5\n0,1,5,0.2,4\n0,2,5,0.4,3\n1,0,5,0.6,2\n1,1,5,0.8,1\n1,2,5,1.0,0\n",
    )
    .unwrap();
    ok(&pyrorisk(&["render", "--danger-map", p(&map), "--cell-size", "10", "--out", p(tmp.path())]));
    let img = RasterImage::load(&tmp.path().join("danger_map.png")).unwrap();
    for (i, level) in [5usize, 4, 3, 2, 1, 0].iter().enumerate() {
        let (row, col) = (i / 3, i % 3);
        assert_eq!(img.pixel(col * 10 + 5, row * 10 + 5), PALETTE[*level]);
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let image = scene("scene.png");
    let weather = scene("weather.csv");
    let code = |args: &[&str]| pyrorisk(args).status.code().unwrap();

    assert_eq!(code(&["assess", "--image", &image, "--weather-csv", &weather, "--out", p(&out)]), 2);
    assert_eq!(code(&["assess", "--weights", "/nonexistent.cnnw", "--image", &image, "--weather-csv", &weather, "--out", p(&out)]), 2);
    assert_eq!(code(&["assess", "--weights", &weather, "--image", &image, "--weather-csv", &weather, "--out", p(&out)]), 3);
    assert_eq!(code(&["fwi", "--weather-csv", &weather]), 2);
    assert_eq!(code(&["bogus"]), 2);
    let fixture = format!("fixture:{}", p(tmp.path()));
    assert_eq!(
        code(&["fwi", "--provider", &fixture, "--lat=1", "--lon=2", "--from=2020-01-01", "--to=2020-01-02", "--out", p(&out)]),
        4
    );
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm\n2020-01-01,1,2,10,140,5,0\n").unwrap();
    let out_bad = pyrorisk(&["fwi", "--weather-csv", p(&bad), "--out", p(&out)]);
    assert_eq!(out_bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out_bad.stderr).starts_with("error[data]:"));
}

#[test]
fn config_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.toml");
    std::fs::write(&cfg, "seed = 5\n[fusion]\ngamma = 2.5\n").unwrap();
    let weather = scene("weather.csv");
    let seed_of = |dir: &Path| {
        let text = std::fs::read_to_string(dir.join("effective_config.toml")).unwrap();
        let v: toml::Value = toml::from_str(&text).unwrap();
        (v["seed"].as_integer().unwrap(), v["fusion"]["gamma"].as_float().unwrap())
    };
    let run = |dir: &Path, env_seed: Option<&str>, flag_seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pyrorisk"));
        cmd.env("PYRORISK_CONFIG", &cfg).env_remove("PYRORISK_SEED");
        if let Some(s) = env_seed {
            cmd.env("PYRORISK_SEED", s);
        }
        cmd.args(["fwi", "--weather-csv", &weather, "--out", p(dir)]);
        if let Some(s) = flag_seed {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.status().unwrap().success());
        seed_of(dir)
    };
    assert_eq!(run(&tmp.path().join("a"), None, None), (5, 2.5));
    assert_eq!(run(&tmp.path().join("b"), Some("6"), None), (6, 2.5));
    assert_eq!(run(&tmp.path().join("c"), Some("6"), Some("7")), (7, 2.5));
}

#[test]
fn dataset_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("data");
    let img = RasterImage::load(Path::new(&scene("scene.png"))).unwrap();
    let grid = pyrorisk::imaging::tile(&img, 100, Default::default()).unwrap();
    for (i, class) in ["wildfire", "nowildfire"].iter().enumerate() {
        std::fs::create_dir_all(root.join(class)).unwrap();
        for t in grid.tiles.iter().skip(i).step_by(2) {
            t.image.save_png(&root.join(class).join(format!("{}_{}.png", t.row, t.col))).unwrap();
        }
    }
    let out = tmp.path().join("split");
    ok(&pyrorisk(&["split", "--dataset-root", p(&root), "--seed", "3", "--out", p(&out)]));
    let manifest = std::fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert!(manifest.starts_with("path,label,split\n"));
    assert_eq!(manifest.lines().count(), grid.tiles.len() + 1);

    let tiles = tmp.path().join("tiles");
    ok(&pyrorisk(&["tile", "--image", &scene("scene.png"), "--tile-size", "350", "--out", p(&tiles)]));
    for name in ["scene_r0_c0.png", "scene_r1_c2.png", "tiles.csv"] {
        assert!(tiles.join(name).exists(), "{name}");
    }

    let aug_a = tmp.path().join("aug_a");
    let aug_b = tmp.path().join("aug_b");
    for dir in [&aug_a, &aug_b] {
        ok(&pyrorisk(&[
            "augment", "--image", &scene("scene.png"), "--count", "2", "--rotation", "15", "--zoom", "0.1", "--hflip",
            "--seed", "9", "--out", p(dir),
        ]));
    }
    assert_eq!(
        std::fs::read(aug_a.join("scene_aug1.png")).unwrap(),
        std::fs::read(aug_b.join("scene_aug1.png")).unwrap()
    );

    let scores = tmp.path().join("infer");
    ok(&pyrorisk(&["infer", "--weights", &scene("zero.cnnw"), "--image", &scene("scene.png"), "--out", p(&scores)]));
    let text = std::fs::read_to_string(scores.join("scores.csv")).unwrap();
    assert!(text.starts_with("row,col,NoWildfire,Wildfire,p_burn\n0,0,0.500000,0.500000,0.500000\n"));
}

#[test]
fn eval_reg_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let weather = tmp.path().join("weather.csv");
    let reference = std::fs::read_to_string(data_dir().join("fwi_reference.csv")).unwrap();
    let trimmed: String = reference
        .lines()
        .map(|l| l.split(',').take(7).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(&weather, trimmed).unwrap();
    let out = pyrorisk(&["eval-reg", "--weather-csv", p(&weather), "--trees", "20", "--seed", "1", "--out", p(tmp.path())]);
    ok(&out);
    let mae = std::fs::read_to_string(tmp.path().join("mae.csv")).unwrap();
    assert!(mae.starts_with("regressor,ffmc_mae,dmc_mae,dc_mae,isi_mae\nRF,"));
    assert!(std::fs::read_to_string(tmp.path().join("correlation.csv")).unwrap().starts_with("name,temp,rh,wind,rain,FFMC"));
}
