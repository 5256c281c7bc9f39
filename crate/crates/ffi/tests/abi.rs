use std::ffi::CStr;
use std::path::PathBuf;
use std::ptr;

use pyrorisk::cnn::fixture::{read_tensor, FixtureManifest};
use pyrorisk_ffi::*;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

fn last_error() -> String {
    let mut needed = 0usize;
    unsafe { pyro_last_error(ptr::null_mut(), 0, &mut needed) };
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(unsafe { pyro_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, PyroStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn load(bytes: &[u8], h: u32, w: u32, c: u32) -> Result<*mut PyroNetwork, PyroStatus> {
    let mut net = ptr::null_mut();
    match unsafe { pyro_network_load(bytes.as_ptr(), bytes.len(), h, w, c, &mut net) } {
        PyroStatus::Ok => Ok(net),
        s => Err(s),
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(pyro_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn golden_forward_through_handle() {
    let dir = data_dir().join("golden");
    let manifest = FixtureManifest::read(&dir.join("manifest.json")).unwrap();
    let bytes = std::fs::read(dir.join("toy.cnnw")).unwrap();
    let net = load(&bytes, 24, 24, 3).unwrap();

    let (mut classes, mut total, mut trainable) = (0u32, 0u64, 0u64);
    assert_eq!(unsafe { pyro_network_info(net, &mut classes, &mut total, &mut trainable) }, PyroStatus::Ok);
    assert_eq!(classes, 2);
    assert!(total > 0 && trainable <= total);

    for pair in &manifest.pairs {
        let input = read_tensor(&dir.join(&pair.input)).unwrap();
        let expected = read_tensor(&dir.join(&pair.output)).unwrap();
        let mut probs = [0f32; 2];
        let mut p = -1.0f64;
        let status = unsafe {
            pyro_network_forward(net, input.data().as_ptr(), input.data().len(), probs.as_mut_ptr(), 2, &mut p)
        };
        assert_eq!(status, PyroStatus::Ok);
        for (a, b) in probs.iter().zip(expected.data()) {
            assert!((a - b).abs() <= manifest.tolerance as f32, "{a} vs {b}");
        }
        assert!((p - probs[1] as f64).abs() < 1e-6);
    }

    let short = [0f32; 10];
    let mut probs = [0f32; 2];
    let s = unsafe { pyro_network_forward(net, short.as_ptr(), short.len(), probs.as_mut_ptr(), 2, ptr::null_mut()) };
    assert_eq!(s, PyroStatus::ShapeMismatch);
    assert!(last_error().contains("10"));
    unsafe { pyro_network_free(net) };
}

#[test]
fn handle_is_shareable_across_threads() {
    let bytes = std::fs::read(data_dir().join("golden/toy.cnnw")).unwrap();
    let net = load(&bytes, 24, 24, 3).unwrap() as usize;
    let input = vec![0.25f32; 24 * 24 * 3];
    let results: Vec<[f32; 2]> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let input = &input;
                s.spawn(move || {
                    let mut probs = [0f32; 2];
                    let st = unsafe {
                        pyro_network_forward(net as *const PyroNetwork, input.as_ptr(), input.len(), probs.as_mut_ptr(), 2, ptr::null_mut())
                    };
                    assert_eq!(st, PyroStatus::Ok);
                    probs
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(results.windows(2).all(|w| w[0] == w[1]));
    unsafe { pyro_network_free(net as *mut PyroNetwork) };
}

#[test]
fn bad_weights_report_cnnw_code() {
    let mut bytes = std::fs::read(data_dir().join("golden/toy.cnnw")).unwrap();
    bytes[0] = b'X';
    assert_eq!(load(&bytes, 24, 24, 3).unwrap_err(), PyroStatus::BadWeights);
    assert_eq!(pyro_last_cnnw_code(), 1);
    assert!(last_error().contains("magic"));

    let mut bytes = std::fs::read(data_dir().join("golden/toy.cnnw")).unwrap();
    let n = bytes.len();
    bytes[n / 2] ^= 0xFF;
    assert_eq!(load(&bytes, 24, 24, 3).unwrap_err(), PyroStatus::BadWeights);
    assert_ne!(pyro_last_cnnw_code(), 0);

    let good = std::fs::read(data_dir().join("golden/toy.cnnw")).unwrap();
    assert_eq!(load(&good, 5, 5, 3).unwrap_err(), PyroStatus::ShapeMismatch);
    assert_eq!(pyro_last_cnnw_code(), 0);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pyro_network_load(ptr::null(), 0, 1, 1, 1, &mut out) }, PyroStatus::NullPointer);
    unsafe { pyro_network_free(ptr::null_mut()) };
}

#[test]
fn error_buffer_too_small() {
    let s = unsafe { pyro_fuse_severity(3, 9, ptr::null_mut()) };
    assert_eq!(s, PyroStatus::NullPointer);
    let mut level = 0u8;
    assert_eq!(unsafe { pyro_fuse_severity(3, 9, &mut level) }, PyroStatus::InvalidArgument);
    let mut needed = 0usize;
    let mut tiny = [0 as std::ffi::c_char; 2];
    assert_eq!(unsafe { pyro_last_error(tiny.as_mut_ptr(), 2, &mut needed) }, PyroStatus::BufferTooSmall);
    assert!(needed > 2);
}

#[test]
fn fwi_chain_matches_reference() {
    let text = std::fs::read_to_string(data_dir().join("fwi_reference.csv")).unwrap();
    let mut state = pyro_fwi_default_state();
    assert_eq!(state, PyroFwiState { ffmc: 85.0, dmc: 6.0, dc: 15.0 });
    for line in text.lines().skip(1).take(16) {
        let f: Vec<&str> = line.split(',').collect();
        let n = |i: usize| f[i].parse::<f64>().unwrap();
        let d: Vec<u32> = f[0].split('-').map(|p| p.parse().unwrap()).collect();
        let w = PyroWeather {
            year: d[0] as i32,
            month: d[1],
            day: d[2],
            temp_c: n(3),
            rh_pct: n(4),
            wind_kmh: n(5),
            rain_mm: n(6),
        };
        let mut r = PyroFwiReport { ffmc: 0.0, dmc: 0.0, dc: 0.0, isi: 0.0, bui: 0.0, fwi: 0.0 };
        assert_eq!(unsafe { pyro_fwi_step(&state, &w, n(1), &mut r) }, PyroStatus::Ok);
        let got = [r.ffmc, r.dmc, r.dc, r.isi, r.bui, r.fwi];
        for (k, g) in got.iter().enumerate() {
            assert!((g - n(7 + k)).abs() < 1e-3, "{}: column {k}: {g} vs {}", f[0], n(7 + k));
        }
        state = PyroFwiState { ffmc: r.ffmc, dmc: r.dmc, dc: r.dc };
    }

    let bad = PyroWeather { year: 2018, month: 2, day: 30, temp_c: 10.0, rh_pct: 50.0, wind_kmh: 5.0, rain_mm: 0.0 };
    let mut r = PyroFwiReport { ffmc: 0.0, dmc: 0.0, dc: 0.0, isi: 0.0, bui: 0.0, fwi: 0.0 };
    assert_eq!(unsafe { pyro_fwi_step(&state, &bad, 46.0, &mut r) }, PyroStatus::InvalidArgument);
    let humid = PyroWeather { month: 4, day: 1, rh_pct: 140.0, ..bad };
    assert_eq!(unsafe { pyro_fwi_step(&state, &humid, 46.0, &mut r) }, PyroStatus::InvalidArgument);
}

#[test]
fn fusion_matches_core() {
    let cfg = pyro_fusion_default();
    assert_eq!(cfg.thresholds, [5.2, 11.2, 21.3, 38.0, 50.0]);
    let mut level = 9u8;
    let cases = [(0.0, 0), (5.19, 0), (5.2, 1), (24.2837, 3), (49.9, 4), (50.0, 5)];
    for (fwi, want) in cases {
        assert_eq!(unsafe { pyro_fwi_to_danger(fwi, &cfg, &mut level) }, PyroStatus::Ok);
        assert_eq!(level, want, "fwi {fwi}");
    }
    assert_eq!(unsafe { pyro_fwi_to_danger(-1.0, &cfg, &mut level) }, PyroStatus::InvalidArgument);

    assert_eq!(unsafe { pyro_fuse_binary(3, 0.5, &cfg, &mut level) }, PyroStatus::Ok);
    assert_eq!(level, 2);
    assert_eq!(unsafe { pyro_fuse_binary(5, 0.1, &cfg, &mut level) }, PyroStatus::Ok);
    assert_eq!(level, 5);
    assert_eq!(unsafe { pyro_fuse_binary(5, 1.5, &cfg, &mut level) }, PyroStatus::InvalidArgument);

    let unsorted = PyroFusionConfig { thresholds: [5.0, 4.0, 21.3, 38.0, 50.0], ..cfg };
    assert_eq!(unsafe { pyro_fwi_to_danger(10.0, &unsorted, &mut level) }, PyroStatus::InvalidArgument);

    assert_eq!(unsafe { pyro_fuse_severity(5, 2, &mut level) }, PyroStatus::Ok);
    assert_eq!(level, 3);
}
