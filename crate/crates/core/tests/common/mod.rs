#![allow(dead_code)]

use std::path::PathBuf;

use chrono::NaiveDate;
use pyrorisk::cnn::{Conv2d, Shape3, Tensor3};
use pyrorisk::fwi::WeatherObservation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub struct ReferenceRow {
    pub lat: f64,
    pub obs: WeatherObservation,
    /// ffmc, dmc, dc, isi, bui, fwi
    pub expected: [f64; 6],
}

pub fn fwi_reference() -> Vec<ReferenceRow> {
    let text = std::fs::read_to_string(data_dir().join("fwi_reference.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let n = |i: usize| f[i].parse::<f64>().unwrap();
            let date: NaiveDate = f[0].parse().unwrap();
            ReferenceRow {
                lat: n(1),
                obs: WeatherObservation::new(date, n(3), n(4), n(5), n(6)).unwrap(),
                expected: [n(7), n(8), n(9), n(10), n(11), n(12)],
            }
        })
        .collect()
}

/// Textbook discrete convolution, Σ I(m, n)·K'(i − m, j − n),
/// evaluated with the kernel flipped (K' = K rotated 180°) so that it
/// reproduces the cross-correlation layer. Strides and zero padding are
/// applied by sampling the padded input at `s·i + f − 1 − u`.
pub fn conv2d_oracle(input: &Tensor3, layer: &Conv2d) -> Vec<f64> {
    let s = input.shape();
    let (f, st, p) = (layer.filter, layer.stride, layer.pad);
    let oh = (s.height + 2 * p - f) / st + 1;
    let ow = (s.width + 2 * p - f) / st + 1;
    let flipped = |u: usize, v: usize, ci: usize, co: usize| {
        f64::from(layer.kernel[layer.kernel_index(f - 1 - u, f - 1 - v, ci, co)])
    };
    let padded = |r: i64, c: i64, ch: usize| -> f64 {
        let (r, c) = (r - p as i64, c - p as i64);
        if r < 0 || c < 0 || r >= s.height as i64 || c >= s.width as i64 {
            0.0
        } else {
            f64::from(input.get(r as usize, c as usize, ch))
        }
    };
    let mut out = vec![0.0; oh * ow * layer.out_channels];
    for i in 0..oh {
        for j in 0..ow {
            for co in 0..layer.out_channels {
                let mut acc = f64::from(layer.bias[co]);
                for u in 0..f {
                    for v in 0..f {
                        for ci in 0..s.channels {
                            let m = (st * i + f - 1 - u) as i64;
                            let n = (st * j + f - 1 - v) as i64;
                            acc += padded(m, n, ci) * flipped(u, v, ci, co);
                        }
                    }
                }
                out[(i * ow + j) * layer.out_channels + co] = acc;
            }
        }
    }
    out
}

/// A random conv instance: input up to 16×16×4, kernel 1–5, stride 1–3,
/// pad 0–2, with a geometry that fits.
pub fn random_conv_case(rng: &mut ChaCha8Rng) -> (Tensor3, Conv2d) {
    loop {
        let h = rng.gen_range(1..=16);
        let w = rng.gen_range(1..=16);
        let c = rng.gen_range(1..=4);
        let f = rng.gen_range(1..=5);
        let stride = rng.gen_range(1..=3);
        let pad = rng.gen_range(0..=2);
        if f > h + 2 * pad || f > w + 2 * pad {
            continue;
        }
        let out_c = rng.gen_range(1..=4);
        let mut layer = Conv2d::zeros(f, c, out_c, stride, pad);
        layer.kernel.iter_mut().for_each(|k| *k = rng.gen_range(-1.0..1.0));
        layer.bias.iter_mut().for_each(|b| *b = rng.gen_range(-1.0..1.0));
        let input = Tensor3::from_fn(Shape3::new(h, w, c), |_, _, _| rng.gen_range(-1.0..1.0));
        return (input, layer);
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest |a − b| / max(1, |b|).
pub fn max_rel_err(actual: &[f32], expected: &[f64]) -> f64 {
    actual
        .iter()
        .zip(expected)
        .map(|(&a, &e)| (f64::from(a) - e).abs() / e.abs().max(1.0))
        .fold(0.0, f64::max)
}
