//! Built-in synthetic test videos, all deterministic, so sweeps and the
//! acceptance checks run without any external dataset.
//!
//! Content generators scale with resolution: the square's size and speed grow
//! proportionally, so `moving_square(256, ..)` block-averaged down by 4
//! reproduces `moving_square(64, ..)` exactly. That mirrors how real footage
//! is downsampled to compare resolutions.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{Domain, Frame, Video};

/// Names accepted by [`generate`] and the CLI `--fixture` flag.
pub const FIXTURE_NAMES: &[&str] = &[
    "moving-square",
    "drifting-sinusoid",
    "static-noise",
    "constant-gray",
    "one-pixel",
];

/// A white square on black, translating one scaled pixel per frame.
/// The square's side is `size/4` and its speed `size/64` pixels per frame,
/// so content is resolution-covariant.
pub fn moving_square(size: usize, frames: usize) -> Result<Video> {
    if size < 16 || size % 16 != 0 {
        return Err(Error::Config(format!(
            "moving-square size must be a positive multiple of 16, got {size}"
        )));
    }
    let step = (size / 64).max(1);
    let side = size / 4;
    let top = size / 8;
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        let left = (size / 8 + t * step) % (size - side);
        let mut data = Array2::zeros((size, size));
        for i in top..top + side {
            for j in left..left + side {
                data[(i, j)] = 255.0;
            }
        }
        out.push(Frame::new(data, Domain::Intensity)?);
    }
    Video::from_frames(out, 30, 1, format!("moving-square-{size}x{size}x{frames}"))
}

/// A smooth plaid of two sinusoids whose phase drifts over time; exercises
/// gradual, spatially dense intensity change.
pub fn drifting_sinusoid(width: usize, height: usize, frames: usize) -> Result<Video> {
    let fx = 3.0 / width as f64;
    let fy = 2.0 / height as f64;
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        let phase = 2.0 * std::f64::consts::PI * t as f64 / 24.0;
        let data = Array2::from_shape_fn((height, width), |(i, j)| {
            let arg = 2.0 * std::f64::consts::PI * (fx * j as f64 + fy * i as f64) + phase;
            127.5 * (1.0 + 0.8 * arg.sin())
        });
        out.push(Frame::new(data, Domain::Intensity)?);
    }
    Video::from_frames(out, 30, 1, format!("drifting-sinusoid-{width}x{height}x{frames}"))
}

/// A seeded noise pattern held constant over time: spatially rich content
/// with zero temporal change, so any threshold yields zero events.
pub fn static_noise(width: usize, height: usize, frames: usize, seed: u64) -> Result<Video> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pattern = Array2::from_shape_fn((height, width), |_| rng.gen_range(0.0..=255.0));
    let frame = Frame::new(pattern, Domain::Intensity)?;
    Video::from_frames(
        vec![frame; frames.max(1)],
        30,
        1,
        format!("static-noise-{width}x{height}x{frames}"),
    )
}

/// A flat mid-gray video; the degenerate no-information case.
pub fn constant_gray(width: usize, height: usize, frames: usize) -> Result<Video> {
    let frame = Frame::new(Array2::from_elem((height, width), 128.0), Domain::Intensity)?;
    Video::from_frames(
        vec![frame; frames.max(1)],
        30,
        1,
        format!("constant-gray-{width}x{height}x{frames}"),
    )
}

/// The single-pixel three-frame track whose log values (with the default
/// epsilon) are 0, 0.35 and 0.05: at threshold 0.1 it produces +3 then -2
/// events, five in total.
pub fn one_pixel() -> Video {
    let intensities = [0.0, 0.35f64.exp() - 1.0, 0.05f64.exp() - 1.0];
    let frames = intensities
        .iter()
        .map(|&v| Frame::new(Array2::from_elem((1, 1), v), Domain::Intensity).expect("non-negative"))
        .collect();
    Video::from_frames(frames, 30, 1, "one-pixel").expect("static fixture")
}

/// A smooth "natural" still: a soft vignette plus a few Gaussian blobs.
/// Used where tests need photograph-like energy compaction.
pub fn natural_still(width: usize, height: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(0.0..height as f64),
                rng.gen_range(0.0..width as f64),
                rng.gen_range(width as f64 / 12.0..width as f64 / 4.0),
                rng.gen_range(40.0..140.0),
            )
        })
        .collect();
    let (cy, cx) = (height as f64 / 2.0, width as f64 / 2.0);
    let falloff = (width.max(height) as f64).powi(2);
    let data = Array2::from_shape_fn((height, width), |(i, j)| {
        let mut v = 90.0 - 60.0 * ((i as f64 - cy).powi(2) + (j as f64 - cx).powi(2)) / falloff;
        for &(by, bx, sigma, amp) in &blobs {
            let d2 = (i as f64 - by).powi(2) + (j as f64 - bx).powi(2);
            v += amp * (-d2 / (2.0 * sigma * sigma)).exp();
        }
        v.clamp(0.0, 255.0)
    });
    Frame::new(data, Domain::Intensity).expect("clamped to valid range")
}

/// Parses a fixture spec of the form `name` or `name:WxHxS`
/// (e.g. `moving-square:128x128x30`).
pub fn generate(spec: &str, seed: u64) -> Result<Video> {
    let (name, dims) = match spec.split_once(':') {
        Some((n, d)) => (n, Some(d)),
        None => (spec, None),
    };
    let parse_dims = |d: Option<&str>, defaults: (usize, usize, usize)| -> Result<(usize, usize, usize)> {
        match d {
            None => Ok(defaults),
            Some(d) => {
                let parts: Vec<_> = d.split('x').collect();
                if parts.len() != 3 {
                    return Err(Error::Config(format!("fixture dims must be WxHxS, got {d}")));
                }
                let nums = parts
                    .iter()
                    .map(|p| p.parse::<usize>().map_err(|_| Error::Config(format!("bad fixture dim {p}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok((nums[0], nums[1], nums[2]))
            }
        }
    };
    match name {
        "moving-square" => {
            let (w, h, s) = parse_dims(dims, (64, 64, 30))?;
            if w != h {
                return Err(Error::Config("moving-square is square; use WxWxS".into()));
            }
            moving_square(w, s)
        }
        "drifting-sinusoid" => {
            let (w, h, s) = parse_dims(dims, (64, 64, 30))?;
            drifting_sinusoid(w, h, s)
        }
        "static-noise" => {
            let (w, h, s) = parse_dims(dims, (64, 64, 30))?;
            static_noise(w, h, s, seed)
        }
        "constant-gray" => {
            let (w, h, s) = parse_dims(dims, (64, 64, 30))?;
            constant_gray(w, h, s)
        }
        "one-pixel" => Ok(one_pixel()),
        other => Err(Error::Config(format!(
            "unknown fixture '{other}'; available: {}",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}
