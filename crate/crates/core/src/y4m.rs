//! YUV4MPEG2 ingestion and emission, luma plane only.
//!
//! Supported input: 8-bit C420 variants (420, 420jpeg, 420mpeg2, 420paldv)
//! and Cmono. Chroma planes are skipped, never interpreted; the simulator is
//! grayscale throughout. The parser is single-pass over a byte slice and
//! never reads past a declared frame payload.

use crate::error::{Error, Result};
use crate::frame::{Frame, Video};

const SIGNATURE: &[u8] = b"YUV4MPEG2";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chroma {
    C420,
    Mono,
}

impl Chroma {
    /// Bytes of one frame payload (luma plus any chroma planes).
    fn frame_bytes(self, width: usize, height: usize) -> usize {
        let luma = width * height;
        match self {
            // 4:2:0 chroma planes round odd dimensions up.
            Chroma::C420 => luma + 2 * (width.div_ceil(2) * height.div_ceil(2)),
            Chroma::Mono => luma,
        }
    }
}

fn parse_colorspace(token: &str, offset: usize) -> Result<Chroma> {
    match token {
        "420" | "420jpeg" | "420mpeg2" | "420paldv" => Ok(Chroma::C420),
        "mono" => Ok(Chroma::Mono),
        other if other.starts_with("420p") || other.starts_with("mono") => Err(
            Error::UnsupportedFormat(format!("only 8-bit samples are supported, got C{other}")),
        ),
        other => Err(Error::UnsupportedFormat(format!(
            "chroma mode C{other} (supported: C420*, Cmono); header at byte {offset}"
        ))),
    }
}

/// Parses a whole YUV4MPEG2 byte stream into an intensity video holding the
/// luma plane of every frame. `source_id` labels the result (typically the
/// file name).
pub fn parse_y4m(bytes: &[u8], source_id: impl Into<String>) -> Result<Video> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(0, "missing stream header terminator"))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|e| Error::parse(e.valid_up_to(), "stream header is not ASCII"))?;
    if !header.starts_with(std::str::from_utf8(SIGNATURE).unwrap()) {
        return Err(Error::parse(0, "missing YUV4MPEG2 signature"));
    }

    let mut width = None;
    let mut height = None;
    let mut fps = (25u32, 1u32);
    let mut chroma = Chroma::C420;

    // Byte offset of each header token, for error reporting.
    let mut offset = SIGNATURE.len();
    for token in header[SIGNATURE.len()..].split(' ') {
        if token.is_empty() {
            offset += 1;
            continue;
        }
        let (key, val) = token.split_at(1);
        match key {
            "W" => {
                width = Some(val.parse::<usize>().map_err(|_| {
                    Error::parse(offset, format!("bad width token W{val}"))
                })?);
            }
            "H" => {
                height = Some(val.parse::<usize>().map_err(|_| {
                    Error::parse(offset, format!("bad height token H{val}"))
                })?);
            }
            "F" => {
                let (num, den) = val
                    .split_once(':')
                    .ok_or_else(|| Error::parse(offset, format!("bad frame rate token F{val}")))?;
                let num = num
                    .parse::<u32>()
                    .map_err(|_| Error::parse(offset, format!("bad frame rate numerator {num}")))?;
                let den = den
                    .parse::<u32>()
                    .map_err(|_| Error::parse(offset, format!("bad frame rate denominator {den}")))?;
                if den == 0 {
                    return Err(Error::parse(offset, "frame rate denominator is zero"));
                }
                fps = (num, den);
            }
            "C" => chroma = parse_colorspace(val, offset)?,
            // Interlacing, aspect ratio and extensions do not affect the
            // luma plane; ignored.
            "I" | "A" | "X" => {}
            other => {
                return Err(Error::parse(offset, format!("unknown header token {other}{val}")));
            }
        }
        offset += token.len() + 1;
    }

    let width = width.ok_or_else(|| Error::parse(0, "header missing width (W)"))?;
    let height = height.ok_or_else(|| Error::parse(0, "header missing height (H)"))?;
    if width == 0 || height == 0 {
        return Err(Error::parse(0, format!("degenerate dimensions {width}x{height}")));
    }

    let frame_bytes = chroma.frame_bytes(width, height);
    let luma_bytes = width * height;
    let mut frames = Vec::new();
    let mut pos = header_end + 1;

    while pos < bytes.len() {
        let marker_end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|rel| pos + rel)
            .ok_or(Error::Truncated { frame_index: frames.len() })?;
        let marker = &bytes[pos..marker_end];
        if !marker.starts_with(b"FRAME") {
            return Err(Error::parse(pos, "expected FRAME marker"));
        }
        let payload_start = marker_end + 1;
        let payload_end = payload_start + frame_bytes;
        if payload_end > bytes.len() {
            return Err(Error::Truncated { frame_index: frames.len() });
        }
        frames.push(Frame::from_bytes(
            height,
            width,
            &bytes[payload_start..payload_start + luma_bytes],
        )?);
        pos = payload_end;
    }

    if frames.is_empty() {
        return Err(Error::parse(header_end, "stream contains no frames"));
    }
    Video::from_frames(frames, fps.0, fps.1, source_id)
}

/// Writes a video as monochrome YUV4MPEG2 (`Cmono`). Samples are rounded to
/// the nearest integer and clamped to 8 bits.
pub fn write_y4m(video: &Video) -> Vec<u8> {
    let meta = video.meta();
    let mut out = format!(
        "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 Cmono\n",
        meta.width, meta.height, meta.fps_num, meta.fps_den
    )
    .into_bytes();
    for frame in video.frames() {
        out.extend_from_slice(b"FRAME\n");
        out.extend(frame.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    }
    out
}
