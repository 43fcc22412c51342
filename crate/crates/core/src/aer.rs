//! Binary event stream format (`.aer`).
//!
//! Layout, all integers little-endian, floats as IEEE-754 bit patterns:
//!
//! ```text
//! magic   "AERS"
//! header  version u8, width u16, height u16, frame_count u32,
//!         fps_num u32, fps_den u32, delta f64, shift f64, epsilon f64,
//!         initial plane f64 row-major, CRC32 of the header bytes
//! blocks  per transition: transition_index u32, entry_count u32,
//!         entries (row u16, col u16, count i16), CRC32 of the block bytes
//! ```
//!
//! Counts outside the i16 range are stored as an escape record: the i16 slot
//! holds `i16::MIN` (never a valid plain count) followed by the real count as
//! an i64. Round trips are bit-exact in both directions, and every byte after
//! the magic is covered by a checksum.
//!
//! The source label of the originating video is display metadata and is not
//! part of the format; deserialized streams carry an empty label.

use crate::error::{Error, Result};
use crate::event::{AerStream, EventBatch, EventEntry, EventThreshold};
use crate::frame::VideoMeta;
use crate::transform::ShiftConstant;
use ndarray::Array2;

pub const AER_MAGIC: &[u8; 4] = b"AERS";
pub const AER_VERSION: u8 = 1;

const COUNT_ESCAPE: i16 = i16::MIN;

/// Encodes a stream into the on-disk byte format.
pub fn serialize(stream: &AerStream) -> Result<Vec<u8>> {
    let meta = &stream.meta;
    if meta.width > u16::MAX as usize || meta.height > u16::MAX as usize {
        return Err(Error::Dimension(format!(
            "{}x{} exceeds the format's 16-bit address space",
            meta.width, meta.height
        )));
    }
    if meta.frame_count > u32::MAX as usize {
        return Err(Error::Dimension("frame count exceeds u32".into()));
    }

    let mut out = Vec::with_capacity(64 + stream.initial_plane.len() * 8);
    out.extend_from_slice(AER_MAGIC);

    let header_start = out.len();
    out.push(AER_VERSION);
    out.extend_from_slice(&(meta.width as u16).to_le_bytes());
    out.extend_from_slice(&(meta.height as u16).to_le_bytes());
    out.extend_from_slice(&(meta.frame_count as u32).to_le_bytes());
    out.extend_from_slice(&meta.fps_num.to_le_bytes());
    out.extend_from_slice(&meta.fps_den.to_le_bytes());
    out.extend_from_slice(&stream.delta.delta().to_bits().to_le_bytes());
    out.extend_from_slice(&stream.shift.value().to_bits().to_le_bytes());
    out.extend_from_slice(&stream.epsilon.to_bits().to_le_bytes());
    for v in stream.initial_plane.iter() {
        out.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    let header_crc = crc32fast::hash(&out[header_start..]);
    out.extend_from_slice(&header_crc.to_le_bytes());

    for batch in &stream.batches {
        let block_start = out.len();
        out.extend_from_slice(&batch.transition.to_le_bytes());
        out.extend_from_slice(&(batch.entries.len() as u32).to_le_bytes());
        for e in &batch.entries {
            out.extend_from_slice(&e.row.to_le_bytes());
            out.extend_from_slice(&e.col.to_le_bytes());
            if e.count >= -(i16::MAX as i64) && e.count <= i16::MAX as i64 {
                out.extend_from_slice(&(e.count as i16).to_le_bytes());
            } else {
                out.extend_from_slice(&COUNT_ESCAPE.to_le_bytes());
                out.extend_from_slice(&e.count.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out[block_start..]);
        out.extend_from_slice(&crc.to_le_bytes());
    }

    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(Error::corrupt(self.pos, format!("truncated while reading {what}"))),
        }
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn i16(&mut self, what: &str) -> Result<i16> {
        Ok(i16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn i64(&mut self, what: &str) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_bits(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap())))
    }
}

/// Decodes bytes produced by [`serialize`], validating checksums and all
/// stream invariants.
pub fn deserialize(bytes: &[u8]) -> Result<AerStream> {
    let mut r = Reader { bytes, pos: 0 };

    let magic = r.take(4, "magic")?;
    if magic != AER_MAGIC {
        return Err(Error::corrupt(0, "bad magic, not an AER stream".into()));
    }

    let header_start = r.pos;
    let version = r.u8("version")?;
    let width = r.u16("width")? as usize;
    let height = r.u16("height")? as usize;
    let frame_count = r.u32("frame count")? as usize;
    let fps_num = r.u32("fps numerator")?;
    let fps_den = r.u32("fps denominator")?;
    let delta = r.f64("delta")?;
    let shift = r.f64("shift")?;
    let epsilon = r.f64("epsilon")?;

    let plane_len = width
        .checked_mul(height)
        .ok_or_else(|| Error::corrupt(header_start, "plane size overflow".into()))?;
    let mut plane = Vec::with_capacity(plane_len);
    for _ in 0..plane_len {
        plane.push(r.f64("initial plane")?);
    }
    let header_end = r.pos;
    let stored_header_crc = r.u32("header checksum")?;
    let actual = crc32fast::hash(&bytes[header_start..header_end]);
    if stored_header_crc != actual {
        return Err(Error::corrupt(header_end, "header checksum mismatch".into()));
    }
    if version != AER_VERSION {
        return Err(Error::corrupt(header_start, format!("unsupported version {version}")));
    }

    let meta = VideoMeta::new(width, height, frame_count, fps_num, fps_den, "")
        .map_err(|e| Error::corrupt(header_start, e.to_string()))?;
    let initial_plane = Array2::from_shape_vec((height, width), plane)
        .map_err(|e| Error::corrupt(header_start, e.to_string()))?;

    let mut batches = Vec::new();
    while r.pos < bytes.len() {
        let block_start = r.pos;
        let transition = r.u32("transition index")?;
        let entry_count = r.u32("entry count")?;
        let mut entries = Vec::with_capacity(entry_count.min(1 << 20) as usize);
        for _ in 0..entry_count {
            let row = r.u16("entry row")?;
            let col = r.u16("entry col")?;
            let short = r.i16("entry count")?;
            let count = if short == COUNT_ESCAPE {
                r.i64("escaped entry count")?
            } else {
                short as i64
            };
            entries.push(EventEntry { row, col, count });
        }
        let block_end = r.pos;
        let stored_crc = r.u32("block checksum")?;
        let actual = crc32fast::hash(&bytes[block_start..block_end]);
        if stored_crc != actual {
            return Err(Error::corrupt(block_end, "block checksum mismatch".into()));
        }
        let batch = EventBatch::new(transition, entries)
            .map_err(|e| Error::corrupt(block_start, e.to_string()))?;
        batches.push(batch);
    }

    let delta = EventThreshold::new(delta)
        .map_err(|e| Error::corrupt(header_start, e.to_string()))?;
    let shift = ShiftConstant::new(shift)
        .map_err(|e| Error::corrupt(header_start, e.to_string()))?;
    AerStream::new(meta, delta, shift, epsilon, initial_plane, batches)
        .map_err(|e| Error::corrupt(header_start, e.to_string()))
}
