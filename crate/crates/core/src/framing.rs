//! Bit frames sized to the link's information capacity.
//!
//! Layout (bits, MSB first within every byte):
//!
//! ```text
//! text:        | length:16 | kind:8 | utf-8 bytes ...            | zero pad |
//! image chunk: | length:16 | kind:8 | index:16 | raw rgb bytes ... | zero pad |
//! ```
//!
//! There is no checksum. Corrupted payload bits are delivered as corrupted
//! characters or pixels, and both decoders are total over arbitrary bit
//! errors.

use crate::codec::{ImageRaster, TextKnowledge};
use crate::{Bit, Error, Result};

pub const HEADER_BITS: usize = 24;
pub const CHUNK_INDEX_BITS: usize = 16;
pub const MAX_CHUNKS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum PayloadKind {
    Text = 0x01,
    ImageChunk = 0x02,
}

impl PayloadKind {
    fn payload_offset(self) -> usize {
        match self {
            PayloadKind::Text => HEADER_BITS,
            PayloadKind::ImageChunk => HEADER_BITS + CHUNK_INDEX_BITS,
        }
    }

    /// Largest payload in bytes a frame of `capacity_bits` can carry.
    pub fn max_payload_bytes(self, capacity_bits: usize) -> usize {
        (capacity_bits.saturating_sub(self.payload_offset()) / 8).min(u16::MAX as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadHeader {
    pub length: u16,
    pub kind: u8,
}

impl PayloadHeader {
    fn write(&self, bits: &mut Vec<Bit>) {
        push_bits(bits, self.length as u64, 16);
        push_bits(bits, self.kind as u64, 8);
    }

    fn read(bits: &[Bit]) -> PayloadHeader {
        PayloadHeader {
            length: read_bits(&bits[..16]) as u16,
            kind: read_bits(&bits[16..24]) as u8,
        }
    }
}

/// A padded frame of exactly `capacity` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitFrame {
    bits: Vec<Bit>,
    kind: PayloadKind,
    payload_bits: usize,
}

impl BitFrame {
    /// Wraps bits recovered from the link. The payload size is taken from the
    /// (possibly corrupted) header and clamped to what the frame can hold.
    pub fn from_received(bits: Vec<Bit>, kind: PayloadKind) -> BitFrame {
        let max = kind.max_payload_bytes(bits.len());
        let declared = if bits.len() >= HEADER_BITS {
            PayloadHeader::read(&bits).length as usize
        } else {
            0
        };
        BitFrame {
            payload_bits: declared.min(max) * 8,
            bits,
            kind,
        }
    }

    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<Bit> {
        self.bits
    }

    pub fn kind(&self) -> PayloadKind {
        self.kind
    }

    /// Meaningful payload bits, excluding header and padding.
    pub fn payload_bits(&self) -> usize {
        self.payload_bits
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    /// Range of bit positions holding the payload.
    pub fn payload_range(&self) -> std::ops::Range<usize> {
        let start = self.kind.payload_offset();
        start..start + self.payload_bits
    }

    pub fn header(&self) -> PayloadHeader {
        PayloadHeader::read(&self.bits)
    }
}

fn push_bits(out: &mut Vec<Bit>, value: u64, width: usize) {
    for i in (0..width).rev() {
        out.push(((value >> i) & 1) as Bit);
    }
}

fn read_bits(bits: &[Bit]) -> u64 {
    bits.iter()
        .fold(0u64, |acc, &b| (acc << 1) | (b & 1) as u64)
}

/// Expands bytes to bits, MSB first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<Bit> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        push_bits(&mut out, b as u64, 8);
    }
    out
}

/// Packs bits into bytes, MSB first. A trailing partial byte is zero-filled.
pub fn bits_to_bytes(bits: &[Bit]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| {
            let v = read_bits(c) as u8;
            v << (8 - c.len())
        })
        .collect()
}

/// Decodes UTF-8, replacing each byte of an invalid sequence with `?`.
pub fn decode_utf8_lossy_ascii(mut bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    loop {
        match std::str::from_utf8(bytes) {
            Ok(s) => {
                out.push_str(s);
                return out;
            }
            Err(e) => {
                let valid = e.valid_up_to();
                out.push_str(std::str::from_utf8(&bytes[..valid]).expect("validated prefix"));
                let bad = e.error_len().unwrap_or(bytes.len() - valid);
                out.extend(std::iter::repeat_n('?', bad));
                bytes = &bytes[valid + bad..];
            }
        }
    }
}

fn check_capacity(kind: PayloadKind, capacity_bits: usize) -> Result<()> {
    if capacity_bits < kind.payload_offset() + 8 {
        return Err(Error::InvalidInput(format!(
            "frame capacity {capacity_bits} bits cannot hold a {}-bit header and one byte",
            kind.payload_offset()
        )));
    }
    Ok(())
}

pub fn frame_text(text: &TextKnowledge, capacity_bits: usize) -> Result<BitFrame> {
    let bytes = text.text.as_bytes();
    if bytes.is_empty() {
        return Err(Error::InvalidInput("cannot frame empty text".into()));
    }
    check_capacity(PayloadKind::Text, capacity_bits)?;
    if bytes.len() > PayloadKind::Text.max_payload_bytes(capacity_bits) {
        return Err(Error::TextTooLong {
            len: bytes.len(),
            capacity_bits,
            required_bits: HEADER_BITS + bytes.len() * 8,
        });
    }
    let mut bits = Vec::with_capacity(capacity_bits);
    PayloadHeader {
        length: bytes.len() as u16,
        kind: PayloadKind::Text as u8,
    }
    .write(&mut bits);
    bits.extend(bytes_to_bits(bytes));
    bits.resize(capacity_bits, 0);
    Ok(BitFrame {
        bits,
        kind: PayloadKind::Text,
        payload_bits: bytes.len() * 8,
    })
}

/// Never fails on corrupted bits; only a frame of the wrong size is an error.
pub fn deframe_text(frame: &BitFrame, capacity_bits: usize) -> Result<TextKnowledge> {
    if frame.capacity() != capacity_bits {
        return Err(Error::CapacityMismatch {
            expected: capacity_bits,
            actual: frame.capacity(),
        });
    }
    check_capacity(PayloadKind::Text, capacity_bits)?;
    let max = PayloadKind::Text.max_payload_bytes(capacity_bits);
    let len = (frame.header().length as usize).min(max);
    let bytes = bits_to_bytes(&frame.bits[HEADER_BITS..HEADER_BITS + len * 8]);
    Ok(TextKnowledge::new(decode_utf8_lossy_ascii(&bytes)))
}

/// Splits the raw RGB bytes into chunk frames in index order.
pub fn frame_image(image: &ImageRaster, capacity_bits: usize) -> Result<Vec<BitFrame>> {
    check_capacity(PayloadKind::ImageChunk, capacity_bits)?;
    let chunk = PayloadKind::ImageChunk.max_payload_bytes(capacity_bits);
    let pixels = image.pixels();
    let count = pixels.len().div_ceil(chunk);
    if count > MAX_CHUNKS {
        return Err(Error::InvalidInput(format!(
            "image needs {count} chunks, more than {MAX_CHUNKS}"
        )));
    }
    Ok(pixels
        .chunks(chunk)
        .enumerate()
        .map(|(index, bytes)| {
            let mut bits = Vec::with_capacity(capacity_bits);
            PayloadHeader {
                length: bytes.len() as u16,
                kind: PayloadKind::ImageChunk as u8,
            }
            .write(&mut bits);
            push_bits(&mut bits, index as u64, CHUNK_INDEX_BITS);
            bits.extend(bytes_to_bits(bytes));
            bits.resize(capacity_bits, 0);
            BitFrame {
                bits,
                kind: PayloadKind::ImageChunk,
                payload_bits: bytes.len() * 8,
            }
        })
        .collect())
}

/// Rebuilds a `width`×`height` raster from chunk frames taken positionally.
/// Chunk sizes follow from the geometry rather than the headers, so header
/// corruption is ignored, payload corruption becomes pixel noise and missing
/// trailing frames leave zero-filled pixels.
pub fn reassemble_image(frames: &[BitFrame], width: u32, height: u32) -> Result<ImageRaster> {
    let total = width as usize * height as usize * 3;
    let mut pixels = vec![0u8; total];
    if let Some(first) = frames.first() {
        let capacity = first.capacity();
        check_capacity(PayloadKind::ImageChunk, capacity)?;
        let chunk = PayloadKind::ImageChunk.max_payload_bytes(capacity);
        let start_bit = PayloadKind::ImageChunk.payload_offset();
        for (i, frame) in frames.iter().enumerate() {
            if frame.capacity() != capacity {
                return Err(Error::CapacityMismatch {
                    expected: capacity,
                    actual: frame.capacity(),
                });
            }
            let offset = i * chunk;
            if offset >= total {
                break;
            }
            let n = chunk.min(total - offset);
            let bytes = bits_to_bytes(&frame.bits[start_bit..start_bit + n * 8]);
            pixels[offset..offset + n].copy_from_slice(&bytes);
        }
    }
    ImageRaster::new(width, height, pixels)
}
