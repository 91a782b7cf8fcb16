//! 16-bit PCM RIFF/WAVE encoding.

use std::path::Path;

use super::{AudioBuffer, AudioError};

const PCM_FORMAT: u16 = 1;
const BITS_PER_SAMPLE: u16 = 16;
const SCALE: f64 = 32767.0;

/// Encodes `buf` as a canonical 44-byte-header WAV file.
pub fn encode_wav(buf: &AudioBuffer) -> Vec<u8> {
    let channels = buf.channel_count() as u16;
    let block_align = channels * BITS_PER_SAMPLE / 8;
    let byte_rate = buf.sample_rate() * u32::from(block_align);
    let data_len = (buf.len() * usize::from(block_align)) as u32;

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&buf.sample_rate().to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&BITS_PER_SAMPLE.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for i in 0..buf.len() {
        for ch in buf.channels() {
            let q = (ch[i].clamp(-1.0, 1.0) * SCALE).round() as i16;
            out.extend_from_slice(&q.to_le_bytes());
        }
    }
    out
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decodes a PCM 16-bit WAV file. Unknown chunks are skipped.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer, AudioError> {
    let bad = |msg: &str| AudioError::Format(msg.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("missing RIFF/WAVE header"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u32)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(bad("chunk extends past end of file"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad("fmt chunk too short"));
                }
                let format = u16_at(bytes, body);
                let channels = u16_at(bytes, body + 2);
                let rate = u32_at(bytes, body + 4);
                let bits = u16_at(bytes, body + 14);
                if format != PCM_FORMAT || bits != BITS_PER_SAMPLE {
                    return Err(AudioError::Format(format!(
                        "unsupported encoding: format {format}, {bits} bits"
                    )));
                }
                if !(1..=2).contains(&channels) {
                    return Err(AudioError::Format(format!("unsupported channel count {channels}")));
                }
                fmt = Some((channels, rate));
            }
            b"data" => {
                let (channels, rate) = fmt.ok_or_else(|| bad("data chunk before fmt chunk"))?;
                let channels = usize::from(channels);
                let frame_bytes = 2 * channels;
                if !size.is_multiple_of(frame_bytes) {
                    return Err(bad("data chunk is not a whole number of frames"));
                }
                let frames = size / frame_bytes;
                let mut out = vec![Vec::with_capacity(frames); channels];
                for f in 0..frames {
                    for (c, ch) in out.iter_mut().enumerate() {
                        let at = body + f * frame_bytes + 2 * c;
                        ch.push(f64::from(i16::from_le_bytes([bytes[at], bytes[at + 1]])) / SCALE);
                    }
                }
                return AudioBuffer::new(rate, out).map_err(|e| AudioError::Format(e.to_string()));
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(bad("no data chunk"))
}

pub fn write_wav(buf: &AudioBuffer, path: impl AsRef<Path>) -> Result<(), AudioError> {
    std::fs::write(path, encode_wav(buf))?;
    Ok(())
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, AudioError> {
    decode_wav(&std::fs::read(path)?)
}
