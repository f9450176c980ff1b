//! Semantic encoder/decoder boundary.
//!
//! An encoder maps an image to a caption; a decoder regenerates an image from
//! a (possibly corrupted) caption. [`MockCodec`] answers from a fixture corpus
//! and is fully deterministic; [`RemoteCodec`] talks to an HTTP model gateway.

mod image_raster;
mod mock;
mod remote;

pub use image_raster::ImageRaster;
pub use mock::{token_f1, FixtureEntry, MockCodec};
pub use remote::{CaptionRequest, CaptionResponse, GenerateRequest, GenerateResponse, RemoteCodec};

use crate::{metrics, Result};

/// The caption produced by the semantic encoder, with the optional guidance
/// prompt that was supplied alongside the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextKnowledge {
    pub text: String,
    pub prompt: Option<String>,
}

impl TextKnowledge {
    pub fn new(text: impl Into<String>) -> Self {
        TextKnowledge {
            text: text.into(),
            prompt: None,
        }
    }
}

pub trait SemanticCodec: Send + Sync {
    /// Describes the image as text.
    fn semantic_encode(&self, image: &ImageRaster, prompt: Option<&str>) -> Result<TextKnowledge>;

    /// Produces an image matching the received text. `seed` selects among
    /// equally valid generations where the implementation supports it.
    fn semantic_decode(&self, text: &TextKnowledge, seed: u64) -> Result<ImageRaster>;
}

/// Encode, decode and compare with SSIM, with no channel in between. The
/// regenerated image is resized to the original geometry when they differ.
pub fn codec_roundtrip_similarity(
    codec: &dyn SemanticCodec,
    image: &ImageRaster,
    seed: u64,
) -> Result<f64> {
    let text = codec.semantic_encode(image, None)?;
    let mut regenerated = codec.semantic_decode(&text, seed)?;
    if regenerated.dimensions() != image.dimensions() {
        regenerated = regenerated.resized(image.width(), image.height());
    }
    metrics::ssim(image, &regenerated)
}
