use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{ImageRaster, SemanticCodec, TextKnowledge};
use crate::{Error, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);
pub const DEFAULT_STEPS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionRequest {
    pub image_b64: String,
    pub prompt: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionResponse {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
    pub seed: u64,
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub image_b64: String,
}

#[derive(Debug, Deserialize)]
struct ErrorBody {
    error: String,
}

/// Client for the model gateway: `POST /v1/caption` and `POST /v1/generate`
/// with JSON bodies. Every call is bounded by the configured timeout.
#[derive(Debug, Clone)]
pub struct RemoteCodec {
    base_url: String,
    steps: u32,
    agent: Agent,
}

impl RemoteCodec {
    pub fn new(base_url: impl Into<String>) -> Self {
        RemoteCodec::with_options(base_url, DEFAULT_TIMEOUT, DEFAULT_STEPS)
    }

    pub fn with_options(base_url: impl Into<String>, timeout: Duration, steps: u32) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteCodec {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            steps,
            agent,
        }
    }

    fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp> {
        let url = format!("{}{}", self.base_url, path);
        let mut resp = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        if status != 200 {
            let message = serde_json::from_str::<ErrorBody>(&text)
                .map(|b| b.error)
                .unwrap_or(text);
            return Err(Error::Protocol { status, message });
        }
        serde_json::from_str(&text).map_err(|e| Error::Protocol {
            status,
            message: format!("malformed response body: {e}"),
        })
    }

    pub fn caption(&self, req: &CaptionRequest) -> Result<CaptionResponse> {
        self.post("/v1/caption", req)
    }

    pub fn generate(&self, req: &GenerateRequest) -> Result<GenerateResponse> {
        self.post("/v1/generate", req)
    }
}

impl SemanticCodec for RemoteCodec {
    fn semantic_encode(&self, image: &ImageRaster, prompt: Option<&str>) -> Result<TextKnowledge> {
        let req = CaptionRequest {
            image_b64: B64.encode(image.to_png_bytes()?),
            prompt: prompt.map(str::to_string),
        };
        let resp = self.caption(&req)?;
        if resp.text.is_empty() {
            return Err(Error::Protocol {
                status: 200,
                message: "gateway returned an empty caption".into(),
            });
        }
        Ok(TextKnowledge {
            text: resp.text,
            prompt: req.prompt,
        })
    }

    fn semantic_decode(&self, text: &TextKnowledge, seed: u64) -> Result<ImageRaster> {
        if text.text.is_empty() {
            return Err(Error::InvalidInput("cannot decode empty text".into()));
        }
        let resp = self.generate(&GenerateRequest {
            prompt: text.text.clone(),
            seed,
            steps: self.steps,
        })?;
        let png = B64
            .decode(resp.image_b64.as_bytes())
            .map_err(|e| Error::Protocol {
                status: 200,
                message: format!("image_b64 is not valid base64: {e}"),
            })?;
        ImageRaster::from_png_bytes(&png)
    }
}
