//! Thin async client for the navigation service's HTTP/JSON API.

use serde::de::DeserializeOwned;
use sonoform_core::audio::{decode_wav, AudioBuffer, AudioError};
use sonoform_core::nav::NavMove;
use sonoform_core::protocol::{CreateSessionRequest, ErrorBody, ModelView, MoveResponse, SessionCreated, SessionInfo};
use sonoform_core::sonifier::Audience;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid base url {0:?}")]
    InvalidUrl(String),
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    #[error("server answered {status}: {message}")]
    Api { status: u16, message: String },
    #[error("cue audio: {0}")]
    Audio(#[from] AudioError),
}

impl ClientError {
    /// HTTP status of an API error.
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: &str) -> Result<Self, ClientError> {
        let base = base_url.trim_end_matches('/');
        if !(base.starts_with("http://") || base.starts_with("https://")) {
            return Err(ClientError::InvalidUrl(base_url.to_string()));
        }
        Ok(Self { base: base.to_string(), http: reqwest::Client::new() })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    async fn check(resp: reqwest::Response) -> Result<reqwest::Response, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let text = resp.text().await.unwrap_or_default();
        let message = serde_json::from_str::<ErrorBody>(&text).map(|b| b.error).unwrap_or(text);
        Err(ClientError::Api { status: status.as_u16(), message })
    }

    async fn json<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        Ok(Self::check(resp).await?.json().await?)
    }

    pub async fn create_session(&self, audience: Audience) -> Result<SessionCreated, ClientError> {
        let body = CreateSessionRequest { audience: Some(audience), ..Default::default() };
        Self::json(self.http.post(self.url("/sessions")).json(&body).send().await?).await
    }

    pub async fn session(&self, id: &str) -> Result<SessionInfo, ClientError> {
        Self::json(self.http.get(self.url(&format!("/sessions/{id}"))).send().await?).await
    }

    pub async fn navigate(&self, id: &str, mv: NavMove) -> Result<MoveResponse, ClientError> {
        Self::json(self.http.post(self.url(&format!("/sessions/{id}/move"))).json(&mv).send().await?).await
    }

    pub async fn model(&self) -> Result<ModelView, ClientError> {
        Self::json(self.http.get(self.url("/model")).send().await?).await
    }

    /// Raw WAV bytes behind a `cue_url` from a move response.
    pub async fn cue_wav(&self, cue_url: &str) -> Result<Vec<u8>, ClientError> {
        let resp = Self::check(self.http.get(self.url(cue_url)).send().await?).await?;
        Ok(resp.bytes().await?.to_vec())
    }

    pub async fn cue_audio(&self, cue_url: &str) -> Result<AudioBuffer, ClientError> {
        Ok(decode_wav(&self.cue_wav(cue_url).await?)?)
    }

    pub async fn walkthrough_wav(&self, audience: Audience) -> Result<Vec<u8>, ClientError> {
        let url = self.url(&format!("/walkthrough.wav?audience={}", audience.as_str()));
        Ok(Self::check(self.http.get(url).send().await?).await?.bytes().await?.to_vec())
    }

    pub async fn walkthrough_vtt(&self, audience: Audience) -> Result<String, ClientError> {
        let url = self.url(&format!("/walkthrough.vtt?audience={}", audience.as_str()));
        Ok(Self::check(self.http.get(url).send().await?).await?.text().await?)
    }
}
