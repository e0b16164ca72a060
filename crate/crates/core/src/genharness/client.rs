//! Chat-completion clients: a JSON-over-HTTP client for OpenAI-compatible
//! endpoints and a deterministic offline mock for tests and desk-scale
//! runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GenError;

/// One chat request issued by the harness.
#[derive(Debug, Clone)]
pub struct ChatRequest {
    pub prompt: String,
    pub temperature: f64,
    /// Position of this request within the run; offline clients derive
    /// their randomness from it.
    pub index: usize,
    /// Number of captions the prompt asks for.
    pub n_captions: usize,
}

/// A chat endpoint returning one raw response body per request.
pub trait ChatClient: Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError>;
}

/// JSON tool schema declared on every request so the model answers through
/// a `submit_captions` function call.
pub fn captions_tool_schema() -> serde_json::Value {
    serde_json::json!({
        "type": "function",
        "function": {
            "name": "submit_captions",
            "description": "Submit the generated captions.",
            "parameters": {
                "type": "object",
                "properties": {
                    "captions": { "type": "array", "items": { "type": "string" } }
                },
                "required": ["captions"]
            }
        }
    })
}

/// Blocking client for OpenAI-compatible `/chat/completions` endpoints.
/// The API key is resolved from the environment at construction time so a
/// missing key fails before any request is sent.
#[derive(Debug)]
pub struct HttpChatClient {
    base_url: String,
    model: String,
    api_key: String,
    max_retries: u32,
    backoff_ms: u64,
    client: reqwest::blocking::Client,
}

/// Connection settings for [`HttpChatClient`]. The key variable defaults
/// to `OPENAI_API_KEY`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatEndpoint {
    pub base_url: String,
    pub model: String,
    #[serde(default = "crate::embedding::default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_max_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    500
}

impl HttpChatClient {
    pub fn new(endpoint: &ChatEndpoint) -> Result<HttpChatClient, GenError> {
        let api_key = std::env::var(&endpoint.api_key_env)
            .map_err(|_| GenError::MissingApiKey(endpoint.api_key_env.clone()))?;
        Ok(HttpChatClient {
            base_url: endpoint.base_url.trim_end_matches('/').to_string(),
            model: endpoint.model.clone(),
            api_key,
            max_retries: endpoint.max_retries.max(1),
            backoff_ms: endpoint.backoff_ms,
            client: reqwest::blocking::Client::new(),
        })
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        let body = serde_json::json!({
            "model": self.model,
            "temperature": request.temperature,
            "messages": [{ "role": "user", "content": request.prompt }],
            "tools": [captions_tool_schema()],
            "tool_choice": { "type": "function", "function": { "name": "submit_captions" } }
        });
        let url = format!("{}/chat/completions", self.base_url);
        let mut last_status = 0u16;
        let mut last_transport: Option<reqwest::Error> = None;
        for attempt in 0..self.max_retries {
            match self.client.post(&url).bearer_auth(&self.api_key).json(&body).send() {
                Ok(response) if response.status().is_success() => {
                    return response.text().map_err(GenError::Transport);
                }
                Ok(response) => last_status = response.status().as_u16(),
                Err(e) => last_transport = Some(e),
            }
            if attempt + 1 < self.max_retries {
                std::thread::sleep(std::time::Duration::from_millis(self.backoff_ms << attempt));
            }
        }
        match last_transport {
            Some(e) => Err(GenError::Transport(e)),
            None => {
                Err(GenError::RemoteFailure { status: last_status, attempts: self.max_retries })
            }
        }
    }
}

/// Deterministic offline chat endpoint. Responses are a pure function of
/// (seed, prompt, temperature, request index), so runs replay identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockChatClient {
    pub seed: u64,
    /// Entries emitted as schema-violating values (numbers) per response.
    #[serde(default)]
    pub invalid_entries_per_request: usize,
    /// Emit a truncated payload on every n-th request (1-based).
    #[serde(default)]
    pub malformed_every: Option<usize>,
    /// When set, caption texts are drawn from a pool of this many distinct
    /// texts, so low-diversity output can be simulated.
    #[serde(default)]
    pub distinct_pool: Option<usize>,
    /// Mimic temperature effects: low temperatures repeat stock captions,
    /// high temperatures occasionally break the output format.
    #[serde(default)]
    pub temperature_profile: bool,
}

impl MockChatClient {
    pub fn new(seed: u64) -> MockChatClient {
        MockChatClient {
            seed,
            invalid_entries_per_request: 0,
            malformed_every: None,
            distinct_pool: None,
            temperature_profile: false,
        }
    }

    fn caption(&self, rng: &mut ChaCha8Rng, sponsored: bool) -> String {
        const OPENERS: [&str; 8] = [
            "Golden hour never disappoints",
            "Small moments, big feelings",
            "Back at it this morning",
            "Weekend plans sorted",
            "Could not love this more",
            "City lights and late nights",
            "Slow start, strong finish",
            "New week, fresh energy",
        ];
        const SPONSORED_MIDDLES: [&str; 6] = [
            "obsessed with the new drop from",
            "my routine is not complete without",
            "treated myself to the bundle from",
            "you all keep asking, it is",
            "the only one I trust is",
            "restocked my favorites from",
        ];
        const PLAIN_MIDDLES: [&str; 6] = [
            "grateful for days like these with",
            "long walk and good talks with",
            "finally caught up with",
            "made brunch at home with",
            "sunset run along the river with",
            "quiet evening reading next to",
        ];
        const BRANDS: [&str; 8] = [
            "@glowlab",
            "@peakwear",
            "@dailyblendco",
            "@urbanroast",
            "@luxeline",
            "@trailkit",
            "@purebloom",
            "@nightshift",
        ];
        const FRIENDS: [&str; 8] = [
            "@mia.day",
            "@jon.walks",
            "@thecrew",
            "@sunnyside",
            "@oldfriends",
            "@roadtrip.pal",
            "@bookclub",
            "@neighbors",
        ];
        const HASHTAGS: [&str; 14] = [
            "#fitnessgoals",
            "#ootd",
            "#selfcare",
            "#coffeetime",
            "#sundayreset",
            "#citylife",
            "#morningmotivation",
            "#weekendvibes",
            "#foodie",
            "#skincare",
            "#throwback",
            "#goldenhour",
            "#nofilter",
            "#grateful",
        ];
        const EMOJIS: [&str; 10] = ["😍", "✨", "☕", "🌅", "💪🏽", "🙌🏻", "❤️", "🔥", "🌿", "📸"];

        let opener = OPENERS[rng.random_range(0..OPENERS.len())];
        let (middle, handle) = if sponsored {
            (
                SPONSORED_MIDDLES[rng.random_range(0..SPONSORED_MIDDLES.len())],
                BRANDS[rng.random_range(0..BRANDS.len())],
            )
        } else {
            (
                PLAIN_MIDDLES[rng.random_range(0..PLAIN_MIDDLES.len())],
                FRIENDS[rng.random_range(0..FRIENDS.len())],
            )
        };
        let mut caption = format!("{opener}, {middle} {handle}");
        for _ in 0..rng.random_range(1..=2u32) {
            caption.push(' ');
            caption.push_str(HASHTAGS[rng.random_range(0..HASHTAGS.len())]);
        }
        for _ in 0..rng.random_range(1..=2u32) {
            caption.push(' ');
            caption.push_str(EMOJIS[rng.random_range(0..EMOJIS.len())]);
        }
        caption
    }
}

impl ChatClient for MockChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        let context = fold_seed(fnv64_str(&request.prompt), request.temperature.to_bits());
        if let Some(every) = self.malformed_every {
            if every > 0 && (request.index + 1).is_multiple_of(every) {
                return Ok(r#"{"captions":["truncated"#.to_string());
            }
        }
        if self.temperature_profile {
            let roll = fold_seed(self.seed ^ 0xbad, fold_seed(context, request.index as u64));
            if ((roll % 1000) as f64) < 250.0 * request.temperature {
                return Ok(r#"{"captions":["truncated"#.to_string());
            }
        }
        let sponsored = request.prompt.contains("undisclosed advertisement");
        let mut entries = Vec::with_capacity(request.n_captions);
        for entry in 0..request.n_captions {
            if entry < self.invalid_entries_per_request {
                entries.push(serde_json::Value::from(entry as u64));
                continue;
            }
            let counter = (request.index * request.n_captions + entry) as u64;
            let stream = if let Some(pool) = self.distinct_pool.filter(|&p| p > 0) {
                // Draw the whole caption from a bounded id space so texts
                // repeat with the configured cardinality.
                let id = fold_seed(self.seed, fold_seed(context, counter)) % pool as u64;
                fold_seed(self.seed, fold_seed(context, id))
            } else if self.temperature_profile {
                let roll = fold_seed(self.seed ^ 0xd0b, fold_seed(context, counter));
                if ((roll % 1000) as f64) < 1000.0 * (1.0 - request.temperature) {
                    // Stock caption: duplicates concentrate as the
                    // temperature drops.
                    fold_seed(self.seed, fold_seed(context, roll % 40))
                } else {
                    fold_seed(self.seed, fold_seed(context, counter ^ 0x5bd1_e995))
                }
            } else {
                fold_seed(self.seed, fold_seed(context, counter ^ 0x5bd1_e995))
            };
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            entries.push(serde_json::Value::from(self.caption(&mut rng, sponsored)));
        }
        let payload = serde_json::json!({ "captions": entries });
        Ok(payload.to_string())
    }
}

fn fnv64_str(s: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn fold_seed(seed: u64, value: u64) -> u64 {
    // splitmix64-style mixing, stable across platforms.
    let mut z = seed ^ value.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
