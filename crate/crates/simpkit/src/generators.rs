//! Generator bindings: an external command, an HTTP endpoint, and a keyed
//! mock for dry runs.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use simpkit_core::control_tokens::{quantized_bin, strip_control_tokens};
use simpkit_core::corpus::SentencePair;
use simpkit_core::search::Generator;
use simpkit_core::Error as CoreError;

type CoreResult<T> = simpkit_core::Result<T>;

/// Runs a shell command once per batch: inputs on stdin, one per line;
/// outputs on stdout, one per line. Batches are serialized.
#[derive(Debug)]
pub struct CommandGenerator {
    command: String,
    lock: Mutex<()>,
}

impl CommandGenerator {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            lock: Mutex::new(()),
        }
    }

    fn run(&self, inputs: &[String]) -> std::io::Result<(std::process::ExitStatus, String, String)> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut payload = String::new();
        for input in inputs {
            // one record per line
            payload.push_str(&input.replace(['\n', '\r'], " "));
            payload.push('\n');
        }
        let writer = std::thread::spawn(move || {
            // the child may exit without reading everything
            let _ = stdin.write_all(payload.as_bytes());
        });
        let mut stdout = String::new();
        let mut stderr = String::new();
        child.stdout.take().expect("piped stdout").read_to_string(&mut stdout)?;
        child.stderr.take().expect("piped stderr").read_to_string(&mut stderr)?;
        let status = child.wait()?;
        let _ = writer.join();
        Ok((status, stdout, stderr))
    }
}

impl Generator for CommandGenerator {
    fn generate(&self, inputs: &[String]) -> CoreResult<Vec<String>> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let (status, stdout, stderr) = self
            .run(inputs)
            .map_err(|e| CoreError::Generator(format!("`{}`: {e}", self.command)))?;
        if !status.success() {
            return Err(CoreError::Generator(format!(
                "`{}` exited with {status}: {}",
                self.command,
                stderr.trim()
            )));
        }
        Ok(stdout.lines().map(str::to_string).collect())
    }
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    inputs: &'a [String],
}

#[derive(Deserialize)]
struct GenerateResponse {
    outputs: Vec<String>,
}

/// POSTs `{"inputs": [...]}` to `<base>/generate` and reads `{"outputs": [...]}`.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    url: String,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(base: &str) -> Self {
        let base = if base.contains("://") {
            base.to_string()
        } else {
            format!("http://{base}")
        };
        let url = if base.ends_with("/generate") {
            base
        } else {
            format!("{}/generate", base.trim_end_matches('/'))
        };
        Self {
            url,
            agent: ureq::Agent::new_with_defaults(),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl Generator for HttpGenerator {
    fn generate(&self, inputs: &[String]) -> CoreResult<Vec<String>> {
        let fail = |e: ureq::Error| CoreError::Generator(format!("{}: {e}", self.url));
        let response: GenerateResponse = self
            .agent
            .post(&self.url)
            .send_json(GenerateRequest { inputs })
            .map_err(fail)?
            .body_mut()
            .read_json()
            .map_err(fail)?;
        Ok(response.outputs)
    }

    fn supports_concurrent_batches(&self) -> bool {
        true
    }
}

/// Returns a pair's first reference when the DTD token equals `dtd`, and the
/// bare source otherwise. Unknown sources are echoed.
#[derive(Debug, Clone)]
pub struct KeyedMock {
    dtd: f64,
    references: BTreeMap<String, String>,
}

impl KeyedMock {
    pub fn new(pairs: &[SentencePair], dtd: f64) -> Self {
        let mut references = BTreeMap::new();
        for p in pairs {
            if let Some(r) = p.refs.first() {
                references.entry(p.src.clone()).or_insert_with(|| r.clone());
            }
        }
        Self { dtd, references }
    }
}

impl Generator for KeyedMock {
    fn generate(&self, inputs: &[String]) -> CoreResult<Vec<String>> {
        let target = quantized_bin(self.dtd);
        Ok(inputs
            .iter()
            .map(|input| match strip_control_tokens(input) {
                Some((ct, src)) if quantized_bin(ct.dtd) == target => {
                    self.references.get(src).cloned().unwrap_or_else(|| src.to_string())
                }
                Some((_, src)) => src.to_string(),
                None => input.clone(),
            })
            .collect())
    }

    fn supports_concurrent_batches(&self) -> bool {
        true
    }
}

/// Parses `mock`, `mock:<dtd>`, `cmd:<shell command>` or `http:<url>`.
/// The mock is keyed on `pairs`.
pub fn from_spec(spec: &str, pairs: &[SentencePair]) -> crate::Result<Box<dyn Generator + Send + Sync>> {
    if spec == "mock" {
        return Ok(Box::new(KeyedMock::new(pairs, 0.8)));
    }
    if let Some(v) = spec.strip_prefix("mock:") {
        let dtd: f64 = v
            .parse()
            .map_err(|_| crate::Error::Generator(format!("bad mock DTD value `{v}`")))?;
        return Ok(Box::new(KeyedMock::new(pairs, dtd)));
    }
    if let Some(cmd) = spec.strip_prefix("cmd:") {
        return Ok(Box::new(CommandGenerator::new(cmd)));
    }
    if let Some(url) = spec.strip_prefix("http:") {
        return Ok(Box::new(HttpGenerator::new(url.trim_start_matches("//"))));
    }
    Err(crate::Error::Generator(format!(
        "unknown generator `{spec}` (expected mock, cmd:<command> or http:<url>)"
    )))
}
