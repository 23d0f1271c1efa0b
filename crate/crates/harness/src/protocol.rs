//! Line-oriented wire protocol between the harness and an external policy.
//!
//! Every message is one line: a type token, a single space, and a JSON
//! object holding the named fields. See `docs/protocol.md` for the session
//! flow.

use std::io::{BufRead, Write};

use bridgenet_core::{NodeId, Observation, ScenarioConfig};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const PROTOCOL_VERSION: &str = "bridgenet/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hello {
    pub version: String,
}

/// The observation stack of one agent for the decision at `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObsMessage {
    pub agent: NodeId,
    pub step: usize,
    /// Oldest first; the last frame is the current observation.
    pub frames: Vec<Observation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionMessage {
    pub agent: NodeId,
    pub step: usize,
    /// Flat action code. Signed so out-of-range replies can be reported
    /// rather than rejected by the parser.
    pub action: i64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bye {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Hello(Hello),
    Config(ScenarioConfig),
    Obs(ObsMessage),
    Action(ActionMessage),
    Bye(Bye),
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Hello(_) => "hello",
            Message::Config(_) => "config",
            Message::Obs(_) => "obs",
            Message::Action(_) => "action",
            Message::Bye(_) => "bye",
        }
    }

    /// Encodes the message as one line, including the trailing newline.
    pub fn encode(&self) -> String {
        let body = match self {
            Message::Hello(m) => serde_json::to_string(m),
            Message::Config(m) => serde_json::to_string(m),
            Message::Obs(m) => serde_json::to_string(m),
            Message::Action(m) => serde_json::to_string(m),
            Message::Bye(m) => serde_json::to_string(m),
        }
        .expect("protocol messages serialize");
        format!("{} {body}\n", self.kind())
    }

    pub fn decode(line: &str) -> Result<Message, HarnessError> {
        let line = line.trim_end_matches(['\r', '\n']);
        let (kind, body) = line.split_once(' ').unwrap_or((line, "{}"));
        let bad = |e: serde_json::Error| HarnessError::Protocol(format!("malformed `{kind}` message: {e}"));
        Ok(match kind {
            "hello" => Message::Hello(serde_json::from_str(body).map_err(bad)?),
            "config" => Message::Config(serde_json::from_str(body).map_err(bad)?),
            "obs" => Message::Obs(serde_json::from_str(body).map_err(bad)?),
            "action" => Message::Action(serde_json::from_str(body).map_err(bad)?),
            "bye" => Message::Bye(serde_json::from_str(body).map_err(bad)?),
            other => return Err(HarnessError::Protocol(format!("unknown message type `{other}`"))),
        })
    }
}

/// Reads one message; `Ok(None)` on a clean end of stream.
pub fn read_message<R: BufRead>(reader: &mut R) -> std::io::Result<Option<Result<Message, HarnessError>>> {
    let mut line = String::new();
    if reader.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(Message::decode(&line)))
}

pub fn write_message<W: Write>(writer: &mut W, message: &Message) -> std::io::Result<()> {
    writer.write_all(message.encode().as_bytes())?;
    writer.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_line_format() {
        let m = Message::Action(ActionMessage { agent: NodeId(2), step: 7, action: 4 });
        assert_eq!(m.encode(), "action {\"agent\":2,\"step\":7,\"action\":4}\n");
        assert_eq!(Message::decode(&m.encode()).unwrap(), m);
    }

    #[test]
    fn hello_and_bye() {
        let hello = Message::Hello(Hello { version: PROTOCOL_VERSION.into() });
        assert_eq!(hello.encode(), "hello {\"version\":\"bridgenet/1\"}\n");
        assert_eq!(Message::decode("bye").unwrap(), Message::Bye(Bye::default()));
    }

    #[test]
    fn obs_round_trip_from_a_live_world() {
        let world = bridgenet_core::World::reset(&ScenarioConfig::default()).unwrap();
        let frames: Vec<_> = world.stacks()[1].frames().cloned().collect();
        let m = Message::Obs(ObsMessage { agent: NodeId(1), step: 0, frames });
        let line = m.encode();
        assert_eq!(line.matches('\n').count(), 1);
        assert!(line.starts_with("obs {\"agent\":1,\"step\":0,\"frames\":[{\"ego\":1,"));
        assert_eq!(Message::decode(&line).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(Message::decode("frobnicate {}"), Err(HarnessError::Protocol(_))));
        assert!(matches!(Message::decode("action {\"agent\":1}"), Err(HarnessError::Protocol(_))));
        assert!(matches!(Message::decode("config {\"seed\":1}"), Err(HarnessError::Protocol(_))));
    }
}
