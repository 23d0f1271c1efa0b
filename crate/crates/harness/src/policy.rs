//! Decision makers the runner can drive: the in-process heuristic and a
//! remote policy reached over the line protocol.

use std::io::{self, BufReader, ErrorKind};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use bridgenet_core::{heuristic, Action, ScenarioConfig, World};

use crate::error::HarnessError;
use crate::protocol::{read_message, write_message, Bye, Hello, Message, ObsMessage, PROTOCOL_VERSION};

pub const DEFAULT_REMOTE_TIMEOUT: Duration = Duration::from_secs(5);

/// Produces one joint action per step.
pub trait Policy {
    fn decide(&mut self, world: &World) -> Result<Vec<Action>, HarnessError>;

    /// Called once after the last step.
    fn finish(&mut self) -> Result<(), HarnessError> {
        Ok(())
    }
}

/// The centralized line heuristic.
#[derive(Debug, Default, Clone, Copy)]
pub struct HeuristicPolicy;

impl Policy for HeuristicPolicy {
    fn decide(&mut self, world: &World) -> Result<Vec<Action>, HarnessError> {
        Ok(heuristic::act(world))
    }
}

/// Where the actions of an episode come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyEndpoint {
    Heuristic,
    Remote { address: String, timeout: Duration },
}

impl PolicyEndpoint {
    pub fn remote(address: impl Into<String>) -> Self {
        PolicyEndpoint::Remote { address: address.into(), timeout: DEFAULT_REMOTE_TIMEOUT }
    }

    /// Opens a policy for one episode. Remote endpoints connect and complete
    /// the handshake here.
    pub fn open(&self, scenario: &ScenarioConfig) -> Result<Box<dyn Policy>, HarnessError> {
        match self {
            PolicyEndpoint::Heuristic => Ok(Box::new(HeuristicPolicy)),
            PolicyEndpoint::Remote { address, timeout } => {
                Ok(Box::new(RemotePolicy::connect(address, *timeout, scenario)?))
            }
        }
    }
}

/// Client side of one remote policy session.
#[derive(Debug)]
pub struct RemotePolicy {
    address: String,
    writer: TcpStream,
    reader: BufReader<TcpStream>,
    step: usize,
}

impl RemotePolicy {
    /// Connects, exchanges `hello`, and sends the scenario `config`.
    pub fn connect(address: &str, timeout: Duration, scenario: &ScenarioConfig) -> Result<Self, HarnessError> {
        let connect_err = |source| HarnessError::Connect { address: address.to_string(), source };
        let addrs: Vec<_> = address.to_socket_addrs().map_err(connect_err)?.collect();
        let mut last_err = io::Error::new(ErrorKind::AddrNotAvailable, "address resolved to nothing");
        let mut stream = None;
        for addr in addrs {
            match TcpStream::connect_timeout(&addr, timeout) {
                Ok(s) => {
                    stream = Some(s);
                    break;
                }
                Err(e) => last_err = e,
            }
        }
        let stream = stream.ok_or_else(|| connect_err(last_err))?;
        stream.set_read_timeout(Some(timeout)).map_err(connect_err)?;
        stream.set_write_timeout(Some(timeout)).map_err(connect_err)?;
        stream.set_nodelay(true).ok();
        let reader = BufReader::new(stream.try_clone().map_err(connect_err)?);
        let mut session = RemotePolicy { address: address.to_string(), writer: stream, reader, step: 0 };

        session.send(&Message::Hello(Hello { version: PROTOCOL_VERSION.to_string() }))?;
        match session.receive()? {
            Message::Hello(h) if h.version == PROTOCOL_VERSION => {}
            Message::Hello(h) => {
                return Err(HarnessError::VersionMismatch { expected: PROTOCOL_VERSION.to_string(), got: h.version })
            }
            Message::Bye(b) => return Err(HarnessError::Refused(b.reason.unwrap_or_default())),
            other => return Err(HarnessError::Protocol(format!("expected hello, got {}", other.kind()))),
        }
        session.send(&Message::Config(scenario.clone()))?;
        Ok(session)
    }

    fn io_error(&self, e: io::Error) -> HarnessError {
        match e.kind() {
            ErrorKind::WouldBlock | ErrorKind::TimedOut => {
                HarnessError::Timeout { address: self.address.clone(), step: self.step }
            }
            _ => HarnessError::Disconnected { address: self.address.clone(), detail: e.to_string() },
        }
    }

    fn send(&mut self, message: &Message) -> Result<(), HarnessError> {
        write_message(&mut self.writer, message).map_err(|e| self.io_error(e))
    }

    fn receive(&mut self) -> Result<Message, HarnessError> {
        match read_message(&mut self.reader) {
            Ok(Some(message)) => message,
            Ok(None) => Err(HarnessError::Disconnected {
                address: self.address.clone(),
                detail: "connection closed by peer".into(),
            }),
            Err(e) => Err(self.io_error(e)),
        }
    }
}

impl Policy for RemotePolicy {
    fn decide(&mut self, world: &World) -> Result<Vec<Action>, HarnessError> {
        self.step = world.step_index();
        for (agent, stack) in world.agents().iter().zip(world.stacks()) {
            let frames = stack.frames().cloned().collect();
            self.send(&Message::Obs(ObsMessage { agent: agent.id, step: self.step, frames }))?;
        }
        let n = world.agents().len();
        let mut actions: Vec<Option<Action>> = vec![None; n];
        for _ in 0..n {
            let reply = match self.receive()? {
                Message::Action(a) => a,
                Message::Bye(b) => {
                    return Err(HarnessError::Disconnected {
                        address: self.address.clone(),
                        detail: format!("peer ended the session: {}", b.reason.unwrap_or_default()),
                    })
                }
                other => return Err(HarnessError::Protocol(format!("expected action, got {}", other.kind()))),
            };
            if reply.step != self.step {
                return Err(HarnessError::Protocol(format!(
                    "action for agent {} answers step {}, expected {}",
                    reply.agent, reply.step, self.step
                )));
            }
            let slot = world
                .agents()
                .iter()
                .position(|a| a.id == reply.agent)
                .ok_or_else(|| HarnessError::Protocol(format!("action for unknown agent {}", reply.agent)))?;
            if actions[slot].is_some() {
                return Err(HarnessError::Protocol(format!("duplicate action for agent {}", reply.agent)));
            }
            let action = Action::from_flat(reply.action).map_err(|_| HarnessError::InvalidAction {
                agent: reply.agent,
                step: self.step,
                code: reply.action,
            })?;
            actions[slot] = Some(action);
        }
        Ok(actions.into_iter().map(|a| a.expect("every agent answered")).collect())
    }

    fn finish(&mut self) -> Result<(), HarnessError> {
        self.send(&Message::Bye(Bye { reason: Some("episode complete".into()) }))
    }
}
