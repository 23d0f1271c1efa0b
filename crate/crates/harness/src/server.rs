//! Policy-side peer of the wire protocol.
//!
//! [`PolicyServer`] accepts sessions on a listener and answers every batch of
//! observations through a [`Decider`]. Each connection gets its own thread
//! and its own decider instance.

use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use bridgenet_core::ScenarioConfig;

use crate::error::HarnessError;
use crate::protocol::{read_message, write_message, ActionMessage, Bye, Hello, Message, ObsMessage, PROTOCOL_VERSION};

/// Answers one step: a flat action code per observation, in the same order.
pub trait Decider: Send {
    fn decide(&mut self, config: &ScenarioConfig, step: usize, observations: &[ObsMessage]) -> Vec<i64>;
}

impl<F> Decider for F
where
    F: FnMut(&ScenarioConfig, usize, &[ObsMessage]) -> Vec<i64> + Send,
{
    fn decide(&mut self, config: &ScenarioConfig, step: usize, observations: &[ObsMessage]) -> Vec<i64> {
        self(config, step, observations)
    }
}

/// Always holds.
#[derive(Debug, Default, Clone, Copy)]
pub struct HoldDecider;

impl Decider for HoldDecider {
    fn decide(&mut self, _: &ScenarioConfig, _: usize, observations: &[ObsMessage]) -> Vec<i64> {
        vec![4; observations.len()]
    }
}

/// Replays a fixed action script, keyed by scenario seed then step.
#[derive(Debug, Clone)]
pub struct ScriptedDecider {
    scripts: Arc<Vec<(u64, Vec<Vec<u8>>)>>,
}

impl ScriptedDecider {
    pub fn new(scripts: Vec<(u64, Vec<Vec<u8>>)>) -> Self {
        ScriptedDecider { scripts: Arc::new(scripts) }
    }
}

impl Decider for ScriptedDecider {
    fn decide(&mut self, config: &ScenarioConfig, step: usize, observations: &[ObsMessage]) -> Vec<i64> {
        let script = self.scripts.iter().find(|(seed, _)| *seed == config.seed).map(|(_, s)| s);
        observations
            .iter()
            .map(|o| {
                script
                    .and_then(|s| s.get(step))
                    .and_then(|codes| codes.get(o.agent.0 as usize))
                    .map_or(4, |&c| c as i64)
            })
            .collect()
    }
}

pub struct PolicyServer {
    addr: SocketAddr,
}

impl PolicyServer {
    /// Starts accepting sessions in a background thread.
    pub fn spawn<F, D>(listener: TcpListener, make_decider: F) -> std::io::Result<Self>
    where
        F: Fn() -> D + Send + Sync + 'static,
        D: Decider + 'static,
    {
        Self::spawn_with_version(listener, PROTOCOL_VERSION, make_decider)
    }

    /// Like [`PolicyServer::spawn`] but announcing an arbitrary protocol
    /// version.
    pub fn spawn_with_version<F, D>(listener: TcpListener, version: &str, make_decider: F) -> std::io::Result<Self>
    where
        F: Fn() -> D + Send + Sync + 'static,
        D: Decider + 'static,
    {
        let addr = listener.local_addr()?;
        let version = version.to_string();
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let decider = make_decider();
                let version = version.clone();
                thread::spawn(move || {
                    let _ = serve_session(stream, decider, &version);
                });
            }
        });
        Ok(PolicyServer { addr })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Serves sessions on the current thread until the listener fails.
    pub fn run<F, D>(listener: TcpListener, make_decider: F)
    where
        F: Fn() -> D,
        D: Decider + 'static,
    {
        for stream in listener.incoming().flatten() {
            let decider = make_decider();
            thread::spawn(move || {
                let _ = serve_session(stream, decider, PROTOCOL_VERSION);
            });
        }
    }
}

/// Runs one session to completion.
pub fn serve_session<D: Decider>(stream: TcpStream, mut decider: D, version: &str) -> Result<(), HarnessError> {
    stream.set_nodelay(true).ok();
    let io_err = |e: std::io::Error| HarnessError::Disconnected { address: "client".into(), detail: e.to_string() };
    let mut reader = BufReader::new(stream.try_clone().map_err(io_err)?);
    let mut writer = BufWriter::new(stream);
    let next = |reader: &mut BufReader<TcpStream>| -> Result<Option<Message>, HarnessError> {
        read_message(reader).map_err(io_err)?.transpose()
    };

    let client_version = match next(&mut reader)? {
        Some(Message::Hello(h)) => h.version,
        Some(other) => return Err(HarnessError::Protocol(format!("expected hello, got {}", other.kind()))),
        None => return Ok(()),
    };
    write_message(&mut writer, &Message::Hello(Hello { version: version.to_string() })).map_err(io_err)?;
    if client_version != version {
        return Err(HarnessError::VersionMismatch { expected: version.to_string(), got: client_version });
    }
    let config = match next(&mut reader)? {
        Some(Message::Config(c)) => c,
        Some(other) => return Err(HarnessError::Protocol(format!("expected config, got {}", other.kind()))),
        None => return Ok(()),
    };

    let mut pending: Vec<ObsMessage> = Vec::with_capacity(config.n_agents);
    loop {
        match next(&mut reader)? {
            Some(Message::Obs(obs)) => {
                pending.push(obs);
                if pending.len() == config.n_agents {
                    let step = pending[0].step;
                    let codes = decider.decide(&config, step, &pending);
                    for (obs, code) in pending.iter().zip(codes) {
                        let reply = Message::Action(ActionMessage { agent: obs.agent, step: obs.step, action: code });
                        write_message(&mut writer, &reply).map_err(io_err)?;
                    }
                    pending.clear();
                }
            }
            Some(Message::Bye(_)) | None => return Ok(()),
            Some(other) => {
                let reason = format!("unexpected {} message", other.kind());
                let _ = write_message(&mut writer, &Message::Bye(Bye { reason: Some(reason.clone()) }));
                return Err(HarnessError::Protocol(reason));
            }
        }
    }
}
