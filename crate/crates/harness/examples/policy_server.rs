//! Minimal external policy speaking the bridgenet line protocol.
//!
//! ```text
//! cargo run -p bridgenet-harness --example policy_server -- [ADDR] [hold|heuristic]
//! ```
//!
//! `hold` answers 4 for every agent. `heuristic` rebuilds the joint state
//! from the agents' latest frames and runs the centralized line heuristic,
//! so `bridgenet run --policy remote` against it reproduces the in-process
//! baseline.

use std::net::TcpListener;
use std::process::ExitCode;

use bridgenet_core::{heuristic, Position, ScenarioConfig, World};
use bridgenet_harness::protocol::ObsMessage;
use bridgenet_harness::{Decider, HoldDecider, PolicyServer};

struct CentralHeuristic;

impl Decider for CentralHeuristic {
    fn decide(&mut self, config: &ScenarioConfig, _: usize, observations: &[ObsMessage]) -> Vec<i64> {
        let latest: Vec<_> = observations.iter().map(|o| o.frames.last().expect("non-empty stack")).collect();
        let mut agents: Vec<_> = latest.iter().map(|f| (f.ego, f.rows[0].coord)).collect();
        agents.sort_by_key(|(id, _)| *id);
        let targets = (latest[0].rows[0].t1_coord, latest[0].rows[0].t2_coord);
        let positions: Vec<Position> = agents.iter().map(|(_, p)| *p).collect();
        let world = match World::with_positions(config, positions, targets) {
            Ok(w) => w,
            Err(_) => return vec![4; observations.len()],
        };
        let joint = heuristic::act(&world);
        observations
            .iter()
            .map(|o| {
                let slot = agents.iter().position(|(id, _)| *id == o.agent).expect("agent in batch");
                joint[slot].flat() as i64
            })
            .collect()
    }
}

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let addr = args.next().unwrap_or_else(|| "127.0.0.1:7878".into());
    let mode = args.next().unwrap_or_else(|| "hold".into());
    let listener = match TcpListener::bind(&addr) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("cannot listen on {addr}: {e}");
            return ExitCode::from(3);
        }
    };
    eprintln!("policy server ({mode}) listening on {}", listener.local_addr().unwrap());
    match mode.as_str() {
        "hold" => PolicyServer::run(listener, || HoldDecider),
        "heuristic" => PolicyServer::run(listener, || CentralHeuristic),
        other => {
            eprintln!("unknown mode `{other}`; expected hold or heuristic");
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}
