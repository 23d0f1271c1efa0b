//! Runner against live policy servers on loopback.

use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use bridgenet_core::{NodeId, ScenarioConfig};
use bridgenet_harness::protocol::ObsMessage;
use bridgenet_harness::{
    run_batch, run_episode, HarnessError, HoldDecider, PolicyEndpoint, PolicyServer, ScriptedDecider,
};

fn listener() -> TcpListener {
    TcpListener::bind("127.0.0.1:0").unwrap()
}

fn endpoint(server: &PolicyServer, timeout: Duration) -> PolicyEndpoint {
    PolicyEndpoint::Remote { address: server.addr().to_string(), timeout }
}

fn actions_of(run: &bridgenet_harness::EpisodeRun) -> Vec<Vec<u8>> {
    run.trace.records.iter().map(|r| r.nodes.iter().take(r.nodes.len() - 2).map(|n| n.action).collect()).collect()
}

#[test]
fn hold_server_keeps_agents_in_place() {
    let server = PolicyServer::spawn(listener(), || HoldDecider).unwrap();
    let scenario = ScenarioConfig::default().with_seed(11);
    let run = run_episode(&endpoint(&server, Duration::from_secs(5)), &scenario).unwrap();
    assert_eq!(run.trace.records.len(), scenario.horizon);
    for rec in &run.trace.records {
        for (node, start) in rec.nodes.iter().zip(&scenario.agent_starts) {
            assert_eq!((node.x, node.y), (start.x, start.y), "step {}", rec.step);
            assert_eq!(node.action, 4);
        }
    }
}

#[test]
fn out_of_range_action_names_agent_and_step() {
    let server = PolicyServer::spawn(listener(), || {
        |_: &ScenarioConfig, step: usize, obs: &[ObsMessage]| -> Vec<i64> {
            obs.iter().map(|o| if step == 3 && o.agent == NodeId(1) { 9 } else { 4 }).collect()
        }
    })
    .unwrap();
    let err = run_episode(&endpoint(&server, Duration::from_secs(5)), &ScenarioConfig::default()).unwrap_err();
    match err {
        HarnessError::InvalidAction { agent, step, code } => {
            assert_eq!((agent, step, code), (NodeId(1), 3, 9));
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn negative_action_is_rejected() {
    let server = PolicyServer::spawn(listener(), || {
        |_: &ScenarioConfig, _: usize, obs: &[ObsMessage]| -> Vec<i64> { vec![-1; obs.len()] }
    })
    .unwrap();
    let err = run_episode(&endpoint(&server, Duration::from_secs(5)), &ScenarioConfig::default()).unwrap_err();
    assert!(matches!(err, HarnessError::InvalidAction { step: 0, code: -1, .. }), "{err}");
    assert!(err.is_policy_error());
}

#[test]
fn version_mismatch_refuses_session() {
    let server = PolicyServer::spawn_with_version(listener(), "bridgenet/0", || HoldDecider).unwrap();
    let err = run_episode(&endpoint(&server, Duration::from_secs(5)), &ScenarioConfig::default()).unwrap_err();
    match err {
        HarnessError::VersionMismatch { expected, got } => {
            assert_eq!(expected, "bridgenet/1");
            assert_eq!(got, "bridgenet/0");
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn slow_policy_times_out() {
    let server = PolicyServer::spawn(listener(), || {
        |_: &ScenarioConfig, step: usize, obs: &[ObsMessage]| -> Vec<i64> {
            if step == 2 {
                thread::sleep(Duration::from_millis(600));
            }
            vec![4; obs.len()]
        }
    })
    .unwrap();
    let err = run_episode(&endpoint(&server, Duration::from_millis(150)), &ScenarioConfig::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Timeout { step: 2, .. }), "{err}");
}

#[test]
fn unreachable_policy_is_a_connect_error() {
    let addr = listener().local_addr().unwrap();
    // listener dropped: nothing accepts on addr any more
    let ep = PolicyEndpoint::Remote { address: addr.to_string(), timeout: Duration::from_millis(300) };
    let err = run_episode(&ep, &ScenarioConfig::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Connect { .. }), "{err}");
}

#[test]
fn server_hanging_up_is_a_disconnect() {
    let server = PolicyServer::spawn(listener(), || {
        |_: &ScenarioConfig, step: usize, obs: &[ObsMessage]| -> Vec<i64> {
            // fewer replies than agents, then the session is dropped
            if step == 5 {
                panic!("policy crashed");
            }
            vec![4; obs.len()]
        }
    })
    .unwrap();
    let err = run_episode(&endpoint(&server, Duration::from_secs(5)), &ScenarioConfig::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Disconnected { .. }), "{err}");
}

#[test]
fn scripted_replay_matches_in_process_heuristic() {
    let scenarios = bridgenet_core::scenario::generate(5, 6, &ScenarioConfig::default());
    let local = run_batch(&PolicyEndpoint::Heuristic, &scenarios, 1).unwrap();
    let scripts = local.outcomes.iter().map(|o| (o.seed, actions_of(o.result.as_ref().unwrap()))).collect();
    let decider = ScriptedDecider::new(scripts);
    let server = PolicyServer::spawn(listener(), move || decider.clone()).unwrap();
    let remote = run_batch(&endpoint(&server, Duration::from_secs(5)), &scenarios, 3).unwrap();
    for (l, r) in local.outcomes.iter().zip(&remote.outcomes) {
        let (l, r) = (l.result.as_ref().unwrap(), r.result.as_ref().unwrap());
        assert_eq!(l.metrics, r.metrics);
        assert_eq!(l.trace, r.trace);
    }
    assert_eq!(local.summary, remote.summary);
}

#[test]
fn failed_episodes_are_counted_and_the_batch_continues() {
    let server = PolicyServer::spawn(listener(), || {
        |cfg: &ScenarioConfig, _: usize, obs: &[ObsMessage]| -> Vec<i64> {
            vec![if cfg.seed.is_multiple_of(2) { 4 } else { 12 }; obs.len()]
        }
    })
    .unwrap();
    let scenarios: Vec<_> = (0..6).map(|s| ScenarioConfig::default().with_seed(s)).collect();
    let report = run_batch(&endpoint(&server, Duration::from_secs(5)), &scenarios, 2).unwrap();
    assert_eq!(report.summary.n_scenarios, 6);
    assert_eq!(report.summary.n_failures, 3);
    for o in &report.outcomes {
        assert_eq!(o.result.is_ok(), o.seed.is_multiple_of(2), "seed {}", o.seed);
    }
}
