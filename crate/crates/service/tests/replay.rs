//! A scripted session must make exactly the decisions of a bare allocator
//! fed the same rewards.

use fairbandit_core::{
    teammate_reward, Allocator, ArmId, FairnessConfig, PolicyKind, Rate, TeammateScore,
};
use fairbandit_service::{session_rng, Session, SessionParams, SessionStatus};

fn script(round: u64, player: ArmId) -> f64 {
    [40.0, 310.0, 0.0, 125.5, 220.0, 75.0][((round * 7 + player.index() as u64 * 3) % 6) as usize]
}

fn replay(policy: PolicyKind, rate: &str, seed: u64) {
    let rate: Rate = rate.parse().unwrap();
    let params = SessionParams {
        players: 2,
        rate,
        horizon: 30,
        policy,
        seed,
        normalizer: None,
    };
    let mut session = Session::with_defaults("replay".into(), &params).unwrap();
    let mut via_service = Vec::new();
    while session.status() != SessionStatus::Finished {
        let turn = session.next_turn().unwrap();
        via_service.push((turn.player, turn.provenance));
        session.report_score(turn.player, script(turn.round, turn.player)).unwrap();
    }

    let config = FairnessConfig::new(2, rate, 30).unwrap();
    let mut alloc = Allocator::new(policy, config, None, session_rng(seed)).unwrap();
    let mut scores = [0.0f64; 2];
    let mut direct = Vec::new();
    while !alloc.is_finished() {
        let d = alloc.decide().unwrap();
        let round = alloc.state().clock();
        let p = d.arm.index();
        scores[p] += script(round, d.arm);
        let turns = alloc.state().pull_counts()[p] + 1;
        let reward = teammate_reward(&TeammateScore::new(scores[p], turns)).unwrap();
        alloc.observe(&d, reward).unwrap();
        direct.push((d.arm, d.provenance));
    }
    assert_eq!(via_service, direct, "{policy} {rate} seed {seed}");
    assert_eq!(session.allocator().state(), alloc.state());
}

#[test]
fn strict_third_rate_matches_core() {
    for seed in 0..20 {
        replay(PolicyKind::Strict, "1/3", seed);
    }
}

#[test]
fn other_study_conditions_match_core() {
    for seed in 0..10 {
        replay(PolicyKind::Strict, "1/4", seed);
        replay(PolicyKind::Strict, "1/2", seed);
        replay(PolicyKind::Stochastic, "1/3", seed);
        replay(PolicyKind::Stochastic, "1/4", seed);
    }
}
