use std::collections::BTreeSet;

use cnfgame::constructions::{build_fib_tt, build_odd_tf, build_xor_pairs};
use cnfgame::harness::{random_instance, run_match, RandomSpec};
use cnfgame::solver::{best_response, enumerate_instances, BestResponseConfig};
use cnfgame::strategy::{
    find_zugzwang, t_greedy, FChase, FOdd, FPairing, Strategy, StrategySpec, TGreedy, TZugzwang, ZugzwangBook,
};
use cnfgame::{Cnf, GameInstance, GameState, Literal, Move, Pattern, Player, PotentialScheme};

fn cnf(clauses: &[&[i64]]) -> Cnf {
    Cnf::from_dimacs(clauses).unwrap()
}

/// Plays T's scripted moves against `f`, returning F's replies.
fn f_replies(g: &GameInstance, mut f: Box<dyn Strategy>, t_moves: &[(u32, bool)]) -> Vec<Move> {
    let mut state = GameState::start(g);
    let mut replies = Vec::new();
    for &(var, bit) in t_moves {
        let mv = Move::new(Player::T, var, bit);
        state.play(mv).unwrap();
        f.observe(&state, mv);
        let reply = f.next_move(&state).unwrap();
        state.play(reply).unwrap();
        f.observe(&state, reply);
        replies.push(reply);
    }
    replies
}

fn exhaustive(limit_fixed: Box<dyn Strategy>, g: &GameInstance, player: Player) -> Player {
    let config = BestResponseConfig {
        early_exit: false,
        ..BestResponseConfig::default()
    };
    let r = best_response(g, limit_fixed, player, config).unwrap();
    assert!(r.audit.is_clean(), "{:?}", r.audit.failures);
    r.result.winner
}

#[test]
fn pairing_copies_the_bit_onto_the_partner() {
    let g = build_xor_pairs(2).unwrap();
    assert_eq!(f_replies(&g, Box::new(FPairing), &[(0, true)]), [Move::new(Player::F, 1, true)]);
    let g4 = build_xor_pairs(4).unwrap();
    assert_eq!(f_replies(&g4, Box::new(FPairing), &[(3, false)]), [Move::new(Player::F, 2, false)]);
}

#[test]
fn odd_strategy_zeroes_the_other_tail_variable() {
    let g = build_odd_tf(3).unwrap();
    assert_eq!(f_replies(&g, Box::new(FOdd), &[(2, true)]), [Move::new(Player::F, 3, false)]);
    assert_eq!(f_replies(&g, Box::new(FOdd), &[(0, false)]), [Move::new(Player::F, 1, false)]);
}

#[test]
fn chase_answers_inside_pairs_and_opens_fresh_ones() {
    let g = build_fib_tt(2);
    assert_eq!(f_replies(&g, Box::new(FChase::new()), &[(1, true)]), [Move::new(Player::F, 2, false)]);
    assert_eq!(f_replies(&g, Box::new(FChase::new()), &[(0, true)]), [Move::new(Player::F, 1, false)]);

    let g4 = build_fib_tt(4);
    let replies = f_replies(&g4, Box::new(FChase::new()), &[(0, true), (2, false), (4, true)]);
    assert_eq!(
        replies,
        [Move::new(Player::F, 1, false), Move::new(Player::F, 3, false), Move::new(Player::F, 5, false)]
    );
}

#[test]
fn f_strategies_beat_every_t_line() {
    for k in [2, 4, 6] {
        assert_eq!(exhaustive(Box::new(FPairing), &build_xor_pairs(k).unwrap(), Player::F), Player::F);
    }
    for k in [1, 3, 5] {
        assert_eq!(exhaustive(Box::new(FOdd), &build_odd_tf(k).unwrap(), Player::F), Player::F);
    }
    for k in 1..=5 {
        assert_eq!(exhaustive(Box::new(FChase::new()), &build_fib_tt(k), Player::F), Player::F);
    }
}

#[test]
fn f_strategies_beat_optimal_t() {
    let cases = [
        (build_xor_pairs(2).unwrap(), StrategySpec::FPairing),
        (build_odd_tf(3).unwrap(), StrategySpec::FOdd),
        (build_fib_tt(4), StrategySpec::FChase),
    ];
    for (g, f) in cases {
        let t = StrategySpec::Optimal.build(&g, Player::T).unwrap();
        let report = run_match(&g, t, f.build(&g, Player::F).unwrap(), None).unwrap();
        assert_eq!(report.winner, Player::F, "{f}");
    }
}

#[test]
fn greedy_takes_the_heaviest_literal() {
    let g = GameInstance::with_pattern(cnf(&[&[1, 2], &[1, 3], &[-1, 2]]), 3, Pattern::TT).unwrap();
    let mv = t_greedy(&GameState::start(&g), PotentialScheme::Sqrt2).unwrap();
    assert_eq!(mv, Move::new(Player::T, 0, true));
}

#[test]
fn greedy_on_an_empty_residual_plays_the_lowest_free_variable() {
    let g = GameInstance::with_pattern(Cnf::default(), 7, Pattern::TT).unwrap();
    let mut state = GameState::start(&g);
    for (i, var) in [0, 1, 2, 3, 4, 6].into_iter().enumerate() {
        let player = if i % 2 == 0 { Player::T } else { Player::F };
        state.play(Move::new(player, var, true)).unwrap();
    }
    assert_eq!(t_greedy(&state, PotentialScheme::Sqrt2).unwrap(), Move::new(Player::T, 5, true));
}

#[test]
fn greedy_wins_below_the_threshold_with_clean_rounds() {
    for seed in 0..40 {
        let g = random_instance(RandomSpec {
            k: 4,
            m: 3,
            n: 8,
            pattern: Pattern::TF,
            seed,
        })
        .unwrap();
        let t = Box::new(TGreedy::new(&g, PotentialScheme::Sqrt2));
        assert_eq!(exhaustive(t, &g, Player::T), Player::T, "seed {seed}");
    }
}

#[test]
fn zugzwang_scan_examples() {
    let y: BTreeSet<u32> = [0, 1].into();
    assert_eq!(
        find_zugzwang(&cnf(&[&[1, 2], &[-1, -2]]), &y),
        Some((Literal::pos(0), Literal::pos(1)))
    );
    assert_eq!(find_zugzwang(&cnf(&[&[1, 2]]), &y), Some((Literal::pos(0), Literal::pos(1))));
    assert_eq!(find_zugzwang(&cnf(&[&[1], &[2]]), &y), None);
}

#[test]
fn setting_aside_a_pair() {
    let g = GameInstance::with_pattern(cnf(&[&[1, 2], &[-1, -2]]), 3, Pattern::TT).unwrap();
    let mut book = ZugzwangBook::new(&g);
    book.apply_zugzwang(Literal::pos(0), Literal::pos(1)).unwrap();
    assert!(book.psi.is_empty());
    assert_eq!(book.zeta.len(), 1);
    assert_eq!(book.z.len() % 2, 0);
    assert_eq!(book.y, [2].into());

    let g = GameInstance::with_pattern(cnf(&[&[1, -2, 3]]), 3, Pattern::TT).unwrap();
    let mut book = ZugzwangBook::new(&g);
    assert_eq!(find_zugzwang(&book.psi, &book.y), Some((Literal::pos(0), Literal::neg(1))));
    let raised = book.apply_zugzwang(Literal::pos(0), Literal::pos(1)).unwrap_err();
    assert!(raised.after > raised.before);
    assert_eq!(book.psi, cnf(&[&[3]]));
}

#[test]
fn zugzwang_answers_inside_a_set_aside_pair() {
    let g = GameInstance::with_pattern(cnf(&[&[1, 2], &[-1, -2]]), 3, Pattern::TT).unwrap();
    let mut state = GameState::start(&g);
    let mut t = TZugzwang::new(&g).unwrap();
    let opening = t.next_move(&state).unwrap();
    assert_eq!(opening.var, 2);
    state.play(opening).unwrap();
    t.observe(&state, opening);
    let f = Move::new(Player::F, 0, true);
    state.play(f).unwrap();
    t.observe(&state, f);
    assert_eq!(t.next_move(&state).unwrap(), Move::new(Player::T, 1, false));
}

#[test]
fn zugzwang_single_unit_clause() {
    let g = GameInstance::with_pattern(cnf(&[&[1]]), 1, Pattern::TT).unwrap();
    let mut t = TZugzwang::new(&g).unwrap();
    assert_eq!(t.next_move(&GameState::start(&g)).unwrap(), Move::new(Player::T, 0, true));
}

#[test]
fn zugzwang_wins_every_two_clause_pair_of_width_two() {
    let mut n = 0;
    for g in enumerate_instances(2, 2, 3, Pattern::TT).unwrap() {
        n += 1;
        assert_eq!(exhaustive(Box::new(TZugzwang::new(&g).unwrap()), &g, Player::T), Player::T);
    }
    assert_eq!(n, 66);
}

#[test]
fn zugzwang_wins_random_three_clause_instances() {
    for seed in 0..100 {
        let g = random_instance(RandomSpec {
            k: 3,
            m: 3,
            n: 7,
            pattern: Pattern::TT,
            seed,
        })
        .unwrap();
        assert_eq!(exhaustive(Box::new(TZugzwang::new(&g).unwrap()), &g, Player::T), Player::T, "seed {seed}");
    }
}

#[test]
fn strategies_refuse_the_wrong_seat() {
    let g = build_xor_pairs(2).unwrap();
    assert!(StrategySpec::FPairing.build(&g, Player::T).is_err());
    assert!(StrategySpec::TGreedy(PotentialScheme::Sqrt2).build(&g, Player::F).is_err());
    assert!(TZugzwang::new(&g).is_err());
    for name in ["f-pairing", "f-odd", "f-chase", "t-greedy-sqrt2", "t-greedy-parity", "t-zugzwang", "optimal"] {
        let spec: StrategySpec = name.parse().unwrap();
        assert_eq!(spec.to_string(), name);
    }
}
