#![allow(dead_code)]

use chrono::{Days, NaiveDate};
use courtside_core::{BoxscoreLine, Dataset, GameMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TEAMS: usize = 18;

/// Double round robin between `TEAMS` teams (34 rounds) with `players`
/// spread over the rosters. Every rostered player gets a line in each of
/// the team's games; a few lines are zero-minute.
pub fn synthetic_season(players: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let team_name = |t: usize| format!("T{t:02}");
    let rosters: Vec<Vec<usize>> = (0..TEAMS)
        .map(|t| (0..players).filter(|p| p % TEAMS == t).collect())
        .collect();

    // circle method: team TEAMS-1 stays fixed, the rest rotate
    let mut rounds = Vec::new();
    for r in 0..TEAMS - 1 {
        let mut pairs = vec![(TEAMS - 1, r)];
        for k in 1..TEAMS / 2 {
            let a = (r + k) % (TEAMS - 1);
            let b = (r + TEAMS - 1 - k) % (TEAMS - 1);
            pairs.push((a, b));
        }
        rounds.push(pairs);
    }
    let second_leg: Vec<_> = rounds
        .iter()
        .map(|p| p.iter().map(|&(a, b)| (b, a)).collect::<Vec<_>>())
        .collect();
    rounds.extend(second_leg);

    let start = NaiveDate::from_ymd_opt(2013, 10, 5).unwrap();
    let mut games = Vec::new();
    let mut lines = Vec::new();
    for (r, pairs) in rounds.iter().enumerate() {
        let date = start + Days::new(7 * r as u64);
        for (g, &(home, away)) in pairs.iter().enumerate() {
            let game_id = format!("R{r:02}G{g}");
            let home_score = rng.random_range(55..105u32);
            let mut away_score = rng.random_range(55..105u32);
            if away_score == home_score {
                away_score += 1 + rng.random_range(0..8);
            }
            games.push(GameMeta {
                game_id: game_id.clone(),
                date,
                competition: if r < 30 { "liga".into() } else { "playoff".into() },
                home_team: team_name(home),
                away_team: team_name(away),
                home_score,
                away_score,
            });
            for team in [home, away] {
                for (slot, &p) in rosters[team].iter().enumerate() {
                    lines.push(random_line(&mut rng, &game_id, p, &team_name(team), slot < 5));
                }
            }
        }
    }
    Dataset::from_parts(games, lines).expect("synthetic season is valid")
}

pub fn random_line(rng: &mut ChaCha8Rng, game_id: &str, player: usize, team: &str, starter: bool) -> BoxscoreLine {
    let dnp = rng.random_bool(0.04);
    let mut line = BoxscoreLine::empty(game_id, &format!("P{player:03}"), team);
    line.player_name = format!("Player {player:03}");
    line.starter = starter;
    line.plus_minus = if rng.random_bool(0.02) {
        None
    } else {
        Some(rng.random_range(-20..=20))
    };
    if dnp {
        return line;
    }
    line.minutes = rng.random_range(3.0..38.0);
    let mut c = |hi: u32| rng.random_range(0..=hi);
    line.t2c = c(8);
    line.t2f = c(7);
    line.t3c = c(4);
    line.t3f = c(5);
    line.t1c = c(6);
    line.t1f = c(3);
    line.rd = c(8);
    line.ro = c(4);
    line.a = c(7);
    line.br = c(3);
    line.bp = c(4);
    line.tf = c(2);
    line.tr = c(2);
    line.fpc = c(5);
    line.fpr = c(5);
    line
}
