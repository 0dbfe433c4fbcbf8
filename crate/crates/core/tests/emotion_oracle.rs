mod common;

use common::{emotion_mismatch, Grid};

const GRID: Grid = Grid {
    n: 6,
    h: 0.3,
    origin: -0.75,
};

#[test]
fn rank_one_matches_naive_transcription() {
    for seed in 0..3 {
        for (name, err) in emotion_mismatch(seed, 1, &GRID) {
            assert!(err <= 1e-10, "seed {seed} {name}: {err:e}");
        }
    }
}

#[test]
fn rank_two_matches_naive_transcription() {
    for seed in 10..12 {
        for (name, err) in emotion_mismatch(seed, 2, &GRID) {
            assert!(err <= 1e-10, "seed {seed} {name}: {err:e}");
        }
    }
}
