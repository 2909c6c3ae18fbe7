use longzeta::invariant::zeta;
use longzeta::moves::{apply, enumerate_sites, random_equivalent, MoveKind, MoveLog, MoveSpec};
use longzeta::{random_code, DiagramCode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn code() -> impl Strategy<Value = DiagramCode> {
    (0usize..7, 0usize..4, any::<u64>())
        .prop_map(|(n, k, seed)| random_code(n, k, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Walked codes are richer in adjacent pairs than shuffled ones.
fn walked_code() -> impl Strategy<Value = DiagramCode> {
    (code(), 0usize..12, any::<u64>())
        .prop_map(|(c, steps, seed)| random_equivalent(&c, steps, seed).0)
}

fn early_classes(c: &DiagramCode) -> Vec<(u32, bool)> {
    let d = c.decompose().unwrap();
    d.crossings
        .iter()
        .map(|v| (*v, d.over_position[v] < d.under_position[v]))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sites_apply_to_valid_codes(c in walked_code()) {
        for kind in MoveKind::ALL {
            for m in enumerate_sites(&c, kind).into_iter().take(24) {
                let out = apply(&c, &m).unwrap();
                prop_assert!(out.validate().is_ok(), "{} on {}", m, c);
            }
        }
    }

    #[test]
    fn insertion_then_deletion_is_identity(c in code(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for kind in [MoveKind::R1Insert, MoveKind::V1Insert, MoveKind::R2Insert, MoveKind::V2Insert] {
            let sites = enumerate_sites(&c, kind);
            let m = sites[rand::Rng::gen_range(&mut rng, 0..sites.len())];
            let grown = apply(&c, &m).unwrap();
            let undo = match kind {
                MoveKind::R1Insert => MoveKind::R1Delete,
                MoveKind::V1Insert => MoveKind::V1Delete,
                MoveKind::R2Insert => MoveKind::R2Delete,
                _ => MoveKind::V2Delete,
            };
            let restored = enumerate_sites(&grown, undo).into_iter().any(|d| apply(&grown, &d).unwrap() == c);
            prop_assert!(restored, "{} on {}", m, c);
        }
    }

    #[test]
    fn triangles_preserve_crossing_data(c in walked_code()) {
        for kind in [MoveKind::TriangleClassical, MoveKind::TriangleVirtual, MoveKind::TriangleSemivirtual] {
            for m in enumerate_sites(&c, kind) {
                let out = apply(&c, &m).unwrap();
                prop_assert_eq!(out.classical_count(), c.classical_count());
                prop_assert_eq!(out.virtual_count(), c.virtual_count());
                prop_assert_eq!(early_classes(&out), early_classes(&c));
                let mut before = c.tokens().to_vec();
                let mut after = out.tokens().to_vec();
                before.sort_by_key(|t| (t.crossing, t.to_string()));
                after.sort_by_key(|t| (t.crossing, t.to_string()));
                prop_assert_eq!(before, after);
                prop_assert_eq!(apply(&out, &m).unwrap(), c.clone());
            }
        }
    }

    #[test]
    fn moves_keep_zeta_up_to_kinks(c in walked_code()) {
        let z = zeta(&c).unwrap();
        for kind in MoveKind::ALL {
            for m in enumerate_sites(&c, kind).into_iter().take(16) {
                let out = apply(&c, &m).unwrap();
                let expected = z.mul_q_power(m.q_shift(&c).unwrap_or(0));
                prop_assert_eq!(zeta(&out).unwrap(), expected, "{} on {}", m, c);
            }
        }
    }

    #[test]
    fn logs_replay(c in code(), steps in 0usize..20, seed in any::<u64>()) {
        let (end, log) = random_equivalent(&c, steps, seed);
        let parsed: MoveLog = log.to_string().parse().unwrap();
        prop_assert_eq!(parsed.replay(&c).unwrap(), end);
    }
}

#[test]
fn kink_insertions_on_the_virtual_kink() {
    let kink: DiagramCode = "O1+ V2+ U1+ V2-".parse().unwrap();
    let z = zeta(&kink).unwrap();
    let p_kink = apply(&kink, &"R1_insert 0 + OU".parse::<MoveSpec>().unwrap()).unwrap();
    assert_eq!(p_kink.to_string(), "O3+ U3+ O1+ V2+ U1+ V2-");
    assert_eq!(zeta(&p_kink).unwrap(), z);
    for (sign, r) in [("+", 1), ("-", -1)] {
        let m: MoveSpec = format!("R1_insert 0 {sign} UO").parse().unwrap();
        assert_eq!(zeta(&apply(&kink, &m).unwrap()).unwrap(), z.mul_q_power(r));
    }
}
