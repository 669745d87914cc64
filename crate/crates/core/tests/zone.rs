mod common;

use common::zones::{oracle_close, raw_zone, zone_trial};
use gta_core::automaton::{Atomic, ClockKind, Step};
use gta_core::ext::ExtReal;
use gta_core::zone::{Weight, Zone};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const F: ClockKind = ClockKind::Future;
const H: ClockKind = ClockKind::History;

fn c(v: i64) -> ExtReal {
    ExtReal::int(v)
}

#[test]
fn negative_cycle_is_empty() {
    // x - 0 <= -1 and 0 - x <= 0.
    let m = vec![Weight::LE_ZERO, Weight::LE_ZERO, Weight::le(c(-1)), Weight::LE_ZERO];
    assert!(Zone::from_matrix(&[F], m).is_none());
}

#[test]
fn minus_infinity_to_zero_cycle_is_not_negative() {
    let m = vec![Weight::LE_ZERO, Weight::INF, Weight::LE_ZERO, Weight::LE_ZERO];
    let z = Zone::from_matrix(&[F], m).unwrap();
    assert!(z.can_be_minus_infinity(1));
    assert!(z.contains(&[c(0), ExtReal::NegInf]));
    assert!(z.contains(&[c(0), c(0)]));
    assert_eq!(Weight::NEG_INF.add(Weight::INF), Weight::INF);
}

#[test]
fn initial_zones() {
    let z = Zone::initial_zone(&[F], &[]).unwrap();
    assert!(z.can_be_minus_infinity(1) && z.contains(&[c(0), c(0)]));
    // h = 0 elapses to h >= 0 with h - x coupled.
    let z = Zone::initial_zone(&[F, H], &[Atomic::new(2, 0, false, c(0)), Atomic::new(1, 0, false, c(-1)), Atomic::new(0, 1, false, c(1))]).unwrap();
    assert!(z.contains(&[c(0), c(0), c(1)]));
    assert!(z.contains(&[c(0), ExtReal::Fin(gta_core::Rat::new(-1, 2)), ExtReal::Fin(gta_core::Rat::new(1, 2))]));
    assert!(!z.contains(&[c(0), c(0), c(0)]));
    assert!(Zone::initial_zone(&[H], &[Atomic::new(1, 0, false, c(-1))]).is_none());
}

#[test]
fn release_reset_rename() {
    let z = Zone::from_constraints(&[F], &Atomic::eq(1, c(-3))).unwrap();
    assert_eq!(z.release_future(&[1]).unwrap(), Zone::universe(&[F]));
    let z = Zone::from_constraints(&[H], &[Atomic::new(1, 0, false, c(5)), Atomic::new(0, 1, false, c(-2))]).unwrap();
    assert_eq!(z.reset_history(&[1]).unwrap(), Zone::from_constraints(&[H], &Atomic::eq(1, c(0))).unwrap());
    let z = Zone::from_constraints(&[F, F], &[Atomic::new(1, 2, true, c(-1)), Atomic::new(2, 0, false, c(-2))]).unwrap();
    let swap = [0, 2, 1];
    assert_ne!(z.rename(&swap), z);
    assert_eq!(z.rename(&swap).rename(&swap), z);
}

#[test]
fn elapse_examples() {
    let z = Zone::from_constraints(&[F, H], &[Atomic::eq(1, c(-1)), Atomic::eq(2, c(0))].concat()).unwrap();
    let e = z.clone().elapse().unwrap();
    // h - x = 1, x in [-1, 0], h in [0, 1].
    let expected = Zone::from_constraints(
        &[F, H],
        &[
            Atomic::new(2, 1, false, c(1)),
            Atomic::new(1, 2, false, c(-1)),
            Atomic::new(0, 1, false, c(1)),
            Atomic::new(2, 0, false, c(1)),
        ],
    )
    .unwrap();
    assert_eq!(e, expected);
    let z = Zone::from_constraints(&[F], &[Atomic::minus_infinity(1)]).unwrap();
    assert_eq!(z.clone().elapse().unwrap(), z);
    assert_eq!(e.clone().elapse().unwrap(), e);
}

#[test]
fn program_examples() {
    let free = Zone::universe(&[F]);
    let prog = vec![Step::Guard(Atomic::eq(1, c(0))), Step::Change(vec![1])];
    assert_eq!(free.clone().apply_program_symbolic(&prog).unwrap(), free);
    let z = Zone::from_constraints(&[F], &Atomic::eq(1, c(-1))).unwrap();
    assert!(z.apply_program_symbolic(&prog).is_none());
    let z = Zone::from_constraints(&[H, F], &[Atomic::new(1, 0, false, c(3))]).unwrap();
    assert!(z.apply_program_symbolic(&[Step::Change(vec![1]), Step::Guard(Atomic::eq(1, c(0)))]).is_some());
}

#[test]
fn inclusion_and_minus_infinity_examples() {
    let small = Zone::from_constraints(&[F], &Atomic::eq(1, c(-1))).unwrap();
    let big = Zone::from_constraints(&[F], &[Atomic::new(0, 1, false, c(2))]).unwrap();
    assert!(big.includes(&small) && !small.includes(&big) && small.includes(&small));
    assert!(Zone::universe(&[F]).can_be_minus_infinity(1));
    assert!(!big.can_be_minus_infinity(1));
    let forced = Zone::universe(&[F]).force_minus_infinity(&[1]).unwrap();
    assert!(forced.contains(&[c(0), ExtReal::NegInf]) && !forced.contains(&[c(0), c(0)]));
    assert_eq!(Zone::universe(&[F]).force_minus_infinity(&[]).unwrap(), Zone::universe(&[F]));
    // x - y <= 0: x may be -inf, but y = -inf gives x - y = +inf.
    let z = Zone::from_constraints(&[F, F], &[Atomic::new(1, 2, false, c(0))]).unwrap();
    assert!(z.can_be_minus_infinity(1) && !z.can_be_minus_infinity(2));
    let fx = z.clone().force_minus_infinity(&[1]).unwrap();
    assert!(fx.contains(&[c(0), ExtReal::NegInf, c(-4)]));
    assert!(z.force_minus_infinity(&[1, 2]).is_none());
    // Without diagonal bounds both clocks are -inf together.
    let both = Zone::universe(&[F, F]).force_minus_infinity(&[1, 2]).unwrap();
    assert!(both.contains(&[c(0), ExtReal::NegInf, ExtReal::NegInf]));
}

#[test]
fn random_zones_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        failures.extend(zone_trial(&mut rng, 30));
    }
    assert!(failures.is_empty(), "{} failures, first: {:?}", failures.len(), &failures[..failures.len().min(5)]);
}

proptest! {
    #[test]
    fn closure_is_idempotent_and_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = raw_zone(&mut rng, 3);
        if let Some(z) = raw.zone() {
            let again = Zone::from_matrix(&raw.kinds, z.matrix().to_vec()).unwrap();
            prop_assert_eq!(&again, &z);
            let tighter = raw.tightened(1, 0, Weight::le(c(-2)));
            if let Some(t) = tighter.zone() {
                prop_assert!(z.includes(&t));
            }
            prop_assert!(z.includes(&z));
            let e = z.clone().elapse().unwrap();
            prop_assert!(e.includes(&z));
            prop_assert_eq!(e.clone().elapse().unwrap(), e);
        } else {
            prop_assert!(oracle_close(&raw).is_none());
        }
    }
}
