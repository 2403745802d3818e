// SPDX-License-Identifier: Apache-2.0

//! Reference state machine for a single lock driven by a few virtual actors
//! from one thread, compared step by step. Blocking acquisitions are issued
//! only when the reference grants them; everything else uses try variants.

use std::collections::BTreeSet;
use std::sync::Arc;

use bravo::{BravoLock, Policy, RawRwLock, ReaderToken, VisibleReadersTable};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

type Token = ReaderToken<<bravo::CentralizedLock as RawRwLock>::ReadToken>;

enum Holding {
    Idle,
    Read(Token),
    Write,
}

/// Abstract lock: reader count, writer flag and, when `track_bias` is set,
/// the bias flag plus the slots held by fast readers.
struct Reference {
    readers: usize,
    writer: bool,
    track_bias: bool,
    rbias: bool,
    fast_slots: BTreeSet<usize>,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct MachineReport {
    pub steps: u64,
    pub read_grants: u64,
    pub read_denials: u64,
    pub write_grants: u64,
    pub write_denials: u64,
    pub fast_reads: u64,
}

/// Runs `steps` random actions over `actors` virtual threads.
///
/// With `multiplier == 0` bias comes back on every slow read, so the
/// reference can predict fast versus slow admission and the bias flag
/// exactly. With any other multiplier only grant/deny is checked.
pub fn run(steps: u64, actors: usize, multiplier: u64, seed: u64) -> Result<MachineReport, String> {
    let table = Arc::new(VisibleReadersTable::new(4096).unwrap());
    let lock: BravoLock = BravoLock::new()
        .with_table(table.clone())
        .with_policy(Policy::new(multiplier));
    let mut reference = Reference {
        readers: 0,
        writer: false,
        track_bias: multiplier == 0,
        rbias: false,
        fast_slots: BTreeSet::new(),
    };
    let mut holding: Vec<Holding> = (0..actors).map(|_| Holding::Idle).collect();
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut report = MachineReport::default();

    for step in 0..steps {
        let actor = rng.random_range(0..actors);
        let fail = |what: String| format!("step {step}, actor {actor}: {what}");
        match std::mem::replace(&mut holding[actor], Holding::Idle) {
            Holding::Read(token) => {
                if let Some(slot) = token.slot() {
                    reference.fast_slots.remove(&slot);
                }
                reference.readers -= 1;
                unsafe { lock.read_unlock(token) };
            }
            Holding::Write => {
                reference.writer = false;
                unsafe { lock.write_unlock() };
            }
            Holding::Idle if rng.random_bool(0.7) => {
                let expect_grant = !reference.writer;
                let slot = lock.slot_for(actor);
                let expect_fast = reference.rbias && !reference.fast_slots.contains(&slot);
                // Blocking acquisition only where the reference says it
                // cannot block.
                let attempt = if expect_grant && rng.random_bool(0.5) {
                    Some(lock.read_lock_as(actor))
                } else {
                    lock.try_read_lock_as(actor)
                };
                match attempt {
                    Some(token) => {
                        if !expect_grant {
                            return Err(fail("read granted while a writer holds".into()));
                        }
                        if reference.track_bias && token.is_fast() != expect_fast {
                            return Err(fail(format!(
                                "read admitted fast={} but reference says fast={expect_fast}",
                                token.is_fast()
                            )));
                        }
                        if let Some(slot) = token.slot() {
                            reference.fast_slots.insert(slot);
                            report.fast_reads += 1;
                        } else {
                            reference.rbias = true;
                        }
                        reference.readers += 1;
                        report.read_grants += 1;
                        holding[actor] = Holding::Read(token);
                    }
                    None => {
                        if expect_grant {
                            return Err(fail("read denied with no writer".into()));
                        }
                        report.read_denials += 1;
                    }
                }
            }
            Holding::Idle => {
                let expect_grant = !reference.writer && reference.readers == 0;
                let granted = if expect_grant && rng.random_bool(0.5) {
                    lock.write_lock();
                    true
                } else {
                    lock.try_write_lock()
                };
                if granted {
                    if !expect_grant {
                        return Err(fail(format!(
                            "write granted with {} readers, writer={}",
                            reference.readers, reference.writer
                        )));
                    }
                    reference.writer = true;
                    reference.rbias = false;
                    report.write_grants += 1;
                    holding[actor] = Holding::Write;
                } else {
                    if expect_grant {
                        return Err(fail("write denied on a free lock".into()));
                    }
                    report.write_denials += 1;
                }
            }
        }

        if reference.track_bias && lock.is_biased() != reference.rbias {
            return Err(format!(
                "step {step}: bias is {} but reference says {}",
                lock.is_biased(),
                reference.rbias
            ));
        }
        let published: BTreeSet<usize> = table.positions_of(lock.id()).into_iter().collect();
        let expected: BTreeSet<usize> = holding
            .iter()
            .filter_map(|h| match h {
                Holding::Read(t) => t.slot(),
                _ => None,
            })
            .collect();
        if published != expected {
            return Err(format!(
                "step {step}: table holds {published:?}, fast readers hold {expected:?}"
            ));
        }
        report.steps += 1;
    }

    for h in holding {
        match h {
            Holding::Read(token) => unsafe { lock.read_unlock(token) },
            Holding::Write => unsafe { lock.write_unlock() },
            Holding::Idle => {}
        }
    }
    Ok(report)
}
