//! Deterministic replicated-commit simulation: a fixed leader proposes
//! entries and an entry commits once a majority of replicas acknowledge it.
//! The message scheduler is seeded, so identical inputs give identical
//! traces. This is a quorum-behavior harness, not a consensus
//! implementation: leader election is out of scope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{LedgerError, Result};

#[derive(Debug, Clone)]
pub struct ReplicaHarness {
    /// Number of replicas, odd and at least 3. Replica 0 is the leader.
    pub replicas: usize,
    /// Probability that any single message (request or acknowledgment) is
    /// dropped.
    pub drop_probability: f64,
    /// Replica ids that are unreachable for the whole run.
    pub partitioned: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub workload_index: u64,
    /// Index in the committed log (dense from 0).
    pub commit_index: u64,
    /// Replicas (including the leader) holding the entry at commit time.
    pub acks: usize,
    /// Proposal rounds it took to gather a majority.
    pub rounds: u32,
}

#[derive(Debug, Clone)]
pub struct CommitTrace {
    pub commits: Vec<CommitRecord>,
    /// True when some entry could not reach a majority and the workload
    /// stopped early.
    pub stalled: bool,
    pub messages_sent: u64,
    /// Final per-replica logs, for safety auditing.
    pub replica_logs: Vec<Vec<Vec<u8>>>,
}

/// Give up on an entry after this many proposal rounds without a majority.
const MAX_ROUNDS: u32 = 64;

pub fn run_replicated(
    harness: &ReplicaHarness,
    workload: &[Vec<u8>],
    seed: u64,
) -> Result<CommitTrace> {
    let n = harness.replicas;
    if n < 3 || n % 2 == 0 {
        return Err(LedgerError::InvalidArgument(
            "replica count must be odd and at least 3".into(),
        ));
    }
    if !(0.0..1.0).contains(&harness.drop_probability) {
        return Err(LedgerError::InvalidArgument(
            "drop probability must be in [0, 1)".into(),
        ));
    }
    let majority = n / 2 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut logs: Vec<Vec<Vec<u8>>> = vec![Vec::new(); n];
    let mut trace = CommitTrace {
        commits: Vec::new(),
        stalled: false,
        messages_sent: 0,
        replica_logs: Vec::new(),
    };
    let leader_down = harness.partitioned.contains(&0);

    'workload: for (w, payload) in workload.iter().enumerate() {
        let commit_index = logs[0].len() as u64;
        logs[0].push(payload.clone());
        let mut holders = vec![false; n];
        holders[0] = true;
        let mut rounds = 0u32;
        loop {
            rounds += 1;
            for replica in 1..n {
                if holders[replica] {
                    continue;
                }
                trace.messages_sent += 1; // replication request
                let unreachable = leader_down || harness.partitioned.contains(&replica);
                let request_dropped = rng.gen::<f64>() < harness.drop_probability;
                if unreachable || request_dropped {
                    continue;
                }
                // Delivery carries any backlog, bringing the replica level
                // with the leader through this entry.
                logs[replica] = logs[0].clone();
                trace.messages_sent += 1; // acknowledgment
                if rng.gen::<f64>() < harness.drop_probability {
                    continue;
                }
                holders[replica] = true;
            }
            let acks = holders.iter().filter(|h| **h).count();
            if acks >= majority {
                trace.commits.push(CommitRecord {
                    workload_index: w as u64,
                    commit_index,
                    acks,
                    rounds,
                });
                break;
            }
            if rounds >= MAX_ROUNDS {
                trace.stalled = true;
                break 'workload;
            }
        }
    }
    trace.replica_logs = logs;
    Ok(trace)
}
