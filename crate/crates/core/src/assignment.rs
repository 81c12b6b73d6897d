//! User-to-(beam, block) assignment: the greedy channel-strength rule and
//! the random benchmark.

use std::path::Path;

use ndarray::Array3;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{trial_rng, BlockMode, ChannelRealization, SystemConfig};

/// RNG stream for random assignments, disjoint from the channel stream.
pub const ASSIGNMENT_STREAM: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// `[beam][user][block]`.
    pub x: Array3<bool>,
    pub users_per_beam: Vec<usize>,
}

impl Assignment {
    pub fn from_indicator(x: Array3<bool>) -> Self {
        let (m, _, _) = x.dim();
        let mut counts = vec![0; m];
        for ((beam, _, _), &v) in x.indexed_iter() {
            if v {
                counts[beam] += 1;
            }
        }
        Assignment {
            x,
            users_per_beam: counts,
        }
    }

    /// Every user in exactly one slot and no beam above `cap` users.
    pub fn check(&self, cap: usize) -> Result<()> {
        let (m, u, k) = self.x.dim();
        for user in 0..u {
            let n = (0..m)
                .flat_map(|b| (0..k).map(move |r| (b, r)))
                .filter(|&(b, r)| self.x[[b, user, r]])
                .count();
            if n != 1 {
                return Err(Error::config(format!("user {user} occupies {n} slots")));
            }
        }
        if let Some(beam) = self.users_per_beam.iter().position(|&c| c > cap) {
            return Err(Error::config(format!("beam {beam} holds more than {cap} users")));
        }
        Ok(())
    }

    /// Assigned `(beam, user, block)` triples in index order.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        self.x.indexed_iter().filter(|(_, &v)| v).map(|(i, _)| i).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("beam,user,block\n");
        for (m, u, k) in self.triples() {
            s.push_str(&format!("{m},{u},{k}\n"));
        }
        s
    }

    pub fn from_csv_str(text: &str, beams: usize, users: usize, blocks: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut x = Array3::from_elem((beams, users, blocks), false);
        for (line, row) in reader.deserialize::<(usize, usize, usize)>().enumerate() {
            let (m, u, k) = row.map_err(|e| Error::Parse {
                location: format!("assignment row {}", line + 1),
                message: e.to_string(),
            })?;
            if m >= beams || u >= users || k >= blocks {
                return Err(Error::Parse {
                    location: format!("assignment row {}", line + 1),
                    message: format!("index ({m}, {u}, {k}) out of range"),
                });
            }
            x[[m, u, k]] = true;
        }
        Ok(Assignment::from_indicator(x))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Blocks beam `m` may transmit on.
pub fn allowed_blocks(cfg: &SystemConfig, m: usize) -> Vec<usize> {
    match cfg.block_mode {
        BlockMode::Paired => vec![m % cfg.num_resource_blocks],
        BlockMode::AllBlocks => (0..cfg.num_resource_blocks).collect(),
    }
}

/// Round-robin over beams and their blocks, each pick taking the strongest
/// unassigned user. Beams stop receiving users at `ceil(U/M)`.
pub fn greedy_assign(real: &ChannelRealization, cfg: &SystemConfig) -> Assignment {
    let (mc, uc, kc) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
    let cap = cfg.users_per_beam();
    let mut x = Array3::from_elem((mc, uc, kc), false);
    let mut free = vec![true; uc];
    let mut left = uc;
    let mut counts = vec![0usize; mc];
    'rounds: for _ in 0..cap {
        for m in 0..mc {
            for k in allowed_blocks(cfg, m) {
                if left == 0 {
                    break 'rounds;
                }
                if counts[m] >= cap {
                    break;
                }
                // strict comparison keeps the lowest index on ties
                let mut best: Option<(usize, f64)> = None;
                for u in (0..uc).filter(|&u| free[u]) {
                    let g = real.power_gain(m, u, k);
                    if best.is_none_or(|(_, bg)| g > bg) {
                        best = Some((u, g));
                    }
                }
                let (u, _) = best.expect("pool not empty");
                x[[m, u, k]] = true;
                free[u] = false;
                left -= 1;
                counts[m] += 1;
            }
        }
    }
    Assignment {
        x,
        users_per_beam: counts,
    }
}

/// Uniformly shuffled beam slots (`ceil(U/M)` per beam), then a block among
/// the beam's allowed ones. Deterministic in `seed`.
pub fn random_assign(cfg: &SystemConfig, seed: u64) -> Assignment {
    let (mc, uc, kc) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
    let cap = cfg.users_per_beam();
    let mut rng = trial_rng(seed, 0, ASSIGNMENT_STREAM);
    let mut slots: Vec<usize> = (0..mc).flat_map(|m| std::iter::repeat_n(m, cap)).collect();
    slots.shuffle(&mut rng);
    let mut x = Array3::from_elem((mc, uc, kc), false);
    let mut counts = vec![0usize; mc];
    for (u, &m) in slots.iter().take(uc).enumerate() {
        let blocks = allowed_blocks(cfg, m);
        let k = blocks[rng.gen_range(0..blocks.len())];
        x[[m, u, k]] = true;
        counts[m] += 1;
    }
    Assignment {
        x,
        users_per_beam: counts,
    }
}
