//! Counter-based random streams: every `(seed, domain, index)` triple owns an independent
//! ChaCha stream, so draws do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag separating streams that share a user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    NoiseMode,
    Path,
    Start,
    Trial,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::NoiseMode => 0x6e6f_6973_655f_6d6f,
            Domain::Path => 0x7061_7468_735f_7374,
            Domain::Start => 0x7374_6172_745f_7665,
            Domain::Trial => 0x7472_6961_6c5f_7072,
        }
    }
}

/// Stream for one counter value.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.tag());
    rng.set_stream(index);
    rng
}

/// Counter of a Neumann mode `(k1, k2)`; independent of the grid size.
pub fn mode_counter(k: [usize; 2]) -> u64 {
    ((k[0] as u64) << 32) | k[1] as u64
}
