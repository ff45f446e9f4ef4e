//! Parameter counts and per-second compute of the three architectures.

use pitchkit::nn::{complexity, count_params, ArchKind};

fn main() {
    println!("{:<6} {:>8}", "arch", "params");
    for arch in ArchKind::ALL {
        println!("{:<6} {:>8}", arch.to_string(), count_params(arch));
    }
    println!();
    for arch in ArchKind::ALL {
        println!("{}\n", complexity(arch));
    }
}
