mod common;
use common::random_qubit_channel;
use doeblin::doeblin::{alpha, alpha_cone, alpha_plus, alpha_wang, reverse_doeblin, ConeChoice};
use doeblin::sdp::SdpStatus;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn stress_scan() {
    let mut bad = 0;
    for seed in [1u64, 2, 3, 900, 901, 12345] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..50 {
            let ch = random_qubit_channel(&mut rng);
            for (name, status) in [
                ("alpha", alpha(&ch).unwrap().status),
                ("wang", alpha_wang(&ch).unwrap().status),
                ("plus", alpha_plus(&ch).unwrap().status),
                ("ppt", alpha_cone(&ch, ConeChoice::Ppt).unwrap().status),
                ("sym2", alpha_cone(&ch, ConeChoice::PptSym2).unwrap().status),
                ("rev", reverse_doeblin(&ch).unwrap().status),
            ] {
                if status != SdpStatus::Optimal {
                    println!("seed {seed} trial {trial} {name}: {status:?}");
                    bad += 1;
                }
            }
        }
    }
    assert_eq!(bad, 0, "{bad} non-optimal solves");
}
