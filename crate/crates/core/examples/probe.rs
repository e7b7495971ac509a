use polyrec::analysis::{fer_closed_form, fer_monte_carlo, FerVariant};
use polyrec::ff::FAST_TEST_PRIME;
use polyrec::protocol::{alice_encode_block, bob_reconcile_block, BlockParams};
use polyrec::{channel, seeds};
use std::time::Instant;

fn main() {
    // criterion 2 shape at full trial count
    let params2 = BlockParams {
        p: FAST_TEST_PRIME,
        s: 24,
        r: 16,
        bob_max_attempts: 100_000,
        small_field_ok: true,
        ..BlockParams::default()
    };
    for eps in [0.05f64, 0.10, 0.20] {
        let t0 = Instant::now();
        let mc = fer_monte_carlo(&params2, eps, 1, 5000, 99).unwrap();
        let closed = fer_closed_form(24, 16, eps, 1, FerVariant::Binomial).unwrap();
        let sigma = (closed * (1.0 - closed) / 5000.0).sqrt();
        println!(
            "eps={eps}: raw={:.4} core={:.5} pool={:.4} capped={:.5} closed={:.5} |core-closed|/sigma={:.2} ({:.1}s)",
            mc.estimate, mc.core_estimate, mc.pool_deviation_rate, mc.capped_excess_rate,
            closed, (mc.core_estimate - closed).abs() / sigma.max(1e-12), t0.elapsed().as_secs_f64()
        );
    }

    // criterion 1 shape: alice+bob cost at s=40, r=28
    let params1 = BlockParams {
        p: FAST_TEST_PRIME,
        s: 40,
        r: 28,
        small_field_ok: true,
        ..BlockParams::default()
    };
    let t0 = Instant::now();
    let mut accepted = 0;
    for i in 0..50u64 {
        let mut krng = seeds::derive_rng(2, "c1-key", i);
        let bits = loop {
            let b = channel::generate_key(40, &mut krng).unwrap();
            let n0 = b.iter().filter(|&&x| x == 0).count();
            if n0 <= 28 && 40 - n0 <= 28 { break b; }
        };
        let mut rng = seeds::derive_rng(2, "c1", i);
        let (msg, _) = alice_encode_block(&bits, &params1, &mut rng).unwrap();
        let (noisy, _) = channel::corrupt_bits(&bits, 0.05, &mut rng).unwrap();
        let out = bob_reconcile_block(&noisy, &msg, &params1, &mut rng).unwrap();
        if out.is_accepted() { accepted += 1; }
    }
    println!("criterion1 50 blocks: {:.2}s total, accepted {}/50", t0.elapsed().as_secs_f64(), accepted);
}
