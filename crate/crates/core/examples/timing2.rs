use sbbm::*;

include!("warm_stage.rs");

fn main() {
    // Does best-of-R warm restarts (by homogeneous NLL) fix the stalls?
    for seed in 1..=8u64 {
        let cfg2 = Example23Config::example2(500, 4, seed);
        let s2 = gen_example2(&cfg2).unwrap();
        print!("ex2 seed {seed}: ");
        let mut best: Option<(f64, Membership)> = None;
        for r in 0..5u64 {
            let sub = seed.wrapping_mul(1_000_003).wrapping_add(r);
            let (m, nll) = homogeneous_stage(&s2.adjacency, 4, sub, 1e-6);
            let err = clustering_error(m.labels(), s2.truth.membership.labels()).unwrap();
            print!("r{r}: nll {nll:.5} err {err:.3}  ");
            if best.as_ref().map_or(true, |(b, _)| nll < *b) {
                best = Some((nll, m));
            }
        }
        let (_, chosen) = best.unwrap();
        println!("\n  -> chosen err {:.4}", clustering_error(chosen.labels(), s2.truth.membership.labels()).unwrap());
    }
}
