//! Gaussian mutation and the folding rule that keeps genes in [0, 100].

use lexidiag::evolution::fold_into_bounds;
use lexidiag::{mutate, Genotype, MutationConfig, RandomSource};

fn main() {
    for v in [-0.7, 102.3, -150.0, 250.0, 42.0] {
        println!("fold({v}) = {}", fold_into_bounds(v, 100.0));
    }

    let cfg = MutationConfig::default();
    println!("\ndefault: {cfg:?}");
    let mut rng = RandomSource::new(9);
    let parent = Genotype::new(vec![99.5; 10_000]);
    let child = mutate(&parent, &cfg, &mut rng);
    let moved: Vec<f64> = child.genes().iter().copied().filter(|&g| g != 99.5).collect();
    println!(
        "{} of {} genes mutated at rate {}; all within [0, 100]: {}",
        moved.len(),
        parent.dim(),
        cfg.per_gene_rate,
        child.genes().iter().all(|g| (0.0..=100.0).contains(g))
    );
    println!("mutated values: {moved:.3?}");
}
