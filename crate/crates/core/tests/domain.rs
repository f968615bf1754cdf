use lexidiag::{build_case_map, random_genotype, RandomSource};

#[test]
fn genotype_seed_42_matches_snapshot() {
    let golden: Vec<f64> = serde_json::from_str(include_str!("data/genotype_seed42.json")).unwrap();
    let g = random_genotype(100, &mut RandomSource::new(42)).unwrap();
    assert_eq!(golden.len(), 100);
    for (i, (a, b)) in g.genes().iter().zip(&golden).enumerate() {
        assert_eq!(a.to_bits(), b.to_bits(), "gene {i}");
    }
}

#[test]
fn draws_depend_only_on_seed() {
    let mut a = RandomSource::new(123);
    let mut b = RandomSource::new(123);
    let ga = random_genotype(50, &mut a).unwrap();
    let gb = random_genotype(50, &mut b).unwrap();
    assert_eq!(ga, gb);
    assert_eq!(build_case_map(20, 30, &mut a).unwrap(), build_case_map(20, 30, &mut b).unwrap());
    let mut va: Vec<usize> = (0..30).collect();
    let mut vb = va.clone();
    a.shuffle(&mut va);
    b.shuffle(&mut vb);
    assert_eq!(va, vb);
    assert_ne!(random_genotype(50, &mut RandomSource::new(124)).unwrap(), ga);
}
