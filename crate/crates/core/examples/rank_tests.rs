//! Kruskal-Wallis, Wilcoxon rank-sum and Bonferroni-adjusted comparisons.

use lexidiag::stats::{bonferroni, compare_groups, kruskal_wallis, wilcoxon_rank_sum, Alternative};

fn main() -> lexidiag::Result<()> {
    let kw = kruskal_wallis(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]])?;
    println!("Kruskal-Wallis H = {:.3}, df = {}, p = {:.5}", kw.h, kw.df, kw.p);

    let small = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0])?;
    println!("rank-sum, 3 vs 3: U = {}, p = {:.3} ({:?})", small.u, small.p, small.method);
    let large: Vec<f64> = (0..30).map(|i| i as f64 * 0.7).collect();
    let shifted: Vec<f64> = large.iter().map(|x| x + 4.0).collect();
    let big = wilcoxon_rank_sum(&large, &shifted)?;
    println!("rank-sum, 30 vs 30: U = {}, p = {:.2e} ({:?})", big.u, big.p, big.method);

    println!("Bonferroni of [0.01, 0.02, 0.4]: {:?}", bonferroni(&[0.01, 0.02, 0.4])?);

    let groups = vec![
        ("10".to_string(), vec![99.1, 98.7, 99.5, 99.0, 98.9, 99.3]),
        ("50".to_string(), vec![97.2, 96.8, 97.9, 97.5, 96.1, 97.0]),
        ("250".to_string(), vec![70.3, 68.8, 71.2, 69.9, 66.4, 72.0]),
    ];
    let report = compare_groups("best_performance", &groups, 0.05, Alternative::TwoSided)?;
    print!("\n{report}");
    Ok(())
}
