//! Generations afforded by a fixed evaluation budget: one evaluation is one
//! individual on one test case, so every extra case or individual costs
//! generations.

use lexidiag::generations_for_budget;

fn main() -> lexidiag::Result<()> {
    let budget = 1_500_000_000;
    let redundancy = [0, 100, 200, 400];
    print!("{:>10}", "pop \\ red");
    for r in redundancy {
        print!("{r:>10}");
    }
    println!();
    for pop in [50, 100, 500, 1000, 5000] {
        print!("{pop:>10}");
        for r in redundancy {
            print!("{:>10}", generations_for_budget(budget, pop, 100 + r)?);
        }
        println!();
    }
    Ok(())
}
