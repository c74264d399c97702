//! Renders a small iteration-count table through the benchmark API in both
//! CSV and markdown; the full sweeps are available through the `riesz-mg`
//! binary (`table1`, `table2`, `table3`).

use riesz_mg::bench::{run_table3, BenchOptions, TableFormat};

fn main() -> riesz_mg::Result<()> {
    let opts = BenchOptions::default();
    let table = run_table3(&opts)?;
    println!("{}", table.render(TableFormat::Markdown));
    println!("{}", table.render(TableFormat::Csv));
    Ok(())
}
