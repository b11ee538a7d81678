//! Convert COGS logical forms to chain targets.

use abstraction_probe::flt::{convert_cogs_logical_form, read_cogs_tsv, CogsOptions};

const TSV: &str = "\
A rose was helped by a dog .\trose ( x _ 1 ) AND help . theme ( x _ 3 , x _ 1 ) AND help . agent ( x _ 3 , x _ 6 ) AND dog ( x _ 6 )\tin_distribution
The captain ate .\t* captain ( x _ 1 ) ; eat . agent ( x _ 2 , x _ 1 )\tin_distribution
Liam hoped that the dog preferred .\t* dog ( x _ 4 ) ; hope . agent ( x _ 1 , Liam ) AND hope . ccomp ( x _ 1 , x _ 5 ) AND prefer . agent ( x _ 5 , x _ 4 )\tin_distribution
";

fn main() -> anyhow::Result<()> {
    let opts = CogsOptions::default();
    for row in read_cogs_tsv(TSV.as_bytes())? {
        println!(
            "{}\n  {}\n",
            row.source,
            convert_cogs_logical_form(&row.logical_form, &opts)?
        );
    }
    Ok(())
}
