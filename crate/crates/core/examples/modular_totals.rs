//! Totals of a two-module design and the comparison against the one-piece
//! part, using the module values of a reference split.

use std::collections::BTreeMap;

use dfm_index::aggregation::{compare, total_modules, Analysis, IndexReport, LocalSummary};
use dfm_index::indexes::Process;
use dfm_index::reporting::{render_report, AnyReport, ReportFormat};

fn module(name: &str, cd: f64, cc: f64, cf_mean: f64, cf_max: f64) -> IndexReport {
    let mut r = IndexReport::new(name, Process::Machining);
    r.globals.insert("C(d)-".into(), cd);
    r.globals.insert("C(c)-".into(), cc);
    r.locals.insert(
        "C(f)-".into(),
        LocalSummary { max: cf_max, mean: cf_mean, values: vec![], volumes: vec![] },
    );
    r
}

fn main() -> dfm_index::Result<()> {
    let base = module("base", 0.068, 0.274, 0.095, 0.550);
    let top = module("top", 0.049, 0.344, 0.360, 0.440);
    // Volumes in the ratio 0.67 : 0.33.
    let totals = total_modules("split", &[("base".into(), 670.0, &base), ("top".into(), 330.0, &top)])?;
    print!("{}", render_report(AnyReport::Totals(&totals), ReportFormat::Csv)?);

    let mut one_piece = IndexReport::new("one-piece", Process::Machining);
    one_piece.locals.insert(
        "C(f)-".into(),
        LocalSummary { max: 1.0, mean: 0.5, values: vec![], volumes: vec![] },
    );
    let cmp = compare(&Analysis::Report(one_piece), &Analysis::Totals(totals))?;
    let percent: BTreeMap<_, _> = cmp.rows.iter().map(|r| (r.id.clone(), r.percent)).collect();
    println!();
    for (id, p) in percent {
        println!("{id:<10} {:+.1}%", p.unwrap_or(f64::NAN));
    }
    Ok(())
}
