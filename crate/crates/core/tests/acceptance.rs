use std::process::ExitCode;
use std::time::Instant;

use jandl::cochain::quaternionic;
use jandl::counting::{centre_dim, count_simples};
use jandl::groupoid::parse_group_spec;
use jandl::suite::{run_criterion, Manifest, CRITERIA};
use jandl::{Cochain, Rational, Twist};

const SEED: u64 = 7;

/// Hand-derived values checked directly, on top of the manifest fixtures.
fn literal_fixtures(criterion: usize) -> Result<(), String> {
    let cases: &[(&str, bool, i64)] = match criterion {
        4 => &[
            ("product_Z2:Z3", false, 2),
            ("product_Z2:1", true, 1),
            ("cyclic:4:mod2", false, 2),
            ("product_Z2:S3", false, 3),
        ],
        5 => &[("product_Z2:S3", false, 3), ("cyclic:4:mod2", true, 2), ("dihedral:4:reflection", false, 4)],
        _ => return Ok(()),
    };
    for &(spec, quat, want) in cases {
        let g = parse_group_spec(spec).map_err(|e| e.to_string())?;
        let b = g.classifying_groupoid();
        let theta = if quat { quaternionic(&b) } else { Cochain::zero(&b, 2, Twist::Pi) }.map_err(|e| e.to_string())?;
        let r = if criterion == 4 { count_simples(&theta) } else { centre_dim(&g, &theta) }.map_err(|e| e.to_string())?;
        if r.value_formula != Rational::from_integer(want) || !r.agree {
            return Err(format!("{spec}: got {} want {want}", r.value_formula));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let manifest = Manifest::standard();
    let mut failed = 0;
    for (i, name) in CRITERIA.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let outcome = run_criterion(&manifest, SEED, n).expect("criterion");
        let literal = literal_fixtures(n);
        let secs = start.elapsed().as_secs_f64();
        let witness = outcome.witness.clone().or(literal.err());
        match witness {
            None => println!("PASS {n:>2} {name}: {} cases, {secs:.2}s", outcome.cases),
            Some(w) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {w}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
