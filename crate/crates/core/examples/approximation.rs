//! Grades a few semantics for `(x + y)^u mod 5` and compares their
//! predictive power.

use causeway::approx::{check, compare_power, predictive_power, CausalFunction, Grade, Limits, Target};
use causeway::corpus;

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    let f = CausalFunction::of_model(&ws.model("pow.model").unwrap().model);
    let target = Target::Causal(&f);
    let limits = Limits::default();

    let mut relations = Vec::new();
    for name in ["pow_const.sem", "pow2.sem", "powsem.sem", "pow_exact.sem"] {
        let sem = &ws.semantics(name).unwrap().semantics;
        println!("{name}");
        for grade in [Grade::Pointwise, Grade::Local, Grade::Global] {
            let v = check(sem, target, grade, &limits).unwrap();
            println!("  {grade}: {}", if v.holds { "holds" } else { "fails" });
        }
        let rel = predictive_power(sem, target, &limits).unwrap();
        println!("  {}", rel.summary().trim_end().replace('\n', "\n  "));
        relations.push((name, rel));
    }
    for w in relations.windows(2) {
        let ord = compare_power(&w[1].1, &w[0].1).unwrap();
        println!("{} vs {}: {ord}", w[1].0, w[0].0);
    }
}
