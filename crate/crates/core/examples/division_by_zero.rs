//! A division whose denominator vanishes: which inputs caused the undefined
//! result?

use causeway::cause::{actual_causes, CausalSituation};
use causeway::corpus;
use causeway::model::Value;

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    let file = ws.model("divzero.model").unwrap();
    let ctx = file.context.clone().unwrap();
    let sit = CausalSituation::from_context(file.model.clone(), &ctx).unwrap();
    println!("{}", sit.sigma());

    let f = sit.value("f").unwrap();
    assert_eq!(f, Value::Bottom);
    for cause in actual_causes(&sit, ("f", f), 2).unwrap() {
        println!("{cause}");
    }
}
