//! Two sufficient causes: each is an actual cause only under a contingency
//! that removes the other, and together they are not minimal.

use causeway::cause::{actual_causes, is_weak_cause, CausalSituation, CauseQuery};
use causeway::corpus;
use causeway::model::Value;

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    let file = ws.model("orgate.model").unwrap();
    let sit = CausalSituation::from_context(file.model.clone(), file.context.as_ref().unwrap()).unwrap();

    for cause in actual_causes(&sit, ("Y", Value::TRUE), 3).unwrap() {
        println!("{cause}");
    }

    let alone = CauseQuery::new([("A", Value::TRUE)], "Y", Value::TRUE);
    let both = CauseQuery::new([("A", Value::TRUE), ("B", Value::TRUE)], "Y", Value::TRUE);
    for q in [alone, both] {
        match is_weak_cause(&sit, &q).unwrap() {
            Some(w) => println!("weak: {w}"),
            None => println!("not a weak cause: {q}"),
        }
    }
}
