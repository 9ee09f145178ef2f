//! Evaluates the cake model, intervenes on it, and asks what caused the cake.

use causeway::cause::{actual_causes, CausalSituation};
use causeway::corpus;
use causeway::model::Value;

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    let file = ws.model("cake.model").unwrap();
    let ctx = file.context.clone().unwrap();

    let before = file.model.evaluate(&ctx).unwrap();
    println!("as baked:    {before}");

    let no_batter = file.model.intervene("Batter", Value::FALSE).unwrap();
    println!("no batter:   {}", no_batter.evaluate(&ctx).unwrap());

    let sit = CausalSituation::from_context(file.model.clone(), &ctx).unwrap();
    for cause in actual_causes(&sit, ("Cake", Value::TRUE), 3).unwrap() {
        println!("{cause}");
    }
}
