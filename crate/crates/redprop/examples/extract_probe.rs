use redprop::domain::*;
use redprop::constraint::Constraint;
use redprop::rules::{extract_rules, ExtractBudget};

fn main() {
    let n = 27;
    let init = Domain::new(vec![VarDomain::Int(IntSet::range(1, n)); 2]);
    let (y1, y2) = (VarId::int(0), VarId::int(1));
    // y1 = 7 ⇔ y2 = 8
    let c = Constraint::OffsetBiImpl { x: y1, a: 7, y: y2, b: 8 };
    let t = std::time::Instant::now();
    let rs = extract_rules(&c, &init, &ExtractBudget::default()).unwrap();
    println!("biimpl rules ({:?}):", t.elapsed());
    for r in &rs.rules { println!("  {r}"); }

    // separation: y2 = y1 + 3
    let c2 = Constraint::LinearEq { terms: vec![(1, y2), (-1, y1)], rhs: 3 };
    let t = std::time::Instant::now();
    let rs2 = extract_rules(&c2, &init, &ExtractBudget::default()).unwrap();
    println!("separation rule count: {} ({:?})", rs2.rules.len(), t.elapsed());
    for r in rs2.rules.iter().take(6) { println!("  {r}"); }
}
