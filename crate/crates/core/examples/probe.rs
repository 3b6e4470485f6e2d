use geosym_core::expr::Expr;

fn main() {
    let v = Expr::parse("c^2*x^2/4").unwrap();
    println!("v = {v:?}");
    let dv = v.diff("x");
    println!("dv = {dv:?}");
    let e2 = Expr::parse("x^2/4").unwrap();
    println!("x^2/4 = {e2:?}");
    let e3 = Expr::parse("x^2").unwrap() * Expr::parse("x^(-1)").unwrap();
    println!("x^2 * x^-1 = {:?}", e3.normalize().unwrap());
    let e4 = Expr::parse("4^(-1)*x^2").unwrap();
    println!("4^-1 x^2 = {e4:?}");
}
