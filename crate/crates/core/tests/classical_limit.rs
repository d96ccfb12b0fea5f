mod common;

use common::rat;
use qspace::classical::*;
use qspace::algebra::parse_series;

#[test]
fn deformed_operations_reduce_to_classical_ones() {
    let checks = classical_battery(&rat(1_000_001, 1_000_000)).unwrap();
    assert!(checks.len() > 60);
    for c in &checks {
        assert!(c.exact_at_one, "{}", c.name);
        assert!(c.near_deviation < 1e-4, "{}: {:e}", c.name, c.near_deviation);
    }
}

#[test]
fn a_visibly_deformed_q_is_not_classical() {
    let checks = classical_battery(&rat(11, 10)).unwrap();
    let worst = checks.iter().map(|c| c.near_deviation).fold(0.0, f64::max);
    assert!(worst > 1e-2, "{worst:e}");
}

#[test]
fn helpers_act_on_monomials() {
    let f = parse_series("x+^3 x3 - 2 t^2 x-").unwrap();
    assert_eq!(ordinary_partial(&f, 0), parse_series("3 x+^2 x3").unwrap());
    assert_eq!(ordinary_partial(&f, 3), parse_series("-4 t x-").unwrap());
    assert_eq!(negate_argument(&f), parse_series("x+^3 x3 + 2 t^2 x-").unwrap());
    let s = specialize(&parse_series("(1+q^4) x+ - lambda x3").unwrap(), &rat(1, 1)).unwrap();
    assert_eq!(s, parse_series("2 x+").unwrap());
}
