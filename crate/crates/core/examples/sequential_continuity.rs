//! Convergence, Cauchy and uniqueness checks, and the failure of sequential
//! continuity of the distance in the K83 space.

use gtheta::metric::{make_catalog_space, SpaceParams};
use gtheta::num::{default_t_grid, power_grid};
use gtheta::sequences::{check_cauchy, check_convergence, check_sequential_continuity, check_unique_limit, orbit, reciprocal_even};
use gtheta::suzuki::plane_map;
use gtheta::Point;

fn main() -> gtheta::Result<()> {
    let params = SpaceParams { variant: Some("K83".into()), ..Default::default() };
    let k83 = make_catalog_space("seq_b_space", &params)?;
    let seq = reciprocal_even(100_000);
    let grid = power_grid(-5, 5);

    let conv = check_convergence(&k83, &seq, &Point::Recip(0), &grid, 1e-3)?;
    let cauchy = check_cauchy(&k83, &seq, &grid, 1e-3)?;
    println!("{}: converges to 0 {}, Cauchy {}", seq.description, conv.verdict, cauchy.verdict);

    let cont = check_sequential_continuity(&k83, &seq, &Point::Recip(0), &Point::Recip(1), &grid, 1e-3)?;
    println!("continuous at probe 1: {}", cont.continuous);
    for p in &cont.per_t {
        println!("  t = {:<8} tail {:<12} point {}", p.t, p.tail_value.unwrap_or(f64::NAN), p.point_value);
    }

    let plane = make_catalog_space("finite_plane_space", &SpaceParams::default())?;
    let t = plane_map();
    let seq = orbit("plane_T", Point::Pair(7.0, 9.0), |p| t.apply(p), 1000)?;
    let u = check_unique_limit(&plane, &seq, &Point::Pair(3.0, 3.0), &Point::Pair(7.0, 3.0), &default_t_grid(), 1e-9)?;
    println!("orbit of (7, 9): limit (3, 3) {}, limit (7, 3) {}", u.first.verdict, u.second.verdict);
    Ok(())
}
