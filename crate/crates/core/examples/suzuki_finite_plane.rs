//! Suzuki-type contraction on the four-point plane and Picard iteration to
//! the fixed point (3, 3), plus the extended map whose premise is never met.

use gtheta::metric::{make_catalog_space, SpaceParams};
use gtheta::num::default_t_grid;
use gtheta::suzuki::{
    fixed_points, iterate_fixed_point, plane_map, plane_map_extended, premise_solutions, psi, unit_grid, verify_suzuki,
    SuzukiConfig, Variant,
};
use gtheta::Point;

fn main() -> gtheta::Result<()> {
    for u in [0.0, 0.5, 0.618, 0.7, 0.875] {
        println!("psi({u}) = {}", psi(u)?);
    }

    let plane = make_catalog_space("finite_plane_space", &SpaceParams::default())?;
    let t = plane_map();
    for variant in [Variant::General, Variant::Banach, Variant::Kannan] {
        let rep = verify_suzuki(&plane, &t, &SuzukiConfig::new(0.875, variant)?)?;
        println!("{variant:?}: {} ({} checked, {} vacuous)", rep.verdict, rep.checked, rep.vacuous);
    }
    for start in plane.carrier.enumerate()? {
        let r = iterate_fixed_point(&plane, &t, &start, 1e-12, 10, &default_t_grid())?;
        println!("{start} -> {} in {} applications", r.fixed_point, r.iterations);
    }
    println!("fixed points: {:?}", fixed_points(&plane, &t)?);

    let ext = make_catalog_space("finite_plane_space", &SpaceParams { extended: Some(true), ..Default::default() })?;
    let s = plane_map_extended();
    let (x, y) = (Point::Pair(7.0, 9.0), Point::Pair(9.0, 7.0));
    let sols = premise_solutions(&ext, &s, &x, &y, 1.0, &unit_grid(100))?;
    println!("premise solutions for S at ({x}, {y}): {}", sols.len());
    println!("P(Sx, Sy, 1) = {}, P(x, y, 1) = {}", ext.p(&s.apply(&x)?, &s.apply(&y)?, 1.0), ext.p(&x, &y, 1.0));
    Ok(())
}
