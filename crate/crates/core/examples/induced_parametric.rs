//! The parametric distance induced by chaining through intermediate points,
//! on the four-point plane and on a three-point restriction of the
//! piecewise space.

use gtheta::metric::{induce_parametric, make_catalog_space, SpaceParams};
use gtheta::num::power_grid;
use gtheta::Point;

fn main() -> gtheta::Result<()> {
    let plane = make_catalog_space("finite_plane_space", &SpaceParams::default())?;
    let pts = plane.carrier.enumerate()?;
    for x in &pts {
        for y in &pts {
            print!("{:>10.4} ", induce_parametric(&plane, x, y, 1.0, 7)?);
        }
        println!();
    }

    let params = SpaceParams { points: Some(vec![0.0, 1.0, 3.0]), ..Default::default() };
    let pw = make_catalog_space("piecewise_space", &params)?;
    for t in power_grid(-4, 4) {
        let direct = pw.p(&Point::Real(0.0), &Point::Real(3.0), t);
        let induced = induce_parametric(&pw, &Point::Real(0.0), &Point::Real(3.0), t, 7)?;
        println!("t = {t:<8} direct {direct:<8} induced {induced}");
    }
    Ok(())
}
