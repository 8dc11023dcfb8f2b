//! Balls in the sequence b-metric spaces: an open ball that is not open, a
//! closed ball that is not closed, and the sufficient condition that rules
//! the first case out.

use gtheta::metric::{make_catalog_space, SpaceParams};
use gtheta::num::{default_t_grid, power_grid};
use gtheta::sequences::reciprocal_even;
use gtheta::topology::{
    ball_members, default_radius_grid, is_closed_set, is_open_set, open_ball_sufficiency, Ball, PointSet, Probe,
};
use gtheta::Point;

fn seq_b(variant: &str) -> gtheta::Result<gtheta::metric::GThetaSpace> {
    let params = SpaceParams { variant: Some(variant.into()), depth: Some(10_000), ..Default::default() };
    make_catalog_space("seq_b_space", &params)
}

fn main() -> gtheta::Result<()> {
    let k83 = seq_b("K83")?;
    let ball = Ball::open(Point::Recip(1), 2.0, 1.0)?;
    let members = ball_members(&k83, &ball)?;
    let shown: Vec<String> = members.iter().map(Point::to_string).collect();
    println!("{ball} = {{{}}}", shown.join(", "));

    let check = is_open_set(&k83, &PointSet::Listed(members), &default_radius_grid(2.0), &default_t_grid())?;
    println!("open: {}", check.verdict);
    if let Some(w) = &check.witness {
        println!("  around {} at t = {}:", w.center, w.t);
        for e in w.escapes.iter().rev().take(5) {
            println!("    radius {:e} still contains {}", e.radius, e.point);
        }
    }
    let s = open_ball_sufficiency(&k83, &ball)?;
    println!("sufficiency: h = {}, condition holds: {}", s.h_value, s.condition_holds);

    let k4 = seq_b("K4quarter")?;
    let closed = Ball::closed(Point::Recip(1), 0.5, 1.0)?;
    let m = ball_members(&k4, &closed)?;
    println!("{closed} has {} members, contains 0: {}", m.len(), m.contains(&Point::Recip(0)));
    let probe = Probe { sequence: reciprocal_even(100_000), limit: Point::Recip(0) };
    let check = is_closed_set(&k4, &PointSet::Ball(closed), &[probe], &power_grid(-5, 5), 1e-3)?;
    println!("closed: {}", check.verdict);
    if let Some(w) = &check.witness {
        println!("  {} converges to {} outside the set", w.sequence, w.limit);
    }
    Ok(())
}
