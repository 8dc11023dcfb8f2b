//! The step space satisfies the generalized axioms and the parametric
//! triangle but not the same-parameter theta triangle; `e^p d` with plus is
//! not parametric at all.

use gtheta::metric::{make_catalog_space, SpaceParams};
use gtheta::verifier::{replay_witness, verify_gtheta, verify_parametric_triangle, verify_theta_parametric};

fn main() -> gtheta::Result<()> {
    let step = make_catalog_space("step_space", &SpaceParams::default())?;
    println!("{}", step.describe());
    for r in verify_gtheta(&step, 10_000, 0) {
        println!("  {r}");
    }
    println!("  {}", verify_parametric_triangle(&step, 10_000, 0));
    let theta = verify_theta_parametric(&step, 10_000, 0);
    println!("  {theta}");
    println!("  witness replays: {}", replay_witness(&step, &theta));

    let expd = make_catalog_space("exp_parametric_space", &SpaceParams::default())?;
    println!("{}", expd.describe());
    println!("  {}", verify_parametric_triangle(&expd, 10_000, 0));

    // every catalog space under the generalized axioms
    for name in gtheta::metric::SPACE_NAMES {
        let s = make_catalog_space(name, &SpaceParams::default())?;
        let failed: Vec<_> = verify_gtheta(&s, 2_000, 1).into_iter().filter(|r| r.failed()).map(|r| r.axiom).collect();
        println!("{:<28} failing: {failed:?}", s.name);
    }
    Ok(())
}
