//! Checks every catalog binary action against B1-B4 and continuity, then
//! replays the recorded counterexamples for the two known violators.

use gtheta::actions::{catalog_actions, control_by_name, replay_action_witness, verify_action, verify_control, F2_DEPTH};

fn main() -> gtheta::Result<()> {
    for action in catalog_actions() {
        let reports = verify_action(&action, 10_000, 0);
        println!("{} (declared violations: {:?})", action.name(), action.known_violations());
        for r in &reports {
            println!("  {r}");
            if r.failed() {
                println!("    replays: {}", replay_action_witness(&action, r));
            }
        }
    }

    for (name, alpha) in [("ln", 0.0), ("neg_recip", 1.0)] {
        let pair = control_by_name(name, alpha)?;
        for r in verify_control(&pair, F2_DEPTH) {
            println!("control {name}: {r}");
        }
    }
    Ok(())
}
