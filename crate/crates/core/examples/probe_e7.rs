use cpdim_core::budget::Budget;
use cpdim_core::charmap::compute_char_image;
use cpdim_core::rootsys::{Family, GroupSpec, Isogeny};
use std::time::Instant;

fn main() {
    for iso in [Isogeny::SimplyConnected, Isogeny::Adjoint] {
        let spec = GroupSpec::new(Family::E, 7, iso).unwrap();
        let t = Instant::now();
        match compute_char_image(spec, 2, &Budget::extended()) {
            Ok(res) => println!(
                "{} p=2 cd={} top={} recovered={:?} mass={} elapsed={:.1?}",
                spec.label(),
                res.cd,
                res.top_degree,
                res.recovery.degrees(),
                res.hilbert.eval_at_one(),
                t.elapsed()
            ),
            Err(e) => println!("{} p=2 ERROR {e} elapsed={:.1?}", spec.label(), t.elapsed()),
        }
    }
}
