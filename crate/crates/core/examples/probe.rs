use cpdim_core::budget::Budget;
use cpdim_core::charmap::compute_char_image;
use cpdim_core::rootsys::{Family, GroupSpec, Isogeny};
use std::time::Instant;

fn main() {
    let cases = [
        (Family::G, 2, Isogeny::SimplyConnected, 2u32),
        (Family::F, 4, Isogeny::SimplyConnected, 2),
        (Family::F, 4, Isogeny::SimplyConnected, 3),
        (Family::B, 3, Isogeny::SimplyConnected, 2),
        (Family::D, 4, Isogeny::SimplyConnected, 2),
        (Family::B, 2, Isogeny::Adjoint, 2),
        (Family::C, 3, Isogeny::Adjoint, 2),
        (Family::A, 3, Isogeny::Adjoint, 2),
        (Family::A, 4, Isogeny::Adjoint, 5),
        (Family::E, 6, Isogeny::SimplyConnected, 2),
        (Family::E, 6, Isogeny::SimplyConnected, 3),
        (Family::E, 6, Isogeny::Adjoint, 3),
        (Family::E, 6, Isogeny::Adjoint, 2),
    ];
    for (f, r, iso, p) in cases {
        let spec = GroupSpec::new(f, r, iso).unwrap();
        let t = Instant::now();
        match compute_char_image(spec, p, &Budget::default()) {
            Ok(res) => println!(
                "{:8} p={} cd={:3}  top={:3}  recovered={:?}  hilbert(1)={}  [{:.2?}]",
                spec.label(),
                p,
                res.cd,
                res.top_degree,
                res.recovery.degrees(),
                res.hilbert.eval_at_one(),
                t.elapsed()
            ),
            Err(e) => println!("{:8} p={} ERROR {e} [{:.2?}]", spec.label(), p, t.elapsed()),
        }
    }
}
