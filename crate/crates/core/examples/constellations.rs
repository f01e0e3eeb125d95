// Gray-labelled QPSK and 16-QAM tables and a noiseless round trip.

use optical_dfts::modem::{Constellation, Scheme};
use optical_dfts::numerics::RngStream;

pub fn run_example() -> optical_dfts::Result<()> {
    for scheme in [Scheme::Qpsk, Scheme::Qam16] {
        let c = Constellation::new(scheme);
        let k = c.bits_per_symbol();
        println!("{scheme}: {} points, mean energy {:.6}", c.points().len(), c.average_energy());
        for (label, p) in c.points().iter().enumerate() {
            println!("  {label:0k$b} -> {:+.4} {:+.4}j", p.re, p.im, k = k);
        }

        let mut rng = RngStream::new(1, 0);
        let bits = rng.bits(k * 1000);
        let symbols = c.map_bits(&bits)?;
        assert_eq!(c.demap_hard(&symbols), bits);
        println!("  1000-symbol noiseless round trip ok");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example()
}
