//! Helpers shared by the integration tests.

use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss3_core::fermat_curve as fc;
use ss3_core::field_tower::make_field;
use ss3_core::strata::{classify_stratum, A1Case, StratumLabel, StratumPoint};

pub fn ss3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ss3")).args(args).env_remove("SS3_CACHE_DIR").output().expect("binary runs")
}

/// `--p P --m M --t .. --u ..` for a random point of degree `deg` in the given case.
pub fn point_args(p: u64, m: u32, deg: u32, case: A1Case, seed: u64) -> Vec<String> {
    let ctx = make_field(p, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let t = fc::random_point_of_degree(&ctx, deg, &mut rng);
        let r = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
        let x = StratumPoint::new(&ctx, t, [ctx.one(), r]).unwrap();
        if let StratumLabel::A1 { case: c, .. } = classify_stratum(&ctx, &x).unwrap().label {
            if c == case {
                let js = |e| serde_json::to_string(&ctx.to_json(e)).unwrap();
                let mut out = vec!["--p".into(), p.to_string(), "--m".into(), m.to_string(), "--t".into()];
                out.extend(x.t.coords.iter().map(js));
                out.push("--u".into());
                out.extend(x.u.iter().map(js));
                return out;
            }
        }
    }
}
