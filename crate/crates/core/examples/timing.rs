//! Median solve times on a dense random graph.
//!
//! ```text
//! cargo run --release --example timing
//! ```

use kuramoto_series::experiments::{t0_scaled_instance, timing_bench, Method};

fn main() -> kuramoto_series::Result<()> {
    let inst = t0_scaled_instance(120, 0.8, 20, 0.1, 1)?;
    println!("n = 120, m = {}, precompute {:.3} s", inst.ops.graph().m(), inst.precompute_seconds);
    let methods = [Method::Series(5), Method::Series(7), Method::FixedPoint, Method::Newton];
    let rows = timing_bench(&[inst], &methods, 5, false);
    for r in &rows[1..] {
        println!("{:12} {:.4} s  residual {:.1e}  {}", r.method, r.median_seconds, r.residual, r.failed.as_deref().unwrap_or("ok"));
    }
    Ok(())
}
