//! Moments of the stochastic convolution `∫ S(t−s) u dW_s` for a constant
//! profile, normalised by `ρ^{3/2} T^{3/8}`.

use snls::probes::ConvolutionConfig;

fn main() -> snls::Result<()> {
    let report = ConvolutionConfig::default().run(7)?;
    println!("{}", report.to_json()?);
    Ok(())
}
