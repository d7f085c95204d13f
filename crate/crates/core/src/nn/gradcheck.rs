use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::Network;
use super::DropoutSpec;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub worst_rel_error: f64,
    pub worst_param: Option<usize>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Relative error `|a - f| / max(|a|, |f|, floor)`. The floor scales with the
/// loss so gradients near zero are judged against cancellation error in the
/// finite difference instead of dividing by ~0.
fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

fn eval<L>(net: &Network, input: &[f64], loss: &L) -> Result<f64>
where
    L: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    // Inference mode never touches the rng.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = net.forward(input, &DropoutSpec::inference(), &mut rng)?;
    Ok(loss(cache.output())?.0)
}

/// Compares `analytic` (flattened parameter gradients) against central
/// differences with step `step`, dropout disabled.
pub fn compare_gradients<L>(
    net: &mut Network,
    loss: L,
    input: &[f64],
    analytic: &[f64],
    step: f64,
    tolerance: f64,
) -> Result<GradCheckReport>
where
    L: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let base = eval(net, input, &loss)?;
    let floor = 1e-6 * (1.0 + base.abs());
    let mut worst = 0.0;
    let mut worst_param = None;
    for (idx, &a) in analytic.iter().enumerate().take(net.param_count()) {
        let original = net.param(idx);
        net.set_param(idx, original + step);
        let plus = eval(net, input, &loss)?;
        net.set_param(idx, original - step);
        let minus = eval(net, input, &loss)?;
        net.set_param(idx, original);
        let numeric = (plus - minus) / (2.0 * step);
        let err = relative_error(a, numeric, floor);
        if err > worst || worst_param.is_none() {
            worst = err;
            worst_param = Some(idx);
        }
    }
    Ok(GradCheckReport {
        checked: analytic.len().min(net.param_count()),
        worst_rel_error: worst,
        worst_param,
        tolerance,
        passed: worst <= tolerance && analytic.len() == net.param_count(),
    })
}

/// Backpropagates `loss` through `net` at `input` and checks every trainable
/// parameter gradient against central differences.
pub fn fd_gradient_check<L>(net: &mut Network, loss: L, input: &[f64], step: f64, tolerance: f64) -> Result<GradCheckReport>
where
    L: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = net.forward(input, &DropoutSpec::inference(), &mut rng)?;
    let (_, grad_out) = loss(cache.output())?;
    let analytic = net.backward(&cache, &grad_out)?.flat();
    compare_gradients(net, loss, input, &analytic, step, tolerance)
}
