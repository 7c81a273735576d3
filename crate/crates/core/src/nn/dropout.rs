use crate::error::{Error, Result};
use rand::Rng;

/// The kept/dropped pattern of one dropout application, needed to route
/// gradients in the backward pass.
#[derive(Clone, Debug)]
pub struct DropoutMask {
    kept: Vec<bool>,
    scale: f64,
}

/// Inverted dropout. In training mode each element is zeroed with
/// probability `rate` and survivors are scaled by `1/(1-rate)`, so the
/// expectation matches the input; in inference mode the input passes through
/// untouched and no mask is returned.
pub fn dropout_forward<R: Rng>(
    x: &[f64],
    rate: f64,
    rng: &mut R,
    training: bool,
) -> Result<(Vec<f64>, Option<DropoutMask>)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::invalid(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    if !training || rate == 0.0 {
        return Ok((x.to_vec(), None));
    }
    let scale = 1.0 / (1.0 - rate);
    let kept: Vec<bool> = x.iter().map(|_| rng.random::<f64>() >= rate).collect();
    let out = x
        .iter()
        .zip(&kept)
        .map(|(&v, &keep)| if keep { v * scale } else { 0.0 })
        .collect();
    Ok((out, Some(DropoutMask { kept, scale })))
}

/// Applies the forward mask to the output gradient.
pub fn dropout_backward(d_out: &[f64], mask: &DropoutMask) -> Vec<f64> {
    d_out
        .iter()
        .zip(&mask.kept)
        .map(|(&g, &keep)| if keep { g * mask.scale } else { 0.0 })
        .collect()
}
