use crate::error::{Error, Result};

/// Max-pooling over non-overlapping windows of `p` values. A trailing
/// partial window pools whatever remains, so the output has
/// `ceil(len / p)` values.
pub fn max_pool(map: &[f64], p: usize) -> Result<Vec<f64>> {
    Ok(max_pool_with_argmax(map, p)?.0)
}

/// Pooled output length for an input of `len` values.
pub fn pooled_len(len: usize, p: usize) -> usize {
    len.div_ceil(p)
}

/// Max-pooling that also records, per window, the index of the maximum in
/// the original map. Ties resolve to the first (lowest) index so gradient
/// routing is deterministic.
pub fn max_pool_with_argmax(map: &[f64], p: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    if p < 1 {
        return Err(Error::invalid("pool length must be at least 1"));
    }
    if map.is_empty() {
        return Err(Error::invalid("cannot pool an empty map"));
    }
    let mut pooled = Vec::with_capacity(pooled_len(map.len(), p));
    let mut argmax = Vec::with_capacity(pooled.capacity());
    for window in map.chunks(p) {
        let mut best = 0;
        for (i, &v) in window.iter().enumerate() {
            if v > window[best] {
                best = i;
            }
        }
        let offset = argmax.len() * p;
        pooled.push(window[best]);
        argmax.push(offset + best);
    }
    Ok((pooled, argmax))
}

/// Routes pooled gradients back to the per-window argmax positions; all
/// other positions receive zero.
pub fn max_pool_backward(d_pooled: &[f64], argmax: &[usize], input_len: usize) -> Vec<f64> {
    let mut d_input = vec![0.0; input_len];
    for (&g, &idx) in d_pooled.iter().zip(argmax) {
        d_input[idx] += g;
    }
    d_input
}

/// Element-wise arithmetic mean over a sequence of equal-length state
/// vectors.
pub fn mean_pool_time(states: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = states.first().ok_or_else(|| Error::invalid("cannot mean-pool an empty sequence"))?;
    let dim = first.len();
    let mut out = vec![0.0; dim];
    for state in states {
        if state.len() != dim {
            return Err(Error::shape("mean-pool states must share one length"));
        }
        for (o, &v) in out.iter_mut().zip(state) {
            *o += v;
        }
    }
    let n = states.len() as f64;
    for o in &mut out {
        *o /= n;
    }
    Ok(out)
}

/// Backward of [`mean_pool_time`]: each time step receives `d_out / T`.
pub fn mean_pool_time_backward(d_out: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let n = steps as f64;
    let per_step: Vec<f64> = d_out.iter().map(|&g| g / n).collect();
    vec![per_step; steps]
}
