//! Parallel driver for the Monte-Carlo engine. Batches are evaluated on the
//! rayon pool and combined in batch order, so the result is bit-identical to
//! the sequential [`memspin_core::montecarlo::evolve_montecarlo`].

use memspin_core::evolution::EvolutionSpec;
use memspin_core::montecarlo::{combine_batches, run_batch, MonteCarloConfig, MonteCarloResult};
use memspin_core::spin::SpinOperators;
use memspin_core::Result;
use rayon::prelude::*;

pub fn evolve_montecarlo_parallel(spec: &EvolutionSpec, cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    cfg.validate(spec)?;
    let ops = SpinOperators::new(spec.system);
    let sums = (0..cfg.n_batches)
        .into_par_iter()
        .map(|b| run_batch(spec, &ops, cfg, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_batches(cfg, &sums))
}

#[cfg(test)]
mod tests {
    use super::*;
    use memspin_core::montecarlo::evolve_montecarlo;
    use memspin_core::noise::{Channel, NoiseModel};
    use memspin_core::spin::SpinSystem;
    use memspin_core::states::make_css;

    #[test]
    fn parallel_equals_sequential() {
        let s = SpinSystem::new(3).unwrap();
        let noise = NoiseModel::isotropic(Channel::ornstein_uhlenbeck(1.0, 1.0).unwrap());
        let spec = EvolutionSpec::new(s, make_css(s), noise, 1.0, 0.3).unwrap();
        let cfg = MonteCarloConfig::new(300, 0.01, 7).with_batches(30);
        let a = evolve_montecarlo(&spec, &cfg).unwrap();
        let b = evolve_montecarlo_parallel(&spec, &cfg).unwrap();
        assert_eq!(a.rho, b.rho);
        assert_eq!(a.stderr_re, b.stderr_re);
        assert_eq!(a.stderr_im, b.stderr_im);
    }
}
