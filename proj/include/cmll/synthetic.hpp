#pragma once

#include <cstddef>
#include <cstdint>

#include "cmll/dataset.hpp"

namespace cmll {

/// Latent-factor multi-label task: features are [Z, noise] under a random rotation plus
/// isotropic noise, labels threshold Z * W_true + b with per-label biases placed at
/// quantiles so the expected cardinality is about `cardinality`.
struct SyntheticSpec {
  std::size_t instances = 600;
  std::size_t latent = 5;
  std::size_t noise_dims = 45;
  std::size_t labels = 15;
  double cardinality = 3.0;
  double noise_scale = 0.5;    // standard deviation of the nuisance coordinates
  double feature_noise = 0.1;  // standard deviation of the additive epsilon
  double label_noise = 0.0;    // standard deviation of noise added to label logits
  std::uint64_t seed = 0;
};

Dataset make_synthetic(const SyntheticSpec& spec);

}  // namespace cmll
