#pragma once

#include <functional>

#include <Eigen/Dense>

#include <tbresnet/random.hpp>
#include <tbresnet/synthetic.hpp>
#include <tbresnet/train.hpp>

namespace tbtest {

using namespace tbresnet;

inline DatasetSchema binary_schema() {
  DatasetSchema s;
  s.n_alternatives = 2;
  s.alt_attributes = {{0, "x"}};
  return s;
}

inline TrainConfig tiny_config(int iterations = 50, int width = 8) {
  TrainConfig c;
  c.depth = 3;
  c.width = width;
  c.sgd.iterations = iterations;
  c.sgd.batch_size = 32;
  return c;
}

/// Synthetic draw for a scenario with the default design.
inline ChoiceDataset sample(Scenario s, Eigen::Index n, std::uint64_t seed, double gamma = 0.0) {
  SyntheticDesign d = default_design(s);
  d.nonlinear_strength = gamma;
  return generate_synthetic(d, n, Noise::gumbel, seed);
}

/// Central difference of f at v along coordinate i.
inline double central_difference(const std::function<double()>& f, double& v, double h) {
  const double keep = v;
  v = keep + h;
  const double up = f();
  v = keep - h;
  const double down = f();
  v = keep;
  return (up - down) / (2.0 * h);
}

}  // namespace tbtest
