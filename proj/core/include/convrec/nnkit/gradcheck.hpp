// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "convrec/nnkit/network.hpp"

namespace convrec::nn {

/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // human-readable location of the worst entry
};

/// Compares backward() against central differences of L = <projection, f(x)>
/// for every parameter, the primary input and every side input. The forward
/// pass runs in kTrain mode with a fresh Rng(dropout_seed) each evaluation so
/// dropout masks are identical across perturbations.
GradCheckReport check_network_gradients(Network& net, const Tensor& x,
                                        std::span<const Tensor> side,
                                        const Tensor& projection, std::uint64_t dropout_seed,
                                        double step = 1e-5);

/// Central-difference check for an arbitrary scalar function of a flat vector.
GradCheckReport check_function_gradient(const std::function<double(std::span<const double>)>& f,
                                        std::span<const double> point,
                                        std::span<const double> analytic, double step = 1e-5);

}  // namespace convrec::nn
