// SPDX-License-Identifier: Apache-2.0
#include "convrec/nnkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace convrec::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

void record(GradCheckReport& report, double analytic, double numeric, const std::string& where) {
  const double err = relative_error(analytic, numeric);
  ++report.checked;
  if (report.worst.empty() || err > report.max_relative_error) {
    report.max_relative_error = err;
    report.worst = where + ": analytic " + std::to_string(analytic) + " numeric " +
                   std::to_string(numeric);
  }
}

double projected(const Tensor& y, const Tensor& projection) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * projection[i];
  return s;
}

}  // namespace

GradCheckReport check_network_gradients(Network& net, const Tensor& x,
                                        std::span<const Tensor> side,
                                        const Tensor& projection, std::uint64_t dropout_seed,
                                        double step) {
  std::vector<Tensor> side_copy(side.begin(), side.end());
  Tensor input = x;

  auto loss = [&]() {
    Rng rng(dropout_seed);
    return projected(net.forward(input, side_copy, Mode::kTrain, &rng), projection);
  };

  ForwardCache cache;
  Rng rng(dropout_seed);
  net.forward(input, side_copy, Mode::kTrain, &rng, &cache);
  auto grads = net.make_gradients();
  Tensor dy = projection;
  const BackwardResult back = net.backward(cache, dy, grads);

  GradCheckReport report;
  auto probe = [&](double& slot, double analytic, const std::string& where) {
    const double saved = slot;
    slot = saved + step;
    const double up = loss();
    slot = saved - step;
    const double down = loss();
    slot = saved;
    record(report, analytic, (up - down) / (2.0 * step), where);
  };

  auto params = net.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->size(); ++i) {
      probe((*params[p])[i], grads[p][i],
            "param " + std::to_string(p) + "[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    probe(input[i], back.input_grad[i], "input[" + std::to_string(i) + "]");
  }
  for (std::size_t s = 0; s < side_copy.size(); ++s) {
    for (std::size_t i = 0; i < side_copy[s].size(); ++i) {
      probe(side_copy[s][i], back.side_grads[s][i],
            "side " + std::to_string(s) + "[" + std::to_string(i) + "]");
    }
  }
  return report;
}

GradCheckReport check_function_gradient(const std::function<double(std::span<const double>)>& f,
                                        std::span<const double> point,
                                        std::span<const double> analytic, double step) {
  std::vector<double> x(point.begin(), point.end());
  GradCheckReport report;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f(x);
    x[i] = saved - step;
    const double down = f(x);
    x[i] = saved;
    record(report, analytic[i], (up - down) / (2.0 * step), "x[" + std::to_string(i) + "]");
  }
  return report;
}

}  // namespace convrec::nn
