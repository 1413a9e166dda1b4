// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <memory>

#include "convrec/errors.hpp"
#include "convrec/nnkit/network.hpp"

namespace convrec::nn {
namespace {

void init_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = (2.0 * uniform01(rng) - 1.0) * bound;
}

[[noreturn]] void shape_error(const LayerSpec& spec, const std::string& what) {
  throw ConfigError(std::string(to_string(spec.kind)) + " layer: " + what);
}

class Dense final : public Layer {
 public:
  Dense(const LayerSpec& spec, const Shape& input, Rng& init) : spec_(spec) {
    if (input.size() != 1) {
      shape_error(spec, "expects a rank-1 input, got " + shape_string(input));
    }
    in_ = input[0];
    out_shape_ = {spec.units};
    weight_ = Tensor({spec.units, in_});
    bias_ = Tensor({spec.units});
    init_uniform(weight_, in_, init);
    init_uniform(bias_, in_, init);
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs&, LayerCache* cache) const override {
    const std::size_t out = spec_.units;
    Tensor y({out});
    const double* w = weight_.data();
    const double* xv = x.data();
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = w + o * in_;
      double acc = bias_[o];
      for (std::size_t i = 0; i < in_; ++i) acc += wr[i] * xv[i];
      y[o] = acc;
    }
    if (cache) cache->input = x;
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor* grads,
                  std::vector<Tensor>&) const override {
    const std::size_t out = spec_.units;
    Tensor dx({in_});
    double* gw = grads[0].data();
    double* gb = grads[1].data();
    const double* w = weight_.data();
    const double* xv = cache.input.data();
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dy[o];
      gb[o] += g;
      if (g == 0.0) continue;
      double* gwr = gw + o * in_;
      const double* wr = w + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        gwr[i] += g * xv[i];
        dx[i] += g * wr[i];
      }
    }
    return dx;
  }

  void collect_parameters(std::vector<Tensor*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  std::size_t parameter_count() const noexcept override { return 2; }

 private:
  LayerSpec spec_;
  std::size_t in_ = 0;
  Shape out_shape_;
  Tensor weight_;  // [units, in]
  Tensor bias_;    // [units]
};

/// 2-D convolution with zero "same" padding of kernel/2 on each side.
class Conv2d final : public Layer {
 public:
  Conv2d(const LayerSpec& spec, const Shape& input, Rng& init) : spec_(spec) {
    if (input.size() != 3) {
      shape_error(spec, "expects a [channels, height, width] input, got " + shape_string(input));
    }
    cin_ = input[0];
    h_ = input[1];
    w_ = input[2];
    pad_ = spec.kernel / 2;
    if (h_ + 2 * pad_ < spec.kernel || w_ + 2 * pad_ < spec.kernel) {
      shape_error(spec, "kernel " + std::to_string(spec.kernel) + " larger than padded input " +
                            shape_string(input));
    }
    ho_ = (h_ + 2 * pad_ - spec.kernel) / spec.stride + 1;
    wo_ = (w_ + 2 * pad_ - spec.kernel) / spec.stride + 1;
    out_shape_ = {spec.channels, ho_, wo_};
    const std::size_t k = spec.kernel;
    weight_ = Tensor({spec.channels, cin_, k, k});
    bias_ = Tensor({spec.channels});
    init_uniform(weight_, cin_ * k * k, init);
    init_uniform(bias_, cin_ * k * k, init);
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs&, LayerCache* cache) const override {
    Tensor y(out_shape_);
    const std::size_t k = spec_.kernel;
    for (std::size_t co = 0; co < spec_.channels; ++co) {
      double* yc = y.data() + co * ho_ * wo_;
      std::fill(yc, yc + ho_ * wo_, bias_[co]);
      for (std::size_t ci = 0; ci < cin_; ++ci) {
        const double* xc = x.data() + ci * h_ * w_;
        const double* wk = weight_.data() + (co * cin_ + ci) * k * k;
        for (std::size_t ky = 0; ky < k; ++ky) {
          for (std::size_t kx = 0; kx < k; ++kx) {
            const double wv = wk[ky * k + kx];
            const auto [ox0, ox1] = valid_range(kx, w_, wo_);
            for (std::size_t oy = 0; oy < ho_; ++oy) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * spec_.stride + ky) -
                                        static_cast<std::ptrdiff_t>(pad_);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h_)) continue;
              const double* xr = xc + static_cast<std::size_t>(iy) * w_;
              double* yr = yc + oy * wo_;
              for (std::size_t ox = ox0; ox < ox1; ++ox) {
                yr[ox] += wv * xr[ox * spec_.stride + kx - pad_];
              }
            }
          }
        }
      }
    }
    if (cache) cache->input = x;
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor* grads,
                  std::vector<Tensor>&) const override {
    const Tensor& x = cache.input;
    Tensor dx(x.shape());
    const std::size_t k = spec_.kernel;
    double* gw = grads[0].data();
    double* gb = grads[1].data();
    for (std::size_t co = 0; co < spec_.channels; ++co) {
      const double* dyc = dy.data() + co * ho_ * wo_;
      double sum = 0.0;
      for (std::size_t i = 0; i < ho_ * wo_; ++i) sum += dyc[i];
      gb[co] += sum;
      for (std::size_t ci = 0; ci < cin_; ++ci) {
        const double* xc = x.data() + ci * h_ * w_;
        double* dxc = dx.data() + ci * h_ * w_;
        const std::size_t base = (co * cin_ + ci) * k * k;
        for (std::size_t ky = 0; ky < k; ++ky) {
          for (std::size_t kx = 0; kx < k; ++kx) {
            const double wv = weight_[base + ky * k + kx];
            double gacc = 0.0;
            const auto [ox0, ox1] = valid_range(kx, w_, wo_);
            for (std::size_t oy = 0; oy < ho_; ++oy) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * spec_.stride + ky) -
                                        static_cast<std::ptrdiff_t>(pad_);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h_)) continue;
              const double* xr = xc + static_cast<std::size_t>(iy) * w_;
              double* dxr = dxc + static_cast<std::size_t>(iy) * w_;
              const double* dyr = dyc + oy * wo_;
              for (std::size_t ox = ox0; ox < ox1; ++ox) {
                const std::size_t ix = ox * spec_.stride + kx - pad_;
                gacc += dyr[ox] * xr[ix];
                dxr[ix] += wv * dyr[ox];
              }
            }
            gw[base + ky * k + kx] += gacc;
          }
        }
      }
    }
    return dx;
  }

  void collect_parameters(std::vector<Tensor*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  std::size_t parameter_count() const noexcept override { return 2; }

 private:
  // Output columns [first, last) whose input column ox*stride + kx - pad is in range.
  std::pair<std::size_t, std::size_t> valid_range(std::size_t kx, std::size_t in_w,
                                                  std::size_t out_w) const {
    const std::size_t s = spec_.stride;
    std::size_t first = 0;
    if (kx < pad_) first = (pad_ - kx + s - 1) / s;
    // need ox*s + kx - pad <= in_w - 1
    const std::ptrdiff_t lim = static_cast<std::ptrdiff_t>(in_w) - 1 +
                               static_cast<std::ptrdiff_t>(pad_) - static_cast<std::ptrdiff_t>(kx);
    std::size_t last = 0;
    if (lim >= 0) last = std::min(out_w, static_cast<std::size_t>(lim) / s + 1);
    if (first > last) first = last;
    return {first, last};
  }

  LayerSpec spec_;
  std::size_t cin_ = 0, h_ = 0, w_ = 0, ho_ = 0, wo_ = 0, pad_ = 0;
  Shape out_shape_;
  Tensor weight_;  // [out_channels, in_channels, k, k]
  Tensor bias_;    // [out_channels]
};

class Relu final : public Layer {
 public:
  Relu(const LayerSpec& spec, const Shape& input) : spec_(spec), out_shape_(input) {}

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs&, LayerCache* cache) const override {
    Tensor y = x;
    for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
    if (cache) cache->input = x;
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor*,
                  std::vector<Tensor>&) const override {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(cache.input[i] > 0.0)) dx[i] = 0.0;
    }
    return dx;
  }

 private:
  LayerSpec spec_;
  Shape out_shape_;
};

/// Inverted dropout: kept units are scaled by 1/(1-rate).
class Dropout final : public Layer {
 public:
  Dropout(const LayerSpec& spec, const Shape& input) : spec_(spec), out_shape_(input) {}

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs& args, LayerCache* cache) const override {
    const bool active = args.mode != Mode::kEval && spec_.rate > 0.0;
    if (!active) {
      if (cache) cache->aux = Tensor();
      return x;
    }
    if (args.rng == nullptr) {
      throw UsageError("dropout layer: sampling a mask requires an rng");
    }
    const double keep_scale = 1.0 / (1.0 - spec_.rate);
    Tensor mask(x.shape());
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      mask[i] = uniform01(*args.rng) >= spec_.rate ? keep_scale : 0.0;
      y[i] = x[i] * mask[i];
    }
    if (cache) cache->aux = std::move(mask);
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor*,
                  std::vector<Tensor>&) const override {
    if (cache.aux.empty()) return dy;
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= cache.aux[i];
    return dx;
  }

 private:
  LayerSpec spec_;
  Shape out_shape_;
};

class Reshape final : public Layer {
 public:
  Reshape(const LayerSpec& spec, const Shape& input) : spec_(spec), in_shape_(input) {
    out_shape_ = spec.shape.empty() ? Shape{shape_size(input)} : spec.shape;
    if (shape_size(out_shape_) != shape_size(input)) {
      shape_error(spec, "cannot reshape " + shape_string(input) + " to " +
                            shape_string(out_shape_));
    }
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs&, LayerCache*) const override {
    Tensor y = x;
    y.reshape(out_shape_);
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache&, Tensor*,
                  std::vector<Tensor>&) const override {
    Tensor dx = dy;
    dx.reshape(in_shape_);
    return dx;
  }

 private:
  LayerSpec spec_;
  Shape in_shape_;
  Shape out_shape_;
};

/// Appends side input `slot` (flattened, `width` values) to a rank-1 input.
class Concat final : public Layer {
 public:
  Concat(const LayerSpec& spec, const Shape& input) : spec_(spec) {
    if (input.size() != 1) {
      shape_error(spec, "expects a rank-1 input, got " + shape_string(input));
    }
    in_ = input[0];
    out_shape_ = {in_ + spec.width};
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs& args, LayerCache*) const override {
    if (spec_.slot >= args.side.size()) {
      shape_error(spec_, "side input slot " + std::to_string(spec_.slot) + " not provided");
    }
    const Tensor& side = args.side[spec_.slot];
    if (side.size() != spec_.width) {
      shape_error(spec_, "side input slot " + std::to_string(spec_.slot) + " has " +
                             std::to_string(side.size()) + " values, expected " +
                             std::to_string(spec_.width));
    }
    Tensor y(out_shape_);
    std::copy(x.values().begin(), x.values().end(), y.data());
    std::copy(side.values().begin(), side.values().end(), y.data() + in_);
    return y;
  }

  Tensor backward(const Tensor& dy, const LayerCache&, Tensor*,
                  std::vector<Tensor>& side_grads) const override {
    Tensor dx({in_});
    std::copy(dy.data(), dy.data() + in_, dx.data());
    Tensor& g = side_grads.at(spec_.slot);
    for (std::size_t i = 0; i < spec_.width; ++i) g[i] += dy[in_ + i];
    return dx;
  }

 private:
  LayerSpec spec_;
  std::size_t in_ = 0;
  Shape out_shape_;
};

/// out = relu(conv2(relu(conv1(x)))) + skip(x), where skip is the identity when
/// shapes agree and a 1x1 strided convolution otherwise.
class ResidualBlock final : public Layer {
 public:
  ResidualBlock(const LayerSpec& spec, const Shape& input, Rng& init) : spec_(spec) {
    if (input.size() != 3) {
      shape_error(spec, "expects a [channels, height, width] input, got " + shape_string(input));
    }
    const LayerSpec c1 = LayerSpec::conv2d(spec.channels, spec.kernel, spec.stride);
    const LayerSpec c2 = LayerSpec::conv2d(spec.channels, spec.kernel, 1);
    conv1_ = std::make_unique<Conv2d>(c1, input, init);
    relu1_ = std::make_unique<Relu>(LayerSpec::relu(), conv1_->output_shape());
    conv2_ = std::make_unique<Conv2d>(c2, conv1_->output_shape(), init);
    relu2_ = std::make_unique<Relu>(LayerSpec::relu(), conv2_->output_shape());
    out_shape_ = conv2_->output_shape();
    if (input != out_shape_) {
      projection_ =
          std::make_unique<Conv2d>(LayerSpec::conv2d(spec.channels, 1, spec.stride), input, init);
      if (projection_->output_shape() != out_shape_) {
        shape_error(spec, "projection shape " + shape_string(projection_->output_shape()) +
                              " does not match inner path " + shape_string(out_shape_));
      }
    }
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  const Shape& output_shape() const noexcept override { return out_shape_; }

  Tensor forward(const Tensor& x, const ForwardArgs& args, LayerCache* cache) const override {
    LayerCache* c = nullptr;
    if (cache) {
      cache->inner.assign(5, LayerCache{});
      c = cache->inner.data();
    }
    Tensor h = conv1_->forward(x, args, c ? &c[0] : nullptr);
    h = relu1_->forward(h, args, c ? &c[1] : nullptr);
    h = conv2_->forward(h, args, c ? &c[2] : nullptr);
    h = relu2_->forward(h, args, c ? &c[3] : nullptr);
    Tensor skip = projection_ ? projection_->forward(x, args, c ? &c[4] : nullptr) : x;
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += skip[i];
    return h;
  }

  Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor* grads,
                  std::vector<Tensor>& side_grads) const override {
    const auto& c = cache.inner;
    Tensor g = relu2_->backward(dy, c[3], nullptr, side_grads);
    g = conv2_->backward(g, c[2], grads + 2, side_grads);
    g = relu1_->backward(g, c[1], nullptr, side_grads);
    Tensor dx = conv1_->backward(g, c[0], grads, side_grads);
    if (projection_) {
      Tensor ds = projection_->backward(dy, c[4], grads + 4, side_grads);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += ds[i];
    } else {
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    }
    return dx;
  }

  void collect_parameters(std::vector<Tensor*>& out) override {
    conv1_->collect_parameters(out);
    conv2_->collect_parameters(out);
    if (projection_) projection_->collect_parameters(out);
  }
  std::size_t parameter_count() const noexcept override { return projection_ ? 6 : 4; }

 private:
  LayerSpec spec_;
  Shape out_shape_;
  std::unique_ptr<Conv2d> conv1_;
  std::unique_ptr<Relu> relu1_;
  std::unique_ptr<Conv2d> conv2_;
  std::unique_ptr<Relu> relu2_;
  std::unique_ptr<Conv2d> projection_;
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& init) {
  spec.validate();
  switch (spec.kind) {
    case LayerKind::kDense:
      return std::make_unique<Dense>(spec, input, init);
    case LayerKind::kConv2d:
      return std::make_unique<Conv2d>(spec, input, init);
    case LayerKind::kRelu:
      return std::make_unique<Relu>(spec, input);
    case LayerKind::kDropout:
      return std::make_unique<Dropout>(spec, input);
    case LayerKind::kResidualBlock:
      return std::make_unique<ResidualBlock>(spec, input, init);
    case LayerKind::kReshape:
      return std::make_unique<Reshape>(spec, input);
    case LayerKind::kConcat:
      return std::make_unique<Concat>(spec, input);
  }
  throw ConfigError("unhandled layer kind");
}

}  // namespace convrec::nn
