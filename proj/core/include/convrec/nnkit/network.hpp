// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "convrec/nnkit/layer_spec.hpp"
#include "convrec/nnkit/tensor.hpp"
#include "convrec/rng.hpp"

namespace convrec::nn {

/// kTrain and kMcDropout sample dropout masks; kEval makes dropout the identity.
enum class Mode { kTrain, kEval, kMcDropout };

struct LayerCache {
  Tensor input;
  Tensor aux;  // dropout mask, relu input, ...
  std::vector<LayerCache> inner;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  std::vector<Shape> side_shapes;
  bool valid = false;
};

struct ForwardArgs {
  Mode mode = Mode::kEval;
  Rng* rng = nullptr;
  std::span<const Tensor> side;
};

struct BackwardResult {
  Tensor input_grad;
  std::vector<Tensor> side_grads;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual const LayerSpec& spec() const noexcept = 0;
  virtual const Shape& output_shape() const noexcept = 0;
  /// `cache` may be null for inference-only passes.
  virtual Tensor forward(const Tensor& x, const ForwardArgs& args, LayerCache* cache) const = 0;
  /// Accumulates parameter gradients into `grads` (one slot per parameter
  /// tensor, in parameters() order) and side-input gradients into `side_grads`.
  virtual Tensor backward(const Tensor& dy, const LayerCache& cache, Tensor* grads,
                          std::vector<Tensor>& side_grads) const = 0;
  virtual void collect_parameters(std::vector<Tensor*>& out) { (void)out; }
  virtual std::size_t parameter_count() const noexcept { return 0; }
};

/// A feed-forward stack of layers over one primary input plus optional side
/// inputs consumed by concat layers. Parameters are owned by the layers;
/// a Network is move-only and copyable through clone().
class Network {
 public:
  Network() = default;
  /// Builds layers for `input_shape`; parameters initialised uniformly in
  /// [-1/sqrt(fan_in), 1/sqrt(fan_in)] from `init`. Throws ConfigError naming
  /// the offending layer on any shape mismatch.
  Network(Shape input_shape, std::vector<LayerSpec> specs, Rng& init);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;
  ~Network() = default;

  Network clone() const;

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const;
  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }
  /// Widths expected for each concat slot (size = max slot + 1).
  const std::vector<std::size_t>& side_widths() const noexcept { return side_widths_; }

  /// Deterministic given (parameters, x, side, mode, rng state). Dropout in
  /// kTrain/kMcDropout draws from `rng`, which must then be non-null unless
  /// every dropout rate is zero. Pass `cache` to enable backward().
  Tensor forward(const Tensor& x, std::span<const Tensor> side, Mode mode, Rng* rng,
                 ForwardCache* cache = nullptr) const;
  Tensor forward(const Tensor& x, Mode mode = Mode::kEval, Rng* rng = nullptr,
                 ForwardCache* cache = nullptr) const {
    return forward(x, {}, mode, rng, cache);
  }

  /// Requires a cache filled by forward(); accumulates into `grads`
  /// (see make_gradients()).
  BackwardResult backward(const ForwardCache& cache, const Tensor& dy,
                          std::vector<Tensor>& grads) const;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::vector<Tensor> make_gradients() const;
  std::size_t scalar_parameter_count() const;
  bool has_active_dropout() const noexcept;

 private:
  Shape input_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::size_t> param_offsets_;
  std::vector<std::size_t> side_widths_;
};

/// Builds one layer for `input`; exposed for composing and testing.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& init);

}  // namespace convrec::nn
