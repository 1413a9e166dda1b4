// SPDX-License-Identifier: Apache-2.0
#include "convrec/nnkit/network.hpp"

#include <algorithm>

#include "convrec/errors.hpp"

namespace convrec::nn {
namespace {

std::string layer_label(std::size_t index, const LayerSpec& spec) {
  return "layer " + std::to_string(index) + " (" + std::string(to_string(spec.kind)) + ")";
}

}  // namespace

Network::Network(Shape input_shape, std::vector<LayerSpec> specs, Rng& init)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)) {
  if (specs_.empty()) throw ConfigError("network needs at least one layer");
  Shape current = input_shape_;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    try {
      layers_.push_back(make_layer(specs_[i], current, init));
    } catch (const ConfigError& e) {
      throw ConfigError(layer_label(i, specs_[i]) + ": " + e.what());
    }
    if (specs_[i].kind == LayerKind::kConcat) {
      const std::size_t slot = specs_[i].slot;
      if (side_widths_.size() <= slot) side_widths_.resize(slot + 1, 0);
      if (side_widths_[slot] != 0 && side_widths_[slot] != specs_[i].width) {
        throw ConfigError(layer_label(i, specs_[i]) + ": slot " + std::to_string(slot) +
                          " used with two different widths");
      }
      side_widths_[slot] = specs_[i].width;
    }
    param_offsets_.push_back(offset);
    offset += layers_.back()->parameter_count();
    current = layers_.back()->output_shape();
  }
}

Network Network::clone() const {
  Rng scratch(0);
  Network copy(input_shape_, specs_, scratch);
  auto src = parameters();
  auto dst = copy.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = *src[i];
  return copy;
}

const Shape& Network::output_shape() const {
  if (layers_.empty()) throw UsageError("empty network has no output shape");
  return layers_.back()->output_shape();
}

Tensor Network::forward(const Tensor& x, std::span<const Tensor> side, Mode mode, Rng* rng,
                        ForwardCache* cache) const {
  if (layers_.empty()) throw UsageError("forward on an empty network");
  if (x.shape() != input_shape_) {
    throw ConfigError(layer_label(0, specs_.front()) + ": expected input shape " +
                      shape_string(input_shape_) + ", got " + shape_string(x.shape()));
  }
  if (side.size() < side_widths_.size()) {
    throw ConfigError("network expects " + std::to_string(side_widths_.size()) +
                      " side inputs, got " + std::to_string(side.size()));
  }
  const ForwardArgs args{mode, rng, side};
  if (cache) {
    cache->valid = false;
    cache->layers.assign(layers_.size(), LayerCache{});
    cache->side_shapes.clear();
    for (const Tensor& s : side) cache->side_shapes.push_back(s.shape());
  }
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      h = layers_[i]->forward(h, args, cache ? &cache->layers[i] : nullptr);
    } catch (const ConfigError& e) {
      throw ConfigError(layer_label(i, specs_[i]) + ": " + e.what());
    }
  }
  if (cache) cache->valid = true;
  return h;
}

BackwardResult Network::backward(const ForwardCache& cache, const Tensor& dy,
                                 std::vector<Tensor>& grads) const {
  if (!cache.valid || cache.layers.size() != layers_.size()) {
    throw UsageError("backward requires a cache filled by a forward pass on this network");
  }
  if (dy.size() != shape_size(output_shape())) {
    throw ConfigError("upstream gradient has " + std::to_string(dy.size()) +
                      " values, network output has " +
                      std::to_string(shape_size(output_shape())));
  }
  const std::size_t expected = param_offsets_.empty()
                                   ? 0
                                   : param_offsets_.back() + layers_.back()->parameter_count();
  if (grads.size() != expected) {
    throw UsageError("gradient buffer has " + std::to_string(grads.size()) +
                     " slots, network has " + std::to_string(expected));
  }
  BackwardResult result;
  for (const Shape& s : cache.side_shapes) result.side_grads.emplace_back(s);
  Tensor g = dy;
  g.reshape(output_shape());
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(g, cache.layers[i], grads.data() + param_offsets_[i],
                             result.side_grads);
  }
  result.input_grad = std::move(g);
  return result;
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) layer->collect_parameters(out);
  return out;
}

std::vector<const Tensor*> Network::parameters() const {
  std::vector<Tensor*> tmp;
  for (const auto& layer : layers_) layer->collect_parameters(tmp);
  return {tmp.begin(), tmp.end()};
}

std::vector<Tensor> Network::make_gradients() const {
  std::vector<Tensor> grads;
  for (const Tensor* p : parameters()) grads.emplace_back(p->shape());
  return grads;
}

std::size_t Network::scalar_parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* p : parameters()) n += p->size();
  return n;
}

bool Network::has_active_dropout() const noexcept {
  return std::any_of(specs_.begin(), specs_.end(), [](const LayerSpec& s) {
    return s.kind == LayerKind::kDropout && s.rate > 0.0;
  });
}

}  // namespace convrec::nn
