#include "wearssl/nn/network.hpp"

#include <cmath>
#include <sstream>

namespace wearssl::nn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Network::Network(Shape sample_shape, std::vector<LayerSpec> specs, Rng& init_rng)
    : input_shape_(std::move(sample_shape)), specs_(std::move(specs)) {
  Shape shape = input_shape_;
  layers_.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    auto [layer, out] = make_layer(specs_[i], shape, init_rng, i);
    layers_.push_back(std::move(layer));
    shape = std::move(out);
  }
  output_shape_ = std::move(shape);
}

Tensor Network::forward(const Tensor& batch, Mode mode, Rng& rng) {
  Tensor x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = std::visit(Overloaded{
                       [&](Conv1d& l) { return l.forward(x, i); },
                       [&](Dense& l) { return l.forward(x, i); },
                       [&](BatchNorm1d& l) { return l.forward(x, mode, i); },
                       [&](Dropout& l) { return l.forward(x, mode, rng); },
                       [&](Relu& l) { return l.forward(x); },
                       [&](Sigmoid& l) { return l.forward(x); },
                       [&](GlobalMaxPool& l) { return l.forward(x, i); },
                   },
                   layers_[i]);
  }
  return x;
}

Tensor Network::infer(const Tensor& batch) const {
  Tensor x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = std::visit(Overloaded{
                       [&](const Conv1d& l) { return l.apply(x, i); },
                       [&](const Dense& l) { return l.apply(x, i); },
                       [&](const BatchNorm1d& l) { return l.apply(x, i); },
                       [&](const Dropout&) { return x; },
                       [&](const Relu&) { return Relu::apply(x); },
                       [&](const Sigmoid&) { return Sigmoid::apply(x); },
                       [&](const GlobalMaxPool&) { return GlobalMaxPool::apply(x, i); },
                   },
                   layers_[i]);
  }
  return x;
}

Tensor Network::backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = std::visit([&](auto& l) { return l.backward(g); }, layers_[i]);
  }
  return g;
}

void Network::zero_grad() {
  for (Parameter* p : parameters()) p->grad.fill(0.0);
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (Layer& layer : layers_) {
    std::visit(Overloaded{
                   [&](Conv1d& l) { out.insert(out.end(), {&l.weight, &l.bias}); },
                   [&](Dense& l) { out.insert(out.end(), {&l.weight, &l.bias}); },
                   [&](BatchNorm1d& l) { out.insert(out.end(), {&l.gamma, &l.beta}); },
                   [](auto&) {},
               },
               layer);
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  auto mutable_params = const_cast<Network*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::vector<Tensor*> Network::buffers() {
  std::vector<Tensor*> out;
  for (Layer& layer : layers_) {
    if (auto* bn = std::get_if<BatchNorm1d>(&layer)) out.insert(out.end(), {&bn->running_mean, &bn->running_var});
  }
  return out;
}

std::vector<const Tensor*> Network::buffers() const {
  auto mutable_buffers = const_cast<Network*>(this)->buffers();
  return {mutable_buffers.begin(), mutable_buffers.end()};
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

std::uint64_t parameter_hash(std::span<const Parameter* const> params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Parameter* p : params) h = fingerprint(p->value, h);
  return h;
}

std::uint64_t parameter_hash(const Network& net) {
  const auto params = net.parameters();
  return parameter_hash(params);
}

NonFiniteLoss::NonFiniteLoss(double value)
    : std::runtime_error([value] {
        std::ostringstream os;
        os << "loss is not finite: " << value;
        return os.str();
      }()),
      value_(value) {}

double compute_gradients(Network& net, const Tensor& batch, const LossTail& tail, Mode mode, Rng& rng) {
  net.zero_grad();
  const Tensor out = net.forward(batch, mode, rng);
  LossValue loss = tail(out);
  if (!std::isfinite(loss.value)) throw NonFiniteLoss(loss.value);
  if (loss.grad.shape() != out.shape())
    throw std::invalid_argument("loss gradient shape " + to_string(loss.grad.shape()) +
                                " does not match network output " + to_string(out.shape()));
  net.backward(loss.grad);
  for (const Parameter* p : net.parameters())
    if (!p->grad.all_finite()) throw std::runtime_error("non-finite gradient after backward pass");
  return loss.value;
}

}  // namespace wearssl::nn
