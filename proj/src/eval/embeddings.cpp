#include "wearssl/eval/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wearssl::eval {

Encoder network_encoder(const nn::Network& network) {
  return [&network](const nn::Tensor& batch) { return network.infer(batch); };
}

EmbeddingSet extract_embeddings(const Encoder& encoder, const std::vector<data::Window>& windows,
                                std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("embedding batch size must be >= 1");
  EmbeddingSet out;
  std::vector<double> values;
  std::size_t dim = 0;
  for (std::size_t b = 0; b < windows.size(); b += batch_size) {
    const std::size_t e = std::min(b + batch_size, windows.size());
    std::vector<const data::Window*> chunk;
    for (std::size_t i = b; i < e; ++i) chunk.push_back(&windows[i]);
    const nn::Tensor h = encoder(data::batch_values(chunk));
    if (h.rank() != 2 || h.dim(0) != chunk.size())
      throw std::runtime_error("encoder returned shape " + nn::to_string(h.shape()) + " for " +
                               std::to_string(chunk.size()) + " windows");
    dim = h.dim(1);
    for (std::size_t r = 0; r < chunk.size(); ++r)
      for (std::size_t j = 0; j < dim; ++j)
        if (!std::isfinite(h.at(r, j)))
          throw std::runtime_error("non-finite embedding for window " + std::to_string(b + r) + " (participant '" +
                                   windows[b + r].participant_id + "')");
    values.insert(values.end(), h.values().begin(), h.values().end());
  }
  out.matrix = nn::Tensor({windows.size(), dim}, std::move(values));
  for (const data::Window& w : windows) {
    out.labels.push_back(w.labels);
    out.splits.push_back(w.split);
    out.participant_ids.push_back(w.participant_id);
  }
  return out;
}

Standardizer fit_standardizer(const nn::Tensor& m, const std::vector<std::size_t>& rows, double std_floor) {
  const std::size_t d = m.dim(1);
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (std::size_t r : rows)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += m.at(r, j) / n;
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (std::size_t r : rows) {
      const double x = m.at(r, j) - s.mean[j];
      ss += x * x;
    }
    s.scale[j] = std::max(std::sqrt(ss / n), std_floor);
  }
  return s;
}

nn::Tensor standardize(const Standardizer& s, const nn::Tensor& m) {
  nn::Tensor out(m.shape());
  const std::size_t d = m.dim(1);
  for (std::size_t r = 0; r < m.dim(0); ++r)
    for (std::size_t j = 0; j < d; ++j) out.at(r, j) = (m.at(r, j) - s.mean[j]) / s.scale[j];
  return out;
}

}  // namespace wearssl::eval
