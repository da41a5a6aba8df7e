#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wearssl/data/types.hpp"
#include "wearssl/nn/network.hpp"

namespace wearssl::eval {

/// Maps a (batch, C, L) window tensor to (batch, d) embeddings.
using Encoder = std::function<nn::Tensor(const nn::Tensor&)>;

/// Inference-mode encoder over a network held by reference.
Encoder network_encoder(const nn::Network& network);

/// Row i describes window i.
struct EmbeddingSet {
  nn::Tensor matrix;  // (n, d)
  std::vector<data::Labels> labels;
  std::vector<data::Split> splits;
  std::vector<std::string> participant_ids;

  std::size_t rows() const { return labels.size(); }
  std::size_t dim() const { return matrix.rank() == 2 ? matrix.dim(1) : 0; }
};

/// Encodes windows in chunks of `batch_size`. Throws std::runtime_error
/// naming the first window whose embedding is not finite.
EmbeddingSet extract_embeddings(const Encoder& encoder, const std::vector<data::Window>& windows,
                                std::size_t batch_size = 256);

/// Per-dimension z-score fitted on one subset of rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // std, floored
};

Standardizer fit_standardizer(const nn::Tensor& matrix, const std::vector<std::size_t>& rows,
                              double std_floor = 1e-8);
nn::Tensor standardize(const Standardizer& s, const nn::Tensor& matrix);

}  // namespace wearssl::eval
