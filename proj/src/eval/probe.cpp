#include "wearssl/eval/probe.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "wearssl/nn/eigen_view.hpp"
#include "wearssl/nn/rng.hpp"

namespace wearssl::eval {

using nn::Tensor;

double probe_objective(const Tensor& x, const std::vector<int>& y, std::size_t K, double l2, const double* theta,
                       double* gradient) {
  const std::size_t n = x.dim(0), d = x.dim(1);
  const auto X = nn::const_matrix(x.data(), n, d);
  const auto W = nn::const_matrix(theta, d, K);
  const auto b = nn::const_vector(theta + d * K, K);
  nn::RowMatrix P = X * W;
  P.rowwise() += b.transpose();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = P.row(static_cast<Eigen::Index>(i));
    const double mx = row.maxCoeff();
    row.array() -= mx;
    const double lse = std::log(row.array().exp().sum());
    loss -= row(y[i]) - lse;
    row.array() = (row.array() - lse).exp();
    row(y[i]) -= 1.0;  // P - Y
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + 0.5 * l2 * W.squaredNorm();
  if (gradient != nullptr) {
    auto gW = nn::matrix(gradient, d, K);
    gW.noalias() = X.transpose() * P * inv_n;
    gW += l2 * W;
    nn::vector(gradient + d * K, K) = P.colwise().sum().transpose() * inv_n;
  }
  return loss;
}

namespace {

class ProbeCost final : public ceres::FirstOrderFunction {
 public:
  ProbeCost(const Tensor& x, const std::vector<int>& y, std::size_t K, double l2) : x_(x), y_(y), K_(K), l2_(l2) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    *cost = probe_objective(x_, y_, K_, l2_, parameters, gradient);
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return static_cast<int>((x_.dim(1) + 1) * K_); }

 private:
  const Tensor& x_;
  const std::vector<int>& y_;
  std::size_t K_;
  double l2_;
};

}  // namespace

ProbeModel fit_probe(const Tensor& x, const std::vector<int>& y, std::size_t K, const ProbeConfig& config,
                     const std::vector<double>& init) {
  if (x.rank() != 2 || x.dim(0) != y.size()) throw std::invalid_argument("probe needs (n, d) features and n labels");
  if (!(config.l2 >= 0.0)) throw std::invalid_argument("probe l2 must be >= 0");
  for (int label : y)
    if (label < 0 || static_cast<std::size_t>(label) >= K) throw std::invalid_argument("probe label out of range");
  if (std::set<int>(y.begin(), y.end()).size() < 2)
    throw std::invalid_argument("probe training labels contain a single class");
  const std::size_t d = x.dim(1), n_params = (d + 1) * K;
  std::vector<double> theta = init.empty() ? std::vector<double>(n_params, 0.0) : init;
  if (theta.size() != n_params) throw std::invalid_argument("probe init has the wrong size");

  ceres::GradientProblem problem(new ProbeCost(x, y, K, config.l2));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  options.function_tolerance = 1e-15;
  options.parameter_tolerance = 1e-15;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, theta.data(), &summary);

  ProbeModel m;
  m.weight = Tensor({d, K}, std::vector<double>(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d * K)));
  m.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(d * K), theta.end());
  m.l2 = config.l2;
  m.final_loss = probe_objective(x, y, K, config.l2, theta.data(), nullptr);
  m.iterations = static_cast<int>(summary.iterations.size());
  return m;
}

std::vector<int> predict(const ProbeModel& m, const Tensor& x) {
  const std::size_t n = x.dim(0), d = x.dim(1), K = m.classes();
  if (m.weight.dim(0) != d) throw std::invalid_argument("probe and features differ in dimension");
  nn::RowMatrix logits = nn::const_matrix(x.data(), n, d) * nn::const_matrix(m.weight.data(), d, K);
  logits.rowwise() += nn::const_vector(m.bias.data(), K).transpose();
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    logits.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::vector<std::size_t> SplitGuard::rows(data::Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set_.rows(); ++i)
    if (set_.splits[i] == split) out.push_back(i);
  return out;
}

std::vector<int> SplitGuard::labels(data::Task task, const std::vector<std::size_t>& rows) const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    if (set_.splits.at(r) == data::Split::kTest && !selection_done_)
      throw std::logic_error("test labels requested before model selection finished");
    out.push_back(data::label_of(set_.labels[r], task));
  }
  return out;
}

std::vector<std::size_t> bootstrap_rows(const EmbeddingSet& set, const std::vector<std::size_t>& rows,
                                        std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_participant;
  for (std::size_t r : rows) by_participant[set.participant_ids.at(r)].push_back(r);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [id, g] : by_participant) groups.push_back(&g);
  Rng rng(derive_seed(seed, {0xb007}));
  std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& g = *groups[pick(rng)];
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

namespace {

Tensor take_rows(const Tensor& m, const std::vector<std::size_t>& rows) {
  const std::size_t d = m.dim(1);
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(m.data() + rows[i] * d, m.data() + (rows[i] + 1) * d, out.data() + i * d);
  return out;
}

bool has_two_classes(const std::vector<int>& y) { return std::set<int>(y.begin(), y.end()).size() >= 2; }

}  // namespace

TaskOutcome evaluate_task(const EmbeddingSet& set, data::Task task, const ProbeProtocol& protocol) {
  if (protocol.l2_grid.empty()) throw std::invalid_argument("probe l2 grid is empty");
  SplitGuard guard(set);
  const std::size_t K = data::class_count(task);
  std::vector<std::size_t> train = guard.rows(data::Split::kTrain);
  const std::vector<std::size_t> val = guard.rows(data::Split::kValidation);
  if (train.empty()) throw std::invalid_argument("no training rows for the probe");

  if (protocol.bootstrap_seed) {
    const std::vector<std::size_t> all = train;
    for (std::uint64_t attempt = 0;; ++attempt) {
      train = bootstrap_rows(set, all, derive_seed(*protocol.bootstrap_seed, {attempt}));
      if (has_two_classes(guard.labels(task, train))) break;
      if (attempt == 99) throw std::runtime_error("bootstrap never produced two training classes");
    }
  }
  for (std::size_t r : train)
    if (set.splits[r] != data::Split::kTrain) throw std::logic_error("probe training row outside the train split");

  const Standardizer z = fit_standardizer(set.matrix, train);
  const Tensor all = standardize(z, set.matrix);
  const Tensor x_train = take_rows(all, train);
  const std::vector<int> y_train = guard.labels(task, train);
  const Tensor x_val = take_rows(all, val);
  const std::vector<int> y_val = guard.labels(task, val);

  TaskOutcome out;
  std::optional<ProbeModel> best;
  for (double l2 : protocol.l2_grid) {
    ProbeConfig cfg = protocol.probe;
    cfg.l2 = l2;
    ProbeModel m = fit_probe(x_train, y_train, K, cfg);
    const F1Scores v = val.empty() ? F1Scores{} : f1_scores(predict(m, x_val), y_val, K);
    if (!best || v.macro > out.validation.macro) {
      best = std::move(m);
      out.validation = v;
      out.selected_l2 = l2;
    }
    if (val.empty()) break;
  }
  guard.finish_selection();

  const std::vector<std::size_t> test = guard.rows(data::Split::kTest);
  out.test = f1_scores(predict(*best, take_rows(all, test)), guard.labels(task, test), K);
  return out;
}

}  // namespace wearssl::eval
