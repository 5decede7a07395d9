#include "oranlb/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oranlb {

namespace {

constexpr double kTinyProb = 1e-15;

void softmax3(const double* logits, double* out) {
  const double m = std::max(logits[0], std::max(logits[1], logits[2]));
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::exp(logits[c] - m);
    sum += out[c];
  }
  for (int c = 0; c < 3; ++c) out[c] /= sum;
}

}  // namespace

LogRegModel LogRegModel::train(const FeatureMatrix& x, const std::vector<int>& y,
                               const LogRegParams& params, std::uint64_t seed) {
  (void)seed;  // zero initialization is already deterministic
  if (x.rows != y.size())
    throw std::invalid_argument("logreg: rows != labels");
  if (x.rows < 2) throw std::invalid_argument("logreg: need at least 2 rows");
  bool multi_class = false;
  for (size_t i = 1; i < y.size(); ++i) multi_class = multi_class || y[i] != y[0];
  if (!multi_class) throw std::invalid_argument("logreg: degenerate label set");
  if (params.l2_c <= 0) throw std::invalid_argument("logreg: C must be positive");

  const size_t n = x.rows, d = x.cols;
  const int K = kNumCategories;

  LogRegModel m;
  m.params_ = params;
  m.dim_ = d;
  m.feat_mean_.assign(d, 0.0);
  m.feat_std_.assign(d, 1.0);
  for (size_t f = 0; f < d; ++f) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x.at(i, f);
    m.feat_mean_[f] = s / static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double dd = x.at(i, f) - m.feat_mean_[f];
      ss += dd * dd;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    m.feat_std_[f] = sd > 0.0 ? sd : 1.0;
  }

  // Standardized copy of the design matrix.
  std::vector<double> z(n * d);
  for (size_t i = 0; i < n; ++i)
    for (size_t f = 0; f < d; ++f)
      z[i * d + f] = (x.at(i, f) - m.feat_mean_[f]) / m.feat_std_[f];

  // Inverse-frequency class weights, normalized so they sum to n.
  std::array<double, kNumCategories> class_weight{1.0, 1.0, 1.0};
  if (params.balanced_class_weights) {
    std::array<double, kNumCategories> count{};
    for (int v : y) count[static_cast<size_t>(v)] += 1.0;
    for (int c = 0; c < K; ++c) {
      const size_t sc = static_cast<size_t>(c);
      class_weight[sc] = count[sc] > 0.0
                             ? static_cast<double>(n) / (K * count[sc])
                             : 0.0;
    }
  }

  std::vector<double> w(static_cast<size_t>(K) * d, 0.0);
  std::array<double, kNumCategories> b{};
  const double lambda = 1.0 / params.l2_c;

  std::vector<double> proba(n * static_cast<size_t>(K));
  const auto compute_loss_and_proba = [&](const std::vector<double>& wv,
                                          const std::array<double, kNumCategories>& bv) {
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double logits[3];
      for (int c = 0; c < K; ++c) {
        double acc = bv[static_cast<size_t>(c)];
        const double* wc = wv.data() + static_cast<size_t>(c) * d;
        const double* zi = z.data() + i * d;
        for (size_t f = 0; f < d; ++f) acc += wc[f] * zi[f];
        logits[c] = acc;
      }
      softmax3(logits, proba.data() + i * static_cast<size_t>(K));
      const double p = std::max(
          kTinyProb, proba[i * static_cast<size_t>(K) + static_cast<size_t>(y[i])]);
      loss -= class_weight[static_cast<size_t>(y[i])] * std::log(p);
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double v : wv) reg += v * v;
    return loss + 0.5 * lambda * reg;
  };

  std::vector<double> grad_w(static_cast<size_t>(K) * d);
  std::array<double, kNumCategories> grad_b{};
  double loss = compute_loss_and_proba(w, b);
  double step = 1.0;

  int iter = 0;
  double grad_norm = 0.0;
  for (; iter < params.max_iters; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b.fill(0.0);
    for (size_t i = 0; i < n; ++i) {
      const double cw = class_weight[static_cast<size_t>(y[i])];
      const double* zi = z.data() + i * d;
      for (int c = 0; c < K; ++c) {
        const size_t sc = static_cast<size_t>(c);
        const double err =
            cw * (proba[i * static_cast<size_t>(K) + sc] - (y[i] == c ? 1.0 : 0.0));
        if (err == 0.0) continue;
        double* gc = grad_w.data() + sc * d;
        for (size_t f = 0; f < d; ++f) gc[f] += err * zi[f];
        grad_b[sc] += err;
      }
    }
    double sq = 0.0;
    for (size_t j = 0; j < grad_w.size(); ++j) {
      grad_w[j] = grad_w[j] / static_cast<double>(n) + lambda * w[j];
      sq += grad_w[j] * grad_w[j];
    }
    for (int c = 0; c < K; ++c) {
      grad_b[static_cast<size_t>(c)] /= static_cast<double>(n);
      sq += grad_b[static_cast<size_t>(c)] * grad_b[static_cast<size_t>(c)];
    }
    grad_norm = std::sqrt(sq);
    if (grad_norm <= params.grad_tol) break;

    // Backtracking: shrink the step until the Armijo condition holds, so the
    // objective is non-increasing across iterations.
    std::vector<double> w_next(w.size());
    std::array<double, kNumCategories> b_next{};
    double loss_next = loss;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      for (size_t j = 0; j < w.size(); ++j) w_next[j] = w[j] - step * grad_w[j];
      for (int c = 0; c < K; ++c)
        b_next[static_cast<size_t>(c)] =
            b[static_cast<size_t>(c)] - step * grad_b[static_cast<size_t>(c)];
      loss_next = compute_loss_and_proba(w_next, b_next);
      if (loss_next <= loss - 0.5 * step * sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    w.swap(w_next);
    b = b_next;
    loss = loss_next;
    step = std::min(step * 1.5, 16.0);
  }

  // Leave proba consistent with the accepted weights for the gradient-norm
  // report when the loop exits by iteration budget.
  m.weights_ = std::move(w);
  m.bias_ = b;
  m.final_grad_norm_ = grad_norm;
  m.iterations_run_ = iter;
  return m;
}

std::array<double, kNumCategories> LogRegModel::predict_proba(
    std::span<const double> row) const {
  if (row.size() != dim_)
    throw std::invalid_argument("logreg: feature vector length mismatch");
  double logits[3];
  for (int c = 0; c < kNumCategories; ++c) {
    double acc = bias_[static_cast<size_t>(c)];
    const double* wc = weights_.data() + static_cast<size_t>(c) * dim_;
    for (size_t f = 0; f < dim_; ++f)
      acc += wc[f] * (row[f] - feat_mean_[f]) / feat_std_[f];
    logits[c] = acc;
  }
  std::array<double, kNumCategories> out{};
  softmax3(logits, out.data());
  return out;
}

int LogRegModel::predict(std::span<const double> row) const {
  const auto p = predict_proba(row);
  int best = 0;
  for (int c = 1; c < kNumCategories; ++c)
    if (p[static_cast<size_t>(c)] > p[static_cast<size_t>(best)]) best = c;
  return best;
}

std::vector<int> LogRegModel::predict_batch(const FeatureMatrix& x) const {
  std::vector<int> out(x.rows);
  for (size_t i = 0; i < x.rows; ++i) out[i] = predict(x.row(i));
  return out;
}

BalanceCategory LogRegModel::predict_category(const FeatureVector& fv) const {
  if (fv.schema_version != schema_version_)
    throw std::invalid_argument("logreg: feature schema mismatch");
  return category_from_code(predict(fv.values));
}

nlohmann::json LogRegModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "logreg";
  j["format_version"] = 1;
  j["schema_version"] = schema_version_;
  j["policy"] = policy_tag;
  j["l2_c"] = params_.l2_c;
  j["max_iters"] = params_.max_iters;
  j["grad_tol"] = params_.grad_tol;
  j["balanced_class_weights"] = params_.balanced_class_weights;
  j["dim"] = dim_;
  j["weights"] = weights_;
  j["bias"] = bias_;
  j["feat_mean"] = feat_mean_;
  j["feat_std"] = feat_std_;
  j["final_grad_norm"] = final_grad_norm_;
  j["iterations_run"] = iterations_run_;
  return j;
}

LogRegModel LogRegModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "logreg")
    throw std::invalid_argument("model file is not a logreg model");
  if (j.value("format_version", 0) != 1)
    throw std::invalid_argument("unsupported logreg format version");
  LogRegModel m;
  m.schema_version_ = j.at("schema_version").get<std::string>();
  m.policy_tag = j.value("policy", "");
  m.params_.l2_c = j.at("l2_c").get<double>();
  m.params_.max_iters = j.at("max_iters").get<int>();
  m.params_.grad_tol = j.at("grad_tol").get<double>();
  m.params_.balanced_class_weights = j.at("balanced_class_weights").get<bool>();
  m.dim_ = j.at("dim").get<size_t>();
  m.weights_ = j.at("weights").get<std::vector<double>>();
  m.bias_ = j.at("bias").get<std::array<double, kNumCategories>>();
  m.feat_mean_ = j.at("feat_mean").get<std::vector<double>>();
  m.feat_std_ = j.at("feat_std").get<std::vector<double>>();
  m.final_grad_norm_ = j.value("final_grad_norm", 0.0);
  m.iterations_run_ = j.value("iterations_run", 0);
  if (m.weights_.size() != static_cast<size_t>(kNumCategories) * m.dim_)
    throw std::invalid_argument("logreg file: weight size mismatch");
  return m;
}

}  // namespace oranlb
