#include "tedkit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tedkit/errors.hpp"
#include "tedkit/rng.hpp"

namespace tedkit {
namespace {

void check_training_input(const Matrix& x, const std::vector<int>& y) {
  if (x.rows() == 0) throw std::invalid_argument("fit: empty training set");
  if (x.rows() != y.size()) {
    throw std::invalid_argument("fit: " + std::to_string(x.rows()) + " rows vs " +
                                std::to_string(y.size()) + " labels");
  }
}

// Class ids must be dense 0..K-1; returns K.
std::size_t dense_class_count(const std::vector<int>& y) {
  int max_id = -1;
  for (int id : y) {
    if (id < 0) throw std::invalid_argument("fit: negative class id");
    max_id = std::max(max_id, id);
  }
  std::vector<bool> seen(max_id + 1, false);
  for (int id : y) seen[id] = true;
  for (int id = 0; id <= max_id; ++id) {
    if (!seen[id]) {
      throw std::invalid_argument("fit: class ids not dense, id " + std::to_string(id) +
                                  " unused");
    }
  }
  return static_cast<std::size_t>(max_id) + 1;
}

// h = relu(x w1 + b1). Zero inputs are skipped; with 0/1 features that is
// most of the work.
void forward_hidden(const MlpParams& p, const Matrix& x, Matrix& h) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* hr = h.row(i).data();
    std::copy(p.b1.begin(), p.b1.end(), hr);
    const double* xr = x.row(i).data();
    for (std::size_t k = 0; k < p.inputs; ++k) {
      double xv = xr[k];
      if (xv == 0.0) continue;
      const double* w = p.w1.row(k).data();
      for (std::size_t j = 0; j < p.hidden; ++j) hr[j] += xv * w[j];
    }
    for (std::size_t j = 0; j < p.hidden; ++j) {
      if (hr[j] < 0.0) hr[j] = 0.0;
    }
  }
}

// z = h w2 + b2, softmax in place. Dead ReLU units are skipped.
void forward_output(const MlpParams& p, const Matrix& h, Matrix& proba) {
  for (std::size_t i = 0; i < h.rows(); ++i) {
    double* zr = proba.row(i).data();
    std::copy(p.b2.begin(), p.b2.end(), zr);
    const double* hr = h.row(i).data();
    for (std::size_t j = 0; j < p.hidden; ++j) {
      double a = hr[j];
      if (a == 0.0) continue;
      const double* w = p.w2.row(j).data();
      for (std::size_t c = 0; c < p.outputs; ++c) zr[c] += a * w[c];
    }
    double zmax = *std::max_element(zr, zr + p.outputs);
    double sum = 0.0;
    for (std::size_t c = 0; c < p.outputs; ++c) {
      zr[c] = std::exp(zr[c] - zmax);
      sum += zr[c];
    }
    for (std::size_t c = 0; c < p.outputs; ++c) zr[c] /= sum;
  }
}

// Backward pass from softmax probabilities; adds nothing to `grad` rows that
// received no signal. Returns the summed cross-entropy.
double backward(const MlpParams& p, const Matrix& x, const std::vector<int>& y,
                const Matrix& h, Matrix& proba, MlpParams& grad) {
  double loss = 0.0;
  // w2 transposed so the hidden dimension is contiguous below.
  Matrix w2t(p.outputs, p.hidden);
  for (std::size_t j = 0; j < p.hidden; ++j) {
    for (std::size_t c = 0; c < p.outputs; ++c) w2t.at(c, j) = p.w2.at(j, c);
  }

  std::vector<double> dh(p.hidden);
  std::vector<double> dz1(p.hidden);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* pr = proba.row(i).data();
    loss -= std::log(std::max(pr[y[i]], 1e-300));
    pr[y[i]] -= 1.0;  // pr is now dz2 for this row

    double* db2 = grad.b2.data();
    for (std::size_t c = 0; c < p.outputs; ++c) db2[c] += pr[c];

    const double* hr = h.row(i).data();
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < p.outputs; ++c) {
      double g = pr[c];
      if (g == 0.0) continue;
      const double* wt = w2t.row(c).data();
      for (std::size_t j = 0; j < p.hidden; ++j) dh[j] += g * wt[j];
    }
    // ReLU gate: units that did not fire pass no gradient.
    for (std::size_t j = 0; j < p.hidden; ++j) dz1[j] = hr[j] > 0.0 ? dh[j] : 0.0;

    for (std::size_t j = 0; j < p.hidden; ++j) {
      double a = hr[j];
      if (a == 0.0) continue;
      double* dw2 = grad.w2.row(j).data();
      for (std::size_t c = 0; c < p.outputs; ++c) dw2[c] += a * pr[c];
    }
    for (std::size_t j = 0; j < p.hidden; ++j) grad.b1[j] += dz1[j];

    const double* xr = x.row(i).data();
    for (std::size_t k = 0; k < p.inputs; ++k) {
      double xv = xr[k];
      if (xv == 0.0) continue;
      double* dw1 = grad.w1.row(k).data();
      for (std::size_t j = 0; j < p.hidden; ++j) dw1[j] += xv * dz1[j];
    }
  }
  return loss;
}

double batch_gradient(const MlpParams& p, const Matrix& x, const std::vector<int>& y,
                      MlpParams& grad) {
  Matrix h(x.rows(), p.hidden);
  Matrix proba(x.rows(), p.outputs);
  forward_hidden(p, x, h);
  forward_output(p, h, proba);
  return backward(p, x, y, h, proba, grad);
}

struct AdamState {
  MlpParams m;
  MlpParams v;
  std::size_t step = 0;
};

void adam_update_span(std::span<double> w, std::span<const double> g, std::span<double> m,
                      std::span<double> v, double scale, const MlpConfig& cfg, double rate,
                      double bias1, double bias2) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    double gi = g[i] * scale;
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
    double mh = m[i] / bias1;
    double vh = v[i] / bias2;
    w[i] -= rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
  }
}

void adam_update(MlpParams& p, const MlpParams& grad, AdamState& state, double scale,
                 const MlpConfig& cfg, std::size_t total_steps) {
  ++state.step;
  double rate = cfg.learning_rate;
  if (cfg.lr_schedule == LrSchedule::cosine && total_steps > 1) {
    double progress = static_cast<double>(state.step - 1) / static_cast<double>(total_steps);
    rate *= 0.5 * (1.0 + std::cos(progress * 3.14159265358979323846));
  }
  double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  adam_update_span(p.w1.data(), grad.w1.data(), state.m.w1.data(), state.v.w1.data(), scale,
                   cfg, rate, bias1, bias2);
  adam_update_span(p.b1, grad.b1, state.m.b1, state.v.b1, scale, cfg, rate, bias1, bias2);
  adam_update_span(p.w2.data(), grad.w2.data(), state.m.w2.data(), state.v.w2.data(), scale,
                   cfg, rate, bias1, bias2);
  adam_update_span(p.b2, grad.b2, state.m.b2, state.v.b2, scale, cfg, rate, bias1, bias2);
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs) {
  MlpParams p;
  p.inputs = inputs;
  p.hidden = hidden;
  p.outputs = outputs;
  p.w1 = Matrix(inputs, hidden);
  p.b1.assign(hidden, 0.0);
  p.w2 = Matrix(hidden, outputs);
  p.b2.assign(outputs, 0.0);
  return p;
}

MlpParams mlp_init(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                   std::uint64_t seed) {
  MlpParams p = MlpParams::zeros(inputs, hidden, outputs);
  auto rng = make_rng(seed);
  double limit1 = std::sqrt(6.0 / static_cast<double>(inputs));
  std::uniform_real_distribution<double> d1(-limit1, limit1);
  for (double& w : p.w1.data()) w = d1(rng);
  double limit2 = std::sqrt(6.0 / static_cast<double>(hidden));
  std::uniform_real_distribution<double> d2(-limit2, limit2);
  for (double& w : p.w2.data()) w = d2(rng);
  return p;
}

Matrix mlp_forward(const MlpParams& p, const Matrix& x) {
  if (x.cols() != p.inputs) {
    throw std::invalid_argument("forward: expected " + std::to_string(p.inputs) +
                                " features, got " + std::to_string(x.cols()));
  }
  Matrix h(x.rows(), p.hidden);
  Matrix proba(x.rows(), p.outputs);
  forward_hidden(p, x, h);
  forward_output(p, h, proba);
  return proba;
}

double mlp_loss_sum(const MlpParams& p, const Matrix& x, const std::vector<int>& y) {
  check_training_input(x, y);
  Matrix proba = mlp_forward(p, x);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    loss -= std::log(std::max(proba.at(i, y[i]), 1e-300));
  }
  return loss;
}

MlpParams mlp_gradient_sum(const MlpParams& p, const Matrix& x, const std::vector<int>& y) {
  check_training_input(x, y);
  MlpParams grad = MlpParams::zeros(p.inputs, p.hidden, p.outputs);
  batch_gradient(p, x, y, grad);
  return grad;
}

double mlp_gradient_check(const MlpConfig& config, const Matrix& x, const std::vector<int>& y,
                          std::uint64_t seed) {
  check_training_input(x, y);
  std::size_t outputs = dense_class_count(y);
  MlpParams p = mlp_init(x.cols(), config.hidden_units, outputs, seed);
  MlpParams analytic = mlp_gradient_sum(p, x, y);

  const double step = 1e-5;
  double worst = 0.0;
  auto probe = [&](std::span<double> params, std::span<const double> grads) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      double saved = params[i];
      params[i] = saved + step;
      double up = mlp_loss_sum(p, x, y);
      params[i] = saved - step;
      double down = mlp_loss_sum(p, x, y);
      params[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      double analytic_i = grads[i];
      double denom = std::max({1e-6, std::abs(analytic_i), std::abs(numeric)});
      worst = std::max(worst, std::abs(analytic_i - numeric) / denom);
    }
  };
  probe(p.w1.data(), analytic.w1.data());
  probe(p.b1, analytic.b1);
  probe(p.w2.data(), analytic.w2.data());
  probe(p.b2, analytic.b2);
  return worst;
}

MlpClassifier::MlpClassifier(MlpConfig config) : config_(config) {
  if (config_.hidden_units < 1) throw std::invalid_argument("hidden_units must be >= 1");
  if (config_.learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");
  if (config_.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
}

void MlpClassifier::fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
  check_training_input(x, y);
  std::size_t outputs = dense_class_count(y);
  if (outputs < 2) throw std::invalid_argument("mlp fit: need at least 2 classes");

  auto rng = make_rng(substream_seed(seed, 0));
  params_ = mlp_init(x.cols(), config_.hidden_units, outputs, substream_seed(seed, 1));

  AdamState adam;
  adam.m = MlpParams::zeros(params_.inputs, params_.hidden, params_.outputs);
  adam.v = MlpParams::zeros(params_.inputs, params_.hidden, params_.outputs);
  MlpParams grad = MlpParams::zeros(params_.inputs, params_.hidden, params_.outputs);

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  epoch_losses_.clear();
  epoch_losses_.reserve(config_.epochs);

  std::size_t batches_per_epoch = (x.rows() + config_.batch_size - 1) / config_.batch_size;
  std::size_t total_steps = config_.epochs * batches_per_epoch;

  std::size_t average_from = config_.epochs;
  MlpParams average;
  std::size_t averaged = 0;
  if (config_.average_tail > 0.0) {
    auto tail = static_cast<std::size_t>(config_.average_tail * config_.epochs);
    average_from = config_.epochs - std::min(tail, config_.epochs);
    average = MlpParams::zeros(params_.inputs, params_.hidden, params_.outputs);
  }

  Matrix batch_x;
  std::vector<int> batch_y;
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
      std::size_t count = std::min(config_.batch_size, order.size() - start);
      batch_x = Matrix(count, x.cols());
      batch_y.resize(count);
      for (std::size_t b = 0; b < count; ++b) {
        std::copy_n(x.row(order[start + b]).data(), x.cols(), batch_x.row(b).data());
        batch_y[b] = y[order[start + b]];
      }
      grad.w1.fill(0.0);
      grad.w2.fill(0.0);
      std::fill(grad.b1.begin(), grad.b1.end(), 0.0);
      std::fill(grad.b2.begin(), grad.b2.end(), 0.0);
      epoch_loss += batch_gradient(params_, batch_x, batch_y, grad);
      adam_update(params_, grad, adam, 1.0 / static_cast<double>(count), config_, total_steps);
    }
    epoch_losses_.push_back(epoch_loss / static_cast<double>(x.rows()));

    if (epoch >= average_from) {
      auto accumulate = [](std::span<double> sum, std::span<const double> value) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += value[i];
      };
      accumulate(average.w1.data(), params_.w1.data());
      accumulate(average.b1, params_.b1);
      accumulate(average.w2.data(), params_.w2.data());
      accumulate(average.b2, params_.b2);
      ++averaged;
    }
  }

  if (averaged > 0) {
    auto finish = [averaged](std::span<double> sum) {
      for (double& v : sum) v /= static_cast<double>(averaged);
    };
    finish(average.w1.data());
    finish(average.b1);
    finish(average.w2.data());
    finish(average.b2);
    params_ = std::move(average);
  }
}

Matrix MlpClassifier::predict_proba(const Matrix& x) const {
  if (params_.outputs == 0) throw state_error("mlp: predict before fit");
  return mlp_forward(params_, x);
}

nlohmann::json MlpClassifier::to_json() const {
  if (params_.outputs == 0) throw state_error("mlp: serialize before fit");
  return {
      {"type", "mlp"},
      {"inputs", params_.inputs},
      {"hidden", params_.hidden},
      {"outputs", params_.outputs},
      {"w1", params_.w1.data()},
      {"b1", params_.b1},
      {"w2", params_.w2.data()},
      {"b2", params_.b2},
      {"config",
       {{"hidden_units", config_.hidden_units},
        {"epochs", config_.epochs},
        {"batch_size", config_.batch_size},
        {"learning_rate", config_.learning_rate},
        {"lr_schedule", config_.lr_schedule == LrSchedule::cosine ? "cosine" : "constant"},
        {"average_tail", config_.average_tail}}},
  };
}

std::unique_ptr<MlpClassifier> MlpClassifier::from_json(const nlohmann::json& j) {
  try {
    MlpConfig config;
    config.hidden_units = j.at("config").at("hidden_units").get<std::size_t>();
    config.epochs = j.at("config").at("epochs").get<std::size_t>();
    config.batch_size = j.at("config").at("batch_size").get<std::size_t>();
    config.learning_rate = j.at("config").at("learning_rate").get<double>();
    config.lr_schedule = j.at("config").at("lr_schedule").get<std::string>() == "cosine"
                             ? LrSchedule::cosine
                             : LrSchedule::constant;
    config.average_tail = j.at("config").at("average_tail").get<double>();
    auto model = std::make_unique<MlpClassifier>(config);

    MlpParams p = MlpParams::zeros(j.at("inputs").get<std::size_t>(),
                                   j.at("hidden").get<std::size_t>(),
                                   j.at("outputs").get<std::size_t>());
    auto w1 = j.at("w1").get<std::vector<double>>();
    auto w2 = j.at("w2").get<std::vector<double>>();
    auto b1 = j.at("b1").get<std::vector<double>>();
    auto b2 = j.at("b2").get<std::vector<double>>();
    if (w1.size() != p.inputs * p.hidden || w2.size() != p.hidden * p.outputs ||
        b1.size() != p.hidden || b2.size() != p.outputs) {
      throw format_error("mlp json: weight shapes do not match layer sizes");
    }
    p.w1.data() = std::move(w1);
    p.w2.data() = std::move(w2);
    p.b1 = std::move(b1);
    p.b2 = std::move(b2);
    model->params_ = std::move(p);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("mlp json: ") + e.what());
  }
}

}  // namespace tedkit
