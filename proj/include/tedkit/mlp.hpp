#pragma once

#include <cstdint>
#include <vector>

#include "tedkit/classifier.hpp"
#include "tedkit/matrix.hpp"

namespace tedkit {

enum class LrSchedule { constant, cosine };

struct MlpConfig {
  std::size_t hidden_units = 200;
  std::size_t epochs = 1000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  // cosine anneals the step size to zero across the full run, which settles
  // the late-training oscillation of constant-rate Adam
  LrSchedule lr_schedule = LrSchedule::cosine;
  // fraction of final epochs whose end-of-epoch weights are averaged into
  // the served model (0 disables); evens out what the annealing leaves
  double average_tail = 0.25;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

// Weights of the input -> ReLU hidden -> softmax output network. Also the
// shape of its gradient.
struct MlpParams {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  Matrix w1;               // inputs x hidden
  std::vector<double> b1;  // hidden
  Matrix w2;               // hidden x outputs
  std::vector<double> b2;  // outputs

  static MlpParams zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs);
};

// He-style scaled uniform init from the given seed.
MlpParams mlp_init(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                   std::uint64_t seed);

// Softmax probabilities, one row per instance. Rows sum to 1.
Matrix mlp_forward(const MlpParams& p, const Matrix& x);

// Cross-entropy summed (not averaged) over the batch, and its gradient.
// Summed form keeps the gradient linear in the batch rows.
double mlp_loss_sum(const MlpParams& p, const Matrix& x, const std::vector<int>& y);
MlpParams mlp_gradient_sum(const MlpParams& p, const Matrix& x, const std::vector<int>& y);

// Max relative error between analytic gradients and central finite
// differences (step 1e-5) on a freshly initialized network for this batch.
double mlp_gradient_check(const MlpConfig& config, const Matrix& x,
                          const std::vector<int>& y, std::uint64_t seed);

// Single-hidden-layer MLP trained with mini-batch Adam. Deterministic for a
// fixed (data, config, seed); training is sequential over epochs.
class MlpClassifier final : public Classifier {
 public:
  explicit MlpClassifier(MlpConfig config = {});

  void fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) override;
  Matrix predict_proba(const Matrix& x) const override;

  std::size_t class_count() const override { return params_.outputs; }
  std::size_t feature_count() const override { return params_.inputs; }

  const MlpConfig& config() const { return config_; }
  const MlpParams& params() const { return params_; }
  // Mean training loss per epoch, in order.
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  nlohmann::json to_json() const override;
  static std::unique_ptr<MlpClassifier> from_json(const nlohmann::json& j);

 private:
  MlpConfig config_;
  MlpParams params_;
  std::vector<double> epoch_losses_;
};

}  // namespace tedkit
