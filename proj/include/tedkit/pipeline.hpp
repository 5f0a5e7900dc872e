#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "tedkit/classifier.hpp"
#include "tedkit/codec.hpp"
#include "tedkit/dataset.hpp"
#include "tedkit/forest.hpp"
#include "tedkit/mlp.hpp"

namespace tedkit {

enum class LearnerKind { mlp, forest };
enum class Mode { baseline, ted };

const char* learner_name(LearnerKind kind);
const char* mode_name(Mode mode);
LearnerKind parse_learner(std::string_view name);
Mode parse_mode(std::string_view name);

struct TrainOptions {
  MlpConfig mlp;
  ForestConfig forest;

  // Accepts the keys of MlpConfig/ForestConfig; unknown keys are rejected.
  static TrainOptions from_json(const nlohmann::json& j);
};

// A fitted classifier plus everything needed to interpret its outputs:
// vocabularies, the codec for TED models, and generator metadata.
struct TrainedModel {
  std::string task;
  Mode mode = Mode::baseline;
  LearnerKind learner = LearnerKind::mlp;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::optional<CodecTable> codec;  // TED models only
  std::unique_ptr<Classifier> classifier;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

// Trains on the whole dataset. TED mode fits a codec on the dataset and
// learns composite classes; baseline mode refuses datasets that still carry
// explanations (drop them explicitly first).
TrainedModel train_model(const Dataset& dataset, LearnerKind learner, Mode mode,
                         std::uint64_t seed, const TrainOptions& options = {});

struct EvalOptions {
  // Rescore Y from the predicted explanation through the codec's functional
  // E -> Y map (errors when the map is absent).
  bool derive_y_from_e = false;
};

// Accuracy report as JSON: y_accuracy always; e_accuracy/ye_accuracy for TED
// models evaluated on explanation-carrying data. Truth values are matched to
// the model's vocabulary by name; names the model never saw score as misses.
nlohmann::json evaluate_model(const TrainedModel& model, const Dataset& dataset,
                              const EvalOptions& options = {});

// Label/explanation names and the winning composite's score for one feature
// row. TED models only.
nlohmann::json predict_row(const TrainedModel& model, std::span<const double> features);

// Aligned-text rendering of an evaluate_model report.
std::string eval_report_text(const nlohmann::json& report);

}  // namespace tedkit
