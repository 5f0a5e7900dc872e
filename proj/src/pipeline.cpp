#include "tedkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "tedkit/errors.hpp"

namespace tedkit {
namespace {

constexpr int kModelVersion = 1;

// Dataset label/explanation id -> model vocabulary index, matched by name.
// Names the model never saw map to -1 and can never equal a prediction.
std::vector<int> vocab_remap(const std::vector<std::string>& dataset_names,
                             const std::vector<std::string>& model_names) {
  std::unordered_map<std::string_view, int> index;
  for (std::size_t i = 0; i < model_names.size(); ++i) {
    index.emplace(model_names[i], static_cast<int>(i));
  }
  std::vector<int> remap(dataset_names.size(), -1);
  for (std::size_t i = 0; i < dataset_names.size(); ++i) {
    auto it = index.find(dataset_names[i]);
    if (it != index.end()) remap[i] = it->second;
  }
  return remap;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

}  // namespace

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    auto row = scores.row(i);
    int best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = static_cast<int>(c);
    }
    out[i] = best;
  }
  return out;
}

const char* learner_name(LearnerKind kind) {
  return kind == LearnerKind::mlp ? "mlp" : "forest";
}

const char* mode_name(Mode mode) {
  return mode == Mode::baseline ? "baseline" : "ted";
}

LearnerKind parse_learner(std::string_view name) {
  if (name == "mlp") return LearnerKind::mlp;
  if (name == "forest") return LearnerKind::forest;
  throw std::invalid_argument("unknown learner '" + std::string(name) +
                              "' (expected mlp or forest)");
}

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::baseline;
  if (name == "ted") return Mode::ted;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected baseline or ted)");
}

TrainOptions TrainOptions::from_json(const nlohmann::json& j) {
  TrainOptions options;
  if (!j.is_object()) throw std::invalid_argument("options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "hidden_units") {
        options.mlp.hidden_units = value.get<std::size_t>();
      } else if (key == "epochs") {
        options.mlp.epochs = value.get<std::size_t>();
      } else if (key == "batch_size") {
        options.mlp.batch_size = value.get<std::size_t>();
      } else if (key == "learning_rate") {
        options.mlp.learning_rate = value.get<double>();
      } else if (key == "lr_schedule") {
        auto name = value.get<std::string>();
        if (name == "cosine") {
          options.mlp.lr_schedule = LrSchedule::cosine;
        } else if (name == "constant") {
          options.mlp.lr_schedule = LrSchedule::constant;
        } else {
          throw std::invalid_argument("lr_schedule must be cosine or constant");
        }
      } else if (key == "n_trees") {
        options.forest.n_trees = value.get<std::size_t>();
      } else if (key == "min_samples_leaf") {
        options.forest.min_samples_leaf = value.get<std::size_t>();
      } else if (key == "bootstrap") {
        options.forest.bootstrap = value.get<bool>();
      } else {
        throw std::invalid_argument("unknown training option '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("bad value for training option '" + key + "'");
    }
  }
  return options;
}

TrainedModel train_model(const Dataset& dataset, LearnerKind learner, Mode mode,
                         std::uint64_t seed, const TrainOptions& options) {
  if (dataset.size() == 0) throw std::invalid_argument("train: empty dataset");

  TrainedModel model;
  model.task = dataset.task();
  model.mode = mode;
  model.learner = learner;
  model.feature_names = dataset.feature_names();

  std::vector<int> targets;
  targets.reserve(dataset.size());

  if (mode == Mode::ted) {
    if (!dataset.has_explanations()) {
      throw state_error("ted mode requires a dataset with an explanation column");
    }
    model.codec = fit_codec(dataset);
    model.label_names = dataset.label_names();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      targets.push_back(encode(*model.codec, dataset.labels()[i], dataset.explanations()[i]));
    }
  } else {
    if (dataset.has_explanations()) {
      throw state_error(
          "baseline mode on a dataset with explanations; drop the column explicitly");
    }
    // Classifier classes are the observed labels in id order; on a full
    // dataset this is the identity since ids are occurrence-dense.
    std::vector<bool> observed(dataset.label_names().size(), false);
    for (int id : dataset.labels()) observed[id] = true;
    std::vector<int> to_class(dataset.label_names().size(), -1);
    for (std::size_t id = 0; id < observed.size(); ++id) {
      if (observed[id]) {
        to_class[id] = static_cast<int>(model.label_names.size());
        model.label_names.push_back(dataset.label_names()[id]);
      }
    }
    for (int id : dataset.labels()) targets.push_back(to_class[id]);
  }

  if (learner == LearnerKind::mlp) {
    model.classifier = std::make_unique<MlpClassifier>(options.mlp);
  } else {
    model.classifier = std::make_unique<ForestClassifier>(options.forest);
  }
  model.classifier->fit(dataset.features(), targets, seed);
  return model;
}

nlohmann::json TrainedModel::to_json() const {
  if (!classifier) throw state_error("model has no trained classifier");
  nlohmann::json j{
      {"format", "tedkit-model"},
      {"version", kModelVersion},
      {"task", task},
      {"mode", mode_name(mode)},
      {"learner", learner_name(learner)},
      {"feature_names", feature_names},
      {"labels", label_names},
      {"classifier", classifier->to_json()},
  };
  if (codec) j["codec"] = codec->to_json();
  return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  TrainedModel model;
  try {
    if (j.at("format").get<std::string>() != "tedkit-model") {
      throw format_error("not a tedkit model file");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw format_error("unsupported model version");
    }
    model.task = j.at("task").get<std::string>();
    model.mode = parse_mode(j.at("mode").get<std::string>());
    model.learner = parse_learner(j.at("learner").get<std::string>());
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.label_names = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("codec")) model.codec = CodecTable::from_json(j.at("codec"));
    if (model.mode == Mode::ted && !model.codec) {
      throw format_error("ted model without codec");
    }
    if (model.learner == LearnerKind::mlp) {
      model.classifier = MlpClassifier::from_json(j.at("classifier"));
    } else {
      model.classifier = ForestClassifier::from_json(j.at("classifier"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("model json: ") + e.what());
  }
  return model;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw format_error("model json: " + std::string(e.what()));
  }
  return from_json(j);
}

nlohmann::json evaluate_model(const TrainedModel& model, const Dataset& dataset,
                              const EvalOptions& options) {
  if (!model.classifier) throw state_error("model has no trained classifier");
  if (dataset.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  if (dataset.feature_count() != model.classifier->feature_count()) {
    throw std::invalid_argument(
        "evaluate: dataset has " + std::to_string(dataset.feature_count()) +
        " features, model expects " + std::to_string(model.classifier->feature_count()));
  }
  if (options.derive_y_from_e) {
    if (!model.codec) throw state_error("derive_y_from_e: model has no explanations");
    if (!model.codec->explanation_to_label) {
      throw state_error("derive_y_from_e: explanations do not determine labels");
    }
  }

  std::vector<int> predictions = model.classifier->predict(dataset.features());

  nlohmann::json report{
      {"task", model.task},
      {"mode", mode_name(model.mode)},
      {"learner", learner_name(model.learner)},
      {"instances", dataset.size()},
      {"derived_y", options.derive_y_from_e},
  };

  std::size_t n = dataset.size();
  if (model.mode == Mode::baseline) {
    auto truth = vocab_remap(dataset.label_names(), model.label_names);
    std::size_t y_hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (predictions[i] == truth[dataset.labels()[i]]) ++y_hits;
    }
    report["y_accuracy"] = static_cast<double>(y_hits) / static_cast<double>(n);
    return report;
  }

  const CodecTable& codec = *model.codec;
  auto label_truth = vocab_remap(dataset.label_names(), codec.label_names);
  std::size_t y_hits = 0;
  std::size_t e_hits = 0;
  std::size_t ye_hits = 0;
  std::vector<int> expl_truth;
  if (dataset.has_explanations()) {
    expl_truth = vocab_remap(dataset.explanation_names(), codec.explanation_names);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [y_pred, e_pred] = decode(codec, predictions[i]);
    if (options.derive_y_from_e) y_pred = derive_label(codec, e_pred);
    bool y_ok = y_pred == label_truth[dataset.labels()[i]];
    if (y_ok) ++y_hits;
    if (dataset.has_explanations()) {
      bool e_ok = e_pred == expl_truth[dataset.explanations()[i]];
      if (e_ok) ++e_hits;
      if (y_ok && e_ok) ++ye_hits;
    }
  }
  report["y_accuracy"] = static_cast<double>(y_hits) / static_cast<double>(n);
  if (dataset.has_explanations()) {
    report["e_accuracy"] = static_cast<double>(e_hits) / static_cast<double>(n);
    report["ye_accuracy"] = static_cast<double>(ye_hits) / static_cast<double>(n);
  }
  return report;
}

nlohmann::json predict_row(const TrainedModel& model, std::span<const double> features) {
  if (!model.classifier) throw state_error("model has no trained classifier");
  if (!model.codec) throw state_error("model has no explanations");
  if (features.size() != model.classifier->feature_count()) {
    throw std::invalid_argument("predict: row has " + std::to_string(features.size()) +
                                " values, model expects " +
                                std::to_string(model.classifier->feature_count()));
  }
  Matrix x(1, features.size());
  std::copy(features.begin(), features.end(), x.row(0).data());
  Matrix proba = model.classifier->predict_proba(x);
  int composite = argmax_rows(proba)[0];
  auto [label, explanation] = decode(*model.codec, composite);

  const std::string& label_text = model.codec->label_names[label];
  std::string display =
      model.task == "tictactoe" ? "move " + label_text : label_text;
  return {
      {"composite", composite},
      {"label", label_text},
      {"display_label", display},
      {"explanation", model.codec->explanation_names[explanation]},
      {"score", proba.at(0, composite)},
  };
}

std::string eval_report_text(const nlohmann::json& report) {
  std::string text;
  auto line = [&](const char* name, const nlohmann::json& value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-14s %s\n", name, value.dump().c_str());
    text += buf;
  };
  try {
    line("task", report.at("task"));
    line("mode", report.at("mode"));
    line("learner", report.at("learner"));
    line("instances", report.at("instances"));
    text += "y_accuracy     " + percent(report.at("y_accuracy").get<double>()) + "%";
    if (report.at("derived_y").get<bool>()) text += "  (derived from E)";
    text += '\n';
    if (report.contains("e_accuracy")) {
      text += "e_accuracy     " + percent(report.at("e_accuracy").get<double>()) + "%\n";
      text += "ye_accuracy    " + percent(report.at("ye_accuracy").get<double>()) + "%\n";
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("eval report json: ") + e.what());
  }
  return text;
}

}  // namespace tedkit
