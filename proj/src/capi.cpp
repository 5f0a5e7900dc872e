#include "tedkit.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "tedkit/dataset.hpp"
#include "tedkit/errors.hpp"
#include "tedkit/harness.hpp"
#include "tedkit/loan.hpp"
#include "tedkit/pipeline.hpp"
#include "tedkit/table1.hpp"
#include "tedkit/tictactoe.hpp"

struct tedkit_dataset {
  tedkit::Dataset impl;
};

struct tedkit_model {
  tedkit::TrainedModel impl;
};

namespace {

thread_local std::string g_last_error = "no error";

template <typename Fn>
tedkit_status guarded(Fn&& fn) {
  try {
    fn();
    return TEDKIT_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return TEDKIT_ERR_INVALID_ARGUMENT;
  } catch (const tedkit::io_error& e) {
    g_last_error = e.what();
    return TEDKIT_ERR_IO;
  } catch (const tedkit::format_error& e) {
    g_last_error = e.what();
    return TEDKIT_ERR_FORMAT;
  } catch (const tedkit::state_error& e) {
    g_last_error = e.what();
    return TEDKIT_ERR_STATE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TEDKIT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TEDKIT_ERR_INTERNAL;
  }
}

tedkit_status invalid(const char* message) {
  g_last_error = message;
  return TEDKIT_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_options(const char* options_json) {
  if (options_json == nullptr || *options_json == '\0') return nlohmann::json::object();
  try {
    return nlohmann::json::parse(options_json);
  } catch (const nlohmann::json::exception& e) {
    throw tedkit::format_error(std::string("options json: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* tedkit_version(void) { return TEDKIT_VERSION; }

const char* tedkit_status_name(tedkit_status status) {
  switch (status) {
    case TEDKIT_OK: return "ok";
    case TEDKIT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TEDKIT_ERR_IO: return "io error";
    case TEDKIT_ERR_FORMAT: return "format error";
    case TEDKIT_ERR_STATE: return "state error";
    case TEDKIT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tedkit_last_error(void) { return g_last_error.c_str(); }

void tedkit_string_free(char* s) { delete[] s; }

tedkit_status tedkit_dataset_tictactoe(int with_explanations, tedkit_dataset** out) {
  if (!out) return invalid("out is null");
  return guarded([&] {
    *out = new tedkit_dataset{tedkit::ttt::build_dataset(with_explanations != 0)};
  });
}

tedkit_status tedkit_dataset_loan(int64_t n, uint64_t seed, tedkit_dataset** out) {
  if (!out) return invalid("out is null");
  if (n < 1) return invalid("n must be at least 1");
  return guarded([&] {
    *out = new tedkit_dataset{
        tedkit::loan::generate_synthetic(static_cast<std::size_t>(n), seed)};
  });
}

tedkit_status tedkit_dataset_read_csv(const char* path, tedkit_dataset** out) {
  if (!out) return invalid("out is null");
  if (!path) return invalid("path is null");
  return guarded([&] { *out = new tedkit_dataset{tedkit::Dataset::read_csv(path)}; });
}

tedkit_status tedkit_dataset_write_csv(const tedkit_dataset* dataset, const char* path) {
  if (!dataset) return invalid("dataset is null");
  if (!path) return invalid("path is null");
  return guarded([&] { dataset->impl.write_csv(path); });
}

tedkit_status tedkit_dataset_drop_explanations(const tedkit_dataset* dataset,
                                               tedkit_dataset** out) {
  if (!dataset) return invalid("dataset is null");
  if (!out) return invalid("out is null");
  return guarded([&] { *out = new tedkit_dataset{dataset->impl.without_explanations()}; });
}

tedkit_status tedkit_dataset_split(const tedkit_dataset* dataset, double train_fraction,
                                   uint64_t seed, tedkit_dataset** train,
                                   tedkit_dataset** test) {
  if (!dataset) return invalid("dataset is null");
  if (!train || !test) return invalid("out is null");
  return guarded([&] {
    auto [tr, te] = tedkit::split_dataset(dataset->impl, {train_fraction, seed});
    *train = new tedkit_dataset{std::move(tr)};
    *test = new tedkit_dataset{std::move(te)};
  });
}

int64_t tedkit_dataset_size(const tedkit_dataset* dataset) {
  return dataset ? static_cast<int64_t>(dataset->impl.size()) : -1;
}

int64_t tedkit_dataset_feature_count(const tedkit_dataset* dataset) {
  return dataset ? static_cast<int64_t>(dataset->impl.feature_count()) : -1;
}

int tedkit_dataset_has_explanations(const tedkit_dataset* dataset) {
  return dataset && dataset->impl.has_explanations() ? 1 : 0;
}

tedkit_status tedkit_dataset_summary_json(const tedkit_dataset* dataset, char** out_json) {
  if (!dataset) return invalid("dataset is null");
  if (!out_json) return invalid("out_json is null");
  return guarded([&] { *out_json = dup_string(dataset->impl.summary().dump(2)); });
}

tedkit_status tedkit_dataset_codec_json(const tedkit_dataset* dataset, char** out_json) {
  if (!dataset) return invalid("dataset is null");
  if (!out_json) return invalid("out_json is null");
  return guarded([&] {
    *out_json = dup_string(tedkit::fit_codec(dataset->impl).to_json().dump(2));
  });
}

void tedkit_dataset_free(tedkit_dataset* dataset) { delete dataset; }

tedkit_status tedkit_train(const tedkit_dataset* dataset, const char* learner,
                           const char* mode, uint64_t seed, const char* options_json,
                           tedkit_model** out) {
  if (!dataset) return invalid("dataset is null");
  if (!learner || !mode) return invalid("learner/mode is null");
  if (!out) return invalid("out is null");
  return guarded([&] {
    auto options = tedkit::TrainOptions::from_json(parse_options(options_json));
    *out = new tedkit_model{tedkit::train_model(dataset->impl, tedkit::parse_learner(learner),
                                                tedkit::parse_mode(mode), seed, options)};
  });
}

tedkit_status tedkit_model_save(const tedkit_model* model, const char* path) {
  if (!model) return invalid("model is null");
  if (!path) return invalid("path is null");
  return guarded([&] { model->impl.save(path); });
}

tedkit_status tedkit_model_load(const char* path, tedkit_model** out) {
  if (!path) return invalid("path is null");
  if (!out) return invalid("out is null");
  return guarded([&] { *out = new tedkit_model{tedkit::TrainedModel::load(path)}; });
}

tedkit_status tedkit_model_info_json(const tedkit_model* model, char** out_json) {
  if (!model) return invalid("model is null");
  if (!out_json) return invalid("out_json is null");
  return guarded([&] {
    const auto& m = model->impl;
    nlohmann::json info{
        {"task", m.task},
        {"mode", tedkit::mode_name(m.mode)},
        {"learner", tedkit::learner_name(m.learner)},
        {"feature_count", m.feature_names.size()},
        {"label_count", m.label_names.size()},
    };
    if (m.codec) info["composite_count"] = m.codec->composite_count();
    *out_json = dup_string(info.dump(2));
  });
}

void tedkit_model_free(tedkit_model* model) { delete model; }

tedkit_status tedkit_evaluate(const tedkit_model* model, const tedkit_dataset* dataset,
                              const char* options_json, char** out_report_json) {
  if (!model) return invalid("model is null");
  if (!dataset) return invalid("dataset is null");
  if (!out_report_json) return invalid("out_report_json is null");
  return guarded([&] {
    auto j = parse_options(options_json);
    tedkit::EvalOptions options;
    for (const auto& [key, value] : j.items()) {
      if (key == "derive_y_from_e") {
        options.derive_y_from_e = value.get<bool>();
      } else {
        throw std::invalid_argument("unknown eval option '" + key + "'");
      }
    }
    *out_report_json =
        dup_string(tedkit::evaluate_model(model->impl, dataset->impl, options).dump(2));
  });
}

tedkit_status tedkit_predict_row(const tedkit_model* model, const double* features,
                                 int64_t count, char** out_json) {
  if (!model) return invalid("model is null");
  if (!features || count < 0) return invalid("features is null or count negative");
  if (!out_json) return invalid("out_json is null");
  return guarded([&] {
    std::span<const double> row(features, static_cast<std::size_t>(count));
    *out_json = dup_string(tedkit::predict_row(model->impl, row).dump(2));
  });
}

tedkit_status tedkit_reproduce_table1(const char* options_json, char** out_report_json) {
  if (!out_report_json) return invalid("out_report_json is null");
  return guarded([&] {
    auto options = tedkit::Table1Options::from_json(parse_options(options_json));
    *out_report_json = dup_string(tedkit::reproduce_table1(options).to_json().dump(2));
  });
}

tedkit_status tedkit_eval_report_text(const char* report_json, char** out_text) {
  if (!report_json) return invalid("report_json is null");
  if (!out_text) return invalid("out_text is null");
  return guarded([&] {
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
      throw tedkit::format_error(std::string("report json: ") + e.what());
    }
    *out_text = dup_string(tedkit::eval_report_text(report));
  });
}

tedkit_status tedkit_table1_report_text(const char* report_json, char** out_text) {
  if (!report_json) return invalid("report_json is null");
  if (!out_text) return invalid("out_text is null");
  return guarded([&] {
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
      throw tedkit::format_error(std::string("report json: ") + e.what());
    }
    *out_text = dup_string(tedkit::table1_text_from_json(report));
  });
}

}  // extern "C"
