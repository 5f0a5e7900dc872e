// tedkit command line: dataset generation, training, evaluation, prediction
// and the bundled benchmark protocol. Talks to the core strictly through the
// C API in tedkit.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tedkit.h"

namespace {

[[noreturn]] void fail(tedkit_status status) {
  std::cerr << "error: " << tedkit_last_error() << " (" << tedkit_status_name(status)
            << ")\n";
  std::exit(1);
}

void check(tedkit_status status) {
  if (status != TEDKIT_OK) fail(status);
}

struct StringOut {
  char* value = nullptr;
  ~StringOut() { tedkit_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

struct DatasetHandle {
  tedkit_dataset* value = nullptr;
  ~DatasetHandle() { tedkit_dataset_free(value); }
};

struct ModelHandle {
  tedkit_model* value = nullptr;
  ~ModelHandle() { tedkit_model_free(value); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
}

std::vector<double> parse_row(const std::string& text) {
  std::vector<double> row;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string field = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      row.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      std::cerr << "error: bad feature value '" << field << "'\n";
      std::exit(1);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

std::string comma_join(const std::vector<std::uint64_t>& values) {
  nlohmann::json j = values;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tedkit: classifiers that predict decisions together with explanations"};
  app.require_subcommand(1);
  app.set_config("--config")->description("read option defaults from an INI/TOML file");

  // gen ------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a dataset CSV (+ codec sidecar)");
  std::string gen_target;
  gen->add_option("target", gen_target, "tictactoe or loan")->required();
  bool gen_with_explanations = false;
  gen->add_flag("--with-explanations", gen_with_explanations,
                "include the explanation column (tictactoe only; loan always has one)");
  std::int64_t gen_n = 10000;
  gen->add_option("--n", gen_n, "number of loan records");
  std::uint64_t gen_seed = 1;
  gen->add_option("--seed", gen_seed, "generator seed")->envname("TEDKIT_SEED");
  std::string gen_out;
  gen->add_option("--out", gen_out, "output CSV path")->required();
  std::string gen_codec_out;
  gen->add_option("--codec-out", gen_codec_out, "write the composite-class sidecar JSON here");

  // split ----------------------------------------------------------------
  auto* split = app.add_subcommand("split", "split a CSV into train/test CSVs");
  std::string split_data, split_train, split_test;
  split->add_option("--data", split_data, "input CSV")->required();
  split->add_option("--out-train", split_train, "train CSV path")->required();
  split->add_option("--out-test", split_test, "test CSV path")->required();
  double split_fraction = 0.9;
  split->add_option("--train-fraction", split_fraction, "train fraction (default 0.9)");
  std::uint64_t split_seed = 1;
  split->add_option("--seed", split_seed, "shuffle seed")->envname("TEDKIT_SEED");

  // train ------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train a model on a dataset CSV");
  std::string train_data, train_learner, train_mode, train_out;
  train->add_option("--data", train_data, "input CSV")->required();
  train->add_option("--learner", train_learner, "mlp or forest")->required();
  train->add_option("--mode", train_mode, "baseline or ted")->required();
  train->add_option("--out", train_out, "model JSON path")->required();
  std::uint64_t train_seed = 1;
  train->add_option("--seed", train_seed, "training seed")->envname("TEDKIT_SEED");
  bool train_drop = false;
  train->add_flag("--drop-explanations", train_drop,
                  "strip the explanation column before baseline training");
  std::uint64_t opt_epochs = 0, opt_hidden = 0, opt_batch = 0, opt_trees = 0, opt_min_leaf = 0;
  double opt_lr = 0.0;
  bool opt_no_bootstrap = false;
  auto* epochs_opt = train->add_option("--epochs", opt_epochs, "mlp epochs");
  auto* hidden_opt = train->add_option("--hidden-units", opt_hidden, "mlp hidden units");
  auto* batch_opt = train->add_option("--batch-size", opt_batch, "mlp batch size");
  auto* lr_opt = train->add_option("--learning-rate", opt_lr, "mlp learning rate");
  auto* trees_opt = train->add_option("--trees", opt_trees, "forest size");
  auto* leaf_opt = train->add_option("--min-samples-leaf", opt_min_leaf, "forest leaf minimum");
  train->add_flag("--no-bootstrap", opt_no_bootstrap, "grow trees on the full training set");

  // eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset CSV");
  std::string eval_model, eval_data, eval_out;
  eval->add_option("--model", eval_model, "model JSON path")->required();
  eval->add_option("--data", eval_data, "dataset CSV")->required();
  eval->add_option("--out", eval_out, "also write the JSON report here");
  bool eval_derive = false;
  eval->add_flag("--derive-y-from-e", eval_derive,
                 "score Y as derived from the predicted explanation");
  std::string eval_format = "text";
  eval->add_option("--format", eval_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  // predict ------------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "predict one feature row with a TED model");
  std::string predict_model, predict_row_text;
  predict->add_option("--model", predict_model, "model JSON path")->required();
  predict->add_option("--row", predict_row_text, "comma-separated feature values")->required();

  // reproduce-table1 -----------------------------------------------------------
  auto* reproduce = app.add_subcommand(
      "reproduce-table1", "run the bundled benchmark protocol and check tolerances");
  std::uint64_t rep_seed = 1;
  reproduce->add_option("--seed", rep_seed, "tic-tac-toe split/training seed")
      ->envname("TEDKIT_SEED");
  std::vector<std::uint64_t> rep_seeds;
  reproduce->add_option("--seeds", rep_seeds, "loan seeds (default 1..10)")->delimiter(',');
  std::uint64_t rep_loan_n = 10000;
  reproduce->add_option("--loan-n", rep_loan_n, "loan dataset size");
  std::uint64_t rep_loan_gen_seed = 7;
  reproduce->add_option("--loan-gen-seed", rep_loan_gen_seed, "loan generator seed");
  std::string rep_format = "text";
  reproduce->add_option("--format", rep_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  std::string rep_out;
  reproduce->add_option("--out", rep_out, "also write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    DatasetHandle dataset;
    if (gen_target == "tictactoe") {
      check(tedkit_dataset_tictactoe(gen_with_explanations ? 1 : 0, &dataset.value));
    } else if (gen_target == "loan") {
      check(tedkit_dataset_loan(gen_n, gen_seed, &dataset.value));
    } else {
      std::cerr << "error: unknown target '" << gen_target << "' (tictactoe|loan)\n";
      return 1;
    }
    check(tedkit_dataset_write_csv(dataset.value, gen_out.c_str()));
    if (!gen_codec_out.empty()) {
      StringOut codec;
      check(tedkit_dataset_codec_json(dataset.value, &codec.value));
      write_file(gen_codec_out, codec.str() + "\n");
    }
    StringOut summary;
    check(tedkit_dataset_summary_json(dataset.value, &summary.value));
    std::cout << "wrote " << gen_out << "\n" << summary.str() << "\n";
    return 0;
  }

  if (*split) {
    DatasetHandle dataset, train_half, test_half;
    check(tedkit_dataset_read_csv(split_data.c_str(), &dataset.value));
    check(tedkit_dataset_split(dataset.value, split_fraction, split_seed, &train_half.value,
                               &test_half.value));
    check(tedkit_dataset_write_csv(train_half.value, split_train.c_str()));
    check(tedkit_dataset_write_csv(test_half.value, split_test.c_str()));
    std::cout << "wrote " << split_train << " (" << tedkit_dataset_size(train_half.value)
              << " rows) and " << split_test << " (" << tedkit_dataset_size(test_half.value)
              << " rows)\n";
    return 0;
  }

  if (*train) {
    DatasetHandle dataset;
    check(tedkit_dataset_read_csv(train_data.c_str(), &dataset.value));
    if (train_drop) {
      DatasetHandle stripped;
      check(tedkit_dataset_drop_explanations(dataset.value, &stripped.value));
      std::swap(dataset.value, stripped.value);
    }
    nlohmann::json options = nlohmann::json::object();
    if (epochs_opt->count()) options["epochs"] = opt_epochs;
    if (hidden_opt->count()) options["hidden_units"] = opt_hidden;
    if (batch_opt->count()) options["batch_size"] = opt_batch;
    if (lr_opt->count()) options["learning_rate"] = opt_lr;
    if (trees_opt->count()) options["n_trees"] = opt_trees;
    if (leaf_opt->count()) options["min_samples_leaf"] = opt_min_leaf;
    if (opt_no_bootstrap) options["bootstrap"] = false;

    ModelHandle model;
    check(tedkit_train(dataset.value, train_learner.c_str(), train_mode.c_str(), train_seed,
                       options.dump().c_str(), &model.value));
    check(tedkit_model_save(model.value, train_out.c_str()));
    StringOut info;
    check(tedkit_model_info_json(model.value, &info.value));
    std::cout << "wrote " << train_out << "\n" << info.str() << "\n";
    return 0;
  }

  if (*eval) {
    ModelHandle model;
    check(tedkit_model_load(eval_model.c_str(), &model.value));
    DatasetHandle dataset;
    check(tedkit_dataset_read_csv(eval_data.c_str(), &dataset.value));
    nlohmann::json options{{"derive_y_from_e", eval_derive}};
    StringOut report;
    check(tedkit_evaluate(model.value, dataset.value, options.dump().c_str(), &report.value));
    if (!eval_out.empty()) write_file(eval_out, report.str() + "\n");
    if (eval_format == "json") {
      std::cout << report.str() << "\n";
    } else {
      StringOut text;
      check(tedkit_eval_report_text(report.value, &text.value));
      std::cout << text.str();
    }
    return 0;
  }

  if (*predict) {
    ModelHandle model;
    check(tedkit_model_load(predict_model.c_str(), &model.value));
    std::vector<double> row = parse_row(predict_row_text);
    StringOut result;
    check(tedkit_predict_row(model.value, row.data(),
                             static_cast<std::int64_t>(row.size()), &result.value));
    auto j = nlohmann::json::parse(result.str());
    char line[160];
    std::snprintf(line, sizeof line, "%s — %s (score %.3f)\n",
                  j.at("display_label").get<std::string>().c_str(),
                  j.at("explanation").get<std::string>().c_str(),
                  j.at("score").get<double>());
    std::cout << line;
    return 0;
  }

  if (*reproduce) {
    nlohmann::json options{{"ttt_seed", rep_seed},
                           {"loan_n", rep_loan_n},
                           {"loan_gen_seed", rep_loan_gen_seed}};
    if (!rep_seeds.empty()) options["loan_seeds"] = nlohmann::json::parse(comma_join(rep_seeds));
    StringOut report;
    check(tedkit_reproduce_table1(options.dump().c_str(), &report.value));
    if (!rep_out.empty()) write_file(rep_out, report.str() + "\n");
    auto j = nlohmann::json::parse(report.str());
    if (rep_format == "json") {
      std::cout << report.str() << "\n";
    } else {
      StringOut text;
      check(tedkit_table1_report_text(report.value, &text.value));
      std::cout << text.str();
    }
    return j.at("all_pass").get<bool>() ? 0 : 2;
  }

  return 0;
}
