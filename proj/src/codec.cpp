#include "tedkit/codec.hpp"

#include <stdexcept>

#include "tedkit/errors.hpp"

namespace tedkit {

CodecTable fit_codec(std::span<const LabeledInstance> instances,
                     std::vector<std::string> label_names,
                     std::vector<std::string> explanation_names) {
  if (instances.empty()) throw std::invalid_argument("fit_codec: no instances");

  CodecTable codec;
  codec.label_names = std::move(label_names);
  codec.explanation_names = std::move(explanation_names);

  // explanation -> the single label seen with it, or -2 once ambiguous
  std::map<int, int> label_for_explanation;
  bool functional = true;

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (!inst.explanation) {
      throw std::invalid_argument("fit_codec: instance " + std::to_string(i) +
                                  " has no explanation");
    }
    std::pair<int, int> pair{inst.label, *inst.explanation};
    if (codec.pair_to_composite.emplace(pair, static_cast<int>(codec.composite_to_pair.size()))
            .second) {
      codec.composite_to_pair.push_back(pair);
    }
    auto [it, fresh] = label_for_explanation.emplace(pair.second, pair.first);
    if (!fresh && it->second != pair.first) {
      it->second = -2;
      functional = false;
    }
  }

  if (functional) codec.explanation_to_label = std::move(label_for_explanation);
  return codec;
}

CodecTable fit_codec(const Dataset& dataset) {
  if (!dataset.has_explanations()) {
    throw std::invalid_argument("fit_codec: dataset has no explanation column");
  }
  std::vector<LabeledInstance> instances;
  instances.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) instances.push_back(dataset.instance(i));
  return fit_codec(instances, dataset.label_names(), dataset.explanation_names());
}

int encode(const CodecTable& codec, int label, int explanation) {
  auto it = codec.pair_to_composite.find({label, explanation});
  if (it == codec.pair_to_composite.end()) {
    auto name = [](const std::vector<std::string>& names, int id) {
      return id >= 0 && id < static_cast<int>(names.size()) ? names[id]
                                                            : "#" + std::to_string(id);
    };
    throw std::invalid_argument("encode: pair (" + name(codec.label_names, label) + ", " +
                                name(codec.explanation_names, explanation) +
                                ") was not fit");
  }
  return it->second;
}

std::pair<int, int> decode(const CodecTable& codec, int composite) {
  if (composite < 0 || composite >= static_cast<int>(codec.composite_to_pair.size())) {
    throw std::invalid_argument("decode: composite id " + std::to_string(composite) +
                                " out of range [0, " +
                                std::to_string(codec.composite_to_pair.size()) + ")");
  }
  return codec.composite_to_pair[composite];
}

int derive_label(const CodecTable& codec, int explanation) {
  if (!codec.explanation_to_label) {
    throw state_error("derive_label: explanations do not determine labels in this codec");
  }
  auto it = codec.explanation_to_label->find(explanation);
  if (it == codec.explanation_to_label->end()) {
    throw std::invalid_argument("derive_label: explanation id " + std::to_string(explanation) +
                                " was not fit");
  }
  return it->second;
}

nlohmann::json CodecTable::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t c = 0; c < composite_to_pair.size(); ++c) {
    pairs.push_back({composite_to_pair[c].first, composite_to_pair[c].second, c});
  }
  return {{"labels", label_names}, {"explanations", explanation_names}, {"pairs", pairs}};
}

CodecTable CodecTable::from_json(const nlohmann::json& j) {
  CodecTable codec;
  try {
    codec.label_names = j.at("labels").get<std::vector<std::string>>();
    codec.explanation_names = j.at("explanations").get<std::vector<std::string>>();
    std::map<int, int> label_for_explanation;
    bool functional = true;
    codec.composite_to_pair.resize(j.at("pairs").size());
    for (const auto& entry : j.at("pairs")) {
      int label = entry.at(0).get<int>();
      int explanation = entry.at(1).get<int>();
      int composite = entry.at(2).get<int>();
      if (composite < 0 || composite >= static_cast<int>(codec.composite_to_pair.size())) {
        throw format_error("codec: composite id out of range");
      }
      codec.composite_to_pair[composite] = {label, explanation};
      if (!codec.pair_to_composite.emplace(std::pair{label, explanation}, composite).second) {
        throw format_error("codec: duplicate pair");
      }
      auto [it, fresh] = label_for_explanation.emplace(explanation, label);
      if (!fresh && it->second != label) functional = false;
    }
    if (codec.pair_to_composite.size() != codec.composite_to_pair.size()) {
      throw format_error("codec: composite ids are not dense");
    }
    if (functional && !codec.composite_to_pair.empty()) {
      codec.explanation_to_label = std::move(label_for_explanation);
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("codec json: ") + e.what());
  }
  return codec;
}

}  // namespace tedkit
