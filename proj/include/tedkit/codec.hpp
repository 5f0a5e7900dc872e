#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tedkit/dataset.hpp"

namespace tedkit {

// Bijection between observed (label, explanation) pairs and composite class
// ids. Composite ids are assigned in first-occurrence order of pairs, so a
// fitted table is reproducible from the instance sequence alone. Immutable
// after fit; safe to share across threads.
struct CodecTable {
  std::vector<std::string> label_names;
  std::vector<std::string> explanation_names;
  std::vector<std::pair<int, int>> composite_to_pair;       // id -> (label, explanation)
  std::map<std::pair<int, int>, int> pair_to_composite;     // inverse
  // Present iff every explanation observed at fit time co-occurred with
  // exactly one label.
  std::optional<std::map<int, int>> explanation_to_label;

  std::size_t composite_count() const { return composite_to_pair.size(); }
  bool contains(int label, int explanation) const {
    return pair_to_composite.contains({label, explanation});
  }

  // Sidecar schema: {"labels":[...], "explanations":[...], "pairs":[[y,e,c],...]}.
  nlohmann::json to_json() const;
  static CodecTable from_json(const nlohmann::json& j);
};

// Builds the table from an explicit instance sequence. Throws
// std::invalid_argument on empty input or on an instance without an
// explanation (the message names the offending index).
CodecTable fit_codec(std::span<const LabeledInstance> instances,
                     std::vector<std::string> label_names,
                     std::vector<std::string> explanation_names);
CodecTable fit_codec(const Dataset& dataset);

// (label, explanation) -> composite id; throws if the pair was not fit.
int encode(const CodecTable& codec, int label, int explanation);

// composite id -> (label, explanation); throws on out-of-range ids.
std::pair<int, int> decode(const CodecTable& codec, int composite);

// explanation -> label through the functional map; throws state_error when
// explanations do not determine labels in this codec.
int derive_label(const CodecTable& codec, int explanation);

}  // namespace tedkit
