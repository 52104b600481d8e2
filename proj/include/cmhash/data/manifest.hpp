#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "cmhash/data/instance.hpp"
#include "cmhash/data/prompts.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

// Dataset manifest: JSON-lines. The first line is a header declaring
// {d_v, d_t, [d_y,] K, label_names}; every following line is one instance
// {id, image_feat, text_feat, labels[, label_prompt_feat]}.

namespace detail {

inline Vector json_to_vector(const nlohmann::json& j, const std::string& what,
                             std::size_t line) {
  if (!j.is_array()) {
    throw DataError("manifest line " + std::to_string(line) + ": " + what +
                    " is not an array");
  }
  Vector v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw DataError("manifest line " + std::to_string(line) + ": " + what +
                      " has a non-numeric entry");
    }
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace detail

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset manifest: " + path);

  std::string line;
  std::size_t line_no = 0;

  auto next_json = [&](nlohmann::json& out) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        out = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError("manifest line " + std::to_string(line_no) +
                        ": malformed record: " + e.what());
      }
      return true;
    }
    return false;
  };

  nlohmann::json header;
  if (!next_json(header)) throw DataError("manifest is empty: " + path);

  Dataset data;
  try {
    data.d_v = header.at("d_v").get<std::size_t>();
    data.d_t = header.at("d_t").get<std::size_t>();
    data.d_y = header.value("d_y", std::size_t{0});
    data.label_names = header.at("label_names").get<std::vector<std::string>>();
    if (header.at("K").get<std::size_t>() != data.label_names.size()) {
      throw DataError("manifest header: K does not match label_names length");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest header (line " + std::to_string(line_no) +
                    "): " + e.what());
  }

  nlohmann::json rec;
  while (next_json(rec)) {
    Instance inst;
    try {
      inst.id = rec.at("id").get<std::string>();
      inst.image_feat = detail::json_to_vector(rec.at("image_feat"), "image_feat", line_no);
      inst.text_feat = detail::json_to_vector(rec.at("text_feat"), "text_feat", line_no);
      inst.labels = rec.at("labels").get<std::vector<int>>();
      std::sort(inst.labels.begin(), inst.labels.end());
      if (rec.contains("label_prompt_feat")) {
        inst.label_prompt_feat =
            detail::json_to_vector(rec["label_prompt_feat"], "label_prompt_feat", line_no);
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      data.validate_instance(inst);
    } catch (const DataError& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    data.instances.push_back(std::move(inst));
  }
  data.validate();
  return data;
}

inline void save_dataset(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset manifest: " + path);

  nlohmann::json header;
  header["d_v"] = data.d_v;
  header["d_t"] = data.d_t;
  if (data.d_y > 0) header["d_y"] = data.d_y;
  header["K"] = data.num_labels();
  header["label_names"] = data.label_names;
  out << header.dump() << "\n";

  for (const Instance& inst : data.instances) {
    nlohmann::json rec;
    rec["id"] = inst.id;
    rec["image_feat"] = inst.image_feat;
    rec["text_feat"] = inst.text_feat;
    rec["labels"] = inst.labels;
    if (inst.label_prompt_feat) rec["label_prompt_feat"] = *inst.label_prompt_feat;
    out << rec.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Prompt export file: one string per line, ordered by label id, for
/// embedding with an external text encoder.
inline void write_prompt_file(const Dataset& data, const std::string& path,
                              PromptMode mode) {
  const auto prompts = make_prompts(data.label_names, mode);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write prompt file: " + path);
  for (const std::string& p : prompts) out << p << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cmhash
