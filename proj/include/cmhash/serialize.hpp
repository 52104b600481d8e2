#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <string>

#include <json.hpp>

#include "cmhash/digest.hpp"
#include "cmhash/eval/evaluate.hpp"
#include "cmhash/train/student.hpp"
#include "cmhash/train/teacher.hpp"

namespace cmhash {

// Checkpoints and reports are single JSON documents; hash codes are stored
// as '+'/'-' strings, one per row. nlohmann::json emits shortest
// round-trip representations for doubles, so save/load is lossless.

inline nlohmann::json encoder_to_json(const EncoderParams& params) {
  nlohmann::json layers = nlohmann::json::array();
  for (const DenseLayer& l : params.layers) {
    layers.push_back({{"activation", activation_name(l.activation)},
                      {"out_dim", l.weight.rows},
                      {"in_dim", l.weight.cols},
                      {"weight", l.weight.data},
                      {"bias", l.bias}});
  }
  return {{"layers", layers}};
}

inline EncoderParams encoder_from_json(const nlohmann::json& j) {
  EncoderParams params;
  for (const auto& lj : j.at("layers")) {
    DenseLayer layer;
    layer.activation = activation_from_name(lj.at("activation").get<std::string>());
    layer.weight.rows = lj.at("out_dim").get<std::size_t>();
    layer.weight.cols = lj.at("in_dim").get<std::size_t>();
    layer.weight.data = lj.at("weight").get<std::vector<double>>();
    layer.bias = lj.at("bias").get<Vector>();
    if (layer.weight.data.size() != layer.weight.rows * layer.weight.cols) {
      throw DataError("encoder layer weight size mismatch in checkpoint");
    }
    params.layers.push_back(std::move(layer));
  }
  params.validate();
  return params;
}

/// Digest over the canonical serialized form; used for freeze-contract
/// verification.
inline std::string encoder_digest(const EncoderParams& params) {
  return digest_hex(encoder_to_json(params).dump());
}

inline nlohmann::json codes_to_json(const HashCodeMatrix& codes) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < codes.rows(); ++i) {
    std::string row;
    row.reserve(codes.bits());
    for (std::size_t j = 0; j < codes.bits(); ++j) {
      row.push_back(codes.get(i, j) > 0 ? '+' : '-');
    }
    rows.push_back(std::move(row));
  }
  return {{"bits", codes.bits()}, {"rows", rows}};
}

inline HashCodeMatrix codes_from_json(const nlohmann::json& j) {
  const std::size_t bits = j.at("bits").get<std::size_t>();
  const auto& rows = j.at("rows");
  HashCodeMatrix codes(rows.size(), bits);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string row = rows[i].get<std::string>();
    if (row.size() != bits) throw DataError("code row length mismatch in checkpoint");
    for (std::size_t k = 0; k < bits; ++k) {
      if (row[k] != '+' && row[k] != '-') throw DataError("bad code character");
      codes.set(i, k, row[k] == '+' ? +1 : -1);
    }
  }
  return codes;
}

inline nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"code_length", cfg.code_length},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"learning_rate", cfg.learning_rate},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"seed", cfg.seed},
          {"hidden_dims", cfg.hidden_dims},
          {"hidden_activation", activation_name(cfg.hidden_activation)},
          {"output_activation", activation_name(cfg.output_activation)},
          {"label_mode", label_input_mode_name(cfg.label_mode)},
          {"include_self_pairs", cfg.include_self_pairs}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.code_length = j.at("code_length").get<std::size_t>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.beta = j.at("beta").get<double>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  cfg.hidden_activation = activation_from_name(j.at("hidden_activation").get<std::string>());
  cfg.output_activation = activation_from_name(j.at("output_activation").get<std::string>());
  cfg.label_mode = label_input_mode_from_name(j.at("label_mode").get<std::string>());
  cfg.include_self_pairs = j.at("include_self_pairs").get<bool>();
  return cfg;
}

namespace detail {

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void expect_format(const nlohmann::json& j, const std::string& fmt,
                          const std::string& path) {
  if (j.value("format", "") != fmt) {
    throw DataError(path + " is not a " + fmt + " file");
  }
}

}  // namespace detail

// -------------------------------------------------------------------------
// teacher checkpoint

inline void save_teacher_checkpoint(const TeacherState& state, const std::string& path,
                                    const nlohmann::json& run_echo = {}) {
  nlohmann::json j{{"format", "cmhash-teacher"},
                   {"version", 1},
                   {"code_length", state.code_length},
                   {"alpha", state.alpha},
                   {"seed", state.seed},
                   {"config", config_to_json(state.config)},
                   {"image_params", encoder_to_json(state.image_params)},
                   {"label_params", encoder_to_json(state.label_params)},
                   {"codes", codes_to_json(state.codes)},
                   {"loss_history", state.loss_history}};
  if (!run_echo.is_null() && !run_echo.empty()) j["run"] = run_echo;
  detail::write_json_file(j, path);
}

inline TeacherState load_teacher_checkpoint(const std::string& path,
                                            nlohmann::json* run_echo = nullptr) {
  const nlohmann::json j = detail::read_json_file(path);
  detail::expect_format(j, "cmhash-teacher", path);
  TeacherState state;
  try {
    state.code_length = j.at("code_length").get<std::size_t>();
    state.alpha = j.at("alpha").get<double>();
    state.seed = j.at("seed").get<std::uint64_t>();
    state.config = config_from_json(j.at("config"));
    state.image_params = encoder_from_json(j.at("image_params"));
    state.label_params = encoder_from_json(j.at("label_params"));
    state.codes = codes_from_json(j.at("codes"));
    state.loss_history = j.at("loss_history").get<std::vector<double>>();
    if (run_echo) *run_echo = j.value("run", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid teacher checkpoint " + path + ": " + e.what());
  }
  return state;
}

// -------------------------------------------------------------------------
// student checkpoint: carries a reference to its teacher (path + digest)
// instead of a copy of the frozen image head

struct TeacherRef {
  std::string path;
  std::string digest;
};

inline void save_student_checkpoint(const StudentState& state, const TeacherRef& ref,
                                    const std::string& path,
                                    const nlohmann::json& run_echo = {}) {
  nlohmann::json j{{"format", "cmhash-student"},
                   {"version", 1},
                   {"code_length", state.code_length},
                   {"beta", state.beta},
                   {"seed", state.seed},
                   {"config", config_to_json(state.config)},
                   {"text_params", encoder_to_json(state.text_params)},
                   {"teacher_ref", {{"path", ref.path}, {"digest", ref.digest}}},
                   {"codes", codes_to_json(state.codes)},
                   {"loss_history", state.loss_history}};
  if (!run_echo.is_null() && !run_echo.empty()) j["run"] = run_echo;
  detail::write_json_file(j, path);
}

/// Loads a student checkpoint. The frozen image head is not stored in the
/// file; resolve it via the returned teacher reference and
/// load_teacher_checkpoint, after verifying the digest.
inline StudentState load_student_checkpoint(const std::string& path, TeacherRef& ref,
                                            nlohmann::json* run_echo = nullptr) {
  const nlohmann::json j = detail::read_json_file(path);
  detail::expect_format(j, "cmhash-student", path);
  StudentState state;
  try {
    state.code_length = j.at("code_length").get<std::size_t>();
    state.beta = j.at("beta").get<double>();
    state.seed = j.at("seed").get<std::uint64_t>();
    state.config = config_from_json(j.at("config"));
    state.text_params = encoder_from_json(j.at("text_params"));
    ref.path = j.at("teacher_ref").at("path").get<std::string>();
    ref.digest = j.at("teacher_ref").at("digest").get<std::string>();
    state.codes = codes_from_json(j.at("codes"));
    state.loss_history = j.at("loss_history").get<std::vector<double>>();
    if (run_echo) *run_echo = j.value("run", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid student checkpoint " + path + ": " + e.what());
  }
  return state;
}

/// Verifies that the teacher file the student was trained against is still
/// byte-identical, then loads it.
inline TeacherState resolve_teacher(const TeacherRef& ref,
                                    const std::string& teacher_path) {
  const std::string actual = digest_file(teacher_path);
  if (actual != ref.digest) {
    throw DataError("teacher checkpoint digest mismatch: student was trained against " +
                    ref.digest + " but " + teacher_path + " has " + actual);
  }
  return load_teacher_checkpoint(teacher_path);
}

// -------------------------------------------------------------------------
// ablation checkpoint

inline void save_ablation_checkpoint(const AblationState& state, const std::string& path,
                                     const nlohmann::json& run_echo = {}) {
  nlohmann::json j{{"format", "cmhash-ablation"},
                   {"version", 1},
                   {"code_length", state.code_length},
                   {"seed", state.seed},
                   {"config", config_to_json(state.config)},
                   {"image_params", encoder_to_json(state.image_params)},
                   {"text_params", encoder_to_json(state.text_params)},
                   {"label_params", encoder_to_json(state.label_params)},
                   {"codes", codes_to_json(state.codes)},
                   {"stage1_loss_history", state.stage1_loss_history},
                   {"stage2_image_loss_history", state.stage2_image_loss_history},
                   {"stage2_text_loss_history", state.stage2_text_loss_history}};
  if (!run_echo.is_null() && !run_echo.empty()) j["run"] = run_echo;
  detail::write_json_file(j, path);
}

inline AblationState load_ablation_checkpoint(const std::string& path,
                                              nlohmann::json* run_echo = nullptr) {
  const nlohmann::json j = detail::read_json_file(path);
  detail::expect_format(j, "cmhash-ablation", path);
  AblationState state;
  try {
    state.code_length = j.at("code_length").get<std::size_t>();
    state.seed = j.at("seed").get<std::uint64_t>();
    state.config = config_from_json(j.at("config"));
    state.image_params = encoder_from_json(j.at("image_params"));
    state.text_params = encoder_from_json(j.at("text_params"));
    state.label_params = encoder_from_json(j.at("label_params"));
    state.codes = codes_from_json(j.at("codes"));
    state.stage1_loss_history = j.at("stage1_loss_history").get<std::vector<double>>();
    state.stage2_image_loss_history =
        j.at("stage2_image_loss_history").get<std::vector<double>>();
    state.stage2_text_loss_history =
        j.at("stage2_text_loss_history").get<std::vector<double>>();
    if (run_echo) *run_echo = j.value("run", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid ablation checkpoint " + path + ": " + e.what());
  }
  return state;
}

// -------------------------------------------------------------------------
// evaluation report

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json pr_to_json(const PrCurve& pr) {
  nlohmann::json points = nlohmann::json::array();
  for (const PrPoint& p : pr.points) points.push_back({p.recall, p.precision});
  return {{"points", points}, {"skipped_queries", pr.skipped_queries}};
}

/// Writes the report JSON plus one two-column recall,precision CSV per
/// direction next to it (<stem>_pr_i2t.csv, <stem>_pr_t2i.csv).
inline void save_report(const EvalReport& report, const std::string& path,
                        const nlohmann::json& run_echo = {}) {
  nlohmann::json j{{"format", "cmhash-eval-report"},
                   {"version", 1},
                   {"map_i2t", report.map_i2t},
                   {"map_t2i", report.map_t2i},
                   {"pr_i2t", pr_to_json(report.pr_i2t)},
                   {"pr_t2i", pr_to_json(report.pr_t2i)},
                   {"code_length", report.code_length},
                   {"split",
                    {{"n_query", report.split.n_query},
                     {"n_train", report.split.n_train},
                     {"n_gallery", report.split.n_gallery},
                     {"seed", report.split.seed}}},
                   {"seed", report.seed},
                   {"timestamp", report.timestamp}};
  if (!run_echo.is_null() && !run_echo.empty()) j["run"] = run_echo;
  detail::write_json_file(j, path);

  const std::string stem =
      path.size() > 5 && path.ends_with(".json") ? path.substr(0, path.size() - 5) : path;
  auto write_csv = [&](const PrCurve& pr, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write file: " + csv_path);
    out << "recall,precision\n";
    char line[64];
    for (const PrPoint& p : pr.points) {
      std::snprintf(line, sizeof(line), "%.6f,%.6f\n", p.recall, p.precision);
      out << line;
    }
  };
  write_csv(report.pr_i2t, stem + "_pr_i2t.csv");
  write_csv(report.pr_t2i, stem + "_pr_t2i.csv");
}

}  // namespace cmhash
