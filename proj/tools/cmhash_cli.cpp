// Command-line pipeline runner: synthetic data generation, teacher/student
// and ablation training, retrieval evaluation, five-fold cross-validation,
// and alpha/beta sensitivity sweeps.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cmhash/cmhash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Relative output paths land under CMHASH_OUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
  const char* base = std::getenv("CMHASH_OUT_DIR");
  if (base == nullptr || *base == '\0' || fs::path(path).is_absolute()) {
    return path;
  }
  fs::create_directories(base);
  return (fs::path(base) / path).string();
}

struct TrainFlags {
  std::string dataset;
  std::size_t bits = 16;
  double alpha = 1.0;
  double beta = 1.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden{512};
  std::string label_mode = "multihot";
  std::string output_activation = "identity";
  bool exclude_self_pairs = false;
  bool allow_any_bits = false;

  std::size_t n_query = 0;
  std::size_t n_train = 0;
  std::uint64_t split_seed = 0;
  bool split_seed_set = false;
  bool bits_set = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool dataset_required = true) {
  auto* ds = cmd->add_option("--dataset", f.dataset, "dataset manifest path");
  if (dataset_required) ds->required();
  cmd->add_option("--bits", f.bits, "hash code length")
      ->capture_default_str()
      ->each([&f](const std::string&) { f.bits_set = true; });
  cmd->add_option("--alpha", f.alpha, "teacher binarization tradeoff")
      ->capture_default_str();
  cmd->add_option("--beta", f.beta, "student binarization tradeoff")
      ->capture_default_str();
  cmd->add_option("--lr", f.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", f.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--seed", f.seed, "run seed")->capture_default_str();
  cmd->add_option("--hidden", f.hidden, "hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--label-mode", f.label_mode, "multihot or prompt_feat")
      ->capture_default_str();
  cmd->add_option("--output-activation", f.output_activation, "identity or tanh")
      ->capture_default_str();
  cmd->add_flag("--exclude-self-pairs", f.exclude_self_pairs,
                "drop (i, i) pairs from in-batch loss sums");
  cmd->add_flag("--allow-any-bits", f.allow_any_bits,
                "accept code lengths outside {16, 32, 64, 128}");
  cmd->add_option("--n-query", f.n_query, "query set size");
  cmd->add_option("--n-train", f.n_train, "train set size");
  cmd->add_option("--split-seed", f.split_seed, "split seed (defaults to --seed)")
      ->each([&f](const std::string&) { f.split_seed_set = true; });
}

cmhash::TrainConfig to_config(const TrainFlags& f) {
  static const std::vector<std::size_t> kStandardBits{16, 32, 64, 128};
  if (!f.allow_any_bits &&
      std::find(kStandardBits.begin(), kStandardBits.end(), f.bits) ==
          kStandardBits.end()) {
    throw cmhash::InputError(
        "code length " + std::to_string(f.bits) +
        " is outside {16, 32, 64, 128}; pass --allow-any-bits to use it");
  }
  cmhash::TrainConfig cfg;
  cfg.code_length = f.bits;
  cfg.alpha = f.alpha;
  cfg.beta = f.beta;
  cfg.learning_rate = f.learning_rate;
  cfg.batch_size = f.batch_size;
  cfg.epochs = f.epochs;
  cfg.seed = f.seed;
  cfg.hidden_dims = f.hidden;
  cfg.label_mode = cmhash::label_input_mode_from_name(f.label_mode);
  cfg.output_activation = cmhash::activation_from_name(f.output_activation);
  cfg.include_self_pairs = !f.exclude_self_pairs;
  cfg.validate();
  return cfg;
}

struct SplitParams {
  std::size_t n_query = 0;
  std::size_t n_train = 0;
  std::uint64_t seed = 0;
};

SplitParams split_params(const TrainFlags& f, const cmhash::Dataset& data) {
  SplitParams p;
  p.n_query = f.n_query > 0 ? f.n_query : std::max<std::size_t>(1, data.size() / 5);
  const std::size_t gallery = data.size() - p.n_query;
  p.n_train = f.n_train > 0 ? f.n_train : gallery;
  p.seed = f.split_seed_set ? f.split_seed : f.seed;
  return p;
}

json split_echo(const SplitParams& p) {
  return {{"n_query", p.n_query}, {"n_train", p.n_train}, {"seed", p.seed}};
}

SplitParams split_from_echo(const json& run) {
  SplitParams p;
  p.n_query = run.at("split").at("n_query").get<std::size_t>();
  p.n_train = run.at("split").at("n_train").get<std::size_t>();
  p.seed = run.at("split").at("seed").get<std::uint64_t>();
  return p;
}

void print_loss_table(const std::string& stage, const std::vector<double>& history) {
  std::printf("stage,epoch,loss\n");
  for (std::size_t e = 0; e < history.size(); ++e) {
    std::printf("%s,%zu,%.17g\n", stage.c_str(), e, history[e]);
  }
}

std::vector<double> parse_recall_grid(const std::string& csv) {
  if (csv.empty()) return cmhash::default_recall_grid();
  std::vector<double> grid;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    const std::size_t comma = csv.find(',', begin);
    const std::string tok = csv.substr(begin, comma - begin);
    if (!tok.empty()) grid.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return grid;
}

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out, std::size_t labels, std::size_t per_label,
              std::size_t dv, std::size_t dt, double noise, double multilabel_prob,
              std::uint64_t seed) {
  cmhash::SyntheticConfig cfg;
  cfg.num_labels = labels;
  cfg.per_label = per_label;
  cfg.d_v = dv;
  cfg.d_t = dt;
  cfg.noise_sigma = noise;
  cfg.multilabel_prob = multilabel_prob;
  cfg.seed = seed;
  const cmhash::Dataset data = cmhash::gen_synthetic(cfg);
  const std::string path = resolve_output(out);
  cmhash::save_dataset(data, path);
  std::printf("wrote %s: N=%zu K=%zu d_v=%zu d_t=%zu\n", path.c_str(), data.size(),
              data.num_labels(), data.d_v, data.d_t);
  return 0;
}

int cmd_prompts(const std::string& dataset, const std::string& out,
                const std::string& mode) {
  if (mode != "raw" && mode != "prompt") {
    throw cmhash::InputError("prompt mode must be 'prompt' or 'raw'");
  }
  const cmhash::PromptMode pm = mode == "raw" ? cmhash::PromptMode::raw
                                              : cmhash::PromptMode::prompt;
  const cmhash::Dataset data = cmhash::load_dataset(dataset);
  const std::string path = resolve_output(out);
  cmhash::write_prompt_file(data, path, pm);
  std::printf("wrote %s: %zu prompts\n", path.c_str(), data.num_labels());
  return 0;
}

int cmd_train_teacher(const TrainFlags& flags, const std::string& out) {
  const cmhash::TrainConfig cfg = to_config(flags);
  const cmhash::Dataset data = cmhash::load_dataset(flags.dataset);
  const SplitParams sp = split_params(flags, data);
  const cmhash::SplitSpec split =
      cmhash::split_query_gallery(data, sp.n_query, sp.n_train, sp.seed);

  const cmhash::TeacherState state = cmhash::train_teacher(data, split, cfg);
  const json run{{"command", "train-teacher"},
                 {"dataset", flags.dataset},
                 {"split", split_echo(sp)}};
  const std::string path = resolve_output(out);
  cmhash::save_teacher_checkpoint(state, path, run);
  print_loss_table("teacher", state.loss_history);
  std::printf("wrote %s: alpha=%g beta=%g bits=%zu batch=%zu epochs=%zu\n",
              path.c_str(), cfg.alpha, cfg.beta, cfg.code_length, cfg.batch_size,
              cfg.epochs);
  return 0;
}

int cmd_train_student(TrainFlags flags, const std::string& teacher_path,
                      const std::string& out) {
  json teacher_run;
  const cmhash::TeacherState teacher =
      cmhash::load_teacher_checkpoint(teacher_path, &teacher_run);
  const std::string teacher_digest = cmhash::digest_file(teacher_path);

  // adopt the teacher's dataset and split unless overridden
  if (flags.dataset.empty()) {
    if (!teacher_run.contains("dataset")) {
      throw cmhash::InputError("--dataset required (teacher checkpoint has no echo)");
    }
    flags.dataset = teacher_run.at("dataset").get<std::string>();
  }
  const cmhash::Dataset data = cmhash::load_dataset(flags.dataset);
  SplitParams sp;
  if (flags.n_query == 0 && flags.n_train == 0 && teacher_run.contains("split")) {
    sp = split_from_echo(teacher_run);
  } else {
    sp = split_params(flags, data);
  }
  const cmhash::SplitSpec split =
      cmhash::split_query_gallery(data, sp.n_query, sp.n_train, sp.seed);

  if (flags.bits_set && flags.bits != teacher.code_length) {
    throw cmhash::InputError("student --bits " + std::to_string(flags.bits) +
                             " does not match teacher code length " +
                             std::to_string(teacher.code_length));
  }
  flags.bits = teacher.code_length;  // the teacher artifact fixes the length
  flags.allow_any_bits = true;
  const cmhash::TrainConfig cfg = to_config(flags);

  const cmhash::StudentState state = cmhash::train_student(data, split, teacher, cfg);
  std::printf("verified teacher digest %s\n", teacher_digest.c_str());

  const json run{{"command", "train-student"},
                 {"dataset", flags.dataset},
                 {"split", split_echo(sp)}};
  const std::string path = resolve_output(out);
  cmhash::save_student_checkpoint(state, {teacher_path, teacher_digest}, path, run);
  print_loss_table("student", state.loss_history);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_train_ablation(const TrainFlags& flags, const std::string& out) {
  const cmhash::TrainConfig cfg = to_config(flags);
  const cmhash::Dataset data = cmhash::load_dataset(flags.dataset);
  const SplitParams sp = split_params(flags, data);
  const cmhash::SplitSpec split =
      cmhash::split_query_gallery(data, sp.n_query, sp.n_train, sp.seed);

  const cmhash::AblationState state = cmhash::train_ablation(data, split, cfg);
  const json run{{"command", "train-ablation"},
                 {"dataset", flags.dataset},
                 {"split", split_echo(sp)}};
  const std::string path = resolve_output(out);
  cmhash::save_ablation_checkpoint(state, path, run);
  print_loss_table("ablation-stage1", state.stage1_loss_history);
  print_loss_table("ablation-stage2-image", state.stage2_image_loss_history);
  print_loss_table("ablation-stage2-text", state.stage2_text_loss_history);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

struct EvalInputs {
  cmhash::EncoderParams image_head;
  cmhash::EncoderParams text_head;
  std::string dataset;
  SplitParams split;
  std::uint64_t seed = 0;
  json sources;  // checkpoint paths + digests, echoed into the report
};

EvalInputs gather_eval_inputs(const std::string& teacher_path,
                              const std::string& student_path,
                              const std::string& ablation_path,
                              const std::string& dataset_flag) {
  EvalInputs in;
  json run;
  if (!ablation_path.empty()) {
    const cmhash::AblationState state =
        cmhash::load_ablation_checkpoint(ablation_path, &run);
    in.image_head = state.image_params;
    in.text_head = state.text_params;
    in.seed = state.seed;
    in.sources = {{"ablation", ablation_path},
                  {"ablation_digest", cmhash::digest_file(ablation_path)}};
  } else {
    if (student_path.empty()) {
      throw cmhash::InputError("eval needs --student (with --teacher) or --ablation");
    }
    cmhash::TeacherRef ref;
    const cmhash::StudentState student =
        cmhash::load_student_checkpoint(student_path, ref, &run);
    const std::string tpath = teacher_path.empty() ? ref.path : teacher_path;
    const cmhash::TeacherState teacher = cmhash::resolve_teacher(ref, tpath);
    in.image_head = teacher.image_params;
    in.text_head = student.text_params;
    in.seed = student.seed;
    in.sources = {{"student", student_path},
                  {"student_digest", cmhash::digest_file(student_path)},
                  {"teacher", tpath},
                  {"teacher_digest", ref.digest}};
  }
  in.dataset = dataset_flag;
  if (in.dataset.empty()) {
    if (!run.contains("dataset")) {
      throw cmhash::InputError("--dataset required (checkpoint has no echo)");
    }
    in.dataset = run.at("dataset").get<std::string>();
  }
  if (!run.contains("split")) {
    throw cmhash::InputError("checkpoint has no split echo; re-train or pass explicit split flags");
  }
  in.split = split_from_echo(run);
  return in;
}

int cmd_eval(const std::string& teacher_path, const std::string& student_path,
             const std::string& ablation_path, const std::string& dataset_flag,
             const std::string& out, const std::string& recall_grid_csv) {
  const EvalInputs in =
      gather_eval_inputs(teacher_path, student_path, ablation_path, dataset_flag);
  const cmhash::Dataset data = cmhash::load_dataset(in.dataset);
  const cmhash::SplitSpec split = cmhash::split_query_gallery(
      data, in.split.n_query, in.split.n_train, in.split.seed);
  const std::vector<double> grid = parse_recall_grid(recall_grid_csv);

  cmhash::EvalReport report = cmhash::evaluate(in.image_head, in.text_head, data,
                                               split, grid);
  report.seed = in.seed;
  report.timestamp = cmhash::utc_timestamp();

  const json run{{"command", "eval"},
                 {"dataset", in.dataset},
                 {"split", split_echo(in.split)},
                 {"sources", in.sources}};
  const std::string path = resolve_output(out);
  cmhash::save_report(report, path, run);
  std::printf("map_i2t=%.6f map_t2i=%.6f (N_query=%zu, N_gallery=%zu)\n",
              report.map_i2t, report.map_t2i, split.query.size(),
              split.gallery.size());
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_crossval(const TrainFlags& flags, const std::string& out_dir) {
  const cmhash::Dataset data = cmhash::load_dataset(flags.dataset);
  const SplitParams sp = split_params(flags, data);
  const cmhash::SplitSpec base =
      cmhash::split_query_gallery(data, sp.n_query, sp.n_train, sp.seed);
  const std::string dir = resolve_output(out_dir);
  fs::create_directories(dir);
  const std::vector<double> grid = cmhash::default_recall_grid();

  {
    std::ofstream echo((fs::path(dir) / "config.json").string());
    echo << json{{"command", "crossval"},
                 {"dataset", flags.dataset},
                 {"split", split_echo(sp)},
                 {"config", cmhash::config_to_json(to_config(flags))}}
                .dump(2)
         << "\n";
  }

  std::vector<cmhash::EvalReport> reports;
  for (std::size_t fold = 0; fold < 5; ++fold) {
    try {
      const cmhash::SplitSpec fold_split =
          cmhash::split_five_fold(data, base, fold, sp.seed);
      TrainFlags fold_flags = flags;
      fold_flags.seed = flags.seed + fold;  // isolated stream per fold
      cmhash::TrainConfig cfg = to_config(fold_flags);

      const cmhash::TeacherState teacher = cmhash::train_teacher(data, fold_split, cfg);
      const cmhash::StudentState student =
          cmhash::train_student(data, fold_split, teacher, cfg);
      cmhash::EvalReport report = cmhash::evaluate(
          teacher.image_params, student.text_params, data, fold_split, grid);
      report.seed = cfg.seed;
      report.timestamp = cmhash::utc_timestamp();

      const json run{{"command", "crossval"},
                     {"dataset", flags.dataset},
                     {"fold", fold},
                     {"split", split_echo(sp)}};
      const std::string stem = (fs::path(dir) / ("fold_" + std::to_string(fold))).string();
      cmhash::save_teacher_checkpoint(teacher, stem + "_teacher.json", run);
      cmhash::save_student_checkpoint(
          student, {stem + "_teacher.json", cmhash::digest_file(stem + "_teacher.json")},
          stem + "_student.json", run);
      cmhash::save_report(report, stem + "_report.json", run);
      std::printf("fold,%zu,map_i2t,%.6f,map_t2i,%.6f\n", fold, report.map_i2t,
                  report.map_t2i);
      reports.push_back(report);
    } catch (const cmhash::Error& e) {
      throw cmhash::Error("fold " + std::to_string(fold) + ": " + e.what());
    }
  }

  const std::string summary_path = (fs::path(dir) / "summary.csv").string();
  std::ofstream summary(summary_path);
  if (!summary) throw cmhash::IoError("cannot write " + summary_path);
  summary << "fold,map_i2t,map_t2i\n";
  double sum_i2t = 0.0, sum_t2i = 0.0;
  char line[96];
  for (std::size_t fold = 0; fold < reports.size(); ++fold) {
    std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f\n", fold, reports[fold].map_i2t,
                  reports[fold].map_t2i);
    summary << line;
    sum_i2t += reports[fold].map_i2t;
    sum_t2i += reports[fold].map_t2i;
  }
  std::snprintf(line, sizeof(line), "mean,%.6f,%.6f\n", sum_i2t / 5.0, sum_t2i / 5.0);
  summary << line;
  std::printf("wrote %s\n", summary_path.c_str());
  return 0;
}

int cmd_sweep(const TrainFlags& flags, const std::string& out,
              const std::string& grid_mode) {
  if (grid_mode != "tied" && grid_mode != "independent") {
    throw cmhash::InputError("--grid-mode must be 'tied' or 'independent'");
  }
  const cmhash::Dataset data = cmhash::load_dataset(flags.dataset);
  const SplitParams sp = split_params(flags, data);
  const cmhash::SplitSpec split =
      cmhash::split_query_gallery(data, sp.n_query, sp.n_train, sp.seed);
  const std::vector<double> grid_json = cmhash::default_recall_grid();

  std::vector<double> values;
  for (int i = 1; i <= 10; ++i) values.push_back(static_cast<double>(i) / 10.0);

  std::vector<std::pair<double, double>> points;
  if (grid_mode == "tied") {
    for (double v : values) points.emplace_back(v, v);
  } else {
    for (double a : values) {
      for (double b : values) points.emplace_back(a, b);
    }
  }

  const std::string path = resolve_output(out);
  {
    const std::string stem =
        path.ends_with(".csv") ? path.substr(0, path.size() - 4) : path;
    std::ofstream echo(stem + "_config.json");
    echo << json{{"command", "sweep"},
                 {"grid_mode", grid_mode},
                 {"dataset", flags.dataset},
                 {"split", split_echo(sp)},
                 {"config", cmhash::config_to_json(to_config(flags))}}
                .dump(2)
         << "\n";
  }
  std::ofstream table(path);
  if (!table) throw cmhash::IoError("cannot write " + path);
  table << "alpha,beta,map_i2t,map_t2i,status\n";
  std::printf("alpha,beta,map_i2t,map_t2i,status\n");

  char line[128];
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto [alpha, beta] = points[idx];
    try {
      TrainFlags point_flags = flags;
      point_flags.alpha = alpha;
      point_flags.beta = beta;
      point_flags.seed = flags.seed + idx;
      const cmhash::TrainConfig cfg = to_config(point_flags);

      const cmhash::TeacherState teacher = cmhash::train_teacher(data, split, cfg);
      const cmhash::StudentState student =
          cmhash::train_student(data, split, teacher, cfg);
      const cmhash::EvalReport report = cmhash::evaluate(
          teacher.image_params, student.text_params, data, split, grid_json);
      std::snprintf(line, sizeof(line), "%.1f,%.1f,%.6f,%.6f,ok\n", alpha, beta,
                    report.map_i2t, report.map_t2i);
    } catch (const cmhash::Error& e) {
      std::fprintf(stderr, "point alpha=%.1f beta=%.1f failed: %s\n", alpha, beta,
                   e.what());
      std::snprintf(line, sizeof(line), "%.1f,%.1f,,,failed\n", alpha, beta);
    }
    table << line;
    std::printf("%s", line);
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-modal hashing pipeline (teacher-student distillation)"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset manifest");
  std::string synth_out = "dataset.jsonl";
  std::size_t labels = 3, per_label = 100, dv = 32, dt = 32;
  double noise = 0.3, multilabel_prob = 0.0;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "output manifest path")->capture_default_str();
  synth->add_option("--labels", labels, "number of labels (>= 2)")->capture_default_str();
  synth->add_option("--per-label", per_label, "instances per label")->capture_default_str();
  synth->add_option("--dv", dv, "image feature dim")->capture_default_str();
  synth->add_option("--dt", dt, "text feature dim")->capture_default_str();
  synth->add_option("--noise", noise, "feature noise sigma")->capture_default_str();
  synth->add_option("--multilabel-prob", multilabel_prob, "extra-label probability")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();

  // prompts
  auto* prompts = app.add_subcommand("prompts", "export label prompt strings");
  std::string prompts_dataset, prompts_out = "prompts.txt", prompts_mode = "prompt";
  prompts->add_option("--dataset", prompts_dataset, "dataset manifest")->required();
  prompts->add_option("--out", prompts_out, "output file")->capture_default_str();
  prompts->add_option("--mode", prompts_mode, "prompt or raw")->capture_default_str();

  // train-teacher
  auto* tt = app.add_subcommand("train-teacher", "stage one: image + label heads");
  TrainFlags tt_flags;
  std::string tt_out = "teacher.json";
  add_train_flags(tt, tt_flags);
  tt->add_option("--out", tt_out, "checkpoint path")->capture_default_str();

  // train-student
  auto* ts = app.add_subcommand("train-student",
                                "stage two: text head against a frozen teacher");
  TrainFlags ts_flags;
  std::string ts_teacher, ts_out = "student.json";
  add_train_flags(ts, ts_flags, /*dataset_required=*/false);
  ts->add_option("--teacher", ts_teacher, "teacher checkpoint")->required();
  ts->add_option("--out", ts_out, "checkpoint path")->capture_default_str();

  // train-ablation
  auto* ta = app.add_subcommand("train-ablation", "joint-label ablation variant");
  TrainFlags ta_flags;
  std::string ta_out = "ablation.json";
  add_train_flags(ta, ta_flags);
  ta->add_option("--out", ta_out, "checkpoint path")->capture_default_str();

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate retrieval in both directions");
  std::string ev_teacher, ev_student, ev_ablation, ev_dataset, ev_out = "report.json";
  std::string ev_grid;
  ev->add_option("--teacher", ev_teacher, "teacher checkpoint");
  ev->add_option("--student", ev_student, "student checkpoint");
  ev->add_option("--ablation", ev_ablation, "ablation checkpoint");
  ev->add_option("--dataset", ev_dataset, "dataset manifest (defaults to checkpoint echo)");
  ev->add_option("--out", ev_out, "report path")->capture_default_str();
  ev->add_option("--recall-grid", ev_grid, "comma-separated recall levels");

  // crossval
  auto* cv = app.add_subcommand("crossval", "five-fold cross-validation pipeline");
  TrainFlags cv_flags;
  cv_flags.bits = 64;
  std::string cv_out_dir = "crossval";
  add_train_flags(cv, cv_flags);
  cv->add_option("--out-dir", cv_out_dir, "output directory")->capture_default_str();

  // sweep
  auto* sw = app.add_subcommand("sweep", "alpha/beta sensitivity sweep");
  TrainFlags sw_flags;
  std::string sw_out = "sweep.csv", sw_mode = "tied";
  add_train_flags(sw, sw_flags);
  sw->add_option("--out", sw_out, "output table path")->capture_default_str();
  sw->add_option("--grid-mode", sw_mode, "tied (10 points) or independent (100)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_out, labels, per_label, dv, dt, noise, multilabel_prob,
                       synth_seed);
    }
    if (prompts->parsed()) return cmd_prompts(prompts_dataset, prompts_out, prompts_mode);
    if (tt->parsed()) return cmd_train_teacher(tt_flags, tt_out);
    if (ts->parsed()) return cmd_train_student(ts_flags, ts_teacher, ts_out);
    if (ta->parsed()) return cmd_train_ablation(ta_flags, ta_out);
    if (ev->parsed()) {
      return cmd_eval(ev_teacher, ev_student, ev_ablation, ev_dataset, ev_out, ev_grid);
    }
    if (cv->parsed()) return cmd_crossval(cv_flags, cv_out_dir);
    if (sw->parsed()) return cmd_sweep(sw_flags, sw_out, sw_mode);
  } catch (const cmhash::InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cmhash::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const cmhash::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const cmhash::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
