#include <gtest/gtest.h>

#include <cmath>

#include "cmhash/core/finite_diff.hpp"
#include "cmhash/data/split.hpp"
#include "cmhash/data/synthetic.hpp"
#include "cmhash/serialize.hpp"
#include "cmhash/train/loss.hpp"
#include "cmhash/train/student.hpp"
#include "cmhash/train/teacher.hpp"

using namespace cmhash;

namespace {

constexpr double kLn2 = 0.6931471805599453;

Matrix matrix_from_rows(const std::vector<Vector>& rows) {
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

SimilarityMatrix sim_from(const std::vector<std::vector<int>>& s) {
  SimilarityMatrix m(s.size(), s[0].size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s[i].size(); ++j) {
      m.set(i, j, static_cast<std::uint8_t>(s[i][j]));
    }
  }
  return m;
}

HashCodeMatrix codes_of(const Matrix& h) { return binarize(h); }

PairBatch random_pair_batch(std::size_t n, std::size_t d_a, std::size_t d_b,
                            std::size_t bits, const EncoderParams& head_a,
                            const EncoderParams& head_b, std::uint64_t seed) {
  Rng rng(seed);
  PairBatch batch;
  for (std::size_t i = 0; i < n; ++i) {
    Vector a(d_a), b(d_b);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = rng.normal();
    batch.a_inputs.push_back(std::move(a));
    batch.b_inputs.push_back(std::move(b));
  }
  batch.sim = SimilarityMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      batch.sim.set(i, j, i == j || rng.uniform() < 0.4 ? 1 : 0);
    }
  }
  batch.codes =
      unified_codes(encode_batch(head_a, batch.a_inputs), encode_batch(head_b, batch.b_inputs));
  return batch;
}

EncoderParams small_head(std::size_t in, std::size_t hidden, std::size_t out,
                         std::uint64_t seed, Activation hidden_act = Activation::relu) {
  Rng rng(seed);
  return make_encoder(in, {hidden}, out, hidden_act, Activation::identity, rng);
}

Dataset cluster_dataset(std::size_t per_label, double noise, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.num_labels = 3;
  cfg.per_label = per_label;
  cfg.d_v = 8;
  cfg.d_t = 8;
  cfg.noise_sigma = noise;
  cfg.seed = seed;
  return gen_synthetic(cfg);
}

TrainConfig small_train_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.code_length = 16;
  cfg.batch_size = 8;
  cfg.epochs = epochs;
  cfg.hidden_dims = {16};
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(PairSimilarity, HalfInnerProduct) {
  EXPECT_DOUBLE_EQ(pair_similarity(Vector{1, 2}, Vector{3, -1}), 0.5);
  EXPECT_DOUBLE_EQ(pair_similarity(Vector{1, 0}, Vector{0, 5}), 0.0);
  EXPECT_DOUBLE_EQ(pair_similarity(Vector(16, 1.0), Vector(16, 1.0)), 8.0);
}

TEST(PairSimilarity, RejectsLengthMismatch) {
  EXPECT_THROW(pair_similarity(Vector{1, 2}, Vector{1}), InputError);
}

TEST(NllTerm, LnTwoAtZero) {
  EXPECT_NEAR(nll_term(0.0, 1), kLn2, 1e-12);
  EXPECT_NEAR(nll_term(0.0, 0), kLn2, 1e-12);
}

TEST(NllTerm, LargePhiStaysStable) {
  // log(1 + e^50) - 50 = log1p(e^-50)
  const double v = nll_term(50.0, 1);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1.9287498479639178e-22, 1e-34);
  EXPECT_LT(v, 1e-20);
  EXPECT_TRUE(std::isfinite(nll_term(1000.0, 0)));
  EXPECT_TRUE(std::isfinite(nll_term(-1000.0, 1)));
}

TEST(NllTerm, RejectsNonBinarySimilarity) {
  EXPECT_THROW(nll_term(0.0, 2), InputError);
}

TEST(NllTerm, NonNegativeAndMonotone) {
  double prev_s1 = nll_term(-30.0, 1);
  double prev_s0 = nll_term(-30.0, 0);
  for (double phi = -29.5; phi <= 30.0; phi += 0.5) {
    const double v1 = nll_term(phi, 1);
    const double v0 = nll_term(phi, 0);
    EXPECT_GE(v1, 0.0);
    EXPECT_GE(v0, 0.0);
    EXPECT_LT(v1, prev_s1);  // decreasing in phi for s = 1
    EXPECT_GT(v0, prev_s0);  // increasing in phi for s = 0
    prev_s1 = v1;
    prev_s0 = v0;
  }
}

TEST(QuantizationTerm, HandCases) {
  EXPECT_DOUBLE_EQ(quantization_term(Vector{1, -1}, Vector{1, -1}), 0.0);
  EXPECT_DOUBLE_EQ(quantization_term(Vector{1, -1}, Vector{0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(quantization_term(Vector{1}, Vector{0.5}), 0.25);
}

TEST(QuantizationTerm, RejectsNonBinaryCode) {
  EXPECT_THROW(quantization_term(Vector{0.5}, Vector{0.5}), InputError);
}

TEST(UnifiedCodes, SignOfSum) {
  const Matrix h_v = matrix_from_rows({{0.7, -0.2}});
  const Matrix h_y = matrix_from_rows({{0.1, -0.5}});
  const auto codes = unified_codes(h_v, h_y);
  EXPECT_EQ(codes.get(0, 0), +1);
  EXPECT_EQ(codes.get(0, 1), -1);
}

TEST(UnifiedCodes, ZeroSumTieGoesPositive) {
  const Matrix h_v = matrix_from_rows({{0.3, -0.4}});
  Matrix h_y = h_v;
  for (double& x : h_y.data) x = -x;
  const auto codes = unified_codes(h_v, h_y);
  EXPECT_EQ(codes.get(0, 0), +1);
  EXPECT_EQ(codes.get(0, 1), +1);
}

TEST(UnifiedCodes, EqualInputsKeepTheirSigns) {
  const Matrix h = matrix_from_rows({{-3.0, 2.0}});
  const auto codes = unified_codes(h, h);
  EXPECT_EQ(codes.get(0, 0), -1);
  EXPECT_EQ(codes.get(0, 1), +1);
}

TEST(UnifiedCodes, InvariantUnderPositiveRescaling) {
  Rng rng(41);
  Matrix h_v(6, 8), h_y(6, 8);
  for (double& x : h_v.data) x = rng.normal();
  for (double& x : h_y.data) x = rng.normal();
  const auto base = unified_codes(h_v, h_y);
  Matrix sv = h_v, sy = h_y;
  for (double& x : sv.data) x *= 3.75;
  for (double& x : sy.data) x *= 3.75;
  EXPECT_EQ(unified_codes(sv, sy), base);
}

TEST(TeacherLoss, AllZeroRepresentationsGivePairCountTimesLnTwo) {
  const Matrix h_v(2, 4), h_y(2, 4);
  const auto sim = sim_from({{1, 0}, {0, 1}});
  const auto codes = codes_of(h_v);
  EXPECT_NEAR(teacher_loss(h_v, h_y, sim, codes, 0.0), 4.0 * kLn2, 1e-9);
}

TEST(TeacherLoss, SaturatedSingletonCase) {
  // phi = 8, all quantization gaps zero: loss = log1p(e^-8)
  const Matrix h_v = matrix_from_rows({Vector(16, 1.0)});
  const Matrix h_y = matrix_from_rows({Vector(16, 1.0)});
  const auto sim = sim_from({{1}});
  const auto codes = codes_of(h_v);
  EXPECT_NEAR(teacher_loss(h_v, h_y, sim, codes, 1.0), 3.354063728957688e-4, 1e-12);
}

TEST(TeacherLoss, OffDiagonalScopeDropsSelfPairs) {
  const Matrix h_v(2, 4), h_y(2, 4);
  const auto sim = sim_from({{1, 0}, {0, 1}});
  EXPECT_NEAR(pairwise_nll_sum(h_v, h_y, sim, /*include_self=*/false), 2.0 * kLn2, 1e-12);
  EXPECT_NEAR(pairwise_nll_sum(h_v, h_y, sim, /*include_self=*/true), 4.0 * kLn2, 1e-12);
}

TEST(TeacherLoss, AlphaZeroEqualsPureNll) {
  Rng rng(6);
  Matrix h_v(3, 4), h_y(3, 4);
  for (double& x : h_v.data) x = rng.normal();
  for (double& x : h_y.data) x = rng.normal();
  const auto sim = sim_from({{1, 0, 1}, {0, 1, 0}, {1, 0, 1}});
  const auto codes = codes_of(h_v);
  EXPECT_DOUBLE_EQ(teacher_loss(h_v, h_y, sim, codes, 0.0),
                   pairwise_nll_sum(h_v, h_y, sim));
}

TEST(TeacherGrads, StationaryWhenSimilarityMatchesSigmoidAndCodesMatch) {
  // representations already at +-1 (h = b) and a real-valued similarity
  // equal to sigmoid(phi): both gradient sources vanish
  const Matrix h_v = matrix_from_rows({{1, -1, 1, -1}, {-1, -1, 1, 1}});
  const Matrix h_y = h_v;
  Matrix sim(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      sim(i, j) = sigmoid(pair_similarity(h_v.row(i), h_y.row(j)));
    }
  }
  Matrix dh_v(2, 4), dh_y(2, 4);
  add_pair_similarity_grads(h_v, h_y, sim, true, &dh_v, &dh_y);
  add_quantization_grads(codes_of(h_v), h_v, 1.0, dh_v);
  add_quantization_grads(codes_of(h_y), h_y, 1.0, dh_y);
  for (double g : dh_v.data) EXPECT_NEAR(g, 0.0, 1e-15);
  for (double g : dh_y.data) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(TeacherGrads, SinglePairAtPhiZeroGivesQuarterPartner) {
  // s = 1, phi = 0: dL/dh_v = (sigmoid(0) - 1)/2 * h_y = -h_y/4
  const Matrix h_v = matrix_from_rows({{0.0, 0.0}});
  const Matrix h_y = matrix_from_rows({{2.0, -4.0}});
  Matrix sim(1, 1);
  sim(0, 0) = 1.0;
  Matrix dh_v(1, 2);
  add_pair_similarity_grads(h_v, h_y, sim, true, &dh_v, nullptr);
  EXPECT_DOUBLE_EQ(dh_v(0, 0), -0.25 * 2.0);
  EXPECT_DOUBLE_EQ(dh_v(0, 1), -0.25 * -4.0);
}

TEST(TeacherGrads, MatchFiniteDifferencesOnRandomBatch) {
  const auto image_head = small_head(6, 10, 4, 1);
  const auto label_head = small_head(5, 10, 4, 2);
  const auto batch = random_pair_batch(4, 6, 5, 4, image_head, label_head, 31);
  const double alpha = 0.7;

  const auto [analytic_v, analytic_y] = teacher_grads(image_head, label_head, batch, alpha);
  const auto numeric_v = finite_diff_grad(
      [&](const EncoderParams& p) { return teacher_batch_loss(p, label_head, batch, alpha); },
      image_head, 1e-5);
  const auto numeric_y = finite_diff_grad(
      [&](const EncoderParams& p) { return teacher_batch_loss(image_head, p, batch, alpha); },
      label_head, 1e-5);
  EXPECT_LE(max_relative_error(analytic_v, numeric_v), 1e-4);
  EXPECT_LE(max_relative_error(analytic_y, numeric_y), 1e-4);
}

TEST(TeacherLoss, DecreasesAlongNegativeGradient) {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix h_v(4, 6), h_y(4, 6);
    for (double& x : h_v.data) x = rng.normal();
    for (double& x : h_y.data) x = rng.normal();
    SimilarityMatrix sim(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        sim.set(i, j, i == j || rng.uniform() < 0.5 ? 1 : 0);
      }
    }
    const auto codes = unified_codes(h_v, h_y);
    const double alpha = 0.5;
    const double before = teacher_loss(h_v, h_y, sim, codes, alpha);

    Matrix dh_v(4, 6), dh_y(4, 6);
    add_pair_similarity_grads(h_v, h_y, to_real(sim), true, &dh_v, &dh_y);
    add_quantization_grads(codes, h_v, alpha, dh_v);
    add_quantization_grads(codes, h_y, alpha, dh_y);

    double step = 1e-2;
    double after = before;
    for (int halvings = 0; halvings < 20; ++halvings) {
      Matrix nv = h_v, ny = h_y;
      for (std::size_t i = 0; i < nv.data.size(); ++i) nv.data[i] -= step * dh_v.data[i];
      for (std::size_t i = 0; i < ny.data.size(); ++i) ny.data[i] -= step * dh_y.data[i];
      after = teacher_loss(nv, ny, sim, codes, alpha);
      if (after < before) break;
      step *= 0.5;
    }
    EXPECT_LT(after, before) << "trial " << trial;
  }
}

TEST(TrainTeacher, LossDropsOnSeparableData) {
  const Dataset data = cluster_dataset(10, 0.0, 5);
  const SplitSpec split = split_query_gallery(data, 6, 24, 2);
  const TrainConfig cfg = small_train_config(50);
  const TeacherState state = train_teacher(data, split, cfg);
  ASSERT_EQ(state.loss_history.size(), 51u);
  EXPECT_LT(state.loss_history.back(), state.loss_history.front());
}

TEST(TrainTeacher, AlphaZeroLossIsPureNll) {
  const Dataset data = cluster_dataset(6, 0.2, 8);
  const SplitSpec split = split_query_gallery(data, 4, 14, 2);
  TrainConfig cfg = small_train_config(3);
  cfg.alpha = 0.0;
  const TeacherState state = train_teacher(data, split, cfg);

  // recompute the final loss as a bare pairwise NLL over the train set
  const std::vector<Vector> image_inputs = [&] {
    std::vector<Vector> v;
    for (std::size_t idx : split.train) v.push_back(data.instances[idx].image_feat);
    return v;
  }();
  const std::vector<Vector> label_inputs = [&] {
    std::vector<Vector> v;
    for (std::size_t idx : split.train) {
      v.push_back(label_input_vector(data.instances[idx], data.num_labels(),
                                     LabelInputMode::multihot));
    }
    return v;
  }();
  const Matrix h_v = encode_batch(state.image_params, image_inputs);
  const Matrix h_y = encode_batch(state.label_params, label_inputs);
  EXPECT_DOUBLE_EQ(state.loss_history.back(),
                   dataset_nll_sum(h_v, h_y, data, split.train, true));
}

TEST(TrainTeacher, DeterministicPerSeed) {
  const Dataset data = cluster_dataset(6, 0.3, 4);
  const SplitSpec split = split_query_gallery(data, 4, 14, 9);
  const TrainConfig cfg = small_train_config(5);
  const TeacherState a = train_teacher(data, split, cfg);
  const TeacherState b = train_teacher(data, split, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(encoder_digest(a.image_params), encoder_digest(b.image_params));
  EXPECT_EQ(encoder_digest(a.label_params), encoder_digest(b.label_params));
  EXPECT_EQ(a.codes, b.codes);
}

TEST(TrainTeacher, RunsWithSelfPairsExcluded) {
  const Dataset data = cluster_dataset(5, 0.2, 21);
  const SplitSpec split = split_query_gallery(data, 3, 12, 2);
  TrainConfig cfg = small_train_config(3);
  cfg.include_self_pairs = false;
  const TeacherState state = train_teacher(data, split, cfg);
  EXPECT_EQ(state.loss_history.size(), 4u);
  for (double loss : state.loss_history) EXPECT_TRUE(std::isfinite(loss));
}

TEST(TrainTeacher, DivergenceAbortsWithNumericError) {
  const Dataset data = cluster_dataset(5, 0.2, 21);
  const SplitSpec split = split_query_gallery(data, 3, 12, 2);
  TrainConfig cfg = small_train_config(10);
  cfg.learning_rate = 1e200;  // drives the representations out of range
  EXPECT_THROW(train_teacher(data, split, cfg), NumericError);
}

TEST(TrainTeacher, PromptFeatLabelModeUsesStoredVectors) {
  // hand-built dataset carrying externally embedded label prompt features
  Dataset data;
  data.d_v = 3;
  data.d_t = 3;
  data.d_y = 2;
  data.label_names = {"a", "b"};
  Rng rng(33);
  for (int i = 0; i < 12; ++i) {
    Instance inst;
    inst.id = "p" + std::to_string(i);
    const int label = i % 2;
    inst.labels = {label};
    inst.image_feat = {rng.normal(), rng.normal(), rng.normal()};
    inst.text_feat = {rng.normal(), rng.normal(), rng.normal()};
    inst.label_prompt_feat = Vector{label == 0 ? 1.0 : -1.0, rng.normal()};
    data.instances.push_back(std::move(inst));
  }
  const SplitSpec split = split_query_gallery(data, 3, 9, 1);
  TrainConfig cfg = small_train_config(2);
  cfg.label_mode = LabelInputMode::prompt_feat;
  const TeacherState state = train_teacher(data, split, cfg);
  EXPECT_EQ(state.label_params.input_dim(), 2u);  // d_y, not K
}

TEST(TrainTeacher, RejectsBadConfig) {
  const Dataset data = cluster_dataset(4, 0.3, 4);
  const SplitSpec split = split_query_gallery(data, 2, 10, 9);
  TrainConfig cfg = small_train_config(2);
  cfg.alpha = -1.0;
  EXPECT_THROW(train_teacher(data, split, cfg), InputError);
  cfg = small_train_config(2);
  cfg.batch_size = 1;
  EXPECT_THROW(train_teacher(data, split, cfg), InputError);
}

TEST(StudentLoss, BetaZeroAllZeroRepresentations) {
  const Matrix frozen(2, 4);
  const auto text_head = small_head(3, 4, 4, 7);
  // zero inputs through zero-bias relu head give zero outputs only if
  // weights see zero input; just use explicit zero representations instead
  const Matrix h_t(2, 4);
  const auto sim = sim_from({{1, 0}, {0, 1}});
  const auto codes = codes_of(frozen);
  EXPECT_NEAR(teacher_loss(frozen, h_t, sim, codes, 0.0), 4.0 * kLn2, 1e-9);
}

TEST(StudentLoss, BetaZeroIgnoresCodes) {
  const auto text_head = small_head(3, 6, 4, 11);
  std::vector<Vector> inputs{{0.5, -0.2, 0.9}, {1.5, 0.2, -0.9}};
  Rng rng(15);
  Matrix frozen(2, 4);
  for (double& x : frozen.data) x = rng.normal();
  const auto sim = sim_from({{1, 1}, {1, 1}});

  Matrix other_reals(2, 4);
  for (double& x : other_reals.data) x = rng.normal();
  const auto codes_a = codes_of(frozen);
  const auto codes_b = codes_of(other_reals);
  EXPECT_DOUBLE_EQ(student_batch_loss(frozen, text_head, inputs, sim, codes_a, 0.0),
                   student_batch_loss(frozen, text_head, inputs, sim, codes_b, 0.0));
}

TEST(StudentGrads, MatchFiniteDifferencesOnRandomBatch) {
  const auto text_head = small_head(5, 10, 4, 21);
  Rng rng(90);
  std::vector<Vector> inputs;
  for (int i = 0; i < 4; ++i) {
    Vector v(5);
    for (double& x : v) x = rng.normal();
    inputs.push_back(std::move(v));
  }
  Matrix frozen(4, 4);
  for (double& x : frozen.data) x = rng.normal();
  SimilarityMatrix sim(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      sim.set(i, j, i == j || rng.uniform() < 0.4 ? 1 : 0);
    }
  }
  const auto codes = unified_codes(frozen, encode_batch(text_head, inputs));
  const double beta = 0.9;

  const auto analytic = student_grads(frozen, text_head, inputs, sim, codes, beta);
  const auto numeric = finite_diff_grad(
      [&](const EncoderParams& p) {
        return student_batch_loss(frozen, p, inputs, sim, codes, beta);
      },
      text_head, 1e-5);
  EXPECT_LE(max_relative_error(analytic, numeric), 1e-4);
}

TEST(StudentGrads, VanishAtStationaryPoint) {
  const Matrix frozen = matrix_from_rows({{1, -1}, {-1, 1}});
  const Matrix h_t = frozen;  // h_t = b and sim = sigmoid(phi)
  Matrix sim(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      sim(i, j) = sigmoid(pair_similarity(frozen.row(i), h_t.row(j)));
    }
  }
  Matrix dh_t(2, 2);
  add_pair_similarity_grads(frozen, h_t, sim, true, nullptr, &dh_t);
  add_quantization_grads(codes_of(h_t), h_t, 1.0, dh_t);
  for (double g : dh_t.data) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(TrainStudent, FreezeContractAndLossDrop) {
  const Dataset data = cluster_dataset(10, 0.0, 5);
  const SplitSpec split = split_query_gallery(data, 6, 24, 2);
  const TrainConfig cfg = small_train_config(40);
  const TeacherState teacher = train_teacher(data, split, cfg);

  const std::string image_digest_before = encoder_digest(teacher.image_params);
  const StudentState student = train_student(data, split, teacher, cfg);
  EXPECT_EQ(encoder_digest(teacher.image_params), image_digest_before);
  EXPECT_EQ(encoder_digest(student.image_params), image_digest_before);
  EXPECT_LT(student.loss_history.back(), student.loss_history.front());
}

TEST(TrainStudent, DeterministicPerSeed) {
  const Dataset data = cluster_dataset(6, 0.3, 4);
  const SplitSpec split = split_query_gallery(data, 4, 14, 9);
  const TrainConfig cfg = small_train_config(5);
  const TeacherState teacher = train_teacher(data, split, cfg);
  const StudentState a = train_student(data, split, teacher, cfg);
  const StudentState b = train_student(data, split, teacher, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(encoder_digest(a.text_params), encoder_digest(b.text_params));
}

TEST(TrainStudent, RejectsCodeLengthMismatch) {
  const Dataset data = cluster_dataset(6, 0.3, 4);
  const SplitSpec split = split_query_gallery(data, 4, 14, 9);
  const TrainConfig cfg = small_train_config(2);
  const TeacherState teacher = train_teacher(data, split, cfg);
  TrainConfig other = cfg;
  other.code_length = 32;
  EXPECT_THROW(train_student(data, split, teacher, other), InputError);
}

TEST(TrainAblation, LabelHeadFrozenAcrossStageTwo) {
  const Dataset data = cluster_dataset(6, 0.2, 12);
  const SplitSpec split = split_query_gallery(data, 4, 14, 3);
  const TrainConfig cfg = small_train_config(6);
  const AblationState stage1 = train_ablation_stage1(data, split, cfg);
  const std::string label_digest = encoder_digest(stage1.label_params);
  const AblationState final_state = train_ablation_stage2(data, split, stage1, cfg);
  EXPECT_EQ(encoder_digest(final_state.label_params), label_digest);
  EXPECT_EQ(final_state.stage2_image_loss_history.size(), cfg.epochs + 1);
  EXPECT_EQ(final_state.stage2_text_loss_history.size(), cfg.epochs + 1);
}

TEST(TrainAblation, DeterministicPerSeed) {
  const Dataset data = cluster_dataset(5, 0.2, 15);
  const SplitSpec split = split_query_gallery(data, 3, 12, 3);
  const TrainConfig cfg = small_train_config(4);
  const AblationState a = train_ablation(data, split, cfg);
  const AblationState b = train_ablation(data, split, cfg);
  EXPECT_EQ(a.stage1_loss_history, b.stage1_loss_history);
  EXPECT_EQ(a.stage2_image_loss_history, b.stage2_image_loss_history);
  EXPECT_EQ(encoder_digest(a.image_params), encoder_digest(b.image_params));
  EXPECT_EQ(encoder_digest(a.text_params), encoder_digest(b.text_params));
  EXPECT_EQ(encoder_digest(a.label_params), encoder_digest(b.label_params));
}

TEST(TrainAblation, StageTwoLossesDropOnSeparableData) {
  const Dataset data = cluster_dataset(10, 0.0, 18);
  const SplitSpec split = split_query_gallery(data, 6, 24, 2);
  const TrainConfig cfg = small_train_config(30);
  const AblationState state = train_ablation(data, split, cfg);
  EXPECT_LT(state.stage1_loss_history.back(), state.stage1_loss_history.front());
  EXPECT_LT(state.stage2_image_loss_history.back(),
            state.stage2_image_loss_history.front());
  EXPECT_LT(state.stage2_text_loss_history.back(),
            state.stage2_text_loss_history.front());
}
