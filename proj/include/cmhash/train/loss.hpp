#pragma once

#include <cmath>
#include <span>

#include "cmhash/core/linalg.hpp"
#include "cmhash/data/similarity.hpp"
#include "cmhash/eval/hashcode.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) = max(x, 0) + log1p(e^{-|x|}); stable for large |x|.
inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

/// Continuous-surrogate similarity of two hash representations:
/// phi = dot(h_a, h_b) / 2.
inline double pair_similarity(std::span<const double> h_a, std::span<const double> h_b) {
  if (h_a.size() != h_b.size()) {
    throw InputError("pair_similarity: representation length mismatch");
  }
  return 0.5 * dot(h_a, h_b);
}

/// Negative log pairwise likelihood for one pair:
/// -(s * phi - log(1 + e^phi)) = softplus(phi) - s * phi.
/// Evaluated as softplus(-phi) when s = 1, which keeps the tiny tail of a
/// saturated pair instead of cancelling it against phi.
inline double nll_term(double phi, int s) {
  if (s != 0 && s != 1) throw InputError("nll_term: similarity must be 0 or 1");
  return softplus(s == 1 ? -phi : phi);
}

/// Binarization gap ||b - h||^2 between a code row and its continuous
/// representation.
inline double quantization_term(std::span<const double> b, std::span<const double> h) {
  if (b.size() != h.size()) throw InputError("quantization_term: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != 1.0 && b[i] != -1.0) {
      throw InputError("quantization_term: code entries must be +-1");
    }
    const double d = b[i] - h[i];
    acc += d * d;
  }
  return acc;
}

/// Unified codes shared by two modalities: entrywise sign of the summed
/// continuous representations, with sign(0) = +1. Summing the continuous
/// surrogates rather than pre-binarized codes avoids mass ties on
/// disagreeing bits.
inline HashCodeMatrix unified_codes(const Matrix& h_a, const Matrix& h_b) {
  if (h_a.rows != h_b.rows || h_a.cols != h_b.cols) {
    throw InputError("unified_codes: shape mismatch");
  }
  ensure_finite(h_a.data, "unified_codes input");
  ensure_finite(h_b.data, "unified_codes input");
  HashCodeMatrix codes(h_a.rows, h_a.cols);
  for (std::size_t i = 0; i < h_a.rows; ++i) {
    for (std::size_t j = 0; j < h_a.cols; ++j) {
      codes.set(i, j, h_a(i, j) + h_b(i, j) >= 0.0 ? +1 : -1);
    }
  }
  return codes;
}

/// Three-modality variant used by the joint ablation stage.
inline HashCodeMatrix unified_codes(const Matrix& h_a, const Matrix& h_b,
                                    const Matrix& h_c) {
  if (h_a.rows != h_b.rows || h_a.cols != h_b.cols || h_a.rows != h_c.rows ||
      h_a.cols != h_c.cols) {
    throw InputError("unified_codes: shape mismatch");
  }
  HashCodeMatrix codes(h_a.rows, h_a.cols);
  for (std::size_t i = 0; i < h_a.rows; ++i) {
    for (std::size_t j = 0; j < h_a.cols; ++j) {
      codes.set(i, j, h_a(i, j) + h_b(i, j) + h_c(i, j) >= 0.0 ? +1 : -1);
    }
  }
  return codes;
}

/// Sum of pairwise NLL terms over all (i, j); set include_self false to
/// drop the diagonal when rows and columns index the same instances.
inline double pairwise_nll_sum(const Matrix& h_a, const Matrix& h_b,
                               const SimilarityMatrix& sim, bool include_self = true) {
  if (h_a.rows != sim.rows || h_b.rows != sim.cols || h_a.cols != h_b.cols) {
    throw InputError("pairwise_nll_sum: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < h_a.rows; ++i) {
    for (std::size_t j = 0; j < h_b.rows; ++j) {
      if (!include_self && i == j) continue;
      acc += nll_term(pair_similarity(h_a.row(i), h_b.row(j)), sim.at(i, j));
    }
  }
  return acc;
}

/// Sum over instances of ||b_i - h_i||^2.
inline double quantization_sum(const HashCodeMatrix& codes, const Matrix& h) {
  if (codes.rows() != h.rows || codes.bits() != h.cols) {
    throw InputError("quantization_sum: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < h.rows; ++i) {
    for (std::size_t j = 0; j < h.cols; ++j) {
      const double d = static_cast<double>(codes.get(i, j)) - h(i, j);
      acc += d * d;
    }
  }
  return acc;
}

/// Stage objective: pairwise NLL over all pairs plus the weighted
/// binarization gaps, accumulated once per instance per modality.
inline double teacher_loss(const Matrix& h_v, const Matrix& h_y,
                           const SimilarityMatrix& sim, const HashCodeMatrix& codes,
                           double alpha, bool include_self = true) {
  if (alpha < 0.0) throw InputError("teacher_loss: alpha must be nonnegative");
  double loss = pairwise_nll_sum(h_v, h_y, sim, include_self);
  if (alpha != 0.0) {
    loss += alpha * (quantization_sum(codes, h_v) + quantization_sum(codes, h_y));
  }
  return loss;
}

/// Adds the pairwise-likelihood gradients
///   dL/dh_a_i += 1/2 sum_j (sigmoid(phi_ij) - s_ij) h_b_j
///   dL/dh_b_j += 1/2 sum_i (sigmoid(phi_ij) - s_ij) h_a_i
/// into the provided accumulators (either may be null). The similarity is
/// real-valued here so stationarity can be probed at s = sigmoid(phi).
inline void add_pair_similarity_grads(const Matrix& h_a, const Matrix& h_b,
                                      const Matrix& sim, bool include_self,
                                      Matrix* dh_a, Matrix* dh_b) {
  if (h_a.rows != sim.rows || h_b.rows != sim.cols || h_a.cols != h_b.cols) {
    throw InputError("add_pair_similarity_grads: shape mismatch");
  }
  const std::size_t bits = h_a.cols;
  for (std::size_t i = 0; i < h_a.rows; ++i) {
    for (std::size_t j = 0; j < h_b.rows; ++j) {
      if (!include_self && i == j) continue;
      const double c =
          0.5 * (sigmoid(pair_similarity(h_a.row(i), h_b.row(j))) - sim(i, j));
      if (dh_a) {
        for (std::size_t k = 0; k < bits; ++k) (*dh_a)(i, k) += c * h_b(j, k);
      }
      if (dh_b) {
        for (std::size_t k = 0; k < bits; ++k) (*dh_b)(j, k) += c * h_a(i, k);
      }
    }
  }
}

/// Adds the binarization-gap gradient dL/dh_i += 2 * weight * (h_i - b_i).
inline void add_quantization_grads(const HashCodeMatrix& codes, const Matrix& h,
                                   double weight, Matrix& dh) {
  if (codes.rows() != h.rows || codes.bits() != h.cols) {
    throw InputError("add_quantization_grads: shape mismatch");
  }
  for (std::size_t i = 0; i < h.rows; ++i) {
    for (std::size_t j = 0; j < h.cols; ++j) {
      dh(i, j) += 2.0 * weight * (h(i, j) - static_cast<double>(codes.get(i, j)));
    }
  }
}

inline Matrix to_real(const SimilarityMatrix& sim) {
  Matrix m(sim.rows, sim.cols);
  for (std::size_t i = 0; i < sim.rows; ++i) {
    for (std::size_t j = 0; j < sim.cols; ++j) {
      m(i, j) = static_cast<double>(sim.at(i, j));
    }
  }
  return m;
}

}  // namespace cmhash
