#pragma once

// Cross-modal hashing with teacher-student distillation: hashing heads over
// precomputed image/text/label features, pairwise-likelihood training with
// binarization penalties, and Hamming-space retrieval evaluation.

#include "cmhash/core/adam.hpp"
#include "cmhash/core/finite_diff.hpp"
#include "cmhash/core/linalg.hpp"
#include "cmhash/core/mlp.hpp"
#include "cmhash/core/rng.hpp"
#include "cmhash/data/instance.hpp"
#include "cmhash/data/manifest.hpp"
#include "cmhash/data/prompts.hpp"
#include "cmhash/data/similarity.hpp"
#include "cmhash/data/split.hpp"
#include "cmhash/data/synthetic.hpp"
#include "cmhash/digest.hpp"
#include "cmhash/error.hpp"
#include "cmhash/eval/evaluate.hpp"
#include "cmhash/eval/hashcode.hpp"
#include "cmhash/eval/ranking.hpp"
#include "cmhash/serialize.hpp"
#include "cmhash/train/config.hpp"
#include "cmhash/train/loss.hpp"
#include "cmhash/train/student.hpp"
#include "cmhash/train/teacher.hpp"
