// Counting metrics (MAE / MSE), Dice overlap, and the density-weighted
// pixel-wise confusion sums with derived precision / recall / specificity /
// F1. Confusion mass is integrated against the conforming / non-conforming
// density maps rather than binarized ground truth, so TP + FN recovers the
// non-conforming mass exactly and FP + TN the conforming mass.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/mask.hpp"

namespace vsd {

struct ConfusionSums {
  double tp = 0.0;
  double fp = 0.0;
  double tn = 0.0;
  double fn = 0.0;

  ConfusionSums& operator+=(const ConfusionSums& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
};

// Derived scores; 0/0 cases are defined as 0 and flagged undefined.
struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool specificity_defined = true;
  bool f1_defined = true;
};

// MAE = (1/Q) sum |N_q - N^_q|,  MSE = sqrt((1/Q) sum |N_q - N^_q|^2).
inline std::pair<double, double> mae_mse(std::span<const double> gt_counts,
                                         std::span<const double> pred_counts) {
  if (gt_counts.size() != pred_counts.size())
    throw LengthMismatch("mae_mse: " + std::to_string(gt_counts.size()) +
                         " ground-truth vs " +
                         std::to_string(pred_counts.size()) +
                         " predicted counts");
  if (gt_counts.empty()) throw EmptySet("mae_mse: no frames");
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (size_t i = 0; i < gt_counts.size(); ++i) {
    const double e = std::abs(gt_counts[i] - pred_counts[i]);
    abs_sum += e;
    sq_sum += e * e;
  }
  const double q = static_cast<double>(gt_counts.size());
  return {abs_sum / q, std::sqrt(sq_sum / q)};
}

// Dice = 2|A n B| / (2|A n B| + |A \ B| + |B \ A|); two empty masks are
// perfectly similar by convention.
inline double dice(const BinaryMask& pred, const BinaryMask& gt) {
  if (!pred.cells.same_dims(gt.cells))
    throw DimMismatch("dice: mask dims differ");
  size_t tp = 0, fp = 0, fn = 0;
  const auto& p = pred.cells.data();
  const auto& g = gt.cells.data();
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] && g[i])
      ++tp;
    else if (p[i])
      ++fp;
    else if (g[i])
      ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) /
         (2.0 * static_cast<double>(tp) + static_cast<double>(fp) +
          static_cast<double>(fn));
}

// TP = sum M*D_n, FP = sum M*D_c, TN = sum (1-M)*D_c, FN = sum (1-M)*D_n.
inline ConfusionSums density_confusion(const BinaryMask& pred_mask,
                                       const DensityMap& d_n,
                                       const DensityMap& d_c) {
  if (!pred_mask.cells.same_dims(d_n.cells) ||
      !pred_mask.cells.same_dims(d_c.cells))
    throw DimMismatch("density_confusion: mask and density dims differ");
  if (pred_mask.space != d_n.space || pred_mask.space != d_c.space)
    throw WrongSpace("density_confusion: inputs live in different spaces");

  ConfusionSums c;
  const auto& m = pred_mask.cells.data();
  const auto& n = d_n.cells.data();
  const auto& s = d_c.cells.data();
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i]) {
      c.tp += n[i];
      c.fp += s[i];
    } else {
      c.fn += n[i];
      c.tn += s[i];
    }
  }
  return c;
}

inline Scores derive_scores(const ConfusionSums& c) {
  Scores s;
  if (c.tp + c.fp > 0.0) {
    s.precision = c.tp / (c.tp + c.fp);
  } else {
    s.precision_defined = false;
  }
  if (c.tp + c.fn > 0.0) {
    s.recall = c.tp / (c.tp + c.fn);
  } else {
    s.recall_defined = false;
  }
  if (c.tn + c.fp > 0.0) {
    s.specificity = c.tn / (c.tn + c.fp);
  } else {
    s.specificity_defined = false;
  }
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  } else {
    s.f1_defined = false;
  }
  return s;
}

struct FrameEval {
  int64_t frame_id = 0;
  ConfusionSums confusion;
  Scores scores;
  double gt_count = 0.0;
  double pred_count = 0.0;
  bool has_counts = false;
  double dice = 0.0;
  bool has_dice = false;
};

// Aggregate report: confusion sums are accumulated over frames before
// deriving scores (micro-average); MAE / MSE use per-frame counts.
struct EvalReport {
  double mae = 0.0;
  double mse = 0.0;
  bool has_counts = false;
  double dice = 0.0;  // mean of per-frame Dice
  bool has_dice = false;
  ConfusionSums confusion;
  Scores scores;
  std::vector<FrameEval> frames;
};

inline EvalReport aggregate_frames(std::vector<FrameEval> frames) {
  EvalReport r;
  r.frames = std::move(frames);

  std::vector<double> gt, pred;
  double dice_sum = 0.0;
  size_t dice_n = 0;
  for (const auto& f : r.frames) {
    r.confusion += f.confusion;
    if (f.has_counts) {
      gt.push_back(f.gt_count);
      pred.push_back(f.pred_count);
    }
    if (f.has_dice) {
      dice_sum += f.dice;
      ++dice_n;
    }
  }
  r.scores = derive_scores(r.confusion);
  if (!gt.empty()) {
    auto [mae, mse] = mae_mse(gt, pred);
    r.mae = mae;
    r.mse = mse;
    r.has_counts = true;
  }
  if (dice_n > 0) {
    r.dice = dice_sum / static_cast<double>(dice_n);
    r.has_dice = true;
  }
  return r;
}

}  // namespace vsd
