#pragma once

// CSV and summary documents for the similarity and ROC evaluations.

#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcensus/evaluation.hpp"
#include "tcensus/features.hpp"
#include "tcensus/parallel.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

struct Report {
  std::string csv;
  nlohmann::json summary;
};

namespace detail {

inline std::string shortest_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Diff_s of every positive and negative window under `layout`'s descriptor.
inline Report similarity_report(std::span<const GrayImage> positives, std::span<const GrayImage> negatives,
                                const BlockLayout& layout, ExtractOptions opts = {}) {
  LabeledFeatureSet set;
  set.descriptor = layout.descriptor;
  set.features.resize(positives.size() + negatives.size());
  parallel_for(set.features.size(), [&](std::size_t i) {
    set.features[i] = extract_window(i < positives.size() ? positives[i] : negatives[i - positives.size()], layout, opts);
  });
  set.labels.assign(positives.size(), 1);
  set.labels.resize(set.features.size(), -1);

  std::ostringstream csv;
  csv << "class,index,diff,best_same,best_other\n";
  double pct[2] = {};
  for (int k = 0; k < 2; ++k) {
    const int cls = k == 0 ? 1 : -1;
    const auto diffs = diff_scores(set, cls);
    std::size_t negative = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      csv << (cls > 0 ? "positive" : "negative") << ',' << i << ',' << detail::shortest_exact(diffs[i].diff) << ','
          << diffs[i].best_same << ',' << diffs[i].best_other << '\n';
      negative += diffs[i].diff < 0.0 ? 1 : 0;
    }
    pct[k] = 100.0 * static_cast<double>(negative) / static_cast<double>(diffs.size());
  }
  return {csv.str(),
          {{"descriptor", std::string(to_string(layout.descriptor))},
           {"positives", positives.size()},
           {"negatives", negatives.size()},
           {"positive_negative_diff_pct", pct[0]},
           {"negative_negative_diff_pct", pct[1]}}};
}

/// Per-window classification ROC of `model` over test windows.
inline Report roc_report(const LinearModel& model, std::span<const GrayImage> positives,
                         std::span<const GrayImage> negatives) {
  const ExtractOptions opts{.normalize = model.normalized};
  std::vector<double> pos(positives.size());
  std::vector<double> neg(negatives.size());
  parallel_for(pos.size(), [&](std::size_t i) { pos[i] = model.score(extract_window(positives[i], model.layout, opts)); });
  parallel_for(neg.size(), [&](std::size_t i) { neg[i] = model.score(extract_window(negatives[i], model.layout, opts)); });
  const RocCurve curve = roc(pos, neg);
  std::ostringstream csv;
  csv << "fpr,detection_rate,threshold\n";
  for (const auto& p : curve.points) {
    csv << detail::shortest_exact(p.fpr) << ',' << detail::shortest_exact(p.detection_rate) << ','
        << detail::shortest_exact(p.threshold) << '\n';
  }
  return {csv.str(),
          {{"descriptor", std::string(to_string(model.layout.descriptor))},
           {"positives", pos.size()},
           {"negatives", neg.size()},
           {"rate_at_fpr_1e-2", detection_rate_at_fpr(curve, 1e-2)},
           {"rate_at_fpr_1e-1", detection_rate_at_fpr(curve, 1e-1)}}};
}

}  // namespace tcensus
