#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Confusion-matrix accumulator over the scored classes. Ground-truth
// sentinels (invalid, ignored) are skipped; predictions must be scored
// classes. Per-class IoU = TP / (TP + FP + FN), undefined when the
// denominator is zero; mIoU averages the defined classes only. Reports are
// mergeable, and merging commutes with accumulation.
class EvalReport {
 public:
  explicit EvalReport(std::size_t classes = kNumEvalClasses);

  void accumulate(std::span<const TrainId> predictions,
                  std::span<const TrainId> labels);
  void merge(const EvalReport& other);

  std::size_t classes() const { return classes_; }
  std::uint64_t confusion(std::size_t gt, std::size_t pred) const {
    return m_[gt * classes_ + pred];
  }
  std::uint64_t counted() const { return counted_; }

  std::optional<double> class_iou(std::size_t c) const;
  std::optional<double> miou() const;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> m_;  // row = ground truth, column = prediction
  std::uint64_t counted_ = 0;
};

// Row-wise argmax over an n x classes logit matrix; ties resolve to the
// lowest class index.
std::vector<TrainId> argmax_labels(std::span<const double> logits, std::size_t n,
                                   std::size_t classes);

// CSV report: one "name,iou" row per class from the merged groups, then one
// "group,miou" row per group, then "overall,miou". Undefined values render
// as "-". Group order is preserved.
std::string render_report_csv(
    const std::vector<std::pair<std::string, EvalReport>>& groups,
    std::span<const std::string_view> class_names);

// Console-friendly rendering of the same content.
std::string render_report_text(
    const std::vector<std::pair<std::string, EvalReport>>& groups,
    std::span<const std::string_view> class_names);

}  // namespace pointdr
