#include "pointdr/metrics.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pointdr {
namespace {

std::string format_iou(std::optional<double> v) {
  if (!v.has_value()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

EvalReport merge_all(const std::vector<std::pair<std::string, EvalReport>>& groups) {
  if (groups.empty()) throw std::invalid_argument("no report groups");
  EvalReport overall(groups.front().second.classes());
  for (const auto& [name, report] : groups) overall.merge(report);
  return overall;
}

void check_names(std::size_t classes, std::span<const std::string_view> names) {
  if (names.size() != classes) {
    throw std::invalid_argument("class name count does not match the report");
  }
}

}  // namespace

EvalReport::EvalReport(std::size_t classes) : classes_(classes) {
  if (classes == 0) throw std::invalid_argument("classes must be > 0");
  m_.assign(classes * classes, 0);
}

void EvalReport::accumulate(std::span<const TrainId> predictions,
                            std::span<const TrainId> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const TrainId gt = labels[i];
    if (gt >= classes_) continue;  // sentinel ground truth is not scored
    const TrainId pred = predictions[i];
    if (pred >= classes_) {
      throw std::invalid_argument("prediction " + std::to_string(pred) +
                                  " is not a scored class");
    }
    m_[static_cast<std::size_t>(gt) * classes_ + pred] += 1;
    counted_ += 1;
  }
}

void EvalReport::merge(const EvalReport& other) {
  if (other.classes_ != classes_) {
    throw std::invalid_argument("cannot merge reports of different widths");
  }
  for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += other.m_[i];
  counted_ += other.counted_;
}

std::optional<double> EvalReport::class_iou(std::size_t c) const {
  const std::uint64_t tp = m_[c * classes_ + c];
  std::uint64_t row = 0, col = 0;
  for (std::size_t j = 0; j < classes_; ++j) {
    row += m_[c * classes_ + j];
    col += m_[j * classes_ + c];
  }
  const std::uint64_t denom = row + col - tp;  // TP + FP + FN
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

std::optional<double> EvalReport::miou() const {
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < classes_; ++c) {
    if (const auto iou = class_iou(c)) {
      sum += *iou;
      defined += 1;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / static_cast<double>(defined);
}

std::vector<TrainId> argmax_labels(std::span<const double> logits, std::size_t n,
                                   std::size_t classes) {
  if (classes == 0 || classes > 255) {
    throw std::invalid_argument("classes must be in 1..255");
  }
  if (logits.size() != n * classes) {
    throw std::invalid_argument("logit buffer size does not match n x classes");
  }
  std::vector<TrainId> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = logits.data() + i * classes;
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[i] = static_cast<TrainId>(best);
  }
  return out;
}

std::string render_report_csv(
    const std::vector<std::pair<std::string, EvalReport>>& groups,
    std::span<const std::string_view> class_names) {
  const EvalReport overall = merge_all(groups);
  check_names(overall.classes(), class_names);
  std::string out;
  for (std::size_t c = 0; c < overall.classes(); ++c) {
    out += std::string(class_names[c]) + "," + format_iou(overall.class_iou(c)) + "\n";
  }
  for (const auto& [name, report] : groups) {
    out += name + "," + format_iou(report.miou()) + "\n";
  }
  out += "overall," + format_iou(overall.miou()) + "\n";
  return out;
}

std::string render_report_text(
    const std::vector<std::pair<std::string, EvalReport>>& groups,
    std::span<const std::string_view> class_names) {
  const EvalReport overall = merge_all(groups);
  check_names(overall.classes(), class_names);
  std::string out = "per-class IoU (all groups merged):\n";
  for (std::size_t c = 0; c < overall.classes(); ++c) {
    out += "  " + std::string(class_names[c]) + ": " +
           format_iou(overall.class_iou(c)) + "\n";
  }
  out += "mIoU by group:\n";
  for (const auto& [name, report] : groups) {
    out += "  " + name + ": " + format_iou(report.miou()) + "\n";
  }
  out += "overall mIoU: " + format_iou(overall.miou()) + "\n";
  return out;
}

}  // namespace pointdr
