#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointdr/label_map.hpp"
#include "pointdr/metrics.hpp"
#include "pointdr/rng.hpp"

using namespace pointdr;

namespace {

// Set-arithmetic IoU oracle: per class, count TP/FP/FN by direct scan.
struct Oracle {
  std::vector<std::uint64_t> tp, fp, fn;
  explicit Oracle(std::size_t classes) : tp(classes), fp(classes), fn(classes) {}

  void add(const std::vector<TrainId>& pred, const std::vector<TrainId>& gt,
           std::size_t classes) {
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i] >= classes) continue;  // sentinel ground truth
      for (std::size_t c = 0; c < classes; ++c) {
        const bool in_pred = pred[i] == c;
        const bool in_gt = gt[i] == c;
        if (in_pred && in_gt) ++tp[c];
        if (in_pred && !in_gt) ++fp[c];
        if (!in_pred && in_gt) ++fn[c];
      }
    }
  }

  std::optional<double> iou(std::size_t c) const {
    const std::uint64_t denom = tp[c] + fp[c] + fn[c];
    if (denom == 0) return std::nullopt;
    return static_cast<double>(tp[c]) / static_cast<double>(denom);
  }

  std::optional<double> miou(std::size_t classes) const {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (const auto v = iou(c)) {
        sum += *v;
        ++defined;
      }
    }
    if (defined == 0) return std::nullopt;
    return sum / static_cast<double>(defined);
  }
};

}  // namespace

TEST_CASE("hand case: confusion, IoU, and mIoU") {
  // 3 classes. gt:   0 0 1 1 2 ignored
  //            pred: 0 1 1 1 0 0
  EvalReport r(3);
  const std::vector<TrainId> gt = {0, 0, 1, 1, 2, kIgnoredLabel};
  const std::vector<TrainId> pred = {0, 1, 1, 1, 0, 0};
  r.accumulate(pred, gt);

  CHECK(r.counted() == 5);
  CHECK(r.confusion(0, 0) == 1);
  CHECK(r.confusion(0, 1) == 1);
  CHECK(r.confusion(1, 1) == 2);
  CHECK(r.confusion(2, 0) == 1);
  CHECK(r.confusion(2, 2) == 0);

  // class 0: TP 1, FP 1 (gt2->0), FN 1 (gt0->1) => 1/3.
  CHECK(*r.class_iou(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // class 1: TP 2, FP 1, FN 0 => 2/3.
  CHECK(*r.class_iou(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // class 2: TP 0, FP 0, FN 1 => 0.
  CHECK(*r.class_iou(2) == 0.0);
  CHECK(*r.miou() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("undefined IoU drops out of the mIoU average") {
  EvalReport r(3);
  const std::vector<TrainId> gt = {0, 0};
  const std::vector<TrainId> pred = {0, 0};
  r.accumulate(pred, gt);
  CHECK(*r.class_iou(0) == 1.0);
  CHECK(!r.class_iou(1).has_value());  // never seen in gt or pred
  CHECK(!r.class_iou(2).has_value());
  CHECK(*r.miou() == 1.0);

  const EvalReport empty(3);
  CHECK(!empty.miou().has_value());
  CHECK(empty.counted() == 0);
}

TEST_CASE("sentinel ground truth is skipped; sentinel predictions throw") {
  EvalReport r(3);
  const std::vector<TrainId> gt = {kInvalidClass, kIgnoredLabel};
  const std::vector<TrainId> pred = {0, 1};
  r.accumulate(pred, gt);
  CHECK(r.counted() == 0);
  CHECK(!r.miou().has_value());

  const std::vector<TrainId> gt2 = {0};
  const std::vector<TrainId> badpred = {kInvalidClass};
  CHECK_THROWS_AS(r.accumulate(badpred, gt2), std::invalid_argument);

  const std::vector<TrainId> mismatched = {0, 1, 2};
  CHECK_THROWS_AS(r.accumulate(pred, mismatched), std::invalid_argument);
}

TEST_CASE("matches the set-arithmetic oracle on random labelings") {
  Rng rng(606);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t classes = 2 + rng.uniform_index(18);
    const std::size_t n = 1 + rng.uniform_index(1000);
    std::vector<TrainId> gt(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Ground truth mixes scored classes and both sentinels.
      const std::size_t roll = rng.uniform_index(classes + 2);
      gt[i] = roll < classes ? static_cast<TrainId>(roll)
              : roll == classes ? kInvalidClass
                                : kIgnoredLabel;
      pred[i] = static_cast<TrainId>(rng.uniform_index(classes));
    }

    EvalReport r(classes);
    r.accumulate(pred, gt);
    Oracle oracle(classes);
    oracle.add(pred, gt, classes);

    for (std::size_t c = 0; c < classes; ++c) {
      const auto got = r.class_iou(c);
      const auto want = oracle.iou(c);
      CHECK(got.has_value() == want.has_value());
      if (got && want) {
        CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
      }
    }
    const auto gm = r.miou();
    const auto wm = oracle.miou(classes);
    CHECK(gm.has_value() == wm.has_value());
    if (gm && wm) CHECK(*gm == doctest::Approx(*wm).epsilon(1e-12));
  }
}

TEST_CASE("merge equals accumulating everything into one report") {
  Rng rng(707);
  const std::size_t classes = 7;
  EvalReport merged(classes), all(classes);
  for (int part = 0; part < 5; ++part) {
    const std::size_t n = 50 + rng.uniform_index(200);
    std::vector<TrainId> gt(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt[i] = static_cast<TrainId>(rng.uniform_index(classes + 1));
      if (gt[i] == classes) gt[i] = kIgnoredLabel;
      pred[i] = static_cast<TrainId>(rng.uniform_index(classes));
    }
    EvalReport piece(classes);
    piece.accumulate(pred, gt);
    merged.merge(piece);
    all.accumulate(pred, gt);
  }
  CHECK(merged.counted() == all.counted());
  for (std::size_t g = 0; g < classes; ++g) {
    for (std::size_t p = 0; p < classes; ++p) {
      CHECK(merged.confusion(g, p) == all.confusion(g, p));
    }
  }

  EvalReport wrong(classes + 1);
  CHECK_THROWS_AS(merged.merge(wrong), std::invalid_argument);
}

TEST_CASE("argmax ties resolve to the lowest class index") {
  const std::vector<double> logits = {0.5, 0.5, 0.1,   //
                                      -1.0, 2.0, 2.0,  //
                                      3.0, 1.0, 3.0};
  const auto labels = argmax_labels(logits, 3, 3);
  CHECK(labels == std::vector<TrainId>{0, 1, 0});
  CHECK_THROWS_AS(argmax_labels(logits, 2, 4), std::invalid_argument);
}

TEST_CASE("csv schema: class rows, group rows, overall row") {
  EvalReport a(2), b(2);
  const std::vector<TrainId> gt = {0, 1};
  const std::vector<TrainId> right = {0, 1};
  const std::vector<TrainId> wrong = {1, 0};
  a.accumulate(right, gt);
  b.accumulate(wrong, gt);

  const std::vector<std::string_view> names = {"car", "road"};
  const std::vector<std::pair<std::string, EvalReport>> groups = {
      {"clear", a}, {"rain", b}};
  const std::string csv = render_report_csv(groups, names);

  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);

  // Merged over both groups: each class has TP 1, FP 1, FN 1 -> 1/3.
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "car,0.3333");
  CHECK(lines[1] == "road,0.3333");
  CHECK(lines[2] == "clear,1.0000");
  CHECK(lines[3] == "rain,0.0000");
  CHECK(lines[4] == "overall,0.3333");
}

TEST_CASE("csv renders undefined values as a dash") {
  EvalReport a(2);  // nothing accumulated
  const std::vector<std::string_view> names = {"car", "road"};
  const std::vector<std::pair<std::string, EvalReport>> groups = {{"clear", a}};
  const std::string csv = render_report_csv(groups, names);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "car,-");
  CHECK(lines[1] == "road,-");
  CHECK(lines[2] == "clear,-");
  CHECK(lines[3] == "overall,-");
}

TEST_CASE("text report carries the same numbers as the csv") {
  EvalReport a(2);
  const std::vector<TrainId> gt = {0, 1};
  const std::vector<TrainId> pred = {0, 1};
  a.accumulate(pred, gt);
  const std::vector<std::string_view> names = {"car", "road"};
  const std::vector<std::pair<std::string, EvalReport>> groups = {{"clear", a}};
  const std::string text = render_report_text(groups, names);
  CHECK(text.find("car") != std::string::npos);
  CHECK(text.find("1.0000") != std::string::npos);
  CHECK(text.find("overall") != std::string::npos);
}

TEST_CASE("class names for the standard label set line up with train ids") {
  const LabelMap& map = LabelMap::semantic_kitti();
  CHECK(map.class_name(0) == "car");
  CHECK(map.class_name(8) == "road");
  CHECK(map.class_name(18) == "traffic-sign");
  CHECK(map.class_name(kInvalidClass) == "invalid");
  CHECK(map.class_name(kIgnoredLabel) == "ignored");
}
