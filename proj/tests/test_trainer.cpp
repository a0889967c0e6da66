#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointdr/errors.hpp"
#include "pointdr/rng.hpp"
#include "pointdr/toy.hpp"
#include "pointdr/trainer.hpp"

using namespace pointdr;

namespace {

// Small-but-learnable setup so full training runs stay fast.
TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_scans = 2;
  cfg.toy.train_scenes = 4;
  cfg.toy.val_scenes = 2;
  cfg.toy.ground_points = 120;
  cfg.toy.vehicles = 2;
  cfg.toy.vehicle_points = 24;
  cfg.toy.buildings = 2;
  cfg.toy.building_points = 30;
  cfg.toy.trunks = 1;
  cfg.toy.trunk_points = 10;
  cfg.toy.poles = 1;
  cfg.toy.pole_points = 8;
  cfg.toy.veg_blobs = 1;
  cfg.toy.veg_points = 16;
  return cfg;
}

bool params_equal(Model& a, Model& b) {
  auto ta = a.tensors();
  auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (*ta[i].value != *tb[i].value) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config text parsing: defaults, comments, round-trip") {
  const TrainConfig defaults = parse_train_config_text("");
  CHECK(defaults.pipeline == Pipeline::pointdr);
  CHECK(defaults.lambda_ct == 0.1);
  CHECK(defaults.tau == 0.07);
  CHECK(defaults.bank_momentum == 0.99);
  CHECK(defaults.lr == 0.05);
  CHECK(defaults.epochs == 20);
  CHECK(defaults.schedule == Schedule::poly);

  const TrainConfig parsed = parse_train_config_text(
      "# comment line\n"
      "pipeline = ce   # trailing comment\n"
      "\n"
      "seed = 7\n"
      "epochs = 5\n"
      "lr = 0.01\n"
      "schedule = constant\n"
      "lambda_ct = 0\n"
      "use_bank = false\n"
      "encoder_hidden = 16,8\n"
      "embed_dim = 12\n");
  CHECK(parsed.pipeline == Pipeline::ce_only);
  CHECK(parsed.seed == 7);
  CHECK(parsed.epochs == 5);
  CHECK(parsed.lr == 0.01);
  CHECK(parsed.schedule == Schedule::constant);
  CHECK(parsed.lambda_ct == 0.0);
  CHECK(!parsed.use_bank);
  CHECK(parsed.model.encoder_hidden == std::vector<std::size_t>{16, 8});
  CHECK(parsed.model.embed_dim == 12);

  // serialize -> parse is the identity on every serialized field.
  TrainConfig cfg = tiny_config();
  cfg.pipeline = Pipeline::ce_only;
  cfg.seed = 99;
  cfg.lambda_ct = 0.25;
  cfg.augment.dropout_prob = 0.75;
  const TrainConfig back = parse_train_config_text(serialize_train_config(cfg));
  CHECK(back.pipeline == cfg.pipeline);
  CHECK(back.seed == cfg.seed);
  CHECK(back.lambda_ct == cfg.lambda_ct);
  CHECK(back.augment.dropout_prob == cfg.augment.dropout_prob);
  CHECK(back.toy.train_scenes == cfg.toy.train_scenes);
  CHECK(back.model.encoder_hidden == cfg.model.encoder_hidden);
  CHECK(back.epochs == cfg.epochs);
}

TEST_CASE("config text parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_train_config_text("nonsense_key = 3"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config_text("pipeline = magic"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config_text("lr = abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config_text("epochs = -3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config_text("use_bank = maybe"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config_text("just a line without equals"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_train_config(std::filesystem::path("/no/such/file")),
                  FormatError);

  // Malformed lines report the origin and line number.
  try {
    parse_train_config_text("lr = 0.1\nbroken line\n", "myfile");
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("myfile:2") != std::string::npos);
  }
}

TEST_CASE("config validation rejects out-of-range settings") {
  CHECK_NOTHROW(tiny_config().validate());
  TrainConfig bad = tiny_config();
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.batch_scans = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.bank_momentum = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.lambda_ct = -0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.lr = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("scan seeds are stable and collision-free across epochs and scans") {
  const TrainConfig cfg = tiny_config();
  std::set<std::uint64_t> seen;
  for (std::size_t epoch = 0; epoch < 8; ++epoch) {
    for (std::size_t idx = 0; idx < 64; ++idx) {
      const std::uint64_t s = scan_seed(cfg, epoch, idx);
      CHECK(s == scan_seed(cfg, epoch, idx));
      seen.insert(s);
    }
  }
  CHECK(seen.size() == 8 * 64);

  TrainConfig other = cfg;
  other.seed += 1;
  CHECK(scan_seed(other, 0, 0) != scan_seed(cfg, 0, 0));
}

TEST_CASE("toy scenes: determinism, split separation, class inventory") {
  const ToyConfig cfg = tiny_config().toy;
  const auto train_a = generate_toy(cfg, ToySplit::train, 11);
  const auto train_b = generate_toy(cfg, ToySplit::train, 11);
  const auto val = generate_toy(cfg, ToySplit::val, 11);
  const auto train_c = generate_toy(cfg, ToySplit::train, 12);

  REQUIRE(train_a.size() == cfg.train_scenes);
  REQUIRE(val.size() == cfg.val_scenes);

  // Bitwise reproducible; a different seed or split changes the geometry.
  for (std::size_t s = 0; s < train_a.size(); ++s) {
    REQUIRE(train_a[s].size() == train_b[s].size());
    for (std::size_t i = 0; i < train_a[s].size(); ++i) {
      CHECK(train_a[s].points[i].x == train_b[s].points[i].x);
      CHECK(train_a[s].points[i].intensity == train_b[s].points[i].intensity);
    }
    CHECK(train_a[s].labels == train_b[s].labels);
  }
  CHECK(train_a[0].points[0].x != train_c[0].points[0].x);
  CHECK(train_a[0].points[0].x != val[0].points[0].x);

  // Exactly the documented classes appear, and every scan validates.
  const std::set<TrainId> allowed = {0, 8, 10, 12, 14, 15, 16, 17};
  std::set<TrainId> seen;
  for (const auto& scan : train_a) {
    CHECK_NOTHROW(scan.validate());
    CHECK(scan.has_labels());
    CHECK(scan.size() > 100);
    for (const TrainId l : scan.labels) {
      CHECK(allowed.count(l) == 1);
      seen.insert(l);
    }
  }
  CHECK(seen == allowed);

  ToyConfig bad = cfg;
  bad.train_scenes = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.road_half_width = 30.0;  // wider than the extent
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("total step budget is epochs x ceil(scans / batch)") {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 4;
  cfg.batch_scans = 2;
  CHECK(TrainState(cfg, 5).total_steps == 4 * 3);
  CHECK(TrainState(cfg, 4).total_steps == 4 * 2);
  CHECK(TrainState(cfg, 1).total_steps == 4 * 1);
}

TEST_CASE("one pointdr step with lambda 0 matches a ce_only step bitwise") {
  TrainConfig ce_cfg = tiny_config();
  ce_cfg.pipeline = Pipeline::ce_only;
  TrainConfig pd_cfg = tiny_config();
  pd_cfg.pipeline = Pipeline::pointdr;
  pd_cfg.lambda_ct = 0.0;

  const auto scans = generate_toy(ce_cfg.toy, ToySplit::train, ce_cfg.seed);
  TrainState ce_state(ce_cfg, scans.size());
  TrainState pd_state(pd_cfg, scans.size());

  const std::vector<BatchItem> batch = {{&scans[0], scan_seed(ce_cfg, 0, 0)},
                                        {&scans[1], scan_seed(ce_cfg, 0, 1)}};
  const LossBreakdown lb_ce = train_step(ce_state, ce_cfg, batch);
  const LossBreakdown lb_pd = train_step(pd_state, pd_cfg, batch);

  CHECK(lb_ce.ce == lb_pd.ce);
  CHECK(lb_pd.ct == 0.0);
  CHECK(lb_ce.total == lb_pd.total);
  CHECK(params_equal(ce_state.model, pd_state.model));

  // Neither pipeline touched the bank.
  for (std::size_t c = 0; c < pd_state.bank.classes(); ++c) {
    CHECK(!pd_state.bank.initialized(c));
  }
  for (const double v : pd_state.bank.data()) CHECK(v == 0.0);
}

TEST_CASE("pointdr with nonzero lambda diverges from ce_only") {
  TrainConfig pd_cfg = tiny_config();
  pd_cfg.lambda_ct = 0.1;
  TrainConfig ce_cfg = tiny_config();
  ce_cfg.pipeline = Pipeline::ce_only;

  const auto scans = generate_toy(pd_cfg.toy, ToySplit::train, pd_cfg.seed);
  TrainState pd_state(pd_cfg, scans.size());
  TrainState ce_state(ce_cfg, scans.size());
  const std::vector<BatchItem> batch = {{&scans[0], scan_seed(pd_cfg, 0, 0)},
                                        {&scans[1], scan_seed(pd_cfg, 0, 1)}};
  const LossBreakdown lb_pd = train_step(pd_state, pd_cfg, batch);
  train_step(ce_state, ce_cfg, batch);

  CHECK(lb_pd.ct > 0.0);
  CHECK(lb_pd.total == lb_pd.ce + 0.1 * lb_pd.ct);
  CHECK(!params_equal(pd_state.model, ce_state.model));

  std::size_t initialized = 0;
  for (std::size_t c = 0; c < pd_state.bank.classes(); ++c) {
    initialized += pd_state.bank.initialized(c) ? 1 : 0;
  }
  CHECK(initialized > 0);
}

TEST_CASE("full training: deterministic, seed-sensitive, lambda-0 equality") {
  TrainConfig cfg = tiny_config();
  const auto scans = generate_toy(cfg.toy, ToySplit::train, cfg.seed);

  TrainRun a = train(cfg, scans);
  TrainRun b = train(cfg, scans);
  REQUIRE(a.curve.size() == cfg.epochs);
  CHECK(params_equal(a.state.model, b.state.model));
  for (std::size_t e = 0; e < a.curve.size(); ++e) {
    CHECK(a.curve[e].ce == b.curve[e].ce);
    CHECK(a.curve[e].ct == b.curve[e].ct);
    CHECK(a.curve[e].lr == b.curve[e].lr);
  }
  CHECK(a.state.bank.data() == b.state.bank.data());

  TrainConfig reseeded = cfg;
  reseeded.seed = cfg.seed + 1;
  TrainRun c = train(reseeded, generate_toy(reseeded.toy, ToySplit::train,
                                            reseeded.seed));
  CHECK(!params_equal(a.state.model, c.state.model));

  // The lambda-0 equivalence holds across a whole run, bank included.
  TrainConfig pd0 = cfg;
  pd0.lambda_ct = 0.0;
  TrainConfig ce = cfg;
  ce.pipeline = Pipeline::ce_only;
  TrainRun run_pd0 = train(pd0, scans);
  TrainRun run_ce = train(ce, scans);
  CHECK(params_equal(run_pd0.state.model, run_ce.state.model));
  CHECK(run_pd0.state.bank.data() == run_ce.state.bank.data());
  for (std::size_t e = 0; e < run_pd0.curve.size(); ++e) {
    CHECK(run_pd0.curve[e].ce == run_ce.curve[e].ce);
    CHECK(run_pd0.curve[e].ct == 0.0);
    CHECK(run_ce.curve[e].ct == 0.0);
  }
}

TEST_CASE("poly schedule hits the documented curve; constant stays put") {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 3;
  cfg.batch_scans = 2;  // 4 scans -> 2 steps per epoch, 6 total
  const auto scans = generate_toy(cfg.toy, ToySplit::train, cfg.seed);
  REQUIRE(scans.size() == 4);

  const TrainRun run = train(cfg, scans);
  // Epoch e's recorded lr is the one applied at its last step: step 2e+1.
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(run.curve[e].lr ==
          poly_lr(cfg.lr, 2 * e + 1, 6, cfg.poly_power));
  }

  TrainConfig flat = cfg;
  flat.schedule = Schedule::constant;
  const TrainRun frun = train(flat, scans);
  for (const EpochStats& e : frun.curve) {
    CHECK(e.lr == cfg.lr);
  }
}

TEST_CASE("training reduces the classification loss and beats chance") {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 8;
  cfg.toy.train_scenes = 8;
  const auto scans = generate_toy(cfg.toy, ToySplit::train, cfg.seed);
  const TrainRun run = train(cfg, scans);

  CHECK(run.curve.back().ce < 0.6 * run.curve.front().ce);
  for (const EpochStats& e : run.curve) {
    CHECK(std::isfinite(e.ce));
    CHECK(std::isfinite(e.ct));
    CHECK(e.total == doctest::Approx(e.ce + 0.1 * e.ct).epsilon(1e-12));
  }

  const EvalReport report = evaluate(run.state.model, scans);
  REQUIRE(report.miou().has_value());
  // Random 19-class predictions on these scenes sit near 1/37; trained
  // models must clear that by a wide margin on their own training data.
  CHECK(*report.miou() > 0.15);
}

TEST_CASE("train_step rejects bad batches") {
  TrainConfig cfg = tiny_config();
  const auto scans = generate_toy(cfg.toy, ToySplit::train, cfg.seed);
  TrainState state(cfg, scans.size());
  CHECK_THROWS_AS(train_step(state, cfg, {}), std::invalid_argument);

  PointCloud unlabeled;
  unlabeled.points.push_back({1.0, 1.0, 1.0, 0.5});
  const std::vector<BatchItem> bad = {{&unlabeled, 1}};
  CHECK_THROWS_AS(train_step(state, cfg, bad), std::invalid_argument);

  CHECK_THROWS_AS(train(cfg, {}), std::invalid_argument);
}

TEST_CASE("bankless and gateless variants run and stay deterministic") {
  TrainConfig cfg = tiny_config();
  cfg.use_bank = false;
  const auto scans = generate_toy(cfg.toy, ToySplit::train, cfg.seed);
  const TrainRun a = train(cfg, scans);
  const TrainRun b = train(cfg, scans);
  CHECK(params_equal(const_cast<TrainRun&>(a).state.model,
                     const_cast<TrainRun&>(b).state.model));
  for (const double v : a.state.bank.data()) CHECK(v == 0.0);
  CHECK(std::isfinite(a.curve.back().ct));

  TrainConfig gateless = tiny_config();
  gateless.strong_gates = false;
  const TrainRun c = train(gateless, scans);
  CHECK(std::isfinite(c.curve.back().ct));
  CHECK(c.curve.back().ct > 0.0);
}

TEST_CASE("curve csv format") {
  std::vector<EpochStats> curve(2);
  curve[0] = {0, 1.5, 0.25, 1.525, 0.05};
  curve[1] = {1, 1.25, 0.5, 1.3, 0.025};
  const std::string csv = curve_csv(curve);
  CHECK(csv ==
        "epoch,ce,ct,total,lr\n"
        "0,1.5,0.25,1.525,0.05\n"
        "1,1.25,0.5,1.3,0.025\n");
}

TEST_CASE("evaluation groups scans by weather in fixed order") {
  TrainConfig cfg = tiny_config();
  auto scans = generate_toy(cfg.toy, ToySplit::val, cfg.seed);
  REQUIRE(scans.size() >= 2);
  Model model(cfg.model, 3);

  scans[0].weather = Weather::snow;
  // scans[1] stays untagged -> clear group.
  std::vector<PointCloud> tagged = {scans[0], scans[1], scans[0]};
  tagged[2].weather = Weather::rain;

  const auto groups = evaluate_by_weather(model, tagged);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].first == "clear");
  CHECK(groups[1].first == "rain");
  CHECK(groups[2].first == "snow");
  for (const auto& [name, report] : groups) {
    CHECK(report.counted() > 0);
  }

  // Merging the groups reproduces plain evaluate over the same scans.
  EvalReport merged(cfg.model.num_classes);
  for (const auto& [name, report] : groups) merged.merge(report);
  const EvalReport whole = evaluate(model, tagged);
  CHECK(merged.counted() == whole.counted());
  for (std::size_t g = 0; g < merged.classes(); ++g) {
    for (std::size_t p = 0; p < merged.classes(); ++p) {
      CHECK(merged.confusion(g, p) == whole.confusion(g, p));
    }
  }

  PointCloud unlabeled;
  unlabeled.points.push_back({1.0, 1.0, 1.0, 0.5});
  const std::vector<PointCloud> bad = {unlabeled};
  CHECK_THROWS_AS(evaluate(model, bad), std::invalid_argument);
}
