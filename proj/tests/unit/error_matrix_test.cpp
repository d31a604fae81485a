#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "annosim/error_matrix.hpp"
#include "annosim/util.hpp"
#include "support/oracles.hpp"

using namespace annosim;
using annosim::testing::MatrixEvent;

namespace {

ClassifierConfig tiny_config() {
  ClassifierConfig c;
  c.passes_per_update = 2;
  return c;
}

StreamInstance inst(const std::string& id, const std::string& text) {
  StreamInstance s;
  s.id = id;
  s.text = text;
  s.arrival_time = 0.0;
  return s;
}

// Fixed-weight model so predictions are a pure function of the text; lets
// grid cells be computed by hand.
OnlineClassifier routed_model(const Featurizer& feat) {
  OnlineClassifier model(4, 8, tiny_config(), 1);
  // steer each "wN" token's hash bucket toward class N
  for (int c = 1; c <= 4; ++c) {
    const FeatureVector v = feat(strf("w%d", c));
    for (int j = 0; j < 8; ++j) {
      model.weights()[static_cast<std::size_t>(c - 1) * 8 + j] = 10.0 * v[j];
    }
  }
  return model;
}

}  // namespace

TEST_CASE("first row starts from zeros and fills only its own column") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  // model predicts class 2 for "w2"; annotate it as class 2: perfect
  matrix.add_annotation(inst("a", "w2"), 2, model, feat);
  REQUIRE(matrix.rows().size() == 1);
  const auto& row = matrix.rows()[0];
  CHECK(row.event_index == 0);
  CHECK(row.interval_index == 1);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      CHECK(row.at(i, j, 4) == 0.0);  // perfect prediction, all else zero
    }
  }
}

TEST_CASE("a wrong prediction shows up in the annotated column") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  // text says w3, but we annotate class 1: model predicts 3
  // truth=[1], pred=[3] -> F1(c1)=0 with support 1 -> error 1
  // c3 has no annotated row -> support 0 -> forced 0
  matrix.add_annotation(inst("a", "w3"), 1, model, feat);
  const auto& row = matrix.rows()[0];
  CHECK(row.at(1, 1, 4) == 1.0);
  CHECK(row.at(3, 1, 4) == 0.0);
  CHECK(row.at(2, 1, 4) == 0.0);
  CHECK(row.at(4, 1, 4) == 0.0);
}

TEST_CASE("copy-forward preserves every other column exactly") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  matrix.add_annotation(inst("a", "w3"), 1, model, feat);  // column 1 dirty
  const auto first = matrix.rows()[0].errors;

  matrix.add_annotation(inst("b", "w2"), 2, model, feat);  // recomputes col 2
  const auto& second = matrix.rows()[1];
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      if (j == 2) continue;
      CHECK(second.at(i, j, 4) ==
            first[static_cast<std::size_t>(i - 1) * 4 + (j - 1)]);
    }
  }
  // the annotated column reflects the new window: truth [1,2], pred [3,2]
  // F1(c2) = 1 -> error 0
  CHECK(second.at(2, 2, 4) == 0.0);
  // c1 support 1, F1 0 -> error 1 lands in column 2 as well
  CHECK(second.at(1, 2, 4) == 1.0);
}

TEST_CASE("event indices are global and monotone") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  matrix.add_annotation(inst("a", "w1"), 1, model, feat);
  matrix.begin_interval(2);
  matrix.add_annotation(inst("b", "w2"), 2, model, feat);
  matrix.begin_interval(7);  // far jump prunes everything
  matrix.add_annotation(inst("c", "w3"), 3, model, feat);
  REQUIRE(matrix.rows().size() == 1);
  CHECK(matrix.rows()[0].event_index == 2);  // counter survives pruning
  CHECK(matrix.event_count() == 3);
}

TEST_CASE("window keeps the current and two previous intervals") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  for (int interval = 1; interval <= 6; ++interval) {
    matrix.begin_interval(interval);
    matrix.add_annotation(inst(strf("i%d", interval), "w1"), 1, model, feat);
    int lo = 99, hi = 0;
    for (const auto& r : matrix.rows()) {
      lo = std::min(lo, r.interval_index);
      hi = std::max(hi, r.interval_index);
    }
    CHECK(hi == interval);
    CHECK(lo >= interval - 2);
    CHECK(static_cast<int>(matrix.rows().size()) == std::min(interval, 3));
  }
}

TEST_CASE("interval clock cannot move backwards") {
  ErrorMatrix matrix(4);
  matrix.begin_interval(5);
  CHECK_THROWS_AS(matrix.begin_interval(4), std::invalid_argument);
  CHECK_NOTHROW(matrix.begin_interval(5));
}

TEST_CASE("error avoidance score sums a column over the window") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  matrix.add_annotation(inst("a", "w3"), 1, model, feat);
  // row grid: only cell (1,1) = 1.0
  CHECK(matrix.error_avoidance_score(1) == 1.0);
  CHECK(matrix.error_avoidance_score(3) == 0.0);

  matrix.add_annotation(inst("b", "w3"), 1, model, feat);
  // second row recomputes column 1: truth [1,1], pred [3,3]
  // F1(c1) = 0 again -> cell (1,1) = 1.0 in both rows
  CHECK(matrix.error_avoidance_score(1) == 2.0);
}

TEST_CASE("decay score uses the two most recent occurrences") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  matrix.add_annotation(inst("a", "w1"), 1, model, feat);  // event 0
  CHECK(matrix.decay_score(1) == 0.0);  // a single occurrence scores zero

  matrix.add_annotation(inst("b", "w1"), 1, model, feat);  // event 1
  CHECK(matrix.decay_score(1) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(matrix.decay_score(1) ==
        doctest::Approx(0.3678794411714423216).epsilon(1e-12));

  matrix.add_annotation(inst("c", "w2"), 2, model, feat);  // event 2
  matrix.add_annotation(inst("d", "w2"), 2, model, feat);  // event 3
  matrix.add_annotation(inst("e", "w1"), 1, model, feat);  // event 4
  // most recent pair for class 1: events 4 and 1 -> gap 3
  CHECK(matrix.decay_score(1) ==
        doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(matrix.decay_score(2) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(matrix.decay_score(3) == 0.0);
}

TEST_CASE("discard stays inactive through the warm intervals") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  // plenty of consecutive errors on class 1
  for (int i = 0; i < 4; ++i) {
    matrix.add_annotation(inst(strf("x%d", i), "w3"), 1, model, feat);
  }
  CHECK(matrix.error_avoidance_score(1) > 0.0);
  CHECK(matrix.decay_score(1) > 0.0);
  CHECK(matrix.discarded_class(1) == std::nullopt);
  CHECK(matrix.discarded_class(3) == std::nullopt);
  CHECK(matrix.discarded_class(4).has_value());
  CHECK(matrix.discarded_class(4).value() == 1);
  // custom warm window pushes activation out further
  CHECK(matrix.discarded_class(4, 5) == std::nullopt);
  CHECK(matrix.discarded_class(6, 5).has_value());
}

TEST_CASE("discard goes inactive on all-zero scores") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  ErrorMatrix matrix(4);
  matrix.begin_interval(5);
  // perfectly predicted rows only: every grid entry stays 0
  matrix.add_annotation(inst("a", "w2"), 2, model, feat);
  matrix.add_annotation(inst("b", "w2"), 2, model, feat);
  CHECK(matrix.discarded_class(5) == std::nullopt);
}

TEST_CASE("empty matrix discards nothing") {
  ErrorMatrix matrix(4);
  CHECK(matrix.discarded_class(10) == std::nullopt);
}

TEST_CASE("incremental grids match a from-scratch rebuild") {
  const auto feat = Featurizer::hashed(16, 5);
  ClassifierConfig cfg = tiny_config();

  for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
    Rng rng(seed);
    // random annotated classes over drifting intervals, model updating live
    OnlineClassifier live(4, 16, cfg, 99);
    OnlineClassifier replay = live;
    ErrorMatrix matrix(4);
    std::vector<MatrixEvent> events;

    int interval = 1;
    matrix.begin_interval(interval);
    const int n_events = 60;
    for (int e = 0; e < n_events; ++e) {
      if (rng.next_double() < 0.15) {
        interval += 1 + static_cast<int>(rng.bounded(2));
        matrix.begin_interval(interval);
      }
      MatrixEvent ev;
      const auto word = static_cast<unsigned long long>(rng.bounded(4) + 1);
      const auto tok = static_cast<unsigned long long>(rng.bounded(9));
      ev.instance = inst(strf("s%llu-%d", (unsigned long long)seed, e),
                         strf("w%llu tok%llu", word, tok));
      ev.annotated_class = static_cast<int>(rng.bounded(4)) + 1;
      ev.interval_index = interval;
      events.push_back(ev);

      live.partial_update(feat(ev.instance.text), ev.annotated_class);
      matrix.add_annotation(ev.instance, ev.annotated_class, live, feat);
    }

    const auto rebuilt =
        annosim::testing::rebuild_matrix(events, replay, feat, 4);
    REQUIRE(rebuilt.rows.size() == matrix.rows().size());
    for (std::size_t r = 0; r < rebuilt.rows.size(); ++r) {
      const auto& a = matrix.rows()[r];
      const auto& b = rebuilt.rows[r];
      CHECK(a.instance_id == b.instance_id);
      CHECK(a.event_index == b.event_index);
      CHECK(a.interval_index == b.interval_index);
      CHECK(a.annotated_class == b.annotated_class);
      REQUIRE(a.errors.size() == b.errors.size());
      for (std::size_t i = 0; i < a.errors.size(); ++i) {
        CHECK(a.errors[i] == doctest::Approx(b.errors[i]).epsilon(1e-9));
      }
    }
    for (int c = 1; c <= 4; ++c) {
      CHECK(matrix.error_avoidance_score(c) ==
            doctest::Approx(rebuilt.eas[c - 1]).epsilon(1e-9));
      CHECK(matrix.decay_score(c) ==
            doctest::Approx(rebuilt.decay[c - 1]).epsilon(1e-9));
    }
  }
}

TEST_CASE("jsonl dump carries one record per row") {
  const auto feat = Featurizer::hashed(8, 3);
  const auto model = routed_model(feat);
  LabelSet labels;
  ErrorMatrix matrix(4);
  matrix.begin_interval(1);
  matrix.add_annotation(inst("a", "w1"), 1, model, feat);
  matrix.add_annotation(inst("b", "w2"), 2, model, feat);
  const std::string dump = matrix.to_jsonl(labels);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 2);
  CHECK(dump.find("\"instance_id\":\"a\"") != std::string::npos);
  CHECK(dump.find("infrastructure_and_utility_damage") != std::string::npos);
}
