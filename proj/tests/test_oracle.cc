#include <doctest.h>

#include <stdexcept>

#include <numeric>

#include "redsum/oracle.h"
#include "support.h"

using namespace redsum;
using doctest::Approx;

namespace {

// best subset of size <= l by exhaustive search, ties to the lexicographically first
std::vector<std::size_t> best_subset(const Document& doc, std::size_t l) {
  std::vector<std::size_t> best;
  double best_score = 0.0;
  const std::size_t n = doc.size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    if (s.size() > l) continue;
    const double v = testsupport::naive_measure(doc, s);
    if (v > best_score + 1e-12) {
      best_score = v;
      best = s;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("greedy labels on constructed documents") {
  SUBCASE("abstract copies one sentence") {
    auto doc = make_document("d", {"a b c", "d e f", "g h i j", "k l", "m n o"}, std::vector<std::string>{"g h i j"},
                             std::nullopt);
    CHECK(greedy_oracle_labels(doc, 3) == std::vector<std::size_t>{2});
    CHECK(best_subset(doc, 3) == std::vector<std::size_t>{2});
  }
  SUBCASE("abstract joins two sentences") {
    auto doc = make_document("d", {"a b c", "d e f", "g h i", "k l m", "p q r"},
                             std::vector<std::string>{"a b c", "k l m"}, std::nullopt);
    CHECK(greedy_oracle_labels(doc, 3) == std::vector<std::size_t>{0, 3});
    CHECK(best_subset(doc, 3) == std::vector<std::size_t>{0, 3});
  }
  SUBCASE("labels follow extraction order") {
    auto doc = make_document("d", {"x y", "a b c d e"}, std::vector<std::string>{"a b c d e x y"}, std::nullopt);
    CHECK(greedy_oracle_labels(doc, 3) == std::vector<std::size_t>{1, 0});
  }
  SUBCASE("nothing overlaps") {
    auto doc = make_document("d", {"a b", "c d"}, std::vector<std::string>{"z"}, std::nullopt);
    CHECK(greedy_oracle_labels(doc, 3).empty());
  }
}

TEST_CASE("step gain is the difference of two summary measures") {
  auto doc = make_document("d", {"the cat sat", "on the mat", "a dog barked"},
                           std::vector<std::string>{"the cat sat on the mat"}, std::nullopt);
  const std::vector<std::size_t> sel{0};
  const double with = testsupport::naive_measure(doc, {0, 1});
  const double without = testsupport::naive_measure(doc, {0});
  CHECK(step_gain(doc, 1, sel) == Approx(with - without));
  CHECK(summary_measure(doc, sel) == Approx(without));
  CHECK(summary_measure(doc, std::vector<std::size_t>{}) == 0.0);
  CHECK_THROWS_AS(step_gain(doc, 0, sel), std::invalid_argument);
  auto gains = step_gains(doc, std::vector<std::size_t>{1, 2}, sel);
  CHECK(gains[0] == Approx(with - without));
  CHECK(gains[1] == Approx(testsupport::naive_measure(doc, {0, 2}) - without));
}

TEST_CASE("greedy steps maximize the gain") {
  Rng rng(11);
  for (int t = 0; t < 60; ++t) {
    auto doc = testsupport::random_document(rng, 2 + rng.below(8), 8, 12);
    auto labels = greedy_oracle_labels(doc, 3);
    REQUIRE(labels.size() <= 3);
    std::vector<std::size_t> sel;
    for (auto pick : labels) {
      const double base = testsupport::naive_measure(doc, sel);
      double best = -1.0;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < doc.size(); ++i) {
        if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
        auto with = sel;
        with.push_back(i);
        const double g = testsupport::naive_measure(doc, with) - base;
        if (g > best + 1e-12) {
          best = g;
          arg = i;
        }
      }
      REQUIRE(pick == arg);
      REQUIRE(best > 0.0);
      sel.push_back(pick);
    }
  }
}

TEST_CASE("target distribution") {
  auto q = target_distribution(std::vector<double>{0.0, 1.0}, 1.0);
  CHECK(q[0] == Approx(0.2689).epsilon(1e-4));
  CHECK(q[1] == Approx(0.7311).epsilon(1e-4));
  auto u = target_distribution(std::vector<double>{0.2, 0.2, 0.2}, 20.0);
  for (double v : u) CHECK(v == Approx(1.0 / 3.0));
  auto sharp = target_distribution(std::vector<double>{0.1, 0.3, 0.2}, 20.0);
  CHECK(std::accumulate(sharp.begin(), sharp.end(), 0.0) == Approx(1.0));
  CHECK(sharp[1] > 0.99);
  CHECK_THROWS_AS(target_distribution(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(target_distribution(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}
