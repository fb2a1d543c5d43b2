// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "voxchange/error.hpp"
#include "voxchange/evaluation.hpp"

using namespace voxchange;

namespace {
constexpr auto U = ChangeLabel::kUnchanged;
constexpr auto C = ChangeLabel::kChanged;
constexpr auto K = ChangeLabel::kUnknown;
constexpr auto A = ChangeLabel::kAdded;
}  // namespace

TEST_CASE("confusion counts of a small example") {
  const std::vector<ChangeLabel> pred{C, C, U, U, A, C, U};
  const std::vector<ChangeLabel> truth{C, U, C, U, C, K, K};
  const ConfusionCounts c = confusion_counts(pred, truth);
  CHECK(c == ConfusionCounts{2, 1, 1, 1, 2});
  CHECK(c.evaluated() == 5);
  const ChangeMetrics m = change_metrics(c);
  CHECK(*m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(*m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(*m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(*m.iou == doctest::Approx(0.5));
}

TEST_CASE("metrics with empty denominators are undefined") {
  const ChangeMetrics none = change_metrics(ConfusionCounts{0, 0, 0, 10});
  CHECK_FALSE(none.precision);
  CHECK_FALSE(none.recall);
  CHECK_FALSE(none.f1);
  CHECK_FALSE(none.iou);
  const ChangeMetrics only_fn = change_metrics(ConfusionCounts{0, 0, 5, 0});
  CHECK_FALSE(only_fn.precision);
  CHECK(*only_fn.recall == 0.0);
  CHECK(*only_fn.iou == 0.0);
}

TEST_CASE("F1 is the harmonic mean of precision and recall") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint64_t> d(1, 100000);
  for (int i = 0; i < 500; ++i) {
    const ConfusionCounts c{d(rng), d(rng), d(rng), d(rng)};
    const ChangeMetrics m = change_metrics(c);
    const double p = *m.precision, r = *m.recall;
    CHECK(*m.f1 == doctest::Approx(2 * p * r / (p + r)));
    CHECK(*m.iou == doctest::Approx(*m.f1 / (2.0 - *m.f1)));
  }
}

TEST_CASE("label input errors") {
  CHECK_THROWS_AS(confusion_counts(std::vector<ChangeLabel>{C}, std::vector<ChangeLabel>{}),
                  InvalidArgument);
  CHECK_THROWS_AS(confusion_counts(std::vector<ChangeLabel>{K}, std::vector<ChangeLabel>{C}),
                  InvalidArgument);
  const std::vector<std::uint32_t> idx{1, 3};
  CHECK(labels_from_indices(4, idx) == std::vector<ChangeLabel>{U, C, U, C});
  CHECK_THROWS_AS(labels_from_indices(3, idx), InvalidArgument);
}

TEST_CASE("distance statistics use linear interpolation") {
  std::vector<double> d;
  for (int i = 1; i <= 11; ++i) d.push_back(static_cast<double>(12 - i));  // 11 .. 1
  const DistanceStats s = distance_stats(d);
  CHECK(s.count == 11);
  CHECK(s.mean == 6.0);
  CHECK(s.std_dev == doctest::Approx(std::sqrt(10.0)));
  CHECK(s.p50 == 6.0);
  CHECK(s.p90 == 10.0);
  CHECK(s.p95 == doctest::Approx(10.5));
  CHECK_THROWS_AS(distance_stats(std::vector<double>{}), InvalidArgument);
}
