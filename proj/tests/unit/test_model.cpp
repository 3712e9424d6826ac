#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "evfusion/error.hpp"
#include "evfusion/information.hpp"
#include "evfusion/model.hpp"
#include "oracles.hpp"

using namespace evfusion;

namespace {

EventSpacePtr space(std::string feature, std::vector<std::string> labels) {
  std::vector<Event> events;
  for (auto& l : labels) events.push_back({std::move(l), std::nullopt});
  return std::make_shared<const EventSpace>(std::move(feature), "s", std::move(events));
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no evfusion::Error thrown";
  return ErrorKind::Io;
}

CouplingTable table2(std::vector<double> cells, std::size_t rows, std::size_t cols) {
  return CouplingTable({rows, cols}, std::move(cells));
}

}  // namespace

TEST(EventSpace, RejectsDuplicateLabelsAndEmptyRanges) {
  EXPECT_EQ(kind_of([] { EventSpace("v", "radar", {{"a", {}}, {"a", {}}}); }), ErrorKind::InvalidEventSpace);
  EXPECT_EQ(kind_of([] { EventSpace("v", "radar", {}); }), ErrorKind::InvalidEventSpace);
  EXPECT_EQ(kind_of([] { EventSpace("v", "radar", {{"a", Interval{3, 3}}}); }), ErrorKind::InvalidEventSpace);
}

TEST(EventSpace, ComplementIsAppendedOnce) {
  const auto s = space("v", {"a1", "a2"});
  const auto c = s->with_complement();
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.declared_size(), 2u);
  EXPECT_EQ(c.labels().back(), kComplementLabel);
  EXPECT_EQ(c.with_complement(), c);
}

TEST(Interval, HalfOpenIntersection) {
  EXPECT_TRUE((Interval{0, 20}).intersects({15, 50}));
  EXPECT_FALSE((Interval{0, 10}).intersects({10, 20}));
  EXPECT_TRUE((Interval{0, 10}).contains(0));
  EXPECT_FALSE((Interval{0, 10}).contains(10));
}

TEST(NormalizeReport, FullMassNeedsNoComplement) {
  const auto r = normalize_report(std::vector<double>{0.6, 0.4}, space("f", {"a", "b"}));
  ASSERT_EQ(r.probs().size(), 2u);
  EXPECT_DOUBLE_EQ(r.prob(0), 0.6);
  EXPECT_DOUBLE_EQ(r.prob(1), 0.4);
  EXPECT_FALSE(r.space().has_complement());
}

TEST(NormalizeReport, MissingMassGoesToComplement) {
  const auto r = normalize_report(std::vector<double>{0.5, 0.3}, space("f", {"a", "b"}));
  ASSERT_EQ(r.probs().size(), 3u);
  EXPECT_DOUBLE_EQ(r.prob(0), 0.5);
  EXPECT_DOUBLE_EQ(r.prob(1), 0.3);
  EXPECT_NEAR(r.prob(2), 0.2, 1e-15);
  EXPECT_EQ(r.space().labels().back(), kComplementLabel);
}

TEST(NormalizeReport, ExcessMassIsAnError) {
  try {
    normalize_report(std::vector<double>{0.7, 0.6}, space("f", {"a", "b"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MassExceedsUnity);
    EXPECT_NE(std::string(e.what()).find("1.3"), std::string::npos);
  }
}

TEST(NormalizeReport, NegativeMassIsAnError) {
  EXPECT_EQ(kind_of([] { normalize_report(std::vector<double>{-0.1, 0.6}, space("f", {"a", "b"})); }),
            ErrorKind::NegativeMass);
}

TEST(NormalizeReport, IsIdempotent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 5;
    std::vector<double> raw(n);
    double total = 0.0;
    for (auto& v : raw) total += v = u(rng);
    const double scale = u(rng) / total;  // sum in [0, 1)
    for (auto& v : raw) v *= scale;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i));
    const auto once = normalize_report(raw, space("f", labels));
    const auto twice = normalize_report(once);
    EXPECT_TRUE(once == twice);
    EXPECT_TRUE(twice.space() == once.space());
  }
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{1.0, 0.0}), 0.0);
  // High-precision oracle value.
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.3, 0.2}), 1.4854752972273343, 1e-12);
}

TEST(Entropy, PermutationInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = oracle::random_distribution(rng, 2 + trial % 6);
    const double h = entropy(p);
    EXPECT_GE(h, 0.0);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(p.begin(), p.end(), rng);
      EXPECT_NEAR(entropy(p), h, 1e-12);
    }
  }
}

TEST(Entropy, RejectsInvalidInput) {
  EXPECT_THROW(entropy(std::vector<double>{0.5, 0.6}), Error);
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information(table2({0.3, 0.2, 0.3, 0.2}, 2, 2)), 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(table2({0.5, 0.0, 0.0, 0.5}, 2, 2)), 1.0, 1e-12);
  EXPECT_NEAR(mutual_information(table2({0.5, 0.0, 0.1, 0.4}, 2, 2)), 0.60998654701098744, 1e-12);
}

TEST(MutualInformation, EntropyIdentityAndBounds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + trial % 5, cols = 1 + (trial / 5) % 5;
    auto cells = oracle::random_distribution(rng, rows * cols);
    const CouplingTable t({rows, cols}, cells);
    const double mi = mutual_information(t);
    const double h0 = entropy(marginalize(t, 0)), h1 = entropy(marginalize(t, 1));
    EXPECT_NEAR(mi, h0 + h1 - joint_entropy(t), 1e-9);
    EXPECT_GE(mi, -1e-12);
    EXPECT_LE(mi, std::min(h0, h1) + 1e-9);
  }
}

TEST(Marginalize, Examples) {
  const auto t = table2({0.5, 0.0, 0.1, 0.4}, 2, 2);
  const auto rows = marginalize(t, 0), cols = marginalize(t, 1);
  EXPECT_NEAR(rows[0], 0.5, 1e-15);
  EXPECT_NEAR(rows[1], 0.5, 1e-15);
  EXPECT_NEAR(cols[0], 0.6, 1e-15);
  EXPECT_NEAR(cols[1], 0.4, 1e-15);

  const CouplingTable one({3}, {0.2, 0.5, 0.3});
  EXPECT_EQ(marginalize(one, 0), (std::vector<double>{0.2, 0.5, 0.3}));
  EXPECT_EQ(kind_of([&] { marginalize(t, 2); }), ErrorKind::AxisOutOfRange);
}

TEST(CouplingTable, ValidatesShapeAndMass) {
  EXPECT_THROW(CouplingTable({2, 2}, {0.5, 0.5}), Error);
  EXPECT_THROW(CouplingTable({2}, {0.7, 0.7}), Error);
  const CouplingTable t({2, 3}, {0.1, 0.1, 0.1, 0.2, 0.2, 0.3});
  const std::vector<std::size_t> idx{1, 2};
  EXPECT_EQ(t.flat_index(idx), 5u);
  EXPECT_DOUBLE_EQ(t.at(1, 2), 0.3);
}

TEST(Capacity, ProductOverLimitIsRefused) {
  const std::vector<std::size_t> shape{1000, 1001};
  EXPECT_EQ(kind_of([&] { checked_cell_count(shape, 1'000'000); }), ErrorKind::Capacity);
  const std::vector<std::size_t> ok{1000, 1000};
  EXPECT_EQ(checked_cell_count(ok, 1'000'000), 1'000'000u);
}
