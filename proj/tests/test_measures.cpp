#include "fedeval/measures.hpp"

#include <algorithm>
#include <doctest.h>
#include <random>

#include "oracle.hpp"

using namespace fedeval;
using fixtures::cls;
using fixtures::reg;

namespace {

const std::vector<MetricSpec> kClassificationSpecs = {
    MetricSpec::accuracy(),
    MetricSpec::precision(Averaging::macro),
    MetricSpec::precision(Averaging::weighted),
    MetricSpec::recall(Averaging::macro),
    MetricSpec::recall(Averaging::weighted),
    MetricSpec::f1(Averaging::macro),
    MetricSpec::f1(Averaging::weighted),
    MetricSpec::mcc(),
};

}  // namespace

TEST_CASE("statistic plans") {
  CHECK(statistic_plan(MetricSpec::accuracy()).empty());
  CHECK(statistic_plan(MetricSpec::f1(Averaging::weighted)).empty());
  CHECK(statistic_plan(MetricSpec::mcc()).empty());
  const auto plan = statistic_plan(MetricSpec::r2());
  REQUIRE(plan.phases.size() == 1);
  CHECK(plan.phases.front() == StatisticId::global_mean);
}

TEST_CASE("classification measures wrap the partition confusion") {
  const auto parts = fixtures::running_classification();
  const auto p1 = compute_classification_am(parts[0]);
  CHECK(p1.confusion.at(0, 0) == 3);
  CHECK(p1.confusion.at(0, 1) == 1);
  CHECK(p1.confusion.at(1, 1) == 0);

  const auto p2 = compute_classification_am(parts[1]);
  CHECK(p2.confusion.at(1, 1) == 2);
  CHECK(p2.confusion.at(0, 0) == 0);

  const auto empty = compute_classification_am(cls({}, {}, 2));
  CHECK(empty.confusion.total() == 0);

  // Derived per-metric views over the pooled table.
  ConfusionMatrix pooled = p1.confusion;
  pooled += p2.confusion;
  const ClassificationAm am{pooled};
  CHECK(am.f1_hits(0) == 3);
  CHECK(am.f1_mismatch(0) == 1);   // FP_0 + FN_0 = 0 + 1
  CHECK(am.class_weight(0) == 4);  // TP_0 + FN_0
  CHECK(am.f1_hits(1) == 2);
  CHECK(am.f1_mismatch(1) == 1);
  CHECK(am.class_weight(1) == 2);
}

TEST_CASE("regression measures match the hand expansion") {
  const auto parts = fixtures::running_regression();
  const double mean = 2.5;

  const auto a1 = compute_regression_am(parts[0], mean);
  CHECK(a1.residual_sq_sum == doctest::Approx(0.0));
  CHECK(a1.deviation_sq_sum == doctest::Approx(2.5));
  CHECK(a1.count == 2);

  const auto a2 = compute_regression_am(parts[1], mean);
  CHECK(a2.residual_sq_sum == doctest::Approx(2.0));
  CHECK(a2.deviation_sq_sum == doctest::Approx(2.5));

  const auto perfect = compute_regression_am(reg({5, 6, 7}, {5, 6, 7}), 6.0);
  CHECK(perfect.residual_sq_sum == 0.0);

  const auto empty = compute_regression_am(reg({}, {}), 0.0);
  CHECK(empty.count == 0);
  CHECK(empty.residual_sq_sum == 0.0);
  CHECK(empty.deviation_sq_sum == 0.0);
}

TEST_CASE("mean statistic aggregates to the pooled mean") {
  const auto parts = fixtures::running_regression();
  MeanStatistic total;
  for (const auto& p : parts) total += compute_mean_statistic(p);
  CHECK(total.count == 4);
  CHECK(total.mean() == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(MeanStatistic{}.mean(), UndefinedMetricError);
}

TEST_CASE("aggregate_ams sums componentwise") {
  const auto parts = fixtures::running_classification();
  std::vector<AggregatableMeasure> ams = {compute_classification_am(parts[0]),
                                          compute_classification_am(parts[1])};
  const auto total = std::get<ClassificationAm>(aggregate_ams(ams));
  CHECK(total.confusion.at(0, 0) == 3);
  CHECK(total.confusion.at(0, 1) == 1);
  CHECK(total.confusion.at(1, 0) == 0);
  CHECK(total.confusion.at(1, 1) == 2);

  // Single measure aggregates to itself.
  const std::vector<AggregatableMeasure> one = {compute_classification_am(parts[0])};
  CHECK(std::get<ClassificationAm>(aggregate_ams(one)) ==
        std::get<ClassificationAm>(one.front()));

  const std::vector<AggregatableMeasure> regs = {RegressionAm{0.0, 2.5, 2},
                                                 RegressionAm{2.0, 2.5, 2}};
  const auto reg_total = std::get<RegressionAm>(aggregate_ams(regs));
  CHECK(reg_total.residual_sq_sum == doctest::Approx(2.0));
  CHECK(reg_total.deviation_sq_sum == doctest::Approx(5.0));
  CHECK(reg_total.count == 4);
}

TEST_CASE("aggregate_ams rejects mixed variants and mismatched shapes") {
  const std::vector<AggregatableMeasure> mixed = {
      compute_classification_am(cls({0}, {0}, 2)), RegressionAm{1.0, 1.0, 1}};
  CHECK_THROWS_AS(aggregate_ams(mixed), ShapeError);

  const std::vector<AggregatableMeasure> mismatched = {
      compute_classification_am(cls({0}, {0}, 2)), compute_classification_am(cls({0}, {0}, 3))};
  CHECK_THROWS_AS(aggregate_ams(mismatched), ShapeError);

  CHECK_THROWS_AS(aggregate_ams({}), ValidationError);
}

TEST_CASE("metric_from_am recombines the worked examples") {
  const auto r2 = metric_from_am(RegressionAm{2.0, 5.0, 4}, MetricSpec::r2());
  CHECK(r2.value == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r2.mode == EvalMode::flam);
  CHECK(r2.sample_count == 4);

  const auto pooled = compute_classification_am(cls({0, 0, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1}, 2));
  const auto f1 = metric_from_am(AggregatableMeasure{pooled}, MetricSpec::f1(Averaging::macro));
  CHECK(f1.value == doctest::Approx(0.828571).epsilon(1e-6));
  CHECK(f1.mode == EvalMode::flam);

  const auto acc = metric_from_am(AggregatableMeasure{pooled}, MetricSpec::accuracy());
  CHECK(acc.value == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  CHECK_THROWS_AS(metric_from_am(RegressionAm{1.0, 0.0, 3}, MetricSpec::r2()),
                  DegenerateVarianceError);
  CHECK_THROWS_AS(metric_from_am(RegressionAm{0.0, 0.0, 0}, MetricSpec::r2()),
                  UndefinedMetricError);
  CHECK_THROWS_AS(metric_from_am(AggregatableMeasure{pooled}, MetricSpec::r2()),
                  ValidationError);
  CHECK_THROWS_AS(metric_from_am(RegressionAm{1.0, 2.0, 3}, MetricSpec::accuracy()),
                  ValidationError);
}

TEST_CASE("flam_evaluate equals the centralized oracle on the running examples") {
  const auto cls_parts = fixtures::running_classification();
  const auto f1 = flam_evaluate(cls_parts, MetricSpec::f1(Averaging::macro));
  CHECK(f1.value == doctest::Approx(0.828571).epsilon(1e-6));
  CHECK(f1.value ==
        evaluate_centralized(concat(cls_parts), MetricSpec::f1(Averaging::macro)).value);

  const auto reg_parts = fixtures::running_regression();
  const auto r2 = flam_evaluate(reg_parts, MetricSpec::r2());
  CHECK(r2.value == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r2.value == doctest::Approx(
                        evaluate_centralized(concat(reg_parts), MetricSpec::r2()).value)
                        .epsilon(1e-12));
}

TEST_CASE("single partition collapses to centralized evaluation") {
  std::mt19937_64 rng(8001);
  const auto parts = fixtures::random_classification(rng, 1);
  for (const auto& spec : kClassificationSpecs) {
    CHECK(flam_evaluate(parts, spec).value == evaluate_centralized(parts[0], spec).value);
  }
  const auto reg_parts = fixtures::random_regression(rng, 1);
  CHECK(flam_evaluate(reg_parts, MetricSpec::r2()).value ==
        doctest::Approx(evaluate_centralized(reg_parts[0], MetricSpec::r2()).value)
            .epsilon(1e-12));
}

TEST_CASE("measure additivity over random splits") {
  std::mt19937_64 rng(8002);
  for (int round = 0; round < 60; ++round) {
    const auto parts = fixtures::random_classification(rng);
    std::vector<AggregatableMeasure> ams;
    for (const auto& p : parts) ams.emplace_back(compute_classification_am(p));
    const auto total = std::get<ClassificationAm>(aggregate_ams(ams));
    CHECK(total.confusion == confusion_from_labels(concat(parts)));
  }
  for (int round = 0; round < 40; ++round) {
    const auto parts = fixtures::random_regression(rng);
    const auto pooled = concat(parts);
    MeanStatistic stat;
    for (const auto& p : parts) stat += compute_mean_statistic(p);
    const double mean = stat.mean();

    std::vector<AggregatableMeasure> ams;
    for (const auto& p : parts) ams.emplace_back(compute_regression_am(p, mean));
    const auto total = std::get<RegressionAm>(aggregate_ams(ams));
    const auto whole = compute_regression_am(pooled, mean);
    CHECK(total.count == whole.count);
    CHECK(total.residual_sq_sum ==
          doctest::Approx(whole.residual_sq_sum).epsilon(1e-9));
    CHECK(total.deviation_sq_sum ==
          doctest::Approx(whole.deviation_sq_sum).epsilon(1e-9));
  }
}

TEST_CASE("oracle equivalence over random federations") {
  std::mt19937_64 rng(8003);
  for (int round = 0; round < 40; ++round) {
    const auto parts = fixtures::random_classification(rng, 8);
    const auto pooled = concat(parts);
    for (const auto& spec : kClassificationSpecs) {
      const double direct = evaluate_centralized(pooled, spec).value;
      const double via_measures = flam_evaluate(parts, spec).value;
      if (spec.kind == MetricKind::mcc) {
        CHECK(std::abs(direct - via_measures) <= 1e-9);
      } else {
        CHECK(direct == via_measures);
      }
    }
  }
  for (int round = 0; round < 30; ++round) {
    const auto parts = fixtures::random_regression(rng, 8);
    const double direct = evaluate_centralized(concat(parts), MetricSpec::r2()).value;
    CHECK(std::abs(direct - flam_evaluate(parts, MetricSpec::r2()).value) <= 1e-9);
  }
}

TEST_CASE("partition order and single-sample moves do not change the result") {
  std::mt19937_64 rng(8004);
  for (int round = 0; round < 15; ++round) {
    auto parts = fixtures::random_classification(rng, 6);
    const double before = flam_evaluate(parts, MetricSpec::f1(Averaging::weighted)).value;
    std::shuffle(parts.begin(), parts.end(), rng);
    CHECK(flam_evaluate(parts, MetricSpec::f1(Averaging::weighted)).value == before);

    // Move one sample between two partitions.
    if (parts.size() >= 2 && !parts[0].empty()) {
      auto d0 = parts[0].classification();
      auto d1 = parts[1].classification();
      d1.y_true.push_back(d0.y_true.back());
      d1.y_pred.push_back(d0.y_pred.back());
      d0.y_true.pop_back();
      d0.y_pred.pop_back();
      std::vector<LabeledPredictions> moved = parts;
      moved[0] = LabeledPredictions(std::move(d0));
      moved[1] = LabeledPredictions(std::move(d1));
      CHECK(flam_evaluate(moved, MetricSpec::f1(Averaging::weighted)).value == before);
      CHECK(flam_evaluate(moved, MetricSpec::mcc()).value ==
            doctest::Approx(flam_evaluate(parts, MetricSpec::mcc()).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("global mean phase matches the concatenated mean") {
  std::mt19937_64 rng(8005);
  for (int round = 0; round < 25; ++round) {
    const auto parts = fixtures::random_regression(rng);
    MeanStatistic stat;
    for (const auto& p : parts) stat += compute_mean_statistic(p);
    const auto pooled = concat(parts);
    const auto& d = pooled.regression();
    double direct = 0.0;
    for (double y : d.y_true) direct += y;
    direct /= static_cast<double>(d.y_true.size());
    CHECK(stat.mean() == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("flam_evaluate validates its inputs") {
  CHECK_THROWS_AS(flam_evaluate(std::vector<LabeledPredictions>{}, MetricSpec::accuracy()),
                  ValidationError);
  const auto parts = fixtures::running_classification();
  CHECK_THROWS_AS(flam_evaluate(parts, MetricSpec::r2()), ValidationError);
  std::vector<LabeledPredictions> mixed;
  mixed.push_back(cls({0}, {0}, 2));
  mixed.push_back(reg({1.0}, {1.0}));
  CHECK_THROWS_AS(flam_evaluate(mixed, MetricSpec::accuracy()), ShapeError);

  // Empty partitions contribute zero measures.
  std::vector<LabeledPredictions> with_empty = parts;
  with_empty.push_back(cls({}, {}, 2));
  CHECK(flam_evaluate(with_empty, MetricSpec::accuracy()).value ==
        flam_evaluate(parts, MetricSpec::accuracy()).value);

  // All partitions empty: the metric itself is undefined.
  std::vector<LabeledPredictions> empties;
  empties.push_back(cls({}, {}, 2));
  empties.push_back(cls({}, {}, 2));
  CHECK_THROWS_AS(flam_evaluate(empties, MetricSpec::accuracy()), UndefinedMetricError);
}

TEST_CASE("multi-spec flam_evaluate shares one measure pass") {
  const auto parts = fixtures::running_classification();
  const auto values = flam_evaluate(parts, kClassificationSpecs);
  REQUIRE(values.size() == kClassificationSpecs.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(values[i].value == flam_evaluate(parts, kClassificationSpecs[i]).value);
  }
  CHECK(flam_evaluate(parts, std::vector<MetricSpec>{}).empty());
}
