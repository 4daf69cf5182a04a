#include "fedeval/metrics.hpp"

#include <algorithm>
#include <doctest.h>
#include <random>

#include "fedeval/measures.hpp"
#include "oracle.hpp"

using namespace fedeval;
using fixtures::cls;
using fixtures::reg;

namespace {

ConfusionMatrix make_cm(const std::vector<std::vector<std::int64_t>>& rows) {
  ConfusionMatrix cm(static_cast<int>(rows.size()));
  for (int t = 0; t < cm.class_count(); ++t) {
    for (int p = 0; p < cm.class_count(); ++p) {
      cm.add(t, p, rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]);
    }
  }
  return cm;
}

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

TEST_CASE("confusion_from_labels counts pairs") {
  const auto cm = confusion_from_labels(cls({0, 0, 0, 0}, {0, 0, 0, 1}, 2));
  CHECK(cm == make_cm({{3, 1}, {0, 0}}));
  CHECK(cm.total() == 4);

  const auto empty = confusion_from_labels(cls({}, {}, 2));
  CHECK(empty == make_cm({{0, 0}, {0, 0}}));

  const auto pooled = confusion_from_labels(cls({0, 0, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1}, 2));
  CHECK(pooled == make_cm({{3, 1}, {0, 2}}));
  CHECK(pooled.total() == 6);
}

TEST_CASE("labels outside the declared class range are rejected") {
  CHECK_THROWS_AS(cls({0, 2}, {0, 0}, 2), DomainError);
  CHECK_THROWS_AS(cls({0, 0}, {0, -1}, 2), DomainError);
  CHECK_THROWS_WITH_AS(cls({0, 0, 3}, {0, 0, 0}, 2),
                       doctest::Contains("index 2"), DomainError);
}

TEST_CASE("confusion matrix derived counts are consistent") {
  const auto cm = make_cm({{3, 1}, {0, 2}});
  CHECK(cm.tp(0) == 3);
  CHECK(cm.fp(0) == 0);
  CHECK(cm.fn(0) == 1);
  CHECK(cm.tn(0) == 2);
  CHECK(cm.support(0) == 4);
  CHECK(cm.predicted(1) == 3);
  for (int j = 0; j < 2; ++j) {
    CHECK(cm.tp(j) + cm.fp(j) + cm.fn(j) + cm.tn(j) == cm.total());
  }
}

TEST_CASE("evaluate_centralized matches the worked examples") {
  const auto data = cls({0, 0, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1}, 2);

  const auto acc = evaluate_centralized(data, MetricSpec::accuracy());
  CHECK(acc.value == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(acc.mode == EvalMode::centralized);
  CHECK(acc.sample_count == 6);

  const auto f1 = evaluate_centralized(data, MetricSpec::f1(Averaging::macro));
  CHECK(f1.value == doctest::Approx((6.0 / 7.0 + 4.0 / 5.0) / 2.0).epsilon(1e-12));

  const auto recall = evaluate_centralized(data, MetricSpec::recall(Averaging::weighted));
  CHECK(recall.value == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  const auto r2 = evaluate_centralized(reg({1, 2, 3, 4}, {1, 2, 4, 3}), MetricSpec::r2());
  CHECK(r2.value == doctest::Approx(0.6).epsilon(1e-12));

  for (const auto& spec : kClassificationSpecs) {
    const auto perfect = evaluate_centralized(cls({0, 1, 2, 1}, {0, 1, 2, 1}, 3), spec);
    CHECK(perfect.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_centralized error paths") {
  CHECK_THROWS_AS(evaluate_centralized(cls({}, {}, 2), MetricSpec::accuracy()),
                  UndefinedMetricError);
  CHECK_THROWS_AS(evaluate_centralized(reg({2, 2, 2}, {1, 2, 3}), MetricSpec::r2()),
                  DegenerateVarianceError);
  CHECK_THROWS_AS(evaluate_centralized(reg({1, 2}, {1, 2}), MetricSpec::accuracy()),
                  ValidationError);
  CHECK_THROWS_AS(evaluate_centralized(cls({0}, {0}, 2), MetricSpec::r2()), ValidationError);
}

TEST_CASE("metric_from_confusion matches the worked examples") {
  const auto cm = make_cm({{3, 1}, {0, 2}});

  const auto precision = metric_from_confusion(cm, MetricSpec::precision(Averaging::weighted));
  CHECK(precision.value == doctest::Approx((4.0 * 1.0 + 2.0 * (2.0 / 3.0)) / 6.0).epsilon(1e-12));

  const auto mcc = metric_from_confusion(cm, MetricSpec::mcc());
  CHECK(mcc.value == doctest::Approx(12.0 / (std::sqrt(18.0) * std::sqrt(16.0))).epsilon(1e-12));
  CHECK(mcc.value == doctest::Approx(0.707107).epsilon(1e-6));

  const auto f1 = metric_from_confusion(make_cm({{3, 1}, {0, 0}}), MetricSpec::f1(Averaging::macro));
  CHECK(f1.value == doctest::Approx((6.0 / 7.0) / 2.0).epsilon(1e-12));

  for (const auto& spec : kClassificationSpecs) {
    const auto diag = metric_from_confusion(make_cm({{5, 0, 0}, {0, 7, 0}, {0, 0, 2}}), spec);
    CHECK(diag.value == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(metric_from_confusion(make_cm({{0, 0}, {0, 0}}), MetricSpec::accuracy()),
                  UndefinedMetricError);
  CHECK_THROWS_AS(metric_from_confusion(cm, MetricSpec::r2()), ValidationError);
}

TEST_CASE("zero-division policy value is configurable") {
  // Class 2 is absent from truth and predictions, so all its ratios are 0/0.
  const auto cm = make_cm({{3, 1, 0}, {0, 2, 0}, {0, 0, 0}});
  MetricSpec spec = MetricSpec::f1(Averaging::macro);
  CHECK(metric_from_confusion(cm, spec).value ==
        doctest::Approx((6.0 / 7.0 + 4.0 / 5.0 + 0.0) / 3.0).epsilon(1e-12));
  spec.zero_division_value = 1.0;
  CHECK(metric_from_confusion(cm, spec).value ==
        doctest::Approx((6.0 / 7.0 + 4.0 / 5.0 + 1.0) / 3.0).epsilon(1e-12));
  // A genuine 0/1 per-class ratio is an arithmetic zero, not a policy case.
  MetricSpec f1_policy_one = MetricSpec::f1(Averaging::macro);
  f1_policy_one.zero_division_value = 1.0;
  CHECK(metric_from_confusion(make_cm({{3, 1}, {0, 0}}), f1_policy_one).value ==
        doctest::Approx((6.0 / 7.0 + 0.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("metric spec validation and parsing") {
  const MetricSpec bad_accuracy{MetricKind::accuracy, Averaging::macro};
  const MetricSpec bad_f1{MetricKind::f1, Averaging::none};
  CHECK_THROWS_AS(bad_accuracy.validate(), ValidationError);
  CHECK_THROWS_AS(bad_f1.validate(), ValidationError);
  CHECK(parse_metric_spec("f1-macro") == MetricSpec::f1(Averaging::macro));
  CHECK(parse_metric_spec("precision-weighted") == MetricSpec::precision(Averaging::weighted));
  CHECK(parse_metric_spec("mcc") == MetricSpec::mcc());
  CHECK_THROWS_AS(parse_metric_spec("auc"), ValidationError);
  for (const auto& spec : kClassificationSpecs) {
    CHECK(parse_metric_spec(spec.name()) == spec);
  }
}

TEST_CASE("both evaluation routes agree exactly on random data") {
  std::mt19937_64 rng(7001);
  for (int round = 0; round < 50; ++round) {
    const auto parts = fixtures::random_classification(rng);
    const auto data = concat(parts);
    const auto cm = confusion_from_labels(data);
    for (const auto& spec : kClassificationSpecs) {
      CHECK(metric_from_confusion(cm, spec).value == evaluate_centralized(data, spec).value);
    }
  }
}

TEST_CASE("oracle agreement on random data") {
  std::mt19937_64 rng(7002);
  for (int round = 0; round < 30; ++round) {
    const auto data = concat(fixtures::random_classification(rng));
    const auto& d = data.classification();
    CHECK(evaluate_centralized(data, MetricSpec::accuracy()).value ==
          doctest::Approx(oracle::accuracy(d.y_true, d.y_pred)).epsilon(1e-12));
    CHECK(evaluate_centralized(data, MetricSpec::f1(Averaging::macro)).value ==
          doctest::Approx(oracle::macro(d.y_true, d.y_pred, d.class_count,
                                        oracle::PerClass::f1))
              .epsilon(1e-12));
    CHECK(evaluate_centralized(data, MetricSpec::precision(Averaging::weighted)).value ==
          doctest::Approx(oracle::weighted(d.y_true, d.y_pred, d.class_count,
                                           oracle::PerClass::precision))
              .epsilon(1e-12));
    CHECK(evaluate_centralized(data, MetricSpec::mcc()).value ==
          doctest::Approx(oracle::mcc_covariance(d.y_true, d.y_pred, d.class_count))
              .epsilon(1e-9));
  }
  for (int round = 0; round < 20; ++round) {
    const auto data = concat(fixtures::random_regression(rng));
    const auto& d = data.regression();
    CHECK(evaluate_centralized(data, MetricSpec::r2()).value ==
          doctest::Approx(oracle::r2(d.y_true, d.y_pred)).epsilon(1e-9));
  }
}

TEST_CASE("weighted recall equals accuracy for every confusion matrix") {
  std::mt19937_64 rng(7003);
  for (int round = 0; round < 100; ++round) {
    const auto data = concat(fixtures::random_classification(rng));
    const auto cm = confusion_from_labels(data);
    const double acc = metric_from_confusion(cm, MetricSpec::accuracy()).value;
    const double recall = metric_from_confusion(cm, MetricSpec::recall(Averaging::weighted)).value;
    CHECK(std::abs(acc - recall) <= 1e-12);
  }
}

TEST_CASE("sample order does not change any metric") {
  std::mt19937_64 rng(7004);
  for (int round = 0; round < 20; ++round) {
    const auto data = concat(fixtures::random_classification(rng));
    auto d = data.classification();
    std::vector<std::size_t> perm(d.y_true.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    ClassificationData shuffled;
    shuffled.class_count = d.class_count;
    for (std::size_t i : perm) {
      shuffled.y_true.push_back(d.y_true[i]);
      shuffled.y_pred.push_back(d.y_pred[i]);
    }
    const LabeledPredictions reordered{std::move(shuffled)};
    for (const auto& spec : kClassificationSpecs) {
      CHECK(evaluate_centralized(data, spec).value ==
            doctest::Approx(evaluate_centralized(reordered, spec).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("class relabeling leaves accuracy, macro metrics, and mcc unchanged") {
  std::mt19937_64 rng(7005);
  const std::vector<MetricSpec> invariant_specs = {
      MetricSpec::accuracy(), MetricSpec::precision(Averaging::macro),
      MetricSpec::recall(Averaging::macro), MetricSpec::f1(Averaging::macro), MetricSpec::mcc()};
  for (int round = 0; round < 20; ++round) {
    const auto data = concat(fixtures::random_classification(rng));
    const auto& d = data.classification();
    std::vector<int> relabel(static_cast<std::size_t>(d.class_count));
    for (int j = 0; j < d.class_count; ++j) relabel[static_cast<std::size_t>(j)] = j;
    std::shuffle(relabel.begin(), relabel.end(), rng);
    ClassificationData mapped;
    mapped.class_count = d.class_count;
    for (std::size_t i = 0; i < d.y_true.size(); ++i) {
      mapped.y_true.push_back(relabel[static_cast<std::size_t>(d.y_true[i])]);
      mapped.y_pred.push_back(relabel[static_cast<std::size_t>(d.y_pred[i])]);
    }
    const LabeledPredictions permuted{std::move(mapped)};
    for (const auto& spec : invariant_specs) {
      CHECK(evaluate_centralized(data, spec).value ==
            doctest::Approx(evaluate_centralized(permuted, spec).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("value bounds hold on random data") {
  std::mt19937_64 rng(7006);
  for (int round = 0; round < 50; ++round) {
    const auto data = concat(fixtures::random_classification(rng));
    for (const auto& spec : kClassificationSpecs) {
      const double v = evaluate_centralized(data, spec).value;
      if (spec.kind == MetricKind::mcc) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      } else {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("r2 of the mean predictor is exactly zero") {
  std::mt19937_64 rng(7007);
  std::normal_distribution<double> value(3.0, 2.5);
  std::vector<double> y_true(257);
  for (auto& y : y_true) y = value(rng);
  // Predict with the library's own global mean so every residual term equals
  // the corresponding deviation term bit for bit.
  const double mean =
      compute_mean_statistic(reg(y_true, std::vector<double>(y_true.size(), 0.0))).mean();
  const std::vector<double> y_pred(y_true.size(), mean);
  CHECK(evaluate_centralized(reg(y_true, y_pred), MetricSpec::r2()).value == 0.0);
}
