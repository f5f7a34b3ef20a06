// Copyright 2026 The cvqos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "cvqos/error.hpp"
#include "cvqos/ml/dataset.hpp"
#include "cvqos/ml/information.hpp"
#include "cvqos/ml/metrics.hpp"
#include "cvqos/ml/mlp.hpp"
#include "cvqos/ml/pipeline.hpp"
#include "cvqos/ml/sampling.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::ml {
namespace {

// Independent oracle: H(X) + H(Y) - H(X, Y) from ordered-map histograms.
double brute_mi(const std::vector<std::vector<int>>& xs, const std::vector<int>& y) {
  std::map<std::vector<int>, double> px, pxy;
  std::map<int, double> py;
  const double n = static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::vector<int> key;
    for (const auto& col : xs) key.push_back(col[i]);
    px[key] += 1;
    py[y[i]] += 1;
    key.push_back(y[i]);
    pxy[key] += 1;
  }
  auto h = [&](const auto& m) {
    double acc = 0;
    for (const auto& [k, c] : m) acc -= c / n * std::log(c / n);
    return acc / std::log(2.0);
  };
  return h(px) + h(py) - h(pxy);
}

Dataset labelled(const Eigen::MatrixXd& x, const std::vector<int>& y, ClassScheme scheme = ClassScheme::Binary50) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("f" + std::to_string(j));
  return make_dataset(x, y, names, scheme);
}

// ------------------------------------------------------------------ labels

TEST(Labels, BoundariesBelongToTheLowerClass) {
  EXPECT_EQ(label_for(50.0, ClassScheme::Binary50), 0);
  EXPECT_EQ(label_for(50.0001, ClassScheme::Binary50), 1);
  EXPECT_EQ(label_for(100.0, ClassScheme::Multiclass), 1);
  EXPECT_EQ(label_for(100.5, ClassScheme::Multiclass), 2);
  EXPECT_EQ(label_for(0.0, ClassScheme::Multiclass), 0);
  EXPECT_EQ(parse_scheme("multiclass"), ClassScheme::Multiclass);
  EXPECT_THROW(parse_scheme("ternary"), Error);
}

TEST(Dataset, ConstantColumnsAreDropped) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 5, 0, 2, 5, 1, 3, 5, 0, 4, 5, 1;
  const auto d = make_dataset(x, {0, 1, 0, 1}, {"a", "b", "c"}, ClassScheme::Binary50);
  EXPECT_EQ(d.names, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(d.dropped_features, std::vector<std::string>{"b"});
  EXPECT_NEAR(d.normalization.mean(0), 2.5, 1e-12);
}

TEST(Dataset, ShapeMismatchIsRejected) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  EXPECT_THROW(make_dataset(x, {0, 1}, {"a"}, ClassScheme::Binary50), Error);
  EXPECT_THROW(make_dataset(x, {0, 1, 2}, {"a"}, ClassScheme::Binary50), Error);
}

TEST(Dataset, BuildDropsIncompleteRowsAndLostPackets) {
  std::vector<ingest::FusedRecord> rs(4);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].eci = 1;
    rs[i].delay.e2e_delay_ms = 20.0 + 30.0 * static_cast<double>(i);
    ingest::KpiSample o;
    o.sinr_db = static_cast<double>(i);
    o.rsrp_dbm = -90 - static_cast<double>(i);
    rs[i].oai = o;
  }
  rs[1].oai.reset();
  rs[3].delay.lost = true;
  FeatureOptions f;
  f.features = {std::string(kExpectedDelay), "sinr_db", "rsrp_dbm"};
  const auto d = build_dataset(rs, ClassScheme::Binary50, f);
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.dropped_rows, 1u);
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1}));
  // The expected delay is constant (one cell), so it is dropped as a column.
  EXPECT_EQ(d.dropped_features, std::vector<std::string>{std::string(kExpectedDelay)});
}

// ------------------------------------------------------------------ binning and MI

TEST(Binning, EqualFrequencyEdges) {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto b = bin_feature(v, 5);
  EXPECT_EQ(b.edges, (std::vector<double>{2, 4, 6, 8}));
  EXPECT_EQ(b.codes, (std::vector<int>{0, 0, 1, 1, 2, 2, 3, 3, 4, 4}));
}

TEST(Binning, TiesStayInOneBin) {
  const std::vector<double> v = {1, 1, 1, 1, 2, 3};
  const auto b = bin_feature(v, 3);
  EXPECT_EQ(b.edges, std::vector<double>{1});
  EXPECT_EQ(b.codes, (std::vector<int>{0, 0, 0, 0, 1, 1}));
  const auto c = bin_feature(std::vector<double>{4, 4, 4}, 10);
  EXPECT_TRUE(c.constant);
  EXPECT_EQ(c.bins(), 1);
}

TEST(Binning, BinCountsAreNearlyEqual) {
  Rng rng(4);
  std::vector<double> v(1000);
  for (auto& x : v) x = rng.normal();
  const auto b = bin_feature(v, 10);
  std::vector<int> counts(static_cast<std::size_t>(b.bins()));
  for (int c : b.codes) ++counts[static_cast<std::size_t>(c)];
  for (int c : counts) EXPECT_EQ(c, 100);
}

TEST(MutualInformation, MatchesBruteForceOnRandomData) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 50 + rng.below(500);
    const int dims = 1 + static_cast<int>(rng.below(3));
    std::vector<std::vector<int>> xs(static_cast<std::size_t>(dims), std::vector<int>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(3));
      for (auto& col : xs) col[i] = rng.uniform() < 0.5 ? y[i] : static_cast<int>(rng.below(6));
    }
    std::vector<std::span<const int>> spans(xs.begin(), xs.end());
    EXPECT_NEAR(mutual_information(spans, y), brute_mi(xs, y), 1e-12) << trial;
  }
}

TEST(MutualInformation, IdentityAndIndependenceAreExact) {
  std::vector<int> y, x_ind;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 5; ++b) {
      y.push_back(a);
      x_ind.push_back(b);
    }
  }
  EXPECT_EQ(mutual_information(y, y), 2.0);  // four equiprobable labels
  EXPECT_EQ(mutual_information(x_ind, y), 0.0);
  EXPECT_NEAR(entropy(y), 2.0, 1e-12);
}

TEST(MutualInformation, DuplicateColumnAddsNothing) {
  Rng rng(2);
  std::vector<int> x(300), z(300), y(300);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<int>(rng.below(10));
    z[i] = static_cast<int>(rng.below(10));
    y[i] = (x[i] + static_cast<int>(rng.below(3))) % 2;
  }
  const double base = mutual_information(std::vector<std::span<const int>>{x, z}, y);
  EXPECT_EQ(mutual_information(std::vector<std::span<const int>>{x, z, x}, y), base);
}

TEST(MutualInformation, OversizedJointHistogramIsRejected) {
  std::vector<int> big(10);
  std::iota(big.begin(), big.end(), 0);
  big[9] = 1000;
  const std::vector<int> y(10, 0);
  EXPECT_THROW(mutual_information(std::vector<std::span<const int>>{big, big}, y), Error);
}

// ------------------------------------------------------------------ selection

TEST(MdSelect, PicksInformativeFirstAndBreaksTiesByName) {
  Rng rng(6);
  const int n = 2000;
  Eigen::MatrixXd x(n, 4);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    const double signal = rng.normal();
    y[static_cast<std::size_t>(i)] = signal > 0 ? 1 : 0;
    x(i, 0) = rng.normal();           // noise
    x(i, 1) = signal;                 // informative
    x(i, 2) = signal;                 // exact duplicate
    x(i, 3) = signal + rng.normal();  // weaker
  }
  const auto d = make_dataset(x, y, {"noise", "zeta", "alpha", "weak"}, ClassScheme::Binary50);
  SelectionOptions o;
  o.max_features = 4;
  const auto r = md_select(d, o);
  ASSERT_FALSE(r.steps.empty());
  EXPECT_EQ(r.steps[0].name, "alpha");  // tie with "zeta" goes to the first name
  for (const auto& s : r.steps) EXPECT_NE(s.name, "zeta");
  for (std::size_t i = 1; i < r.steps.size(); ++i) EXPECT_GT(r.steps[i].gain, o.epsilon);
}

TEST(MdSelect, RespectsMaxFeatures) {
  Rng rng(1);
  Eigen::MatrixXd x(500, 6);
  std::vector<int> y(500);
  for (int i = 0; i < 500; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
    for (int j = 0; j < 6; ++j) x(i, j) = y[static_cast<std::size_t>(i)] + rng.normal();
  }
  SelectionOptions o;
  o.max_features = 2;
  EXPECT_LE(md_select(labelled(x, y), o).steps.size(), 2u);
}

TEST(MdSelect, StopsAtTheJointCellLimitInsteadOfFailing) {
  Rng rng(3);
  const int n = 4000;
  Eigen::MatrixXd x(n, 8);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
    for (int j = 0; j < 8; ++j) x(i, j) = y[static_cast<std::size_t>(i)] + rng.normal(0.0, 3.0);
  }
  SelectionOptions o;
  o.max_features = 8;
  o.epsilon = -1.0;  // keep going regardless of gain
  const auto r = md_select(labelled(x, y), o);
  // 2 classes x 10^5 cells fits; a sixth 10-bin feature would not.
  EXPECT_EQ(r.steps.size(), 5u);
  EXPECT_TRUE(r.cell_limit_reached);
}

// ------------------------------------------------------------------ sampling

TEST(Balance, BinaryUndersamplesToTheMinority) {
  std::vector<int> y(100, 0);
  std::fill(y.begin() + 80, y.end(), 1);
  const auto idx = balance_indices(y, ClassScheme::Binary50, 3);
  std::array<int, 2> counts{};
  for (auto i : idx) ++counts[static_cast<std::size_t>(y[i])];
  EXPECT_EQ(counts[0], 20);
  EXPECT_EQ(counts[1], 20);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), idx.size());
}

TEST(Balance, MulticlassKeepsTheRareClassAtTenPercent) {
  std::vector<int> y;
  y.insert(y.end(), 700, 0);
  y.insert(y.end(), 200, 1);
  y.insert(y.end(), 30, 2);
  const auto idx = balance_indices(y, ClassScheme::Multiclass, 5);
  std::array<int, 3> counts{};
  for (auto i : idx) ++counts[static_cast<std::size_t>(y[i])];
  EXPECT_EQ(counts[0], 210);
  EXPECT_EQ(counts[1], 60);
  EXPECT_EQ(counts[2], 30);
}

TEST(Balance, MulticlassShrinksTheRareClassWhenTheMajorityIsShort) {
  std::vector<int> y;
  y.insert(y.end(), 50, 0);
  y.insert(y.end(), 40, 1);
  y.insert(y.end(), 30, 2);
  const auto idx = balance_indices(y, ClassScheme::Multiclass, 5);
  std::array<int, 3> counts{};
  for (auto i : idx) ++counts[static_cast<std::size_t>(y[i])];
  EXPECT_EQ(counts[2], 10);
  EXPECT_EQ(counts[0] + counts[1], 90);
}

TEST(Balance, EmptyClassIsAnError) {
  const std::vector<int> y(10, 0);
  try {
    balance_indices(y, ClassScheme::Binary50, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Balance);
  }
}

TEST(Balance, SeedDeterminesTheDraw) {
  std::vector<int> y(200, 0);
  std::fill(y.begin() + 150, y.end(), 1);
  EXPECT_EQ(balance_indices(y, ClassScheme::Binary50, 9), balance_indices(y, ClassScheme::Binary50, 9));
  EXPECT_NE(balance_indices(y, ClassScheme::Binary50, 9), balance_indices(y, ClassScheme::Binary50, 10));
}

TEST(StratifiedKFold, PartitionAndPerClassBalanceOnRandomLabels) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    const int classes = 2 + static_cast<int>(rng.below(2));
    std::vector<int> y(static_cast<std::size_t>(k * classes) + rng.below(400));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i < static_cast<std::size_t>(k * classes) ? i % static_cast<std::size_t>(classes) : rng.below(static_cast<std::uint64_t>(classes)));
    const auto folds = stratified_kfold(y, k, rng.next_u64());
    ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
    std::vector<int> hits(y.size(), 0);
    for (const auto& f : folds) {
      EXPECT_EQ(f.train.size() + f.test.size(), y.size());
      for (auto i : f.test) ++hits[i];
    }
    for (int h : hits) EXPECT_EQ(h, 1);
    for (int c = 0; c < classes; ++c) {
      std::vector<int> per_fold;
      for (const auto& f : folds) {
        per_fold.push_back(static_cast<int>(std::count_if(f.test.begin(), f.test.end(), [&](auto i) { return y[i] == c; })));
      }
      const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
      EXPECT_LE(*hi - *lo, 1);
    }
  }
}

TEST(StratifiedKFold, TooFewSamplesIsAnError) {
  const std::vector<int> y = {0, 0, 0, 0, 0, 1, 1};
  try {
    stratified_kfold(y, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Stratification);
  }
}

// ------------------------------------------------------------------ metrics

TEST(Metrics, PublishedIdentities) {
  EXPECT_NEAR(f1_score(0.8510, 0.9203), 0.8843, 1e-4);
  const std::vector<double> support = {0.7773, 0.2227}, recall = {0.9203, 0.4372};
  EXPECT_NEAR(accuracy_from(support, recall), 0.8127, 1e-4);
  const std::vector<double> balanced = {0.5, 0.5}, recall_b = {0.6954, 0.7817};
  EXPECT_NEAR(accuracy_from(balanced, recall_b), 0.7385, 5e-4);
  EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(Metrics, ReportFromConfusion) {
  Confusion c(2, 2);
  c << 8, 2, 1, 4;
  const auto r = report_from_confusion(c, ClassScheme::Binary50);
  EXPECT_DOUBLE_EQ(r.classes[0].precision, 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.classes[0].recall, 0.8);
  EXPECT_DOUBLE_EQ(r.classes[1].support, 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 12.0 / 15.0);
  std::vector<double> s, rc;
  for (const auto& m : r.classes) {
    s.push_back(m.support);
    rc.push_back(m.recall);
  }
  EXPECT_NEAR(accuracy_from(s, rc), r.accuracy, 1e-15);
}

TEST(Metrics, UndefinedPrecisionIsFlagged) {
  Confusion c(2, 2);
  c << 5, 0, 3, 0;
  const auto r = report_from_confusion(c, ClassScheme::Binary50);
  EXPECT_FALSE(r.classes[1].precision_defined);
  EXPECT_EQ(r.classes[1].precision, 0.0);
  EXPECT_EQ(r.classes[1].f1, 0.0);
}

// ------------------------------------------------------------------ network

template <typename Scalar>
void gradient_check(std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  Mlp<Scalar> net(4, 7, 3);
  net.init(rng);
  for (Eigen::Index i = 0; i < net.b1.size(); ++i) net.b1(i) = static_cast<Scalar>(rng.normal(0.0, 0.1));
  typename Mlp<Scalar>::Matrix x(16, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<Scalar>(rng.normal());
  std::vector<int> y(16);
  for (auto& v : y) v = static_cast<int>(rng.below(3));

  typename Mlp<Scalar>::Gradients g;
  net.loss(x, y, &g);
  Mlp<Scalar> probe_net = net;
  std::vector<Scalar> analytic;
  analytic.insert(analytic.end(), g.w1.data(), g.w1.data() + g.w1.size());
  analytic.insert(analytic.end(), g.b1.data(), g.b1.data() + g.b1.size());
  analytic.insert(analytic.end(), g.w2.data(), g.w2.data() + g.w2.size());
  analytic.insert(analytic.end(), g.b2.data(), g.b2.data() + g.b2.size());
  ASSERT_EQ(analytic.size(), net.parameter_count());

  const double h = 1e-5;
  for (int k = 0; k < 10; ++k) {
    const auto i = rng.below(net.parameter_count());
    const Scalar saved = probe_net.parameter(i);
    probe_net.parameter(i) = saved + static_cast<Scalar>(h);
    const double up = probe_net.loss(x, y);
    probe_net.parameter(i) = saved - static_cast<Scalar>(h);
    const double down = probe_net.loss(x, y);
    probe_net.parameter(i) = saved;
    const double numeric = (up - down) / (2 * h);
    const double a = analytic[i];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
    EXPECT_LE(rel, tolerance) << "parameter " << i << ": " << a << " vs " << numeric;
  }
}

TEST(Mlp, GradientMatchesCentralDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) gradient_check<double>(seed, 1e-4);
}

TEST(Mlp, ProbabilitiesAreNormalised) {
  Rng rng(3);
  Mlp<double> net(5, 16, 3);
  net.init(rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 5) * 50.0;
  const auto p = net.forward(x);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
    EXPECT_TRUE((p.row(i).array() >= 0.0).all());
  }
}

TEST(Mlp, SinglePrecisionAgreesWithDouble) {
  Rng rng(9);
  Mlp<double> net(3, 8, 2);
  net.init(rng);
  Mlp<float> small(3, 8, 2);
  small.w1 = net.w1.cast<float>();
  small.b1 = net.b1.cast<float>();
  small.w2 = net.w2.cast<float>();
  small.b2 = net.b2.cast<float>();
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
  const Eigen::MatrixXf pf = small.forward(x.cast<float>());
  EXPECT_LT((net.forward(x).cast<float>() - pf).cwiseAbs().maxCoeff(), 1e-5f);
}

Dataset separable(std::uint64_t seed, int n) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    x(i, 0) = (label ? 2.0 : -2.0) + rng.normal(0.0, 0.5);
    x(i, 1) = rng.normal();
    y[static_cast<std::size_t>(i)] = label;
  }
  return labelled(x, y);
}

TEST(Train, SeparableDataIsLearned) {
  const auto d = separable(4, 2000);
  const auto model = train(d);
  const auto predicted = predict_labels(model, d.features);
  const auto report = report_from_confusion(confusion_matrix(d.labels, predicted, 2), ClassScheme::Binary50);
  EXPECT_GE(report.accuracy, 0.99);
}

TEST(Train, SameSeedSameModel) {
  const auto d = separable(5, 600);
  Hyperparameters h;
  h.epochs = 5;
  EXPECT_EQ(serialize_model(train(d, h)), serialize_model(train(d, h)));
}

TEST(Train, DivergenceIsReported) {
  const auto d = separable(6, 512);
  Hyperparameters h;
  h.learning_rate = 1e300;
  try {
    train(d, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Divergence);
  }
}

TEST(Predict, ExactTiesResolveToTheLowestClass) {
  TrainedModel m;
  m.scheme = ClassScheme::Multiclass;
  m.net = Mlp<double>(2, 4, 3);  // all-zero weights: uniform output
  m.normalization.mean = Eigen::VectorXd::Zero(2);
  m.normalization.stddev = Eigen::VectorXd::Ones(2);
  const std::vector<double> f = {1.0, -3.0};
  const auto p = predict(m, f);
  EXPECT_EQ(p.label, 0);
  EXPECT_NEAR(p.probabilities[2], 1.0 / 3.0, 1e-15);
  EXPECT_THROW(predict(m, std::vector<double>{1.0}), Error);
}

TEST(ModelFile, RoundTripPreservesPredictions) {
  const auto d = separable(7, 400);
  Hyperparameters h;
  h.epochs = 3;
  h.hidden = 9;
  const auto m = train(d, h);
  const auto text = serialize_model(m);
  const auto back = parse_model(text);
  EXPECT_EQ(serialize_model(back), text);
  EXPECT_EQ(predict_labels(back, d.features), predict_labels(m, d.features));
  EXPECT_EQ(back.feature_names, m.feature_names);
}

TEST(ModelFile, RejectsOtherVersionsAndGarbage) {
  EXPECT_THROW(parse_model("cvqos-mlp 2\n"), Error);
  EXPECT_THROW(parse_model("hello"), Error);
  const auto text = serialize_model(train(separable(1, 100), Hyperparameters{4, 1e-3, 0.9, 32, 1, 1}));
  EXPECT_THROW(parse_model(text.substr(0, text.size() / 2)), Error);
}

TEST(CrossValidate, ShuffledLabelsSitAtTheMajorityPrior) {
  Rng rng(13);
  const int n = 1500;
  Eigen::MatrixXd x(n, 3);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[static_cast<std::size_t>(i)] = rng.uniform() < 0.7 ? 0 : 1;
  }
  CvOptions o;
  o.hyper.epochs = 10;
  const auto r = cross_validate(labelled(x, y), o);
  const double prior = std::max(r.model.classes[0].support, r.model.classes[1].support);
  EXPECT_NEAR(r.model.accuracy, prior, 0.05);
  EXPECT_NEAR(r.baseline.accuracy, prior, 1e-12);
  EXPECT_EQ(r.model.total, static_cast<std::uint64_t>(n));
}

TEST(MajorityLabel, TiesGoLow) {
  EXPECT_EQ(majority_label(std::vector<int>{1, 0, 1, 0}, 2), 0);
  EXPECT_EQ(majority_label(std::vector<int>{2, 2, 1}, 3), 2);
}

TEST(Tune, PicksTheBestGridPoint) {
  const auto d = separable(3, 300);
  CvOptions o;
  o.folds = 3;
  o.hyper.epochs = 3;
  const std::vector<double> rates = {1e-6, 1e-2};
  const std::vector<int> widths = {8};
  const auto t = tune(d, rates, widths, o);
  ASSERT_EQ(t.grid.size(), 2u);
  const auto best = std::max_element(t.grid.begin(), t.grid.end(),
                                     [](const auto& a, const auto& b) { return a.accuracy < b.accuracy; });
  EXPECT_EQ(t.best.learning_rate, best->learning_rate);
}

}  // namespace
}  // namespace cvqos::ml
