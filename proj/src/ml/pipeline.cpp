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

#include "cvqos/ml/pipeline.hpp"

#include <sstream>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"
#include "cvqos/ml/sampling.hpp"

namespace cvqos::ml {

int majority_label(std::span<const int> labels, int classes) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++counts.at(static_cast<std::size_t>(y));
  int best = 0;
  for (int c = 1; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

CvResult cross_validate(const Dataset& data, const CvOptions& options) {
  const int k = class_count(data.scheme);
  const auto folds = stratified_kfold(data.labels, options.folds, options.seed);
  Confusion pooled = Confusion::Zero(k, k);
  Confusion pooled_base = Confusion::Zero(k, k);
  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train_set = data.subset(folds[f].train);
    const auto test_set = data.subset(folds[f].test);
    auto hyper = options.hyper;
    hyper.seed = options.hyper.seed + f;
    const auto model = train(train_set, hyper);
    result.fold_losses.push_back(model.final_loss);
    pooled += confusion_matrix(test_set.labels, predict_labels(model, test_set.features), k);
    const std::vector<int> base(test_set.rows(), majority_label(train_set.labels, k));
    pooled_base += confusion_matrix(test_set.labels, base, k);
  }
  result.model = report_from_confusion(pooled, data.scheme);
  result.baseline = report_from_confusion(pooled_base, data.scheme);
  return result;
}

TuneResult tune(const Dataset& data, std::span<const double> learning_rates, std::span<const int> hidden_sizes,
                const CvOptions& options) {
  if (learning_rates.empty() || hidden_sizes.empty()) throw Error(Errc::Usage, "empty tuning grid");
  TuneResult result;
  double best = -1.0;
  for (double lr : learning_rates) {
    for (int h : hidden_sizes) {
      auto opt = options;
      opt.hyper.learning_rate = lr;
      opt.hyper.hidden = h;
      const double acc = cross_validate(data, opt).model.accuracy;
      result.grid.push_back({lr, h, acc});
      if (acc > best) {
        best = acc;
        result.best = opt.hyper;
      }
    }
  }
  return result;
}

namespace {

constexpr std::string_view kModelMagic = "cvqos-mlp";
constexpr int kModelVersion = 1;

void put_values(std::ostringstream& out, const double* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out << (i ? " " : "") << csv::format(data[i]);
  out << '\n';
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : in_(std::string(text)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw Error(Errc::Parse, "model file ends early");
    return w;
  }
  void expect(std::string_view key) {
    const auto w = word();
    if (w != key) throw Error(Errc::Parse, "model file: expected '" + std::string(key) + "', found '" + w + "'");
  }
  double number() { return csv::to_double(word(), "model value"); }
  std::int64_t integer() { return csv::to_int(word(), "model value"); }

 private:
  std::istringstream in_;
};

Eigen::MatrixXd read_matrix(Tokens& t, std::string_view key) {
  t.expect(key);
  const auto rows = t.integer();
  const auto cols = t.integer();
  if (rows < 0 || cols < 0 || rows * cols > 100'000'000) throw Error(Errc::Parse, "model file: bad matrix shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = t.number();
  return m;
}

Eigen::VectorXd read_vector(Tokens& t, std::string_view key, Eigen::Index expected) {
  t.expect(key);
  const auto n = t.integer();
  if (n != expected) throw Error(Errc::Parse, "model file: '" + std::string(key) + "' has the wrong length");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = t.number();
  return v;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  std::ostringstream out;
  const auto& net = model.net;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "scheme " << to_string(model.scheme) << '\n';
  out << "features " << model.feature_names.size();
  for (const auto& n : model.feature_names) out << ' ' << n;
  out << '\n';
  out << "hidden " << model.hyper.hidden << '\n';
  out << "learning_rate " << csv::format(model.hyper.learning_rate) << '\n';
  out << "momentum " << csv::format(model.hyper.momentum) << '\n';
  out << "batch_size " << model.hyper.batch_size << '\n';
  out << "epochs " << model.hyper.epochs << '\n';
  out << "seed " << model.hyper.seed << '\n';
  out << "final_loss " << csv::format(model.final_loss) << '\n';
  out << "mean " << model.normalization.mean.size() << '\n';
  put_values(out, model.normalization.mean.data(), model.normalization.mean.size());
  out << "stddev " << model.normalization.stddev.size() << '\n';
  put_values(out, model.normalization.stddev.data(), model.normalization.stddev.size());
  out << "w1 " << net.w1.rows() << ' ' << net.w1.cols() << '\n';
  put_values(out, net.w1.data(), net.w1.size());
  out << "b1 " << net.b1.size() << '\n';
  put_values(out, net.b1.data(), net.b1.size());
  out << "w2 " << net.w2.rows() << ' ' << net.w2.cols() << '\n';
  put_values(out, net.w2.data(), net.w2.size());
  out << "b2 " << net.b2.size() << '\n';
  put_values(out, net.b2.data(), net.b2.size());
  out << "end\n";
  return out.str();
}

TrainedModel parse_model(std::string_view text) {
  Tokens t(text);
  t.expect(kModelMagic);
  if (const auto v = t.integer(); v != kModelVersion) {
    throw Error(Errc::Parse, "unsupported model version " + std::to_string(v));
  }
  TrainedModel m;
  t.expect("scheme");
  m.scheme = parse_scheme(t.word());
  t.expect("features");
  const auto nf = t.integer();
  if (nf < 1 || nf > 10'000) throw Error(Errc::Parse, "model file: bad feature count");
  for (std::int64_t i = 0; i < nf; ++i) m.feature_names.push_back(t.word());
  t.expect("hidden");
  m.hyper.hidden = static_cast<int>(t.integer());
  t.expect("learning_rate");
  m.hyper.learning_rate = t.number();
  t.expect("momentum");
  m.hyper.momentum = t.number();
  t.expect("batch_size");
  m.hyper.batch_size = static_cast<int>(t.integer());
  t.expect("epochs");
  m.hyper.epochs = static_cast<int>(t.integer());
  t.expect("seed");
  m.hyper.seed = static_cast<std::uint64_t>(t.integer());
  t.expect("final_loss");
  m.final_loss = t.number();
  m.normalization.mean = read_vector(t, "mean", nf);
  m.normalization.stddev = read_vector(t, "stddev", nf);
  m.net.w1 = read_matrix(t, "w1");
  m.net.b1 = read_vector(t, "b1", m.net.w1.rows());
  m.net.w2 = read_matrix(t, "w2");
  m.net.b2 = read_vector(t, "b2", m.net.w2.rows());
  t.expect("end");
  if (m.net.w1.cols() != nf || m.net.w2.cols() != m.net.w1.rows() || m.net.w2.rows() != class_count(m.scheme)) {
    throw Error(Errc::Parse, "model file: layer shapes are inconsistent");
  }
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  io::write_atomic(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return parse_model(io::read_all(path)); }

}  // namespace cvqos::ml
