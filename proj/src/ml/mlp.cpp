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

#include "cvqos/ml/mlp.hpp"

#include <numeric>

namespace cvqos::ml {

TrainedModel train(const Dataset& data, const Hyperparameters& hyper) {
  if (data.rows() == 0) throw Error(Errc::EmptyInput, "training on an empty dataset");
  if (hyper.hidden < 1 || hyper.batch_size < 1 || hyper.epochs < 0 || !(hyper.learning_rate > 0.0)) {
    throw Error(Errc::Usage, "invalid hyperparameters");
  }
  TrainedModel model;
  model.scheme = data.scheme;
  model.feature_names = data.names;
  model.hyper = hyper;
  model.normalization = Normalization<double>::fit(data.features);
  const Eigen::MatrixXd x = model.normalization.apply(data.features);

  Rng rng(hyper.seed);
  auto& net = model.net;
  net = Mlp<double>(x.cols(), hyper.hidden, class_count(data.scheme));
  net.init(rng);

  Mlp<double>::Gradients grad;
  Mlp<double>::Gradients velocity{Eigen::MatrixXd::Zero(net.w1.rows(), net.w1.cols()),
                                  Eigen::MatrixXd::Zero(net.w2.rows(), net.w2.cols()),
                                  Eigen::VectorXd::Zero(net.b1.size()), Eigen::VectorXd::Zero(net.b2.size())};
  const double mu = hyper.momentum;
  const double lr = hyper.learning_rate;

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(hyper.batch_size);
  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const auto end = std::min(order.size(), start + batch);
      xb.resize(static_cast<Eigen::Index>(end - start), x.cols());
      yb.clear();
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
        yb.push_back(data.labels[order[i]]);
      }
      const double l = net.loss(xb, yb, &grad);
      if (!std::isfinite(l)) {
        throw Error(Errc::Divergence, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      velocity.w1 = mu * velocity.w1 - lr * grad.w1;
      velocity.b1 = mu * velocity.b1 - lr * grad.b1;
      velocity.w2 = mu * velocity.w2 - lr * grad.w2;
      velocity.b2 = mu * velocity.b2 - lr * grad.b2;
      net.w1 += velocity.w1;
      net.b1 += velocity.b1;
      net.w2 += velocity.w2;
      net.b2 += velocity.b2;
    }
  }
  model.final_loss = net.loss(x, data.labels);
  if (!std::isfinite(model.final_loss)) throw Error(Errc::Divergence, "final training loss is non-finite");
  return model;
}

namespace {

int argmax_first(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  int best = 0;
  for (Eigen::Index c = 1; c < p.size(); ++c) {
    if (p(c) > p(best)) best = static_cast<int>(c);
  }
  return best;
}

}  // namespace

Prediction predict(const TrainedModel& model, std::span<const double> features) {
  if (static_cast<Eigen::Index>(features.size()) != model.net.inputs()) {
    throw Error(Errc::Shape, "expected " + std::to_string(model.net.inputs()) + " features, got " +
                                 std::to_string(features.size()));
  }
  Eigen::MatrixXd x(1, model.net.inputs());
  for (std::size_t j = 0; j < features.size(); ++j) x(0, static_cast<Eigen::Index>(j)) = features[j];
  const Eigen::MatrixXd p = model.net.forward(model.normalization.apply(x));
  Prediction out;
  out.label = argmax_first(p.row(0));
  out.probabilities.assign(p.data(), p.data() + p.size());
  return out;
}

std::vector<int> predict_labels(const TrainedModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.net.inputs()) {
    throw Error(Errc::Shape, "expected " + std::to_string(model.net.inputs()) + " features, got " +
                                 std::to_string(features.cols()));
  }
  const Eigen::MatrixXd p = model.net.forward(model.normalization.apply(features));
  std::vector<int> labels(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) labels[static_cast<std::size_t>(i)] = argmax_first(p.row(i));
  return labels;
}

}  // namespace cvqos::ml
