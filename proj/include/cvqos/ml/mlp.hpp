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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvqos/error.hpp"
#include "cvqos/ml/dataset.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::ml {

/// One hidden ReLU layer followed by a softmax output. Samples are rows.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Labels = std::span<const int>;

  struct Gradients {
    Matrix w1, w2;
    Vector b1, b2;
  };

  Mlp() = default;
  Mlp(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index outputs)
      : w1(Matrix::Zero(hidden, inputs)),
        b1(Vector::Zero(hidden)),
        w2(Matrix::Zero(outputs, hidden)),
        b2(Vector::Zero(outputs)) {}

  Eigen::Index inputs() const { return w1.cols(); }
  Eigen::Index hidden() const { return w1.rows(); }
  Eigen::Index outputs() const { return w2.rows(); }

  /// He-normal weights, zero biases.
  void init(Rng& rng) {
    auto fill = [&](Matrix& w) {
      const double sd = std::sqrt(2.0 / static_cast<double>(w.cols()));
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = static_cast<Scalar>(rng.normal(0.0, sd));
    };
    fill(w1);
    fill(w2);
    b1.setZero();
    b2.setZero();
  }

  /// Class probabilities, one row per sample.
  Matrix forward(const Matrix& x) const {
    const Matrix h = hidden_activations(x);
    return softmax(logits(h));
  }

  /// Mean cross-entropy; fills `grad` when non-null.
  Scalar loss(const Matrix& x, Labels y, Gradients* grad = nullptr) const {
    if (x.cols() != inputs()) throw Error(Errc::Shape, "input width does not match the network");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error(Errc::Shape, "row and label counts differ");
    const Matrix h = hidden_activations(x);
    const Matrix p = softmax(logits(h));
    const auto n = static_cast<Scalar>(x.rows());
    Scalar total(0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Scalar pi = p(i, y[static_cast<std::size_t>(i)]);
      total -= std::log(std::max(pi, std::numeric_limits<Scalar>::min()));
    }
    if (grad != nullptr) {
      Matrix d2 = p;
      for (Eigen::Index i = 0; i < x.rows(); ++i) d2(i, y[static_cast<std::size_t>(i)]) -= Scalar(1);
      d2 /= n;
      grad->w2.noalias() = d2.transpose() * h;
      grad->b2 = d2.colwise().sum().transpose();
      Matrix d1 = d2 * w2;
      d1.array() *= (h.array() > Scalar(0)).template cast<Scalar>();
      grad->w1.noalias() = d1.transpose() * x;
      grad->b1 = d1.colwise().sum().transpose();
    }
    return total / n;
  }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
  }

  /// Flat view over w1, b1, w2, b2 (column-major within each), for gradient
  /// checks and serialization.
  Scalar& parameter(std::size_t i) { return const_cast<Scalar&>(std::as_const(*this).parameter(i)); }
  const Scalar& parameter(std::size_t i) const {
    auto idx = static_cast<Eigen::Index>(i);
    if (idx < w1.size()) return w1.data()[idx];
    idx -= w1.size();
    if (idx < b1.size()) return b1.data()[idx];
    idx -= b1.size();
    if (idx < w2.size()) return w2.data()[idx];
    idx -= w2.size();
    if (idx < b2.size()) return b2.data()[idx];
    throw Error(Errc::Shape, "parameter index out of range");
  }

  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

 private:
  Matrix hidden_activations(const Matrix& x) const {
    Matrix z = x * w1.transpose();
    z.rowwise() += b1.transpose();
    return z.cwiseMax(Scalar(0));
  }

  Matrix logits(const Matrix& h) const {
    Matrix z = h * w2.transpose();
    z.rowwise() += b2.transpose();
    return z;
  }

  static Matrix softmax(Matrix z) {
    const Vector m = z.rowwise().maxCoeff();
    z.colwise() -= m;
    z = z.array().exp().matrix();
    const Vector s = z.rowwise().sum();
    z.array().colwise() /= s.array();
    return z;
  }
};

struct Hyperparameters {
  int hidden = 128;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 256;
  int epochs = 50;
  std::uint64_t seed = 1;
};

/// A network with the normalization and feature order it was trained on.
struct TrainedModel {
  Mlp<double> net;
  Normalization<double> normalization;
  std::vector<std::string> feature_names;
  ClassScheme scheme = ClassScheme::Binary50;
  Hyperparameters hyper;
  double final_loss = 0.0;  // mean training loss after the last epoch
};

/// Mini-batch SGD with momentum on the normalized training rows. Throws
/// Errc::Divergence if the loss becomes non-finite and Errc::EmptyInput for an
/// empty dataset.
TrainedModel train(const Dataset& data, const Hyperparameters& hyper = {});

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

/// Exact probability ties resolve to the lowest class index. Throws
/// Errc::Shape when the feature count differs from the model.
Prediction predict(const TrainedModel& model, std::span<const double> features);
std::vector<int> predict_labels(const TrainedModel& model, const Eigen::MatrixXd& features);

}  // namespace cvqos::ml
