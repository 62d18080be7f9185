#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "drbench/classify.hpp"
#include "drbench/errors.hpp"
#include "drbench/rng.hpp"
#include "oracles.hpp"

using namespace drbench;

namespace {

// Two well-separated Gaussian blobs.
void make_blobs(int n, int f, std::uint64_t seed, Matrix& xs, std::vector<int>& labels,
                double separation = 4.0) {
  Xoshiro256 rng(seed);
  xs = Matrix(n, f);
  labels.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int label = i % 2;
    labels[static_cast<std::size_t>(i)] = label;
    double center = label == 0 ? -separation / 2.0 : separation / 2.0;
    for (int j = 0; j < f; ++j) {
      xs(i, j) = center + rng.next_gaussian();
    }
  }
}

const ClassifierKind kAllKinds[] = {ClassifierKind::LinearSvm,
                                    ClassifierKind::RandomForest,
                                    ClassifierKind::LogisticRegression};

}  // namespace

TEST_CASE("all three classifiers separate two blobs") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(200, 2, 7, xs, labels);
  for (ClassifierKind kind : kAllKinds) {
    Classifier c = train(kind, xs, labels);
    CHECK(accuracy(c, xs, labels) >= 0.99);
  }
}

TEST_CASE("held-out blob accuracy stays high") {
  Matrix train_xs, test_xs;
  std::vector<int> train_labels, test_labels;
  make_blobs(200, 2, 7, train_xs, train_labels);
  make_blobs(100, 2, 8, test_xs, test_labels);
  for (ClassifierKind kind : kAllKinds) {
    Classifier c = train(kind, train_xs, train_labels);
    CHECK(accuracy(c, test_xs, test_labels) >= 0.95);
  }
}

TEST_CASE("memorization of one sample per class") {
  Matrix xs{{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}};
  std::vector<int> labels{0, 1, 2};
  for (ClassifierKind kind : kAllKinds) {
    Classifier c = train(kind, xs, labels);
    std::vector<int> preds = c.predict(xs);
    CHECK(preds == labels);
  }
}

TEST_CASE("same seed and data give identical predictions") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(120, 3, 5, xs, labels);
  Matrix probe;
  std::vector<int> probe_labels;
  make_blobs(40, 3, 6, probe, probe_labels);

  for (ClassifierKind kind : kAllKinds) {
    TrainConfig cfg;
    cfg.seed = 99;
    Classifier a = train(kind, xs, labels, cfg);
    Classifier b = train(kind, xs, labels, cfg);
    CHECK(a.predict(probe) == b.predict(probe));
  }
}

TEST_CASE("empty probe gives an empty prediction") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(50, 2, 3, xs, labels);
  Classifier c = train(ClassifierKind::LinearSvm, xs, labels);
  CHECK(c.predict(Matrix(0, 2)).empty());
}

TEST_CASE("accuracy arithmetic") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(100, 2, 11, xs, labels, 8.0);
  Classifier c = train(ClassifierKind::LogisticRegression, xs, labels);

  CHECK(accuracy(c, xs, labels) == 1.0);

  std::vector<int> complemented(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) complemented[i] = 1 - labels[i];
  CHECK(accuracy(c, xs, complemented) ==
        doctest::Approx(1.0 - accuracy(c, xs, labels)));

  // Hand-checkable 3-of-4 case.
  Matrix probe{{-4.0, -4.0}, {-4.0, -4.0}, {4.0, 4.0}, {4.0, 4.0}};
  std::vector<int> probe_labels{0, 1, 1, 1};
  CHECK(accuracy(c, probe, probe_labels) == doctest::Approx(0.75));
}

TEST_CASE("deep forest memorizes a unique training set") {
  Xoshiro256 rng(17);
  Matrix xs = oracles::random_matrix(rng, 60, 4);
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
  Classifier c = train(ClassifierKind::RandomForest, xs, labels);
  CHECK(accuracy(c, xs, labels) == 1.0);
}

TEST_CASE("row permutations move probe accuracy by at most 0.05") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(200, 2, 21, xs, labels);
  Matrix probe;
  std::vector<int> probe_labels;
  make_blobs(100, 2, 22, probe, probe_labels);

  Xoshiro256 rng(5);
  std::vector<double> accs;
  std::vector<int> order(200);
  for (int i = 0; i < 200; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int perm = 0; perm < 5; ++perm) {
    rng.shuffle(order);
    Matrix shuffled(200, 2);
    std::vector<int> shuffled_labels(200);
    for (int i = 0; i < 200; ++i) {
      int src = order[static_cast<std::size_t>(i)];
      shuffled(i, 0) = xs(src, 0);
      shuffled(i, 1) = xs(src, 1);
      shuffled_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
    }
    Classifier c = train(ClassifierKind::RandomForest, shuffled, shuffled_labels);
    accs.push_back(accuracy(c, probe, probe_labels));
  }
  double lo = *std::min_element(accs.begin(), accs.end());
  double hi = *std::max_element(accs.begin(), accs.end());
  CHECK(hi - lo <= 0.05);
}

TEST_CASE("logistic regression loss is non-increasing") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(150, 3, 9, xs, labels, 2.0);
  Classifier c = train(ClassifierKind::LogisticRegression, xs, labels);
  const std::vector<double>& losses = c.loss_history();
  REQUIRE(losses.size() > 2);
  for (std::size_t i = 1; i < losses.size(); ++i) {
    CHECK(losses[i] <= losses[i - 1] + 1e-9);
  }
}

TEST_CASE("training rejects bad inputs") {
  Matrix xs{{0.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(train(ClassifierKind::LinearSvm, xs, {0, 0}), InvalidSpecError);
  CHECK_THROWS_AS(train(ClassifierKind::LinearSvm, xs, {0, 2}), InvalidSpecError);  // missing 1
  CHECK_THROWS_AS(train(ClassifierKind::LinearSvm, xs, {0}), InvalidSpecError);

  Matrix bad = xs;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(train(ClassifierKind::LinearSvm, bad, {0, 1}), NumericalError);
}

TEST_CASE("predict rejects wrong widths") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(50, 3, 2, xs, labels);
  Classifier c = train(ClassifierKind::LogisticRegression, xs, labels);
  CHECK_THROWS_AS(c.predict(Matrix(2, 4, 0.0)), ShapeError);
  CHECK_THROWS_AS(accuracy(c, xs, std::vector<int>(10, 0)), ShapeError);
}

TEST_CASE("standardization flag is accepted and deterministic") {
  Matrix xs;
  std::vector<int> labels;
  make_blobs(100, 2, 31, xs, labels);
  for (int i = 0; i < 100; ++i) xs(i, 1) *= 50.0;  // rescale one feature
  TrainConfig cfg;
  cfg.standardize = true;
  Classifier a = train(ClassifierKind::LogisticRegression, xs, labels, cfg);
  Classifier b = train(ClassifierKind::LogisticRegression, xs, labels, cfg);
  CHECK(accuracy(a, xs, labels) >= 0.99);
  CHECK(a.predict(xs) == b.predict(xs));
}
