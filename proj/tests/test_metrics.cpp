#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "drbench/attack.hpp"
#include "drbench/errors.hpp"
#include "drbench/metrics.hpp"
#include "drbench/rng.hpp"
#include "oracles.hpp"

using namespace drbench;

namespace {

double naive_mse(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      double d = a(i, j) - b(i, j);
      acc += d * d;
    }
  return acc / (static_cast<double>(a.rows()) * a.cols());
}

// Classifier fixture: theta trained on a 2-class set separated by one pixel.
struct ArrFixture {
  Matrix xs;
  std::vector<int> labels;
  Classifier theta;
  int informative = 0;

  ArrFixture(int d, int informative_coord, std::uint64_t seed)
      : informative(informative_coord) {
    Xoshiro256 rng(seed);
    const int n = 80;
    xs = Matrix(n, d);
    labels.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      int label = i % 2;
      labels[static_cast<std::size_t>(i)] = label;
      for (int j = 0; j < d; ++j) xs(i, j) = 0.45 + 0.1 * rng.next_double();
      xs(i, informative_coord) = label == 0 ? 0.05 : 0.95;
    }
    theta = train(ClassifierKind::LogisticRegression, xs, labels);
  }
};

}  // namespace

TEST_CASE("mse basics") {
  Xoshiro256 rng(3);
  Matrix a = oracles::random_matrix(rng, 4, 5);
  CHECK(mse(a, a) == 0.0);

  Matrix x(1, 4, 0.0);
  Matrix y = x;
  y(0, 2) = 2.0;  // one coordinate differs by 2 -> 4/4
  CHECK(mse(x, y) == doctest::Approx(1.0));

  Matrix b = oracles::random_matrix(rng, 4, 5);
  CHECK(std::fabs(mse(a, b) - naive_mse(a, b)) < 1e-12);
}

TEST_CASE("mse symmetry and scaling") {
  Xoshiro256 rng(9);
  Matrix a = oracles::random_matrix(rng, 6, 7);
  Matrix b = oracles::random_matrix(rng, 6, 7);
  CHECK(mse(a, b) == mse(b, a));

  const double c = 3.25;
  Matrix ca = a, cb = b;
  for (double& v : ca.data()) v *= c;
  for (double& v : cb.data()) v *= c;
  CHECK(std::fabs(mse(ca, cb) - c * c * mse(a, b)) < 1e-12);
}

TEST_CASE("mse shape errors") {
  CHECK_THROWS_AS(mse(Matrix(2, 3), Matrix(3, 2)), ShapeError);
}

TEST_CASE("arr arithmetic") {
  CHECK(arr(0.7, 0.7) == 0.0);
  CHECK(arr(0.8, 0.4) == doctest::Approx(0.5));
  CHECK(arr(0.8, 0.9) == doctest::Approx(-0.125));  // negative, reported as-is
  CHECK_THROWS_AS(arr(0.0, 0.5), MetricError);
  CHECK_THROWS_AS(arr(1.2, 0.5), InvalidSpecError);
}

TEST_CASE("evaluate_attack on a lossless identity pipeline") {
  ArrFixture fx(6, 2, 12);
  ProjectionMatrix pm = build_random_sampling(6, 6, 4);  // permutation
  ReconstructionMatrix rm = attack_pinv(pm);
  RobustnessReport report = evaluate_attack(fx.xs, fx.labels, pm, rm, fx.theta);
  CHECK(report.mse < 1e-8);
  REQUIRE(report.arr.has_value());
  CHECK(std::fabs(*report.arr) < 1e-9);
  CHECK(report.status == "ok");
  CHECK(report.method == "random_sampling");
  CHECK(report.k == 6);
  CHECK(report.attack == "pinv");
}

TEST_CASE("all-ones targets at K = D/2 give mse exactly one half") {
  const int d = 8;
  ProjectionMatrix pm = build_random_sampling(d, d / 2, 3);
  ReconstructionMatrix rm = attack_pinv(pm);
  Matrix ones(10, d, 1.0);
  Matrix recon = reconstruct(rm, project_dataset(pm, ones));
  CHECK(mse(ones, recon) == 0.5);
}

TEST_CASE("excluding the discriminative pixel from phi forces positive arr") {
  const int d = 10;
  ProjectionMatrix pm = build_random_sampling(d, 4, 19);
  // Place the informative coordinate at an unsampled index.
  std::vector<bool> sampled(d, false);
  for (int idx : pm.sampling->phi) sampled[static_cast<std::size_t>(idx)] = true;
  int excluded = -1;
  for (int j = 0; j < d; ++j) {
    if (!sampled[static_cast<std::size_t>(j)]) {
      excluded = j;
      break;
    }
  }
  REQUIRE(excluded >= 0);

  ArrFixture fx(d, excluded, 44);
  CHECK(accuracy(fx.theta, fx.xs, fx.labels) > 0.9);

  ReconstructionMatrix rm = attack_pinv(pm);
  RobustnessReport report = evaluate_attack(fx.xs, fx.labels, pm, rm, fx.theta);
  REQUIRE(report.arr.has_value());
  CHECK(*report.arr > 0.0);
}

TEST_CASE("clip flag clamps reconstructions before scoring") {
  ArrFixture fx(5, 1, 21);
  ProjectionMatrix pm = build_random_projection(5, 2, 7);
  ReconstructionMatrix rm = attack_pinv(pm);

  EvalOptions clip;
  clip.clip_reconstruction = true;
  RobustnessReport clipped = evaluate_attack(fx.xs, fx.labels, pm, rm, fx.theta, clip);
  RobustnessReport plain = evaluate_attack(fx.xs, fx.labels, pm, rm, fx.theta);

  // Clipping toward [0,1] can only reduce the error against [0,1] targets.
  CHECK(clipped.mse <= plain.mse + 1e-15);
}

TEST_CASE("report arr identity holds") {
  ArrFixture fx(6, 0, 33);
  ProjectionMatrix pm = build_random_sampling(6, 3, 8);
  RobustnessReport report =
      evaluate_attack(fx.xs, fx.labels, pm, attack_pinv(pm), fx.theta);
  REQUIRE(report.arr.has_value());
  if (report.acc_original > 0.0) {
    double expected = (report.acc_original - report.acc_reconstructed) /
                      report.acc_original;
    CHECK(std::fabs(*report.arr - expected) < 1e-12);
  }
}
