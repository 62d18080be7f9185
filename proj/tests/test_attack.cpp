#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "drbench/attack.hpp"
#include "drbench/errors.hpp"
#include "drbench/rng.hpp"
#include "oracles.hpp"

using namespace drbench;

namespace {

double dataset_mse(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data().size());
}

}  // namespace

TEST_CASE("pinv attack on random sampling keeps sampled pixels and zeroes the rest") {
  ProjectionMatrix pm = build_random_sampling(12, 5, 3);
  // Penrose oracle applied to P^T directly, then the attack must match it.
  Matrix pt = oracles::naive_transpose(pm.p);
  CHECK(oracles::penrose_deviation(pm.p, pt) < 1e-15);

  ReconstructionMatrix rm = attack_pinv(pm);
  CHECK(max_abs_diff(rm.q, pt) == 0.0);
  CHECK(rm.kind == AttackKind::PInv);

  Xoshiro256 rng(5);
  Matrix xs = oracles::random_matrix(rng, 4, 12, 0.0, 1.0);
  Matrix recon = reconstruct(rm, project_dataset(pm, xs));
  std::vector<bool> sampled(12, false);
  for (int idx : pm.sampling->phi) sampled[static_cast<std::size_t>(idx)] = true;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (sampled[static_cast<std::size_t>(j)]) {
        CHECK(recon(i, j) == xs(i, j));  // exact
      } else {
        CHECK(recon(i, j) == 0.0);  // exact zero-fill
      }
    }
  }
}

TEST_CASE("sampling zero-fill mse closed form") {
  ProjectionMatrix pm = build_random_sampling(16, 6, 9);
  Xoshiro256 rng(6);
  Matrix xs = oracles::random_matrix(rng, 3, 16, 0.0, 1.0);
  ReconstructionMatrix rm = attack_pinv(pm);
  Matrix recon = reconstruct(rm, project_dataset(pm, xs));

  std::vector<bool> sampled(16, false);
  for (int idx : pm.sampling->phi) sampled[static_cast<std::size_t>(idx)] = true;
  double expected = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 16; ++j)
      if (!sampled[static_cast<std::size_t>(j)]) expected += xs(i, j) * xs(i, j);
  expected /= 3.0 * 16.0;
  CHECK(std::fabs(dataset_mse(xs, recon) - expected) < 1e-12);
}

TEST_CASE("pinv attack on a permutation reconstructs exactly") {
  ProjectionMatrix pm = build_random_sampling(7, 7, 21);
  ReconstructionMatrix rm = attack_pinv(pm);
  Xoshiro256 rng(1);
  Matrix xs = oracles::random_matrix(rng, 5, 7);
  Matrix recon = reconstruct(rm, project_dataset(pm, xs));
  CHECK(max_abs_diff(recon, xs) == 0.0);
}

TEST_CASE("pinv attack on orthonormal pca rows equals the transpose") {
  Xoshiro256 rng(14);
  Matrix data = oracles::random_matrix(rng, 15, 6, 0.0, 1.0);
  ProjectionMatrix pm = fit_pca(data, 3);
  ReconstructionMatrix rm = attack_pinv(pm);
  CHECK(max_abs_diff(rm.q, transpose(pm.p)) < 1e-8);
}

TEST_CASE("regression attack on an invertible projection recovers the inverse") {
  ProjectionMatrix pm = build_random_projection(4, 4, 33);
  Xoshiro256 rng(11);
  Matrix x_attack = oracles::random_matrix(rng, 12, 4);  // spans R^4
  ReconstructionMatrix rm = attack_regression(pm, x_attack);
  CHECK(rm.kind == AttackKind::Regression);

  Matrix targets = oracles::random_matrix(rng, 6, 4);
  Matrix recon = reconstruct(rm, project_dataset(pm, targets));
  CHECK(oracles::frobenius_diff(recon, targets) < 1e-8);
}

TEST_CASE("regression attack matches the normal-equations oracle on a toy instance") {
  // M=2, D=2, K=1.
  SamplingIndex index{2, 1, {0}};
  ProjectionMatrix pm = sampling_from_index(index);
  Matrix x_attack{{1.0, 0.5}, {2.0, 0.25}};
  ReconstructionMatrix rm = attack_regression(pm, x_attack);

  Matrix y_attack{{1.0}, {2.0}};
  Matrix q_ref = oracles::normal_equations_solve(y_attack, x_attack);  // 1x2
  CHECK(std::fabs(rm.q(0, 0) - q_ref(0, 0)) < 1e-8);
  CHECK(std::fabs(rm.q(1, 0) - q_ref(0, 1)) < 1e-8);
}

TEST_CASE("regression on own data beats pinv and random perturbations") {
  Xoshiro256 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    int d = 10, k = 4, m = 30;
    ProjectionMatrix pm = build_random_sampling(d, k, rng.next());
    Matrix x_attack = oracles::random_matrix(rng, m, d, 0.0, 1.0);
    // Correlate coordinates so regression has structure to exploit.
    for (int i = 0; i < m; ++i) {
      for (int j = 1; j < d; ++j) {
        x_attack(i, j) = 0.5 * x_attack(i, j) + 0.5 * x_attack(i, 0);
      }
    }
    Matrix y_attack = project_dataset(pm, x_attack);

    ReconstructionMatrix reg = attack_regression(pm, x_attack);
    ReconstructionMatrix pinv = attack_pinv(pm);

    double res_reg = oracles::frobenius_diff(reconstruct(reg, y_attack), x_attack);
    double res_pinv = oracles::frobenius_diff(reconstruct(pinv, y_attack), x_attack);
    CHECK(res_reg <= res_pinv + 1e-12);

    for (int p = 0; p < 20; ++p) {
      ReconstructionMatrix perturbed = reg;
      for (double& v : perturbed.q.data()) v += 1e-3 * (2.0 * rng.next_double() - 1.0);
      double res_p = oracles::frobenius_diff(reconstruct(perturbed, y_attack), x_attack);
      CHECK(res_reg <= res_p + 1e-12);
    }
  }
}

TEST_CASE("both attacks are lossless when K = D and P is invertible") {
  Xoshiro256 rng(77);
  Matrix targets = oracles::random_matrix(rng, 9, 6, 0.0, 1.0);
  Matrix x_attack = oracles::random_matrix(rng, 20, 6, 0.0, 1.0);

  ProjectionMatrix sampling = build_random_sampling(6, 6, 5);
  ProjectionMatrix projection = build_random_projection(6, 6, 5);
  for (const ProjectionMatrix* pm : {&sampling, &projection}) {
    Matrix ys = project_dataset(*pm, targets);
    CHECK(dataset_mse(targets, reconstruct(attack_pinv(*pm), ys)) < 1e-8);
    CHECK(dataset_mse(targets, reconstruct(attack_regression(*pm, x_attack), ys)) < 1e-8);
  }
}

TEST_CASE("reconstruct examples") {
  // Q = I on a k=d identity projection.
  SamplingIndex identity{3, 3, {0, 1, 2}};
  ProjectionMatrix pm = sampling_from_index(identity);
  ReconstructionMatrix rm = attack_pinv(pm);
  Xoshiro256 rng(2);
  Matrix ys = oracles::random_matrix(rng, 4, 3);
  CHECK(max_abs_diff(reconstruct(rm, ys), ys) == 0.0);

  // All-ones target, d=4, phi=(2,0): x' = (1,0,1,0).
  ProjectionMatrix pm2 = sampling_from_index(SamplingIndex{4, 2, {2, 0}});
  Matrix ones(1, 4, 1.0);
  Matrix recon = reconstruct(attack_pinv(pm2), project_dataset(pm2, ones));
  CHECK(recon(0, 0) == 1.0);
  CHECK(recon(0, 1) == 0.0);
  CHECK(recon(0, 2) == 1.0);
  CHECK(recon(0, 3) == 0.0);

  // Random instance against the naive oracle.
  ProjectionMatrix pm3 = build_random_projection(8, 3, 15);
  ReconstructionMatrix rm3 = attack_regression(pm3, oracles::random_matrix(rng, 12, 8));
  Matrix ys3 = oracles::random_matrix(rng, 5, 3);
  Matrix expected = oracles::naive_matmul(ys3, oracles::naive_transpose(rm3.q));
  CHECK(max_abs_diff(reconstruct(rm3, ys3), expected) < 1e-12);
}

TEST_CASE("attack determinism") {
  ProjectionMatrix pm = build_random_projection(10, 4, 42);
  Xoshiro256 rng(3);
  Matrix x_attack = oracles::random_matrix(rng, 25, 10);
  ReconstructionMatrix a = attack_regression(pm, x_attack);
  ReconstructionMatrix b = attack_regression(pm, x_attack);
  CHECK(std::memcmp(a.q.data().data(), b.q.data().data(),
                    a.q.data().size() * sizeof(double)) == 0);
}

TEST_CASE("attack errors") {
  ProjectionMatrix pm = build_random_sampling(6, 2, 1);
  CHECK_THROWS_AS(attack_regression(pm, Matrix(3, 5, 0.5)), ShapeError);
  CHECK_THROWS_AS(attack_regression(pm, Matrix(3, 6, 0.0)), NumericalError);  // Y all-zero

  ReconstructionMatrix rm = attack_pinv(pm);
  CHECK_THROWS_AS(reconstruct(rm, Matrix(3, 3, 0.0)), ShapeError);
}

TEST_CASE("regression with centering adds the public mean back") {
  Xoshiro256 rng(50);
  Matrix data = oracles::random_matrix(rng, 30, 5, 0.0, 1.0);
  ProjectionMatrix pm = fit_pca(data, 5, true);  // full rank, centered
  ReconstructionMatrix rm = attack_regression(pm, data);
  REQUIRE(rm.mean.has_value());
  Matrix recon = reconstruct(rm, project_dataset(pm, data));
  CHECK(oracles::frobenius_diff(recon, data) < 1e-6);
}

TEST_CASE("regression intercept option") {
  Xoshiro256 rng(51);
  ProjectionMatrix pm = build_random_sampling(6, 3, 4);
  Matrix x_attack = oracles::random_matrix(rng, 20, 6, 0.0, 1.0);
  RegressionOptions opts;
  opts.intercept = true;
  opts.attacker_dataset_id = "train";
  ReconstructionMatrix rm = attack_regression(pm, x_attack, opts);
  REQUIRE(rm.intercept.has_value());
  CHECK(rm.q.rows() == 6);
  CHECK(rm.q.cols() == 3);
  CHECK(rm.attacker_dataset_id == "train");

  // With an intercept the attacker's own residual can only improve.
  Matrix y_attack = project_dataset(pm, x_attack);
  ReconstructionMatrix plain = attack_regression(pm, x_attack);
  double res_with = oracles::frobenius_diff(reconstruct(rm, y_attack), x_attack);
  double res_plain = oracles::frobenius_diff(reconstruct(plain, y_attack), x_attack);
  CHECK(res_with <= res_plain + 1e-10);
}
