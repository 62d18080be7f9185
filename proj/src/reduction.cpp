#include "drbench/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drbench/errors.hpp"
#include "drbench/rng.hpp"
#include "drbench/svd.hpp"

namespace drbench {

std::string method_name(Method m) {
  switch (m) {
    case Method::RandomSampling: return "random_sampling";
    case Method::RandomProjection: return "random_projection";
    case Method::Pca: return "pca";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "random_sampling") return Method::RandomSampling;
  if (name == "random_projection") return Method::RandomProjection;
  if (name == "pca") return Method::Pca;
  return std::nullopt;
}

namespace {

void check_dims(int d, int k) {
  if (k < 1 || d < 1 || k > d) {
    throw InvalidSpecError("invalid reduction dims: k=" + std::to_string(k) +
                           ", d=" + std::to_string(d));
  }
}

}  // namespace

ProjectionMatrix sampling_from_index(const SamplingIndex& index,
                                     std::uint64_t seed) {
  check_dims(index.d, index.k);
  if (static_cast<int>(index.phi.size()) != index.k) {
    throw InvalidSpecError("sampling index has " +
                           std::to_string(index.phi.size()) + " entries, want " +
                           std::to_string(index.k));
  }
  std::vector<bool> seen(static_cast<std::size_t>(index.d), false);
  for (int idx : index.phi) {
    if (idx < 0 || idx >= index.d || seen[static_cast<std::size_t>(idx)]) {
      throw InvalidSpecError("sampling index entries must be distinct and in [0, d)");
    }
    seen[static_cast<std::size_t>(idx)] = true;
  }

  ProjectionMatrix pm;
  pm.spec = {Method::RandomSampling, index.d, index.k, seed, false};
  pm.p = Matrix(index.k, index.d, 0.0);
  for (int i = 0; i < index.k; ++i) pm.p(i, index.phi[static_cast<std::size_t>(i)]) = 1.0;
  pm.sampling = index;
  return pm;
}

ProjectionMatrix build_random_sampling(int d, int k, std::uint64_t seed) {
  check_dims(d, k);
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  Xoshiro256 rng(seed);
  rng.shuffle(perm);

  SamplingIndex index;
  index.d = d;
  index.k = k;
  index.phi.assign(perm.begin(), perm.begin() + k);
  return sampling_from_index(index, seed);
}

ProjectionMatrix build_random_projection(int d, int k, std::uint64_t seed,
                                         RpVarianceMode mode) {
  check_dims(d, k);
  double variance = mode == RpVarianceMode::Standard
                        ? 1.0 / static_cast<double>(k)
                        : std::sqrt(1.0 / static_cast<double>(k));
  double stddev = std::sqrt(variance);

  ProjectionMatrix pm;
  pm.spec = {Method::RandomProjection, d, k, seed, false};
  pm.p = Matrix(k, d);
  Xoshiro256 rng(seed);
  for (int i = 0; i < k; ++i) {
    double* row = pm.p.row_ptr(i);
    for (int j = 0; j < d; ++j) row[j] = stddev * rng.next_gaussian();
  }
  return pm;
}

PcaBasis fit_pca_basis(const Matrix& train) {
  const int n = train.rows();
  const int d = train.cols();
  if (n < 2) {
    throw InvalidSpecError("pca requires at least 2 training rows, got " +
                           std::to_string(n));
  }
  train.ensure_finite("pca training matrix");

  PcaBasis basis;
  basis.mean = Vector(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = train.row_ptr(i);
    for (int j = 0; j < d; ++j) basis.mean[j] += row[j];
  }
  for (int j = 0; j < d; ++j) basis.mean[j] /= static_cast<double>(n);

  Matrix centered(n, d);
  for (int i = 0; i < n; ++i) {
    const double* src = train.row_ptr(i);
    double* dst = centered.row_ptr(i);
    for (int j = 0; j < d; ++j) dst[j] = src[j] - basis.mean[j];
  }

  SvdResult dec = svd(centered);
  double smax = dec.singular_values.dim() > 0 ? dec.singular_values[0] : 0.0;
  double tol = std::max(n, d) * std::numeric_limits<double>::epsilon() * smax;
  int rank = 0;
  for (int i = 0; i < dec.singular_values.dim(); ++i)
    if (dec.singular_values[i] > tol) ++rank;

  basis.rank = rank;
  basis.singular_values = Vector(rank);
  basis.components = Matrix(rank, d);
  for (int i = 0; i < rank; ++i) {
    basis.singular_values[i] = dec.singular_values[i];
    for (int j = 0; j < d; ++j) basis.components(i, j) = dec.vt(i, j);
  }
  return basis;
}

ProjectionMatrix pca_from_basis(const PcaBasis& basis, int k, bool center) {
  const int d = basis.components.cols();
  check_dims(d, k);
  if (k > basis.rank) {
    throw InvalidSpecError("pca k=" + std::to_string(k) +
                           " exceeds numerical rank " + std::to_string(basis.rank));
  }
  ProjectionMatrix pm;
  pm.spec = {Method::Pca, d, k, 0, center};
  pm.p = Matrix(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) pm.p(i, j) = basis.components(i, j);
  if (center) pm.mean = basis.mean;
  return pm;
}

ProjectionMatrix fit_pca(const Matrix& train, int k, bool center) {
  if (k > std::min(train.rows(), train.cols())) {
    throw InvalidSpecError("pca k=" + std::to_string(k) + " exceeds min(n, d) = " +
                           std::to_string(std::min(train.rows(), train.cols())));
  }
  return pca_from_basis(fit_pca_basis(train), k, center);
}

Vector project(const ProjectionMatrix& pm, const Vector& x) {
  if (x.dim() != pm.spec.d) {
    throw ShapeError("projection expects dim " + std::to_string(pm.spec.d) +
                     ", got " + std::to_string(x.dim()));
  }
  if (pm.mean) {
    Vector shifted(x.dim());
    for (int j = 0; j < x.dim(); ++j) shifted[j] = x[j] - (*pm.mean)[j];
    return matvec(pm.p, shifted);
  }
  return matvec(pm.p, x);
}

Matrix project_dataset(const ProjectionMatrix& pm, const Matrix& xs) {
  if (xs.cols() != pm.spec.d) {
    throw ShapeError("dataset has " + std::to_string(xs.cols()) +
                     " columns, projection expects " + std::to_string(pm.spec.d));
  }
  Matrix out(xs.rows(), pm.spec.k);
  for (int i = 0; i < xs.rows(); ++i) {
    Vector y = project(pm, xs.row(i));
    out.set_row(i, y);
  }
  return out;
}

}  // namespace drbench
