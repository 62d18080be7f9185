#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drbench/matrix.hpp"

namespace drbench {

enum class Method { RandomSampling, RandomProjection, Pca };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Variance convention for the Gaussian projection entries. Standard keeps
// entry variance 1/K (std 1/sqrt(K)); PaperLiteral uses variance sqrt(1/K).
enum class RpVarianceMode { Standard, PaperLiteral };

// K pixel indexes drawn from [0, D), pairwise distinct.
struct SamplingIndex {
  int d = 0;
  int k = 0;
  std::vector<int> phi;
};

struct ProjectionSpec {
  Method method = Method::RandomSampling;
  int d = 0;
  int k = 0;
  std::uint64_t seed = 0;  // recorded but unused by PCA
  bool center = false;     // PCA only
};

struct ProjectionMatrix {
  ProjectionSpec spec;
  Matrix p;                              // k x d
  std::optional<SamplingIndex> sampling; // RandomSampling only
  std::optional<Vector> mean;            // present only when spec.center
};

// phi = first k entries of a seeded Fisher-Yates permutation of [0, d).
ProjectionMatrix build_random_sampling(int d, int k, std::uint64_t seed);

// Realizes the selection matrix for an explicitly given index set.
ProjectionMatrix sampling_from_index(const SamplingIndex& index,
                                     std::uint64_t seed = 0);

ProjectionMatrix build_random_projection(int d, int k, std::uint64_t seed,
                                         RpVarianceMode mode = RpVarianceMode::Standard);

// Full PCA fit, cached so that per-K projections truncate one decomposition.
// Components are always fit on the mean-centered training matrix; `center`
// only controls whether the mean is subtracted when projecting.
struct PcaBasis {
  Matrix components;       // rank x d, orthonormal rows, ordered by singular value
  Vector singular_values;  // of the centered training matrix
  Vector mean;             // column means of the training matrix
  int rank = 0;            // numerical rank of the centered matrix
};

PcaBasis fit_pca_basis(const Matrix& train);
ProjectionMatrix pca_from_basis(const PcaBasis& basis, int k, bool center);
ProjectionMatrix fit_pca(const Matrix& train, int k, bool center = false);

Vector project(const ProjectionMatrix& pm, const Vector& x);
Matrix project_dataset(const ProjectionMatrix& pm, const Matrix& xs);

}  // namespace drbench
