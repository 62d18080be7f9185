#pragma once

#include <optional>
#include <string>

#include "drbench/matrix.hpp"
#include "drbench/reduction.hpp"

namespace drbench {

enum class AttackKind { PInv, Regression };

std::string attack_kind_name(AttackKind kind);

// Attacker-dataset taxonomy for reporting. Type1: same labels and
// distribution as the targets; Type2: different. Unset when the relation is
// not part of the taxonomy (the held-out-identities case).
enum class AttackerType { Type1, Type2 };

// The attacker's d x k map x' = Q y, plus whatever public projection state
// (the training mean, when centering was on) is needed to apply it.
struct ReconstructionMatrix {
  Matrix q;  // d x k
  AttackKind kind = AttackKind::PInv;
  std::string attacker_dataset_id;      // Regression only
  std::optional<AttackerType> attacker_type;
  std::optional<Vector> intercept;      // Regression with intercept only
  std::optional<Vector> mean;           // copied from the attacked projection
};

struct RegressionOptions {
  bool intercept = false;
  std::string attacker_dataset_id;
  std::optional<AttackerType> attacker_type;
};

// Q = pinv(P).
ReconstructionMatrix attack_pinv(const ProjectionMatrix& pm);

// Projects the attacker's dataset through pm and fits the minimum-norm Q
// regressing the attacker rows from their projections. When the projection
// is centered, the fit regresses the centered rows and the public mean is
// added back at reconstruction time.
ReconstructionMatrix attack_regression(const ProjectionMatrix& pm,
                                       const Matrix& x_attack,
                                       const RegressionOptions& opts = {});

// Row i of the result is Q * ys.row(i) (plus intercept/mean when present).
Matrix reconstruct(const ReconstructionMatrix& rm, const Matrix& ys);

}  // namespace drbench
