#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <variant>

#include "wvsim/operator_matrix.hpp"

namespace wvsim {

// |<Phi|Psi>| below this marks the post-selection as orthogonal: the weak
// value genuinely diverges there and downstream statistics must exclude, not
// average, such points.
inline constexpr double kOverlapEps = 1e-10;

// Relative density threshold below which a position post-selection sits on a
// wavefunction node.
inline constexpr double kNodeEpsRel = 1e-14;

// Post-selection: either a normalized finite-dimensional state or a position
// point (resolved to the nearest grid index by the grid machinery).
struct FinitePostSelection {
  Vector state;

  explicit FinitePostSelection(Vector v) : state(std::move(v)) {
    const double n = state.norm();
    if (std::abs(n - 1.0) > 1e-12)
      throw DimensionMismatch(
          "FinitePostSelection: vector not normalized (|norm-1| = " +
          std::to_string(std::abs(n - 1.0)) + ")");
  }
};

struct PositionPostSelection {
  double x;
};

using PostSelection = std::variant<FinitePostSelection, PositionPostSelection>;

// D = |Phi><Phi|, F = (A^dag D + D A)/2, C = i(A^dag D - D A)/2. All three are
// hermitian for arbitrary A, D is a rank-one projector, and the F/D and C/D
// expectation ratios reproduce Re and Im of <Phi|A|Psi>/<Phi|Psi>.
struct OperatorTriple {
  OperatorMatrix density;
  OperatorMatrix flux;
  OperatorMatrix commutator;
};

// Complex weak value with the two strong-measurement channels tracked
// separately. denominator is <Psi|D|Psi> = |<Phi|Psi>|^2.
struct WeakValue {
  std::complex<double> value;
  double re_channel = 0.0;
  double im_channel = 0.0;
  double denominator = 0.0;
};

inline OperatorTriple build_triple(const OperatorMatrix& op,
                                   const FinitePostSelection& post) {
  if (op.dim() != post.state.size())
    throw DimensionMismatch("build_triple: operator dim " +
                            std::to_string(op.dim()) + " != post-selection dim " +
                            std::to_string(post.state.size()));
  Matrix d = post.state * post.state.adjoint();
  Matrix ad = op.entries.adjoint() * d;
  Matrix da = d * op.entries;
  OperatorTriple triple;
  triple.density = OperatorMatrix(std::move(d));
  triple.flux = OperatorMatrix(0.5 * (ad + da));
  triple.commutator = OperatorMatrix(std::complex<double>(0.0, 0.5) * (ad - da));
  return triple;
}

// Direct evaluation of <Phi|A|Psi>/<Phi|Psi>.
inline WeakValue weak_value_exact(const OperatorMatrix& op, const Vector& pre,
                                  const FinitePostSelection& post,
                                  double overlap_eps = kOverlapEps) {
  if (op.dim() != pre.size() || op.dim() != post.state.size())
    throw DimensionMismatch("weak_value_exact: dimension mismatch");
  const std::complex<double> overlap = post.state.dot(pre);
  if (std::abs(overlap) <= overlap_eps)
    throw OrthogonalSelection("weak_value_exact: |<Phi|Psi>| = " +
                              std::to_string(std::abs(overlap)) +
                              " below overlap threshold");
  const std::complex<double> num = post.state.dot(op.entries * pre);
  WeakValue w;
  w.value = num / overlap;
  w.re_channel = w.value.real();
  w.im_channel = w.value.imag();
  w.denominator = std::norm(overlap);
  return w;
}

// The same weak value recovered from three strong expectation values:
// Re = <Psi|F|Psi>/<Psi|D|Psi>, Im = <Psi|C|Psi>/<Psi|D|Psi>.
inline WeakValue weak_value_from_strong(const OperatorMatrix& op,
                                        const Vector& pre,
                                        const FinitePostSelection& post,
                                        double overlap_eps = kOverlapEps) {
  if (op.dim() != pre.size() || op.dim() != post.state.size())
    throw DimensionMismatch("weak_value_from_strong: dimension mismatch");
  const OperatorTriple triple = build_triple(op, post);
  const double den = pre.dot(triple.density.entries * pre).real();
  if (den <= overlap_eps * overlap_eps)
    throw OrthogonalSelection(
        "weak_value_from_strong: <Psi|D|Psi> below overlap threshold");
  WeakValue w;
  w.denominator = den;
  w.re_channel = pre.dot(triple.flux.entries * pre).real() / den;
  w.im_channel = pre.dot(triple.commutator.entries * pre).real() / den;
  w.value = {w.re_channel, w.im_channel};
  return w;
}

}  // namespace wvsim
