#ifndef EWG_CLASSIFIER2D_HPP
#define EWG_CLASSIFIER2D_HPP

#include <optional>
#include <utility>

#include "ewg/linalg.hpp"
#include "ewg/multipoly.hpp"
#include "ewg/stiffness.hpp"

namespace ewg {

/// Exact classifier invariants of a 2D stiffness tensor. The Christoffel
/// matrix has a multiple eigenvalue somewhere on the circle iff R = 0 and
/// D >= 0.
struct ClassifierReport {
  Rat D1, D2, D, L, R;
  bool multiple_eigenvalue = false;
  std::optional<SmallVec> witness;  // unit covector with vanishing gap
};

/// D1 = (c1212+c1122)^2 - 4 c1112 c1222
/// D2 = (c1112-c1222)^2 + (c1111-c1212)(c2222-c1212)
/// D  = D1 + D2
/// L  = c1122 c1222 + c1111 c1222 - c1112 c2222 - c1122 c1112
/// R  = L^2 - D1 D2
ClassifierReport classifier_invariants(const StiffnessQ& c);

bool has_multiple_eigenvalue(const StiffnessQ& c);

/// The vanishing-gap system as binary quadratics in p1, p2:
///   F1 = (c1111-c1212) p1^2 + 2(c1112-c1222) p1 p2 + (c1212-c2222) p2^2
///        (the h11 = h22 equation)
///   F2 = c1112 p1^2 + (c1212+c1122) p1 p2 + c1222 p2^2
///        (the h12 = 0 equation)
/// With both read as formal quadratics in p2 over Q[p1]:
///   res(F1, F2, p2) = R p1^4,  disc(F2, p2) = D1 p1^2,  disc(F1, p2) = 4 D2 p1^2.
std::pair<MultiPoly, MultiPoly> build_f1_f2(const StiffnessQ& c);

}  // namespace ewg

#endif
