#ifndef EWG_STIFFNESS_HPP
#define EWG_STIFFNESS_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ewg/linalg.hpp"
#include "ewg/rational.hpp"

namespace ewg {

/// Dense square matrix over an arbitrary scalar (used for exact Voigt matrices).
template <typename T>
struct SquareMat {
  int n = 0;
  std::vector<T> a;

  SquareMat() = default;
  explicit SquareMat(int size) : n(size), a(static_cast<std::size_t>(size) * size, T(0)) {}
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Rank-4 stiffness tensor with the elastic symmetries
///   c_ijkl = c_jikl = c_klij.
/// Storage is the dense n^4 array so that symmetry *violations* are
/// representable and can be reported by validate(). Indices are 0-based.
template <typename T>
class StiffnessTensor {
 public:
  explicit StiffnessTensor(int dim);

  int dim() const { return n_; }

  const T& at(int i, int j, int k, int l) const { return c_[index(i, j, k, l)]; }

  /// Writes a single raw entry (no symmetry completion).
  void set_entry(int i, int j, int k, int l, const T& value);

  /// Writes the whole symmetry orbit of (i,j,k,l).
  void set_orbit(int i, int j, int k, int l, const T& value);

  /// Overwrites with the isotropic tensor of the given Lame parameters,
  /// reusing the existing storage.
  void assign_isotropic(const T& lambda, const T& mu);

  /// Canonical representatives of the symmetry orbits: 6 quadruples for n=2,
  /// 21 for n=3. Representative (i,j,k,l) has i<=j, k<=l and pair (i,j) not
  /// after (k,l) in the Voigt order.
  static std::vector<std::array<int, 4>> canonical_quadruples(int dim);

  bool operator==(const StiffnessTensor& o) const { return n_ == o.n_ && c_ == o.c_; }

 private:
  std::size_t index(int i, int j, int k, int l) const;
  int n_;
  std::vector<T> c_;
};

using StiffnessD = StiffnessTensor<double>;
using StiffnessQ = StiffnessTensor<Rat>;

/// Voigt order of an index pair (i<=j): diagonal pairs first as (i,i) -> i,
/// then off-diagonal pairs sorted by descending min index, then descending max
/// (for n=3: (1,2)->3, (0,2)->4, (0,1)->5).
int voigt_index(int i, int j, int dim);
std::pair<int, int> voigt_pair(int a, int dim);
inline int voigt_order(int dim) { return dim * (dim + 1) / 2; }

/// Lame parametrization: c_iijj = lambda (i != j), c_ijij = c_ijji = mu
/// (i != j), c_iiii = lambda + 2 mu, all other components zero.
template <typename T>
StiffnessTensor<T> make_isotropic(int dim, const T& lambda, const T& mu);

struct ValidationReport {
  bool symmetric = false;
  std::vector<std::string> symmetry_violations;
  bool positive_definite = false;
  std::vector<double> voigt_eigenvalues;  // descending
  bool ok() const { return symmetric && positive_definite; }
};

/// Checks the elastic symmetries (exactly for rational scalars, to 1e-14
/// relative for floats) and positive definiteness of the Voigt matrix
/// (leading principal minors for rational, eigenvalue signs for float).
ValidationReport validate(const StiffnessQ& c);
ValidationReport validate(const StiffnessD& c);

/// Plain Voigt matrix V_(ij),(kl) = c_ijkl (no Kelvin scaling). Throws
/// InputError if the tensor fails the symmetry check.
template <typename T>
SquareMat<T> voigt_matrix(const StiffnessTensor<T>& c);

/// Inverse of voigt_matrix on symmetric tensors.
template <typename T>
StiffnessTensor<T> tensor_from_voigt(const SquareMat<T>& v, int dim);

StiffnessD to_double(const StiffnessQ& c);

/// Exact determinant over rationals (Gaussian elimination with exact division).
Rat det_rational(SquareMat<Rat> m);

// --- file format -----------------------------------------------------------
//
// dim = 2
// scalar_kind = "rational"        # "rational" | "float"
// [components]                    # canonical quadruples only; omitted = 0
// 1111 = 4
// 1122 = 2
// 1212 = 1
//
// Unknown keys, non-canonical quadruples and malformed values are errors.

struct TensorFile {
  int dim = 0;
  bool rational = false;
  StiffnessQ exact{2};   // valid when rational
  StiffnessD numeric{2};  // always valid (converted when rational)
};

TensorFile read_tensor_file(const std::string& path);
TensorFile parse_tensor_text(const std::string& text, const std::string& origin = "<string>");
void write_tensor_file(std::ostream& os, const StiffnessQ& c);
void write_tensor_file(std::ostream& os, const StiffnessD& c);

}  // namespace ewg

#endif
