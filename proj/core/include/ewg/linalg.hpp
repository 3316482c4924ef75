#ifndef EWG_LINALG_HPP
#define EWG_LINALG_HPP

#include <array>
#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ewg {

/// Fixed-capacity vector for small problem dimensions (points, covectors, Voigt rows).
/// Capacity covers n = 2..3 state pairs and Voigt order 6 with headroom for
/// least-squares coefficient vectors.
class SmallVec {
 public:
  static constexpr int kCapacity = 16;

  SmallVec() = default;
  explicit SmallVec(int n, double fill = 0.0) : n_(n) {
    assert(n >= 0 && n <= kCapacity);
    a_.fill(0.0);
    for (int i = 0; i < n_; ++i) a_[i] = fill;
  }
  SmallVec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    assert(n_ <= kCapacity);
    a_.fill(0.0);
    int i = 0;
    for (double x : xs) a_[i++] = x;
  }

  int size() const { return n_; }
  double& operator[](int i) { return a_[i]; }
  double operator[](int i) const { return a_[i]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  SmallVec& operator+=(const SmallVec& o);
  SmallVec& operator-=(const SmallVec& o);
  SmallVec& operator*=(double s);

  friend SmallVec operator+(SmallVec a, const SmallVec& b) { return a += b; }
  friend SmallVec operator-(SmallVec a, const SmallVec& b) { return a -= b; }
  friend SmallVec operator*(double s, SmallVec v) { return v *= s; }
  friend SmallVec operator*(SmallVec v, double s) { return v *= s; }

 private:
  int n_ = 0;
  std::array<double, kCapacity> a_{};
};

double dot(const SmallVec& a, const SmallVec& b);
double norm(const SmallVec& v);
SmallVec normalized(const SmallVec& v);
double distance(const SmallVec& a, const SmallVec& b);

/// Fixed-capacity dense matrix, row major.
class SmallMat {
 public:
  static constexpr int kCapacity = SmallVec::kCapacity;

  SmallMat() = default;
  SmallMat(int rows, int cols) : rows_(rows), cols_(cols) {
    assert(rows >= 0 && rows <= kCapacity && cols >= 0 && cols <= kCapacity);
    a_.fill(0.0);
  }
  static SmallMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * kCapacity + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * kCapacity + j]; }

  SmallVec col(int j) const;
  SmallVec row(int i) const;

  SmallMat& operator+=(const SmallMat& o);
  SmallMat& operator-=(const SmallMat& o);
  SmallMat& operator*=(double s);
  friend SmallMat operator+(SmallMat a, const SmallMat& b) { return a += b; }
  friend SmallMat operator-(SmallMat a, const SmallMat& b) { return a -= b; }
  friend SmallMat operator*(double s, SmallMat m) { return m *= s; }

 private:
  int rows_ = 0, cols_ = 0;
  std::array<double, static_cast<std::size_t>(kCapacity) * kCapacity> a_{};
};

SmallVec matvec(const SmallMat& m, const SmallVec& v);
SmallMat matmul(const SmallMat& a, const SmallMat& b);
double frobenius_norm(const SmallMat& m);
double max_abs(const SmallMat& m);

struct SymEigen {
  SmallVec values;   // descending
  SmallMat vectors;  // columns are orthonormal eigenvectors, matching values
  double residual;   // max_i ||A v_i - lambda_i v_i|| / max(1, ||A||_F)
};

/// Cyclic Jacobi rotations on a symmetric matrix. Eigenvalues are returned in
/// descending order; each eigenvector is sign-fixed so its first component of
/// magnitude above 1e-12 is positive.
SymEigen jacobi_eigen(const SmallMat& symmetric);

/// Solves A x = b by partially pivoted LU. Returns false on (numerically)
/// singular A.
bool solve_linear(SmallMat a, SmallVec b, SmallVec& x);

/// Inverse via solve_linear column by column. Returns false if singular.
bool invert(const SmallMat& a, SmallMat& inv);

bool is_positive_definite(const SmallMat& symmetric, double rel_tol = 1e-12);

/// Least-squares fit of y = slope*x + intercept. Returns {slope, intercept}.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Golden-section minimization of f on [lo, hi] to the given x-tolerance.
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace ewg

#endif
