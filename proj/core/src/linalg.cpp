#include "ewg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ewg {

SmallVec& SmallVec::operator+=(const SmallVec& o) {
  assert(n_ == o.n_);
  for (int i = 0; i < n_; ++i) a_[i] += o.a_[i];
  return *this;
}

SmallVec& SmallVec::operator-=(const SmallVec& o) {
  assert(n_ == o.n_);
  for (int i = 0; i < n_; ++i) a_[i] -= o.a_[i];
  return *this;
}

SmallVec& SmallVec::operator*=(double s) {
  for (int i = 0; i < n_; ++i) a_[i] *= s;
  return *this;
}

double dot(const SmallVec& a, const SmallVec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const SmallVec& v) { return std::sqrt(dot(v, v)); }

SmallVec normalized(const SmallVec& v) {
  double n = norm(v);
  SmallVec out = v;
  if (n > 0.0) out *= 1.0 / n;
  return out;
}

double distance(const SmallVec& a, const SmallVec& b) { return norm(a - b); }

SmallMat SmallMat::identity(int n) {
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallVec SmallMat::col(int j) const {
  SmallVec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

SmallVec SmallMat::row(int i) const {
  SmallVec v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

SmallMat& SmallMat::operator+=(const SmallMat& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) += o(i, j);
  return *this;
}

SmallMat& SmallMat::operator-=(const SmallMat& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) -= o(i, j);
  return *this;
}

SmallMat& SmallMat::operator*=(double s) {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) *= s;
  return *this;
}

SmallVec matvec(const SmallMat& m, const SmallVec& v) {
  assert(m.cols() == v.size());
  SmallVec out(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

SmallMat matmul(const SmallMat& a, const SmallMat& b) {
  assert(a.cols() == b.rows());
  SmallMat out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

double frobenius_norm(const SmallMat& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

double max_abs(const SmallMat& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

namespace {

// Closed-form path for 2x2 symmetric matrices; the cyclic sweeps below reduce
// to a single rotation there anyway.
SymEigen eigen_2x2(const SmallMat& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mid = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  const double d = std::sqrt(half * half + b * b);
  SymEigen out;
  out.values = SmallVec{mid + d, mid - d};
  out.vectors = SmallMat(2, 2);
  double v0x, v0y;
  // Pick the better-conditioned eigenvector formula.
  if (half >= 0.0) {
    v0x = half + d;
    v0y = b;
  } else {
    v0x = b;
    v0y = d - half;
  }
  double nrm = std::sqrt(v0x * v0x + v0y * v0y);
  if (nrm < 1e-300) {
    v0x = 1.0;
    v0y = 0.0;
    nrm = 1.0;
  }
  v0x /= nrm;
  v0y /= nrm;
  double sign = (std::abs(v0x) > 1e-12) ? (v0x > 0 ? 1.0 : -1.0) : (v0y > 0 ? 1.0 : -1.0);
  out.vectors(0, 0) = sign * v0x;
  out.vectors(1, 0) = sign * v0y;
  // Orthogonal complement, same sign convention.
  double w0 = -v0y, w1 = v0x;
  double sign2 = (std::abs(w0) > 1e-12) ? (w0 > 0 ? 1.0 : -1.0) : (w1 > 0 ? 1.0 : -1.0);
  out.vectors(0, 1) = sign2 * w0;
  out.vectors(1, 1) = sign2 * w1;
  const double scale = std::max(1.0, std::sqrt(a * a + 2 * b * b + c * c));
  double worst = 0.0;
  for (int j = 0; j < 2; ++j) {
    double e0 = m(0, 0) * out.vectors(0, j) + m(0, 1) * out.vectors(1, j) -
                out.values[j] * out.vectors(0, j);
    double e1 = m(1, 0) * out.vectors(0, j) + m(1, 1) * out.vectors(1, j) -
                out.values[j] * out.vectors(1, j);
    worst = std::max(worst, std::sqrt(e0 * e0 + e1 * e1));
  }
  out.residual = worst / scale;
  return out;
}

}  // namespace

SymEigen jacobi_eigen(const SmallMat& symmetric) {
  const int n = symmetric.rows();
  assert(n == symmetric.cols());
  if (n == 2) return eigen_2x2(symmetric);
  SmallMat a = symmetric;
  SmallMat v = SmallMat::identity(n);

  auto offdiag = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(1.0, frobenius_norm(a));
  const double tol = 1e-15 * scale;
  for (int sweep = 0; sweep < 64 && offdiag() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, SmallMat::kCapacity> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::sort(order.begin(), order.begin() + n,
            [&](int i, int j) { return a(i, i) > a(j, j); });

  SymEigen out;
  out.values = SmallVec(n);
  out.vectors = SmallMat(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    out.values[j] = a(src, src);
    double sign = 1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i, src)) > 1e-12) {
        sign = v(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (int i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
  }

  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    SmallVec ev = out.vectors.col(j);
    SmallVec r = matvec(symmetric, ev) - out.values[j] * ev;
    worst = std::max(worst, norm(r));
  }
  out.residual = worst / scale;
  return out;
}

bool solve_linear(SmallMat a, SmallVec b, SmallVec& x) {
  const int n = a.rows();
  assert(a.cols() == n && b.size() == n);
  std::array<int, SmallMat::kCapacity> perm{};
  std::iota(perm.begin(), perm.begin() + n, 0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < 1e-300) return false;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      a(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  x = SmallVec(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return true;
}

bool invert(const SmallMat& a, SmallMat& inv) {
  const int n = a.rows();
  inv = SmallMat(n, n);
  for (int j = 0; j < n; ++j) {
    SmallVec e(n), col(n);
    e[j] = 1.0;
    if (!solve_linear(a, e, col)) return false;
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return true;
}

bool is_positive_definite(const SmallMat& symmetric, double rel_tol) {
  SymEigen es = jacobi_eigen(symmetric);
  const int n = symmetric.rows();
  double largest = 0.0;
  for (int i = 0; i < n; ++i) largest = std::max(largest, std::abs(es.values[i]));
  double floor = rel_tol * std::max(1.0, largest);
  return es.values[n - 1] > floor;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  assert(x.size() == y.size() && x.size() >= 2);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

}  // namespace ewg
