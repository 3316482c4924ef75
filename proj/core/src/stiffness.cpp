#include "ewg/stiffness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "ewg/errors.hpp"
#include "ewg/textcfg.hpp"

namespace ewg {

namespace {

// The symmetry orbit of (i,j,k,l): minor swap in the first pair plus the major
// pair swap, and the second-pair minor swap they generate together.
std::vector<std::array<int, 4>> orbit(int i, int j, int k, int l) {
  std::set<std::array<int, 4>> seen;
  std::vector<std::array<int, 4>> queue{{i, j, k, l}};
  while (!queue.empty()) {
    auto q = queue.back();
    queue.pop_back();
    if (!seen.insert(q).second) continue;
    queue.push_back({q[1], q[0], q[2], q[3]});
    queue.push_back({q[2], q[3], q[0], q[1]});
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

template <typename T>
StiffnessTensor<T>::StiffnessTensor(int dim)
    : n_(dim), c_(static_cast<std::size_t>(dim) * dim * dim * dim, T(0)) {
  if (dim < 2) throw InputError("stiffness tensor dimension must be >= 2");
}

template <typename T>
std::size_t StiffnessTensor<T>::index(int i, int j, int k, int l) const {
  return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
}

template <typename T>
void StiffnessTensor<T>::set_entry(int i, int j, int k, int l, const T& value) {
  c_[index(i, j, k, l)] = value;
}

template <typename T>
void StiffnessTensor<T>::set_orbit(int i, int j, int k, int l, const T& value) {
  for (const auto& q : orbit(i, j, k, l)) c_[index(q[0], q[1], q[2], q[3])] = value;
}

template <typename T>
std::vector<std::array<int, 4>> StiffnessTensor<T>::canonical_quadruples(int dim) {
  std::vector<std::array<int, 4>> out;
  const int m = voigt_order(dim);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      auto [i, j] = voigt_pair(a, dim);
      auto [k, l] = voigt_pair(b, dim);
      out.push_back({i, j, k, l});
    }
  }
  return out;
}

int voigt_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  if (i == j) return i;
  // Off-diagonal pairs: descending min index, then descending max index.
  int idx = dim;
  for (int p = dim - 2; p >= 0; --p) {
    for (int q = dim - 1; q > p; --q) {
      if (p == i && q == j) return idx;
      ++idx;
    }
  }
  throw InputError("voigt_index: bad pair");
}

std::pair<int, int> voigt_pair(int a, int dim) {
  if (a < dim) return {a, a};
  int idx = dim;
  for (int p = dim - 2; p >= 0; --p) {
    for (int q = dim - 1; q > p; --q) {
      if (idx == a) return {p, q};
      ++idx;
    }
  }
  throw InputError("voigt_pair: index out of range");
}

template <typename T>
void StiffnessTensor<T>::assign_isotropic(const T& lambda, const T& mu) {
  std::fill(c_.begin(), c_.end(), T(0));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) {
        set_entry(i, i, j, j, lambda + mu + mu);
      } else {
        set_entry(i, i, j, j, lambda);
        set_entry(i, j, i, j, mu);
        set_entry(i, j, j, i, mu);
      }
    }
  }
}

template <typename T>
StiffnessTensor<T> make_isotropic(int dim, const T& lambda, const T& mu) {
  StiffnessTensor<T> c(dim);
  c.assign_isotropic(lambda, mu);
  return c;
}

namespace {

template <typename T>
ValidationReport validate_impl(const StiffnessTensor<T>& c) {
  ValidationReport report;
  const int n = c.dim();

  auto mismatch = [&](const T& a, const T& b) {
    if constexpr (std::is_same_v<T, Rat>) {
      return a != b;
    } else {
      double scale = std::max({1.0, std::abs(a), std::abs(b)});
      return std::abs(a - b) > 1e-14 * scale;
    }
  };

  report.symmetric = true;
  for (int i = 0; i < n && report.symmetry_violations.size() < 16; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const T& v = c.at(i, j, k, l);
          if (mismatch(v, c.at(j, i, k, l))) {
            report.symmetric = false;
            report.symmetry_violations.push_back(
                "c" + std::to_string(i + 1) + std::to_string(j + 1) + std::to_string(k + 1) +
                std::to_string(l + 1) + " != c" + std::to_string(j + 1) + std::to_string(i + 1) +
                std::to_string(k + 1) + std::to_string(l + 1));
          }
          if (mismatch(v, c.at(k, l, i, j))) {
            report.symmetric = false;
            report.symmetry_violations.push_back(
                "c" + std::to_string(i + 1) + std::to_string(j + 1) + std::to_string(k + 1) +
                std::to_string(l + 1) + " != c" + std::to_string(k + 1) + std::to_string(l + 1) +
                std::to_string(i + 1) + std::to_string(j + 1));
          }
        }

  if (!report.symmetric) return report;

  // Voigt eigenvalues (float) for the report; exact minors decide PD for
  // rational scalars, eigenvalue signs for float.
  SquareMat<T> v = voigt_matrix(c);
  const int m = v.n;
  SmallMat vd(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if constexpr (std::is_same_v<T, Rat>) {
        vd(i, j) = rat_to_double(v(i, j));
      } else {
        vd(i, j) = v(i, j);
      }
    }
  SymEigen es = jacobi_eigen(vd);
  report.voigt_eigenvalues.assign(es.values.data(), es.values.data() + m);

  if constexpr (std::is_same_v<T, Rat>) {
    report.positive_definite = true;
    for (int k = 1; k <= m && report.positive_definite; ++k) {
      SquareMat<Rat> minor(k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) minor(i, j) = v(i, j);
      if (det_rational(std::move(minor)) <= 0) report.positive_definite = false;
    }
  } else {
    report.positive_definite = is_positive_definite(vd);
  }
  return report;
}

}  // namespace

ValidationReport validate(const StiffnessQ& c) { return validate_impl(c); }
ValidationReport validate(const StiffnessD& c) { return validate_impl(c); }

template <typename T>
SquareMat<T> voigt_matrix(const StiffnessTensor<T>& c) {
  ValidationReport r;
  const int n = c.dim();
  // Symmetry is a precondition; re-check cheaply on canonical orbits.
  for (const auto& q : StiffnessTensor<T>::canonical_quadruples(n)) {
    const T& v = c.at(q[0], q[1], q[2], q[3]);
    for (const auto& o : orbit(q[0], q[1], q[2], q[3])) {
      bool bad;
      if constexpr (std::is_same_v<T, Rat>) {
        bad = c.at(o[0], o[1], o[2], o[3]) != v;
      } else {
        double a = c.at(o[0], o[1], o[2], o[3]);
        double scale = std::max({1.0, std::abs(a), std::abs(v)});
        bad = std::abs(a - v) > 1e-14 * scale;
      }
      if (bad) throw InputError("voigt_matrix: tensor violates the elastic symmetries");
    }
  }
  const int m = voigt_order(n);
  SquareMat<T> out(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      auto [i, j] = voigt_pair(a, n);
      auto [k, l] = voigt_pair(b, n);
      out(a, b) = c.at(i, j, k, l);
    }
  return out;
}

template <typename T>
StiffnessTensor<T> tensor_from_voigt(const SquareMat<T>& v, int dim) {
  if (v.n != voigt_order(dim)) throw InputError("tensor_from_voigt: size mismatch");
  StiffnessTensor<T> c(dim);
  for (int a = 0; a < v.n; ++a)
    for (int b = a; b < v.n; ++b) {
      auto [i, j] = voigt_pair(a, dim);
      auto [k, l] = voigt_pair(b, dim);
      c.set_orbit(i, j, k, l, v(a, b));
    }
  return c;
}

StiffnessD to_double(const StiffnessQ& c) {
  StiffnessD out(c.dim());
  const int n = c.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.set_entry(i, j, k, l, rat_to_double(c.at(i, j, k, l)));
  return out;
}

Rat det_rational(SquareMat<Rat> m) {
  const int n = m.n;
  Rat det(1);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (m(i, k) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rat f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

namespace {

std::array<int, 4> parse_quadruple(const std::string& key, int dim, const std::string& origin) {
  if (key.size() != 4) throw InputError(origin + ": component key must be 4 digits: " + key);
  std::array<int, 4> q{};
  for (int t = 0; t < 4; ++t) {
    char ch = key[t];
    if (ch < '1' || ch > '0' + dim)
      throw InputError(origin + ": component index out of range in key " + key);
    q[t] = ch - '1';
  }
  return q;
}

bool is_canonical(const std::array<int, 4>& q, int dim) {
  auto canon = StiffnessTensor<Rat>::canonical_quadruples(dim);
  return std::find(canon.begin(), canon.end(), q) != canon.end();
}

}  // namespace

TensorFile parse_tensor_text(const std::string& text, const std::string& origin) {
  TextConfig cfg = TextConfig::parse_string(text, origin);
  cfg.require_known_sections({"components"});
  cfg.require_known_keys("", {"dim", "scalar_kind"});

  TensorFile out;
  out.dim = static_cast<int>(cfg.require_int("", "dim"));
  if (out.dim < 2 || out.dim > 3)
    throw InputError(origin + ": dim must be 2 or 3 in tensor files");
  const std::string kind = cfg.require("", "scalar_kind");
  if (kind != "rational" && kind != "float")
    throw InputError(origin + ": scalar_kind must be \"rational\" or \"float\"");
  out.rational = (kind == "rational");

  out.exact = StiffnessQ(out.dim);
  out.numeric = StiffnessD(out.dim);
  for (const auto& key : cfg.keys("components")) {
    auto q = parse_quadruple(key, out.dim, origin);
    if (!is_canonical(q, out.dim))
      throw InputError(origin + ": unknown key '" + key +
                       "' in section [components] (not a canonical quadruple)");
    const std::string& value = *cfg.get("components", key);
    if (out.rational) {
      Rat r;
      try {
        r = rat_from_string(value);
      } catch (const std::exception& e) {
        throw InputError(origin + ": bad rational for " + key + ": " + e.what());
      }
      out.exact.set_orbit(q[0], q[1], q[2], q[3], r);
      out.numeric.set_orbit(q[0], q[1], q[2], q[3], rat_to_double(r));
    } else {
      double v = cfg.require_double("components", key);
      out.numeric.set_orbit(q[0], q[1], q[2], q[3], v);
    }
  }
  if (out.rational) out.numeric = to_double(out.exact);
  return out;
}

TensorFile read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tensor_text(ss.str(), path);
}

namespace {

template <typename T>
void write_tensor_impl(std::ostream& os, const StiffnessTensor<T>& c, const char* kind) {
  os << "dim = " << c.dim() << "\n";
  os << "scalar_kind = \"" << kind << "\"\n\n[components]\n";
  for (const auto& q : StiffnessTensor<T>::canonical_quadruples(c.dim())) {
    const T& v = c.at(q[0], q[1], q[2], q[3]);
    bool zero;
    if constexpr (std::is_same_v<T, Rat>) {
      zero = (v == 0);
    } else {
      zero = (v == 0.0);
    }
    if (zero) continue;
    os << (q[0] + 1) << (q[1] + 1) << (q[2] + 1) << (q[3] + 1) << " = ";
    if constexpr (std::is_same_v<T, Rat>) {
      os << rat_to_string(v);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace

void write_tensor_file(std::ostream& os, const StiffnessQ& c) {
  write_tensor_impl(os, c, "rational");
}

void write_tensor_file(std::ostream& os, const StiffnessD& c) {
  write_tensor_impl(os, c, "float");
}

template class StiffnessTensor<double>;
template class StiffnessTensor<Rat>;
template StiffnessTensor<double> make_isotropic<double>(int, const double&, const double&);
template StiffnessTensor<Rat> make_isotropic<Rat>(int, const Rat&, const Rat&);
template SquareMat<double> voigt_matrix<double>(const StiffnessTensor<double>&);
template SquareMat<Rat> voigt_matrix<Rat>(const StiffnessTensor<Rat>&);
template StiffnessTensor<double> tensor_from_voigt<double>(const SquareMat<double>&, int);
template StiffnessTensor<Rat> tensor_from_voigt<Rat>(const SquareMat<Rat>&, int);

}  // namespace ewg
