#include "ewg/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ewg/errors.hpp"

namespace ewg {

MultiPoly MultiPoly::constant(const Rat& value) {
  MultiPoly p;
  if (value != 0) p.terms_[{}] = value;
  return p;
}

MultiPoly MultiPoly::variable(const std::string& name) {
  MultiPoly p;
  p.vars_ = {name};
  p.terms_[{1}] = Rat(1);
  return p;
}

bool MultiPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() != 1) return false;
  const auto& exp = terms_.begin()->first;
  return std::all_of(exp.begin(), exp.end(), [](int e) { return e == 0; });
}

Rat MultiPoly::constant_value() const {
  if (is_zero()) return Rat(0);
  if (!is_constant()) throw NumericalError("constant_value on non-constant polynomial");
  return terms_.begin()->second;
}

bool MultiPoly::uses_variable(const std::string& name) const {
  return std::binary_search(vars_.begin(), vars_.end(), name);
}

int MultiPoly::degree(const std::string& var) const {
  if (is_zero()) return -1;
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return 0;
  int idx = static_cast<int>(it - vars_.begin());
  int d = 0;
  for (const auto& [exp, c] : terms_) d = std::max(d, exp[idx]);
  return d;
}

int MultiPoly::total_degree() const {
  if (is_zero()) return -1;
  int d = 0;
  for (const auto& [exp, c] : terms_) {
    int s = 0;
    for (int e : exp) s += e;
    d = std::max(d, s);
  }
  return d;
}

void MultiPoly::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
  if (vars_.empty()) return;
  // Drop variables unused by every term.
  std::vector<bool> used(vars_.size(), false);
  for (const auto& [exp, c] : terms_)
    for (std::size_t i = 0; i < exp.size(); ++i)
      if (exp[i] > 0) used[i] = true;
  if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) return;

  std::vector<std::string> nv;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (used[i]) nv.push_back(vars_[i]);
  std::map<std::vector<int>, Rat> nt;
  for (const auto& [exp, c] : terms_) {
    std::vector<int> ne;
    ne.reserve(nv.size());
    for (std::size_t i = 0; i < exp.size(); ++i)
      if (used[i]) ne.push_back(exp[i]);
    nt[std::move(ne)] = c;
  }
  vars_ = std::move(nv);
  terms_ = std::move(nt);
}

void MultiPoly::align(MultiPoly& a, MultiPoly& b) {
  if (a.vars_ == b.vars_) return;
  std::vector<std::string> merged;
  std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(),
                 std::back_inserter(merged));
  auto remap = [&merged](MultiPoly& p) {
    std::vector<int> pos(p.vars_.size());
    for (std::size_t i = 0; i < p.vars_.size(); ++i)
      pos[i] = static_cast<int>(std::lower_bound(merged.begin(), merged.end(), p.vars_[i]) -
                                merged.begin());
    std::map<std::vector<int>, Rat> nt;
    for (const auto& [exp, c] : p.terms_) {
      std::vector<int> ne(merged.size(), 0);
      for (std::size_t i = 0; i < exp.size(); ++i) ne[pos[i]] = exp[i];
      nt[std::move(ne)] = c;
    }
    p.vars_ = merged;
    p.terms_ = std::move(nt);
  };
  remap(a);
  remap(b);
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [exp, c] : out.terms_) c = -c;
  return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  MultiPoly rhs = o;
  align(*this, rhs);
  for (const auto& [exp, c] : rhs.terms_) {
    auto [it, inserted] = terms_.try_emplace(exp, c);
    if (!inserted) it->second += c;
  }
  normalize();
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  MultiPoly rhs = o;
  align(*this, rhs);
  for (const auto& [exp, c] : rhs.terms_) {
    auto [it, inserted] = terms_.try_emplace(exp, -c);
    if (!inserted) it->second -= c;
  }
  normalize();
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly lhs = a, rhs = b;
  MultiPoly::align(lhs, rhs);
  MultiPoly out;
  out.vars_ = lhs.vars_;
  for (const auto& [ea, ca] : lhs.terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
      Rat prod = ca * cb;
      auto [it, inserted] = out.terms_.try_emplace(std::move(e), prod);
      if (!inserted) it->second += prod;
    }
  }
  out.normalize();
  return out;
}

MultiPoly& MultiPoly::operator*=(const Rat& s) {
  if (s == 0) {
    terms_.clear();
    vars_.clear();
    return *this;
  }
  for (auto& [exp, c] : terms_) c *= s;
  return *this;
}

MultiPoly MultiPoly::pow(int k) const {
  if (k < 0) throw NumericalError("negative polynomial power");
  MultiPoly out = constant(Rat(1));
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1) out *= base;
    base = base * base;
    k >>= 1;
  }
  return out;
}

MultiPoly MultiPoly::derivative(const std::string& var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return MultiPoly();
  int idx = static_cast<int>(it - vars_.begin());
  MultiPoly out;
  out.vars_ = vars_;
  for (const auto& [exp, c] : terms_) {
    if (exp[idx] == 0) continue;
    std::vector<int> ne = exp;
    ne[idx] -= 1;
    out.terms_[std::move(ne)] = c * exp[idx];
  }
  out.normalize();
  return out;
}

std::map<int, MultiPoly> MultiPoly::coefficients_in(const std::string& var) const {
  std::map<int, MultiPoly> out;
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) {
    if (!is_zero()) out[0] = *this;
    return out;
  }
  int idx = static_cast<int>(it - vars_.begin());
  for (const auto& [exp, c] : terms_) {
    int power = exp[idx];
    std::vector<int> ne = exp;
    ne[idx] = 0;
    auto& coeff = out[power];
    if (coeff.vars_.empty() && coeff.terms_.empty()) coeff.vars_ = vars_;
    auto [t, inserted] = coeff.terms_.try_emplace(std::move(ne), c);
    if (!inserted) t->second += c;
  }
  for (auto& [p, coeff] : out) coeff.normalize();
  return out;
}

MultiPoly MultiPoly::from_coefficients_in(const std::string& var,
                                          const std::map<int, MultiPoly>& coeffs) {
  MultiPoly out;
  MultiPoly x = variable(var);
  for (const auto& [power, coeff] : coeffs) out += coeff * x.pow(power);
  return out;
}

MultiPoly MultiPoly::coefficient_of(const std::string& var, int power) const {
  auto cs = coefficients_in(var);
  auto it = cs.find(power);
  return it == cs.end() ? MultiPoly() : it->second;
}

MultiPoly MultiPoly::leading_coefficient_in(const std::string& var) const {
  if (is_zero()) return MultiPoly();
  auto cs = coefficients_in(var);
  return cs.rbegin()->second;
}

Rat MultiPoly::leading_coefficient() const {
  if (is_zero()) return Rat(0);
  return terms_.rbegin()->second;
}

Rat MultiPoly::eval(const std::map<std::string, Rat>& point) const {
  Rat total(0);
  for (const auto& [exp, c] : terms_) {
    Rat term = c;
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (exp[i] == 0) continue;
      auto it = point.find(vars_[i]);
      if (it == point.end()) throw NumericalError("eval: missing value for " + vars_[i]);
      Rat base = it->second;
      for (int k = 0; k < exp[i]; ++k) term *= base;
    }
    total += term;
  }
  return total;
}

double MultiPoly::eval_double(const std::map<std::string, double>& point) const {
  double total = 0;
  for (const auto& [exp, c] : terms_) {
    double term = rat_to_double(c);
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (exp[i] == 0) continue;
      auto it = point.find(vars_[i]);
      if (it == point.end()) throw NumericalError("eval_double: missing value for " + vars_[i]);
      term *= std::pow(it->second, exp[i]);
    }
    total += term;
  }
  return total;
}

MultiPoly MultiPoly::substitute(const std::string& var, const MultiPoly& replacement) const {
  auto cs = coefficients_in(var);
  MultiPoly out;
  for (const auto& [power, coeff] : cs) out += coeff * replacement.pow(power);
  return out;
}

std::string MultiPoly::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  // Descending canonical term order.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [exp, c] = *it;
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
      first = false;
    } else {
      if (a < 0) {
        os << " - ";
        a = -a;
      } else {
        os << " + ";
      }
    }
    bool any_var = std::any_of(exp.begin(), exp.end(), [](int e) { return e > 0; });
    bool coef_shown = (a != 1) || !any_var;
    if (coef_shown) {
      os << a.get_num().get_str();
      if (a.get_den() != 1) os << "/" << a.get_den().get_str();
    }
    bool need_star = coef_shown;
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (exp[i] == 0) continue;
      if (need_star) os << "*";
      os << vars_[i];
      if (exp[i] > 1) os << "^" << exp[i];
      need_star = true;
    }
  }
  return os.str();
}

namespace {

struct Lexer {
  const std::string& s;
  std::size_t i = 0;
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
};

}  // namespace

MultiPoly MultiPoly::parse(const std::string& text) {
  Lexer lx{text};
  MultiPoly result;
  bool expect_term = true;
  int sign = 1;
  while (!lx.done()) {
    char ch = lx.peek();
    if (ch == '+' || ch == '-') {
      if (expect_term && ch == '-') sign = -sign;
      if (!expect_term) {
        sign = (ch == '-') ? -1 : 1;
        expect_term = true;
      }
      ++lx.i;
      continue;
    }
    if (!expect_term) throw InputError("polynomial parse: expected '+' or '-' at \"" +
                                       text.substr(lx.i) + "\"");
    // One term: [coefficient] {* factor}, factor = name[^exp]
    Rat coef(1);
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = lx.i;
      while (lx.i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[lx.i])) || text[lx.i] == '/' ||
              text[lx.i] == '.'))
        ++lx.i;
      coef = rat_from_string(text.substr(start, lx.i - start));
      have_coef = true;
    }
    MultiPoly term = constant(coef * sign);
    bool have_factor = have_coef;
    for (;;) {
      char c2 = lx.peek();
      if (c2 == '*') {
        ++lx.i;
        c2 = lx.peek();
      } else if (have_factor && !(std::isalpha(static_cast<unsigned char>(c2)) || c2 == '_')) {
        break;
      }
      if (!(std::isalpha(static_cast<unsigned char>(c2)) || c2 == '_')) {
        if (!have_factor) throw InputError("polynomial parse: expected factor in \"" + text + "\"");
        break;
      }
      std::size_t start = lx.i;
      while (lx.i < text.size() && (std::isalnum(static_cast<unsigned char>(text[lx.i])) ||
                                    text[lx.i] == '_'))
        ++lx.i;
      std::string name = text.substr(start, lx.i - start);
      int power = 1;
      if (lx.peek() == '^') {
        ++lx.i;
        lx.skip();
        std::size_t ps = lx.i;
        while (lx.i < text.size() && std::isdigit(static_cast<unsigned char>(text[lx.i]))) ++lx.i;
        if (ps == lx.i) throw InputError("polynomial parse: missing exponent in \"" + text + "\"");
        power = std::stoi(text.substr(ps, lx.i - ps));
      }
      term *= variable(name).pow(power);
      have_factor = true;
    }
    result += term;
    expect_term = false;
    sign = 1;
  }
  if (expect_term && !result.is_zero())
    throw InputError("polynomial parse: dangling sign in \"" + text + "\"");
  return result;
}

double MultiPoly::Compiled::eval(const double* values) const {
  double total = 0;
  for (const auto& t : terms) {
    double v = t.coef;
    for (int i = 0; i < nvars; ++i) {
      double base = values[i];
      for (int k = 0; k < t.exp[i]; ++k) v *= base;
    }
    total += v;
  }
  return total;
}

MultiPoly::Compiled MultiPoly::compile() const {
  Compiled out;
  out.nvars = static_cast<int>(vars_.size());
  out.terms.reserve(terms_.size());
  for (const auto& [exp, c] : terms_) out.terms.push_back({exp, rat_to_double(c)});
  return out;
}

}  // namespace ewg
