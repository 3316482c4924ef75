#include "ewg/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace ewg {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!is_integer_token(num) || !is_integer_token(den))
      throw std::invalid_argument("malformed rational literal: " + text);
    Rat q(num + "/" + den);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
  }

  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (head.empty() || head == "+" || head == "-") head += "0";
    if (!is_integer_token(head) || frac.empty() || !is_integer_token(frac) ||
        frac[0] == '+' || frac[0] == '-')
      throw std::invalid_argument("malformed decimal literal: " + text);
    Rat base(head);
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rat fraction(mpz_class(frac), scale);
    fraction.canonicalize();
    Rat q = base;
    if (head[0] == '-')
      q -= fraction;
    else
      q += fraction;
    q.canonicalize();
    return q;
  }

  if (!is_integer_token(s)) throw std::invalid_argument("malformed rational literal: " + text);
  Rat q(s);
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::optional<Rat> rat_sqrt_exact(const Rat& value) {
  if (value < 0) return std::nullopt;
  mpz_class num = value.get_num();
  mpz_class den = value.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
  if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rat root(rn, rd);
  root.canonicalize();
  return root;
}

}  // namespace ewg
