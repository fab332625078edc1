#include "semiquant/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "semiquant/error.hpp"

namespace semiquant {

Polynomial2::Polynomial2(double constant) { add_term({0, 0}, constant); }

Polynomial2 Polynomial2::monomial(int q_power, int p_power, double coefficient) {
  require(q_power >= 0 && p_power >= 0, "precondition", "monomial powers must be nonnegative");
  Polynomial2 out;
  out.add_term({q_power, p_power}, coefficient);
  return out;
}

void Polynomial2::add_term(Key key, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = terms_.emplace(key, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial2::coefficient(int q_power, int p_power) const {
  const auto it = terms_.find({q_power, p_power});
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial2::degree() const {
  int d = -1;
  for (const auto& [key, c] : terms_) d = std::max(d, key.first + key.second);
  return d;
}

double Polynomial2::operator()(double q, double p) const {
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    sum += c * std::pow(q, key.first) * std::pow(p, key.second);
  }
  return sum;
}

Polynomial2 Polynomial2::derivative(int q_order, int p_order) const {
  require(q_order >= 0 && p_order >= 0, "precondition", "derivative orders must be nonnegative");
  Polynomial2 out;
  for (const auto& [key, c] : terms_) {
    const auto [a, b] = key;
    if (a < q_order || b < p_order) continue;
    double factor = c;
    for (int k = 0; k < q_order; ++k) factor *= a - k;
    for (int k = 0; k < p_order; ++k) factor *= b - k;
    out.add_term({a - q_order, b - p_order}, factor);
  }
  return out;
}

Polynomial2 Polynomial2::pow(int exponent) const {
  require(exponent >= 0, "precondition", "polynomial exponent must be nonnegative");
  Polynomial2 out(1.0);
  for (int k = 0; k < exponent; ++k) out = out * *this;
  return out;
}

Polynomial2& Polynomial2::operator+=(const Polynomial2& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, c);
  return *this;
}

Polynomial2& Polynomial2::operator-=(const Polynomial2& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, -c);
  return *this;
}

Polynomial2& Polynomial2::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= scale;
  return *this;
}

Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b) {
  Polynomial2 out;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      out.add_term({ka.first + kb.first, ka.second + kb.second}, ca * cb);
    }
  }
  return out;
}

std::string Polynomial2::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [key, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    if (key.first > 0) os << "*q^" << key.first;
    if (key.second > 0) os << "*p^" << key.second;
  }
  return os.str();
}

}  // namespace semiquant
