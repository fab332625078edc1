#pragma once

#include <map>
#include <string>
#include <utility>

namespace semiquant {

/// Real polynomial sum_{a,b} c_ab q^a p^b on phase space. Used wherever a
/// symbol is known in closed form, so derivatives can be taken exactly.
class Polynomial2 {
 public:
  using Key = std::pair<int, int>;  // (power of q, power of p)

  Polynomial2() = default;
  explicit Polynomial2(double constant);

  static Polynomial2 monomial(int q_power, int p_power, double coefficient = 1.0);
  static Polynomial2 q() { return monomial(1, 0); }
  static Polynomial2 p() { return monomial(0, 1); }

  double coefficient(int q_power, int p_power) const;
  const std::map<Key, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;

  double operator()(double q, double p) const;
  Polynomial2 derivative(int q_order, int p_order) const;
  Polynomial2 pow(int exponent) const;

  Polynomial2& operator+=(const Polynomial2& other);
  Polynomial2& operator-=(const Polynomial2& other);
  Polynomial2& operator*=(double scale);
  friend Polynomial2 operator+(Polynomial2 a, const Polynomial2& b) { return a += b; }
  friend Polynomial2 operator-(Polynomial2 a, const Polynomial2& b) { return a -= b; }
  friend Polynomial2 operator*(Polynomial2 a, double s) { return a *= s; }
  friend Polynomial2 operator*(double s, Polynomial2 a) { return a *= s; }
  friend Polynomial2 operator*(const Polynomial2& a, const Polynomial2& b);

  std::string to_string() const;

 private:
  void add_term(Key key, double value);

  std::map<Key, double> terms_;
};

}  // namespace semiquant
