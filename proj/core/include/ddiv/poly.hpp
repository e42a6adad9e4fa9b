#pragma once

#include <cstddef>
#include <initializer_list>
#include <tuple>
#include <vector>

namespace ddiv {

/// Univariate polynomial sum_k c[k] s^k, used for edge traces on [-1, 1].
class Poly1 {
 public:
  Poly1() = default;
  explicit Poly1(std::vector<double> coeffs);

  double operator()(double s) const;
  /// Coefficient of s^k, zero beyond the stored range.
  double coeff(int k) const;
  const std::vector<double>& coeffs() const { return c_; }
  /// Index of the highest nonzero coefficient, -1 for the zero polynomial.
  int degree() const;
  /// Exact integral of p(s) s^k over [-1, 1].
  double moment(int k) const;

 private:
  std::vector<double> c_;
};

/// Bivariate polynomial sum c[i][j] x^i y^j with per-variable degree bounds
/// i <= bound_x, j <= bound_y.  Coefficients live on a dense grid so calculus
/// is branch-free; values that are dyadic rationals stay exact.
class Poly2 {
 public:
  static constexpr int kMaxBound = 16;

  explicit Poly2(int bound = 3) : Poly2(bound, bound) {}
  Poly2(int bound_x, int bound_y);

  static Poly2 constant(double c, int bound = 3);
  static Poly2 monomial(int i, int j, double c = 1.0, int bound = 3);
  /// Builds from a list of (i, j, c) terms.
  static Poly2 from_terms(std::initializer_list<std::tuple<int, int, double>> terms,
                          int bound = 3);

  int bound_x() const { return bx_; }
  int bound_y() const { return by_; }

  double coeff(int i, int j) const;
  /// Throws DegreeBoundError outside the bounds.
  void set(int i, int j, double c);
  void add_to(int i, int j, double c);

  double operator()(double x, double y) const;

  /// Partial derivatives; the bound of the differentiated variable drops by one.
  Poly2 dx() const;
  Poly2 dy() const;

  /// Exact integral over the reference square (-1, 1)^2.
  double integrate_reference() const;

  /// Restriction to the segment s -> (x0 + ax s, y0 + ay s), s in [-1, 1].
  Poly1 restrict_to_line(double x0, double ax, double y0, double ay) const;

  /// Highest total degree of a nonzero term, -1 for zero.
  int total_degree() const;
  int degree_x() const;
  int degree_y() const;
  bool is_zero() const;

  /// Copy with new bounds; throws DegreeBoundError if a nonzero term would drop.
  Poly2 rebound(int bound_x, int bound_y) const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator-=(const Poly2& o);
  Poly2& operator*=(double s);

  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  friend Poly2 operator-(Poly2 a) { return a *= -1.0; }
  friend Poly2 operator*(Poly2 a, double s) { return a *= s; }
  friend Poly2 operator*(double s, Poly2 a) { return a *= s; }
  /// Product with bounds summed; DegreeBoundError above kMaxBound.
  friend Poly2 operator*(const Poly2& a, const Poly2& b);

  friend bool operator==(const Poly2& a, const Poly2& b);

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(by_ + 1) +
           static_cast<std::size_t>(j);
  }

  int bx_;
  int by_;
  std::vector<double> c_;
};

/// Product into explicit bounds; DegreeBoundError if a nonzero term overflows.
Poly2 multiply(const Poly2& a, const Poly2& b, int bound_x, int bound_y);

/// Laplacian.
Poly2 laplacian(const Poly2& p);

}  // namespace ddiv
