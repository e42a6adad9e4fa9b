#include "ddiv/poly.hpp"

#include <algorithm>
#include <string>

#include "ddiv/error.hpp"

namespace ddiv {

namespace {

// Integral of s^k over [-1, 1].
double monomial_integral(int k) { return (k % 2 == 0) ? 2.0 / (k + 1) : 0.0; }

void check_bound(int b) {
  if (b < 0 || b > Poly2::kMaxBound) {
    throw DegreeBoundError("Poly2: degree bound " + std::to_string(b) +
                           " outside [0, " + std::to_string(Poly2::kMaxBound) + "]");
  }
}

}  // namespace

Poly1::Poly1(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

double Poly1::operator()(double s) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * s + *it;
  return v;
}

double Poly1::coeff(int k) const {
  return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : 0.0;
}

int Poly1::degree() const {
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (c_[static_cast<std::size_t>(k)] != 0.0) return k;
  }
  return -1;
}

double Poly1::moment(int k) const {
  double v = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    v += c_[i] * monomial_integral(static_cast<int>(i) + k);
  }
  return v;
}

Poly2::Poly2(int bound_x, int bound_y) : bx_(bound_x), by_(bound_y) {
  check_bound(bx_);
  check_bound(by_);
  c_.assign(static_cast<std::size_t>((bx_ + 1) * (by_ + 1)), 0.0);
}

Poly2 Poly2::constant(double c, int bound) {
  Poly2 p(bound);
  p.set(0, 0, c);
  return p;
}

Poly2 Poly2::monomial(int i, int j, double c, int bound) {
  Poly2 p(bound);
  p.set(i, j, c);
  return p;
}

Poly2 Poly2::from_terms(std::initializer_list<std::tuple<int, int, double>> terms, int bound) {
  Poly2 p(bound);
  for (const auto& [i, j, c] : terms) p.add_to(i, j, c);
  return p;
}

double Poly2::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i > bx_ || j > by_) return 0.0;
  return c_[index(i, j)];
}

void Poly2::set(int i, int j, double c) {
  if (i < 0 || j < 0 || i > bx_ || j > by_) {
    if (c == 0.0 && i >= 0 && j >= 0) return;
    throw DegreeBoundError("Poly2: monomial x^" + std::to_string(i) + " y^" +
                           std::to_string(j) + " exceeds bounds (" + std::to_string(bx_) +
                           ", " + std::to_string(by_) + ")");
  }
  c_[index(i, j)] = c;
}

void Poly2::add_to(int i, int j, double c) { set(i, j, coeff(i, j) + c); }

double Poly2::operator()(double x, double y) const {
  double v = 0.0;
  for (int i = bx_; i >= 0; --i) {
    double row = 0.0;
    for (int j = by_; j >= 0; --j) row = row * y + c_[index(i, j)];
    v = v * x + row;
  }
  return v;
}

Poly2 Poly2::dx() const {
  Poly2 r(std::max(bx_ - 1, 0), by_);
  for (int i = 1; i <= bx_; ++i)
    for (int j = 0; j <= by_; ++j) r.c_[r.index(i - 1, j)] = i * c_[index(i, j)];
  return r;
}

Poly2 Poly2::dy() const {
  Poly2 r(bx_, std::max(by_ - 1, 0));
  for (int i = 0; i <= bx_; ++i)
    for (int j = 1; j <= by_; ++j) r.c_[r.index(i, j - 1)] = j * c_[index(i, j)];
  return r;
}

double Poly2::integrate_reference() const {
  double v = 0.0;
  for (int i = 0; i <= bx_; i += 2)
    for (int j = 0; j <= by_; j += 2) v += c_[index(i, j)] * monomial_integral(i) * monomial_integral(j);
  return v;
}

Poly1 Poly2::restrict_to_line(double x0, double ax, double y0, double ay) const {
  // Powers of the affine factors as univariate coefficient vectors.
  auto powers = [](double c0, double c1, int n) {
    std::vector<std::vector<double>> pw(static_cast<std::size_t>(n + 1));
    pw[0] = {1.0};
    for (int k = 1; k <= n; ++k) {
      const auto& prev = pw[static_cast<std::size_t>(k - 1)];
      std::vector<double> next(prev.size() + 1, 0.0);
      for (std::size_t m = 0; m < prev.size(); ++m) {
        next[m] += c0 * prev[m];
        next[m + 1] += c1 * prev[m];
      }
      pw[static_cast<std::size_t>(k)] = std::move(next);
    }
    return pw;
  };
  const auto px = powers(x0, ax, bx_);
  const auto py = powers(y0, ay, by_);
  std::vector<double> out(static_cast<std::size_t>(bx_ + by_ + 1), 0.0);
  for (int i = 0; i <= bx_; ++i) {
    for (int j = 0; j <= by_; ++j) {
      const double c = c_[index(i, j)];
      if (c == 0.0) continue;
      const auto& a = px[static_cast<std::size_t>(i)];
      const auto& b = py[static_cast<std::size_t>(j)];
      for (std::size_t m = 0; m < a.size(); ++m)
        for (std::size_t n = 0; n < b.size(); ++n) out[m + n] += c * a[m] * b[n];
    }
  }
  return Poly1(std::move(out));
}

int Poly2::total_degree() const {
  int d = -1;
  for (int i = 0; i <= bx_; ++i)
    for (int j = 0; j <= by_; ++j)
      if (c_[index(i, j)] != 0.0) d = std::max(d, i + j);
  return d;
}

int Poly2::degree_x() const {
  int d = -1;
  for (int i = 0; i <= bx_; ++i)
    for (int j = 0; j <= by_; ++j)
      if (c_[index(i, j)] != 0.0) d = std::max(d, i);
  return d;
}

int Poly2::degree_y() const {
  int d = -1;
  for (int i = 0; i <= bx_; ++i)
    for (int j = 0; j <= by_; ++j)
      if (c_[index(i, j)] != 0.0) d = std::max(d, j);
  return d;
}

bool Poly2::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double c) { return c == 0.0; });
}

Poly2 Poly2::rebound(int bound_x, int bound_y) const {
  Poly2 r(bound_x, bound_y);
  for (int i = 0; i <= bx_; ++i)
    for (int j = 0; j <= by_; ++j) r.set(i, j, c_[index(i, j)]);
  return r;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  if (o.bx_ > bx_ || o.by_ > by_) *this = rebound(std::max(bx_, o.bx_), std::max(by_, o.by_));
  for (int i = 0; i <= o.bx_; ++i)
    for (int j = 0; j <= o.by_; ++j) c_[index(i, j)] += o.c_[o.index(i, j)];
  return *this;
}

Poly2& Poly2::operator-=(const Poly2& o) {
  if (o.bx_ > bx_ || o.by_ > by_) *this = rebound(std::max(bx_, o.bx_), std::max(by_, o.by_));
  for (int i = 0; i <= o.bx_; ++i)
    for (int j = 0; j <= o.by_; ++j) c_[index(i, j)] -= o.c_[o.index(i, j)];
  return *this;
}

Poly2& Poly2::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Poly2 multiply(const Poly2& a, const Poly2& b, int bound_x, int bound_y) {
  Poly2 r(bound_x, bound_y);
  for (int i = 0; i <= a.bound_x(); ++i) {
    for (int j = 0; j <= a.bound_y(); ++j) {
      const double ca = a.coeff(i, j);
      if (ca == 0.0) continue;
      for (int k = 0; k <= b.bound_x(); ++k)
        for (int l = 0; l <= b.bound_y(); ++l) {
          const double cb = b.coeff(k, l);
          if (cb != 0.0) r.add_to(i + k, j + l, ca * cb);
        }
    }
  }
  return r;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
  const int bx = a.bound_x() + b.bound_x();
  const int by = a.bound_y() + b.bound_y();
  if (bx > Poly2::kMaxBound || by > Poly2::kMaxBound) {
    throw DegreeBoundError("Poly2: product bounds (" + std::to_string(bx) + ", " +
                           std::to_string(by) + ") exceed kMaxBound");
  }
  return multiply(a, b, bx, by);
}

bool operator==(const Poly2& a, const Poly2& b) {
  const int bx = std::max(a.bx_, b.bx_);
  const int by = std::max(a.by_, b.by_);
  for (int i = 0; i <= bx; ++i)
    for (int j = 0; j <= by; ++j)
      if (a.coeff(i, j) != b.coeff(i, j)) return false;
  return true;
}

Poly2 laplacian(const Poly2& p) { return p.dx().dx() + p.dy().dy(); }

}  // namespace ddiv
