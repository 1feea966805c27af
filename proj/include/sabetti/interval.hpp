#pragma once

#include <ostream>
#include <vector>

#include "sabetti/error.hpp"
#include "sabetti/rational.hpp"

namespace sabetti {

/// Closed interval [lo, hi] with exact endpoints. Arithmetic is the usual
/// interval arithmetic; with exact scalars no outward rounding is needed.
template <typename Scalar>
class BasicInterval {
 public:
  BasicInterval() = default;
  explicit BasicInterval(Scalar point) : lo_(point), hi_(lo_) {}
  BasicInterval(Scalar lo, Scalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) throw Error(ErrorKind::InvalidArgument, "interval with lo > hi");
  }

  const Scalar& lo() const { return lo_; }
  const Scalar& hi() const { return hi_; }
  Scalar width() const { return hi_ - lo_; }
  Scalar midpoint() const { return (lo_ + hi_) / Scalar(2); }

  bool contains(const Scalar& x) const { return !(x < lo_) && !(hi_ < x); }
  bool contains(const BasicInterval& o) const { return !(o.lo_ < lo_) && !(hi_ < o.hi_); }
  bool overlaps(const BasicInterval& o) const { return !(o.hi_ < lo_) && !(hi_ < o.lo_); }
  bool is_point() const { return lo_ == hi_; }

  BasicInterval& operator+=(const BasicInterval& o) {
    lo_ += o.lo_;
    hi_ += o.hi_;
    return *this;
  }
  friend BasicInterval operator+(BasicInterval a, const BasicInterval& b) { return a += b; }
  friend BasicInterval operator-(const BasicInterval& a, const BasicInterval& b) {
    return BasicInterval(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend BasicInterval operator-(const BasicInterval& a) { return BasicInterval(-a.hi_, -a.lo_); }
  friend BasicInterval operator*(const BasicInterval& a, const BasicInterval& b) {
    if (a.lo_.sign() >= 0 && b.lo_.sign() >= 0) return BasicInterval(a.lo_ * b.lo_, a.hi_ * b.hi_);
    Scalar p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return BasicInterval(min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4)));
  }
  /// Scaling by an exact scalar.
  friend BasicInterval operator*(const Scalar& s, const BasicInterval& a) {
    if (s.sign() >= 0) return BasicInterval(s * a.lo_, s * a.hi_);
    return BasicInterval(s * a.hi_, s * a.lo_);
  }

  friend bool operator==(const BasicInterval& a, const BasicInterval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }
  friend std::ostream& operator<<(std::ostream& os, const BasicInterval& iv) {
    return os << '[' << iv.lo_ << ", " << iv.hi_ << ']';
  }

 private:
  Scalar lo_{};
  Scalar hi_{};
};

/// Tight enclosure of x^n over an interval (even powers are non-negative).
template <typename Scalar>
BasicInterval<Scalar> pow(const BasicInterval<Scalar>& x, unsigned n) {
  if (n == 0) return BasicInterval<Scalar>(Scalar(1));
  if (x.lo().sign() >= 0) return BasicInterval<Scalar>(pow(x.lo(), n), pow(x.hi(), n));
  if (x.hi().sign() <= 0) {
    Scalar a = pow(x.lo(), n), b = pow(x.hi(), n);
    return n % 2 == 0 ? BasicInterval<Scalar>(b, a) : BasicInterval<Scalar>(a, b);
  }
  if (n % 2 == 1) return BasicInterval<Scalar>(pow(x.lo(), n), pow(x.hi(), n));
  return BasicInterval<Scalar>(Scalar(0), max(pow(x.lo(), n), pow(x.hi(), n)));
}

template <typename Scalar>
BasicInterval<Scalar> hull(const BasicInterval<Scalar>& a, const BasicInterval<Scalar>& b) {
  return BasicInterval<Scalar>(min(a.lo(), b.lo()), max(a.hi(), b.hi()));
}

using Interval = BasicInterval<Rational>;
using Box = std::vector<Interval>;
using Point = std::vector<Rational>;

inline Point box_midpoint(const Box& box) {
  Point p;
  p.reserve(box.size());
  for (const auto& iv : box) p.push_back(iv.midpoint());
  return p;
}

}  // namespace sabetti
