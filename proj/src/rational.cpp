#include "sabetti/rational.hpp"

#include "sabetti/error.hpp"

namespace sabetti {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::NotIsolating: return "NotIsolating";
    case ErrorKind::DegenerateDegree: return "DegenerateDegree";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::ScheduleTooShort: return "ScheduleTooShort";
    case ErrorKind::NotInSet: return "NotInSet";
    case ErrorKind::UnboundedSet: return "UnboundedSet";
    case ErrorKind::NotPClosed: return "NotPClosed";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::AmbiguousInclusion: return "AmbiguousInclusion";
    case ErrorKind::IncompleteIncidence: return "IncompleteIncidence";
    case ErrorKind::NegativeBetti: return "NegativeBetti";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::OddDegree: return "OddDegree";
    case ErrorKind::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorKind::NotStabilized: return "NotStabilized";
    case ErrorKind::BranchMatchFailure: return "BranchMatchFailure";
    case ErrorKind::NonBoundedCurve: return "NonBoundedCurve";
    case ErrorKind::PointNotOnCurve: return "PointNotOnCurve";
    case ErrorKind::ResolutionExhausted: return "ResolutionExhausted";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Rational::Rational(long num, long den) {
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  // U+2212 MINUS SIGN is E2 88 92 in UTF-8.
  if (text.substr(i, 3) == "\xE2\x88\x92") {
    s.push_back('-');
    i += 3;
  } else if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    if (text[i] == '-') s.push_back('-');
    ++i;
  }
  std::size_t digits = 0;
  bool slash = false;
  std::size_t den_digits = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      s.push_back(c);
      (slash ? den_digits : digits)++;
    } else if (c == '/' && !slash) {
      slash = true;
      s.push_back(c);
    } else if (c == ' ' || c == '\t') {
      break;
    } else {
      throw Error(ErrorKind::SyntaxError, "bad rational literal '" + std::string(text) + "'");
    }
  }
  if (digits == 0 || (slash && den_digits == 0)) {
    throw Error(ErrorKind::SyntaxError, "bad rational literal '" + std::string(text) + "'");
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) {
    throw Error(ErrorKind::SyntaxError, "bad rational literal '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw Error(ErrorKind::SyntaxError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return Rational(q);
}

Rational pow(const Rational& base, unsigned exponent) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.mpq().get_num_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), base.mpq().get_den_mpz_t(), exponent);
  return Rational(mpq_class(n, d));
}

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational dyadic(long numerator, unsigned log2_denominator) {
  mpz_class d = 1;
  d <<= log2_denominator;
  return Rational(mpz_class(numerator), d);
}

std::size_t hash_value(const Rational& r) {
  auto mix = [](std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  };
  std::size_t h = static_cast<std::size_t>(r.sign() + 1);
  for (mpz_srcptr z : {r.mpq().get_num_mpz_t(), r.mpq().get_den_mpz_t()}) {
    const std::size_t limbs = mpz_size(z);
    h = mix(h, limbs);
    for (std::size_t i = 0; i < limbs; ++i) h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z, i)));
  }
  return h;
}

}  // namespace sabetti
