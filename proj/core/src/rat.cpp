#include "malsched/rat.hpp"

#include <ostream>

#include "malsched/errors.hpp"

namespace malsched {

Rat::Rat(long n, long d) {
  if (d == 0) throw ValidationError("rational with zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rat Rat::operator/(const Rat& o) const {
  if (o.is_zero()) throw ValidationError("division by zero rational");
  return Rat(mpq_class(v_ / o.v_));
}

Rat Rat::parse(const std::string& text) {
  if (text.empty()) throw ValidationError("empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      mpz_class n(text, 10);
      return Rat(mpq_class(n));
    }
    mpz_class n(text.substr(0, slash), 10);
    mpz_class d(text.substr(slash + 1), 10);
    if (d == 0) throw ValidationError("rational with zero denominator: " + text);
    mpq_class q(n, d);
    q.canonicalize();
    return Rat(q);
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed rational literal: " + text);
  }
}

Rat Rat::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return Rat(mpq_class(q));
}

long Rat::floor_long() const {
  Rat f = floor();
  if (!f.v_.get_num().fits_slong_p())
    throw ValidationError("floor does not fit in machine integer: " + str());
  return f.v_.get_num().get_si();
}

Rat Rat::pow2(long k) {
  mpz_class one = 1;
  mpz_class p;
  mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(k >= 0 ? k : -k));
  if (k >= 0) return Rat(mpq_class(p));
  mpq_class q(1, p);
  q.canonicalize();
  return Rat(q);
}

std::string Rat::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace malsched
