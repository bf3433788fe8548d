#include "qpf/curves/rational.hpp"

#include <stdexcept>

#include "qpf/common.hpp"

namespace qpf::curves {

Q make_q(long num, long den) {
    Q q(num, den);
    q.canonicalize();
    return q;
}

Q parse_q(const std::string& s) {
    if (s.empty()) throw ConfigError("empty rational");
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Q q;
        if (q.set_str(s, 10) != 0) throw ConfigError("not a rational: " + s);
        q.canonicalize();
        if (q.get_den() == 0) throw ConfigError("zero denominator: " + s);
        return q;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t places = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits.find_first_not_of("-0123456789") != std::string::npos)
        throw ConfigError("not a decimal: " + s);
    mpz_class num(digits, 10), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, places);
    Q q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Q& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

Q floor_q(const Q& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Q(f);
}

long floor_long(const Q& x) { return floor_q(x).get_num().get_si(); }

Q frac_q(const Q& x) { return x - floor_q(x); }

bool is_integer(const Q& x) { return x.get_den() == 1; }

namespace {
Q convergent(long a0, long a, const Q& tol) {
    mpz_class hp = 1, h = a0, kp = 0, k = 1;
    for (int i = 0;; ++i) {
        mpz_class hn = a * h + hp, kn = a * k + kp;
        hp = h, h = hn, kp = k, k = kn;
        if (i > 2 && Q(1, kp * k) <= tol) return Q(hp, kp);
    }
}
}  // namespace

Q golden_conjugate_q(const Q& tol) { return convergent(0, 1, tol); }
Q silver_q(const Q& tol) { return convergent(0, 2, tol); }

Q default_tolerance() {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 30);
    return Q(1, den);
}

}  // namespace qpf::curves
