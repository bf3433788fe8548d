#pragma once
#include <gmpxx.h>

#include <string>

namespace qpf::curves {

using Q = mpq_class;

// Canonicalized num/den; mpq_class(num, den) alone is not reduced and GMP
// arithmetic on unreduced values is undefined.
Q make_q(long num, long den);
Q parse_q(const std::string& s);  // "p/q", integer or finite decimal
std::string to_string(const Q& q);  // always "p/q"
Q floor_q(const Q& x);
long floor_long(const Q& x);
Q frac_q(const Q& x);
inline double to_d(const Q& x) { return x.get_d(); }
bool is_integer(const Q& x);

// Continued-fraction convergents with 1/(q_k q_{k+1}) <= tol.
Q golden_conjugate_q(const Q& tol);  // (sqrt5 - 1)/2
Q silver_q(const Q& tol);            // sqrt2 - 1
Q default_tolerance();               // 1e-30

}  // namespace qpf::curves
