#include "qmtbdd/analysis.hpp"

#include <cmath>

namespace qmtbdd {

namespace {

void check_inputs(unsigned n, double eps, double delta)
{
    if (n < 1) {
        throw AnalysisError("n must be at least 1");
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw AnalysisError("eps must be a finite value >= 0");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw AnalysisError("delta must be a finite value >= 0");
    }
}

// (1+eps)^m - 1 - m eps, summed as a binomial series to avoid cancellation.
double second_order(unsigned m, double eps)
{
    double term = static_cast<double>(m) * eps; // binom(m,1) eps
    double sum = 0.0;
    for (unsigned k = 2; k <= m; ++k) {
        term *= eps * static_cast<double>(m - k + 1) / static_cast<double>(k);
        sum += term;
        if (term <= sum * 1e-18) {
            break;
        }
    }
    return sum;
}

} // namespace

BoundReport bound_general(unsigned n, double eps, double delta, double c_m, double c_v)
{
    if (!(c_m >= 0.0) || !(c_v >= 0.0)) {
        throw AnalysisError("entry bounds c_M and c_V must be >= 0");
    }
    BoundReport r = bound_unit(n, eps, delta);
    r.c = std::ldexp(c_m * c_v, static_cast<int>(n));
    r.term_fp = static_cast<double>(n + 1) * eps * r.c;
    r.total = r.term_fp + r.term_merge;
    r.higher_fp = second_order(n + 1, eps) * r.c;
    return r;
}

BoundReport bound_unit(unsigned n, double eps, double delta)
{
    check_inputs(n, eps, delta);
    BoundReport r;
    r.n = n;
    r.eps = eps;
    r.delta = delta;
    r.c = 1.0;
    r.term_fp = static_cast<double>(n + 1) * eps;
    r.term_merge = std::ldexp(delta, static_cast<int>(n) + 1);
    r.total = r.term_fp + r.term_merge;
    r.higher_fp = second_order(n + 1, eps);
    double merge = 0.0;
    for (unsigned j = 1; j <= n; ++j) {
        merge += std::ldexp(std::expm1(j * std::log1p(eps)), static_cast<int>(j));
    }
    r.higher_merge = delta * merge;
    return r;
}

double suggest_delta(unsigned n, double eps, double allowed_error)
{
    check_inputs(n, eps, 0.0);
    const double fp = static_cast<double>(n + 1) * eps;
    if (!(allowed_error >= fp)) {
        throw AnalysisError("allowed error must be at least (n+1)*eps = " + std::to_string(fp));
    }
    return std::ldexp(allowed_error - fp, -static_cast<int>(n) - 1);
}

int suggest_bits(double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw AnalysisError("delta must be a finite value > 0");
    }
    // delta = m 2^e with m in [0.5, 1): log2(1/delta) = -e - log2(m), which is
    // the integer 1 - e when m = 0.5 and lies strictly inside (-e, 1 - e) otherwise.
    int e = 0;
    const double m = std::frexp(delta, &e);
    return m == 0.5 ? 2 - e : 1 - e;
}

} // namespace qmtbdd
