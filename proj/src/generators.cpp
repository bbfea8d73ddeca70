#include "qmtbdd/quantum.hpp"

#include "mpfr_scratch.hpp"

#include <random>

namespace qmtbdd {

namespace {

constexpr mpfr_prec_t kAnglePrec = 256;

void check_size(unsigned n, const char* family)
{
    if (n < kMinFamilyQubits || n > kMaxFamilyQubits) {
        throw CircuitError(std::string(family) + " needs between " + std::to_string(kMinFamilyQubits) + " and " +
                           std::to_string(kMaxFamilyQubits) + " qubits, got " + std::to_string(n));
    }
}

std::string format_decimal(mpfr_srcptr x, int digits)
{
    char* buf = nullptr;
    if (mpfr_asprintf(&buf, "%.*Rg", digits, x) < 0) {
        throw std::runtime_error("angle formatting failed");
    }
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

} // namespace

Circuit gen_dj(unsigned n, DjOptions options)
{
    check_size(n, "dj");
    const unsigned anc = n - 1;
    Circuit c{n, {}};
    c.gates.push_back(Gate::x(anc));
    if (options.h_as_ry) {
        // RY(pi/2) Z = H, with cos(pi/4) in place of 1/sqrt(2).
        c.gates.push_back(Gate::z(anc));
        c.gates.push_back(Gate::ry(Angle::pi_over(2), anc));
    } else {
        c.gates.push_back(Gate::h(anc));
    }
    for (unsigned i = 0; i < anc; ++i) {
        c.gates.push_back(Gate::h(i));
    }
    for (unsigned i = 0; i < anc; ++i) {
        c.gates.push_back(Gate::cx(i, anc));
    }
    for (unsigned i = 0; i < anc; ++i) {
        c.gates.push_back(Gate::h(i));
    }
    return c;
}

std::uint64_t qpe_phase_numerator(unsigned n, std::uint64_t seed)
{
    check_size(n, "qpe");
    const unsigned m = n - 1;
    std::mt19937_64 rng(seed);
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    // Odd numerators need every counting bit.
    return (rng() & mask) | 1U;
}

Circuit gen_qpe_exact(unsigned n, std::uint64_t seed)
{
    const std::uint64_t p = qpe_phase_numerator(n, seed);
    const unsigned m = n - 1;
    const unsigned target = m;
    Circuit c{n, {}};
    c.gates.push_back(Gate::x(target));
    for (unsigned j = 0; j < m; ++j) {
        c.gates.push_back(Gate::h(j));
    }

    // Controlled U^(2^j) with U = P(2 pi p / 2^m) on the |1> eigenstate.
    detail::Scratch angle(kAnglePrec);
    for (unsigned j = 0; j < m; ++j) {
        const std::uint64_t num = (p << j) & ((std::uint64_t{1} << m) - 1);
        if (num == 0) {
            c.gates.push_back(Gate::cp(Angle::decimal("0"), j, target));
            continue;
        }
        mpfr_const_pi(angle, MPFR_RNDN);
        mpfr_mul_ui(angle, angle, num, MPFR_RNDN);
        mpfr_div_2ui(angle, angle, m - 1, MPFR_RNDN);
        c.gates.push_back(Gate::cp(Angle::decimal(format_decimal(angle, 17)), j, target));
    }

    // Inverse QFT without the final swaps.
    for (unsigned j = m; j-- > 0;) {
        for (unsigned k = m; k-- > j + 1;) {
            c.gates.push_back(Gate::cp(Angle::pi_over(std::uint64_t{1} << (k - j), true), k, j));
        }
        c.gates.push_back(Gate::h(j));
    }
    return c;
}

Circuit gen_wstate(unsigned n, WStateOptions options)
{
    check_size(n, "wstate");
    if (options.angle_digits < 1 || options.angle_digits > 70) {
        throw CircuitError("angle digits must be between 1 and 70");
    }
    Circuit c{n, {}};
    c.gates.push_back(Gate::x(0));
    detail::Scratch phi(kAnglePrec);
    for (unsigned k = 1; k < n; ++k) {
        // Controlled RY(2 phi) from q[k-1] to q[k], cos(phi) = sqrt(1/(n-k+1)).
        mpfr_set_ui(phi, n - k + 1, MPFR_RNDN);
        mpfr_rec_sqrt(phi, phi, MPFR_RNDN);
        mpfr_acos(phi, phi, MPFR_RNDN);
        const std::string s = format_decimal(phi, options.angle_digits);
        c.gates.push_back(Gate::ry(Angle::decimal(s), k));
        c.gates.push_back(Gate::cx(k - 1, k));
        c.gates.push_back(Gate::ry(Angle::decimal("-" + s), k));
        c.gates.push_back(Gate::cx(k - 1, k));
    }
    for (unsigned j = 1; j < n; ++j) {
        c.gates.push_back(Gate::cx(j, j - 1));
    }
    return c;
}

std::string_view family_name(Family f)
{
    switch (f) {
    case Family::DJ: return "dj";
    case Family::QPE: return "qpe";
    case Family::WState: return "wstate";
    }
    return "?";
}

Family parse_family(std::string_view name)
{
    if (name == "dj") {
        return Family::DJ;
    }
    if (name == "qpe" || name == "qpeexact") {
        return Family::QPE;
    }
    if (name == "wstate") {
        return Family::WState;
    }
    throw CircuitError("unknown family '" + std::string(name) + "' (expected dj, qpe or wstate)");
}

Circuit generate(Family f, unsigned n, std::uint64_t seed)
{
    switch (f) {
    case Family::DJ: return gen_dj(n);
    case Family::QPE: return gen_qpe_exact(n, seed);
    case Family::WState: return gen_wstate(n);
    }
    throw CircuitError("unknown family");
}

} // namespace qmtbdd
