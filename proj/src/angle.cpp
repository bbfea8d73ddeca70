#include "qmtbdd/numerics.hpp"

#include "mpfr_scratch.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>

namespace qmtbdd {

namespace {

bool is_decimal_literal(std::string_view s)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        ++i;
    }
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++digits;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++digits;
        }
    }
    if (digits == 0) {
        return false;
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            ++i;
        }
        std::size_t exp_digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++exp_digits;
        }
        if (exp_digits == 0) {
            return false;
        }
    }
    return i == s.size();
}

std::uint64_t parse_uint(std::string_view s, std::string_view whole)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad angle '" + std::string(whole) + "'");
    }
    return v;
}

} // namespace

Angle Angle::pi_over(std::uint64_t denominator, bool negative)
{
    if (denominator == 0) {
        throw std::invalid_argument("angle denominator must be positive");
    }
    return Angle(PiFraction{negative, denominator});
}

Angle Angle::decimal(std::string literal)
{
    if (!is_decimal_literal(literal)) {
        throw std::invalid_argument("bad decimal angle '" + literal + "'");
    }
    return Angle(Decimal{std::move(literal)});
}

Angle Angle::parse(std::string_view text)
{
    std::string_view rest = text;
    bool negative = false;
    if (!rest.empty() && rest.front() == '-') {
        negative = true;
        rest.remove_prefix(1);
    }
    if (rest.starts_with("pi")) {
        rest.remove_prefix(2);
        if (!rest.starts_with('/')) {
            throw std::invalid_argument("bad angle '" + std::string(text) + "': expected pi/<int> or pi/2^<int>");
        }
        rest.remove_prefix(1);
        if (rest.starts_with("2^")) {
            const auto k = parse_uint(rest.substr(2), text);
            if (k > 63) {
                throw std::invalid_argument("angle exponent too large in '" + std::string(text) + "'");
            }
            return pi_over(std::uint64_t{1} << k, negative);
        }
        return pi_over(parse_uint(rest, text), negative);
    }
    return decimal(std::string(text));
}

std::string Angle::to_string() const
{
    if (const auto* frac = std::get_if<PiFraction>(&repr_)) {
        std::string out = frac->negative ? "-pi/" : "pi/";
        if (frac->denominator > 2 && std::has_single_bit(frac->denominator)) {
            return out + "2^" + std::to_string(std::countr_zero(frac->denominator));
        }
        return out + std::to_string(frac->denominator);
    }
    return std::get<Decimal>(repr_).literal;
}

PrecValue Angle::value(PrecConfig config) const
{
    const auto inter = static_cast<mpfr_prec_t>(std::max(128, config.bits()));
    detail::Scratch theta(inter);
    if (const auto* frac = std::get_if<PiFraction>(&repr_)) {
        detail::Scratch wide(inter + 64);
        mpfr_const_pi(wide, MPFR_RNDN);
        mpfr_div_ui(wide, wide, static_cast<unsigned long>(frac->denominator), MPFR_RNDN);
        mpfr_set(theta.get(), wide.get(), MPFR_RNDN);
        if (frac->negative) {
            mpfr_neg(theta, theta, MPFR_RNDN);
        }
    } else {
        const auto& literal = std::get<Decimal>(repr_).literal;
        mpfr_set_str(theta, literal.c_str(), 10, MPFR_RNDN);
    }
    return round_to(config, theta.get());
}

} // namespace qmtbdd
