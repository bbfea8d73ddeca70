#include "qmtbdd/numerics.hpp"

#include "mpfr_scratch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace qmtbdd {

using detail::Scratch;

PrecConfig::PrecConfig(int bits) : bits_(bits)
{
    if (bits < kMinBits || bits > kMaxBits) {
        throw std::invalid_argument("mantissa bits must lie in [" + std::to_string(kMinBits) + ", " +
                                    std::to_string(kMaxBits) + "], got " + std::to_string(bits));
    }
}

double PrecConfig::unit_roundoff() const noexcept { return std::ldexp(1.0, -bits_); }

// Runs one MPFR primitive into a fresh value and turns exponent-range events
// into NumericRangeError.
class Rounder {
public:
    template <class F>
    static PrecValue apply(PrecConfig config, F&& op)
    {
        PrecValue out(config);
        mpfr_clear_underflow();
        mpfr_clear_overflow();
        op(out.mut());
        if (mpfr_overflow_p() || !mpfr_number_p(out.raw())) {
            throw NumericRangeError("floating-point overflow or non-finite result");
        }
        if (mpfr_underflow_p()) {
            throw NumericRangeError("floating-point underflow");
        }
        return out;
    }

    static mpfr_ptr mut(PrecValue& v) noexcept { return v.mut(); }
};

namespace {

void require_same(const PrecValue& a, const PrecValue& b)
{
    if (a.bits() != b.bits()) {
        throw PrecisionMismatch("operands have " + std::to_string(a.bits()) + " and " + std::to_string(b.bits()) +
                                " significand bits");
    }
}

std::size_t mix(std::size_t seed, std::size_t v) noexcept
{
    // splitmix-style avalanche
    v += 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return seed ^ (v ^ (v >> 31));
}

mpfr_prec_t working_prec(int bits) { return static_cast<mpfr_prec_t>(2 * bits + 64); }

} // namespace

// ---------------------------------------------------------------------------
// PrecValue

PrecValue::PrecValue(PrecConfig config)
{
    const auto prec = static_cast<mpfr_prec_t>(config.bits());
    mpfr_custom_init(limbs_, prec);
    mpfr_custom_init_set(&value_, MPFR_ZERO_KIND, 0, prec, limbs_);
}

PrecValue::PrecValue(const PrecValue& other) : PrecValue(other.config())
{
    mpfr_set(&value_, other.raw(), MPFR_RNDN);
}

PrecValue& PrecValue::operator=(const PrecValue& other)
{
    if (this != &other) {
        if (bits() != other.bits()) {
            const auto prec = mpfr_get_prec(other.raw());
            mpfr_custom_init(limbs_, prec);
            mpfr_custom_init_set(&value_, MPFR_ZERO_KIND, 0, prec, limbs_);
        }
        mpfr_set(&value_, other.raw(), MPFR_RNDN);
    }
    return *this;
}

PrecValue PrecValue::from_double(PrecConfig config, double x)
{
    if (!std::isfinite(x)) {
        throw NumericRangeError("non-finite input " + std::to_string(x));
    }
    return Rounder::apply(config, [x](mpfr_ptr o) { mpfr_set_d(o, x, MPFR_RNDN); });
}

PrecValue PrecValue::from_decimal(PrecConfig config, std::string_view literal)
{
    const std::string text(literal);
    char* end = nullptr;
    return Rounder::apply(config, [&](mpfr_ptr o) {
        mpfr_strtofr(o, text.c_str(), &end, 10, MPFR_RNDN);
        if (text.empty() || end != text.c_str() + text.size()) {
            throw std::invalid_argument("not a decimal number: '" + text + "'");
        }
    });
}

PrecValue PrecValue::from_raw(PrecConfig config, mpfr_srcptr x)
{
    return Rounder::apply(config, [x](mpfr_ptr o) { mpfr_set(o, x, MPFR_RNDN); });
}

double PrecValue::to_double() const { return mpfr_get_d(&value_, MPFR_RNDN); }

std::string PrecValue::to_string() const
{
    if (is_zero()) {
        return "0";
    }
    const auto digits = static_cast<int>(mpfr_get_str_ndigits(10, mpfr_get_prec(&value_)));
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, &value_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

std::size_t PrecValue::hash() const noexcept
{
    if (is_zero()) {
        return 0x5bd1e995U;
    }
    std::size_t h = mix(static_cast<std::size_t>(mpfr_signbit(&value_)), static_cast<std::size_t>(mpfr_get_exp(&value_)));
    const auto* limbs = static_cast<const mp_limb_t*>(mpfr_custom_get_significand(&value_));
    const auto count = (mpfr_get_prec(&value_) + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
    for (mpfr_prec_t i = 0; i < count; ++i) {
        h = mix(h, static_cast<std::size_t>(limbs[i]));
    }
    return h;
}

PrecValue round_to(PrecConfig config, const PrecValue& x) { return PrecValue::from_raw(config, x.raw()); }

PrecValue round_to(PrecConfig config, mpfr_srcptr x) { return PrecValue::from_raw(config, x); }

PrecValue add(const PrecValue& a, const PrecValue& b)
{
    require_same(a, b);
    return Rounder::apply(a.config(), [&](mpfr_ptr o) { mpfr_add(o, a.raw(), b.raw(), MPFR_RNDN); });
}

PrecValue sub(const PrecValue& a, const PrecValue& b)
{
    require_same(a, b);
    return Rounder::apply(a.config(), [&](mpfr_ptr o) { mpfr_sub(o, a.raw(), b.raw(), MPFR_RNDN); });
}

PrecValue mul(const PrecValue& a, const PrecValue& b)
{
    require_same(a, b);
    return Rounder::apply(a.config(), [&](mpfr_ptr o) { mpfr_mul(o, a.raw(), b.raw(), MPFR_RNDN); });
}

PrecValue div(const PrecValue& a, const PrecValue& b)
{
    require_same(a, b);
    if (b.is_zero()) {
        throw NumericRangeError("division by zero");
    }
    return Rounder::apply(a.config(), [&](mpfr_ptr o) { mpfr_div(o, a.raw(), b.raw(), MPFR_RNDN); });
}

PrecValue neg(const PrecValue& a)
{
    PrecValue out(a);
    mpfr_neg(Rounder::mut(out), out.raw(), MPFR_RNDN);
    return out;
}

PrecValue scale2(const PrecValue& a, long e)
{
    return Rounder::apply(a.config(), [&](mpfr_ptr o) { mpfr_mul_2si(o, a.raw(), e, MPFR_RNDN); });
}

// ---------------------------------------------------------------------------
// PrecComplex

PrecComplex::PrecComplex(PrecValue real, PrecValue imag) : re(std::move(real)), im(std::move(imag))
{
    require_same(re, im);
}

PrecComplex PrecComplex::from_doubles(PrecConfig config, double real, double imag)
{
    return PrecComplex(PrecValue::from_double(config, real), PrecValue::from_double(config, imag));
}

std::size_t PrecComplex::hash() const noexcept { return mix(re.hash(), im.hash()); }

std::string PrecComplex::to_string() const
{
    if (im.is_zero()) {
        return re.to_string();
    }
    std::string imag = im.to_string();
    std::string out = re.is_zero() ? std::string() : re.to_string();
    if (imag.front() != '-' && !out.empty()) {
        out += '+';
    }
    return out + imag + "i";
}

PrecComplex round_to(PrecConfig config, const PrecComplex& z)
{
    return PrecComplex(round_to(config, z.re), round_to(config, z.im));
}

PrecComplex cadd(const PrecComplex& a, const PrecComplex& b) { return PrecComplex(a.re + b.re, a.im + b.im); }

PrecComplex csub(const PrecComplex& a, const PrecComplex& b) { return PrecComplex(a.re - b.re, a.im - b.im); }

PrecComplex cmul(const PrecComplex& a, const PrecComplex& b)
{
    PrecValue re = (a.re * b.re) - (a.im * b.im);
    PrecValue im = (a.re * b.im) + (a.im * b.re);
    return PrecComplex(std::move(re), std::move(im));
}

PrecComplex cneg(const PrecComplex& a) { return PrecComplex(-a.re, -a.im); }

double distance(const PrecComplex& a, const PrecComplex& b)
{
    const auto prec = working_prec(std::max(a.re.bits(), b.re.bits()));
    Scratch dr(prec), di(prec), out(prec);
    mpfr_sub(dr, a.re.raw(), b.re.raw(), MPFR_RNDN);
    mpfr_sub(di, a.im.raw(), b.im.raw(), MPFR_RNDN);
    mpfr_hypot(out, dr, di, MPFR_RNDN);
    return mpfr_get_d(out, MPFR_RNDN);
}

bool within(const PrecComplex& a, const PrecComplex& b, double delta)
{
    if (delta == 0.0) {
        return a == b;
    }
    if (!(delta > 0.0)) {
        return false;
    }
    const auto prec = working_prec(std::max(a.re.bits(), b.re.bits()));
    Scratch dr(prec), di(prec), bound(prec);
    // Upper bounds on |a.re - b.re| and |a.im - b.im|.
    mpfr_sub(dr, a.re.raw(), b.re.raw(), MPFR_RNDA);
    mpfr_sub(di, a.im.raw(), b.im.raw(), MPFR_RNDA);
    mpfr_abs(dr, dr, MPFR_RNDN);
    mpfr_abs(di, di, MPFR_RNDN);
    mpfr_set_d(bound, delta, MPFR_RNDN); // exact: prec >= 53
    if (mpfr_zero_p(di.get())) {
        return mpfr_lessequal_p(dr, bound) != 0;
    }
    if (mpfr_zero_p(dr.get())) {
        return mpfr_lessequal_p(di, bound) != 0;
    }
    Scratch sum(prec), sq(prec);
    mpfr_sqr(sum, dr, MPFR_RNDU);
    mpfr_sqr(sq, di, MPFR_RNDU);
    mpfr_add(sum, sum, sq, MPFR_RNDU);
    mpfr_sqr(bound, bound, MPFR_RNDD);
    return mpfr_lessequal_p(sum, bound) != 0;
}

double modulus(const PrecComplex& z)
{
    Scratch out(working_prec(z.re.bits()));
    mpfr_hypot(out, z.re.raw(), z.im.raw(), MPFR_RNDN);
    return mpfr_get_d(out, MPFR_RNDN);
}

// ---------------------------------------------------------------------------
// Elementary constants

PrecValue cos_of(const PrecValue& theta)
{
    return Rounder::apply(theta.config(), [&](mpfr_ptr o) { mpfr_cos(o, theta.raw(), MPFR_RNDN); });
}

PrecValue sin_of(const PrecValue& theta)
{
    return Rounder::apply(theta.config(), [&](mpfr_ptr o) { mpfr_sin(o, theta.raw(), MPFR_RNDN); });
}

PrecComplex exp_i(const PrecValue& theta) { return PrecComplex(cos_of(theta), sin_of(theta)); }

PrecValue sqrt_half(PrecConfig config)
{
    return Rounder::apply(config, [](mpfr_ptr o) {
        mpfr_set_d(o, 0.5, MPFR_RNDN);
        mpfr_sqrt(o, o, MPFR_RNDN);
    });
}

PrecComplex constant(ConstantKind kind, const Angle& theta, PrecConfig config)
{
    switch (kind) {
    case ConstantKind::SqrtHalf:
        return PrecComplex(sqrt_half(config), PrecValue(config));
    case ConstantKind::Cos:
        return PrecComplex(cos_of(theta.value(config)), PrecValue(config));
    case ConstantKind::Sin:
        return PrecComplex(sin_of(theta.value(config)), PrecValue(config));
    case ConstantKind::ExpI:
        return exp_i(theta.value(config));
    }
    throw std::invalid_argument("unknown constant kind");
}

} // namespace qmtbdd
