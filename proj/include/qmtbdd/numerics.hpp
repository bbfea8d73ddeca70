#pragma once

// Configurable-precision binary floating point (round-to-nearest-even) on top
// of MPFR, plus complex values built from the real primitives.

#include <cstddef>
#include <cstdint> // before mpfr.h: enables the intmax_t conversions

#include <mpfr.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace qmtbdd {

/// Raised when a result leaves the exponent range or is not finite.
class NumericRangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Raised when operands of a primitive carry different precisions.
class PrecisionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PrecConfig {
public:
    static constexpr int kMinBits = 2;
    static constexpr int kMaxBits = 256;

    /// Throws std::invalid_argument when bits is outside [kMinBits, kMaxBits].
    explicit PrecConfig(int bits);

    int bits() const noexcept { return bits_; }

    /// Unit roundoff 2^-bits.
    double unit_roundoff() const noexcept;

    bool operator==(const PrecConfig&) const = default;

private:
    int bits_;
};

/// A real number with at most `bits` significand bits. Storage is inline, so
/// values are cheap to copy and never touch the heap.
class PrecValue {
public:
    explicit PrecValue(PrecConfig config);
    PrecValue(const PrecValue& other);
    PrecValue& operator=(const PrecValue& other);
    ~PrecValue() = default;

    /// Correctly rounded conversions.
    static PrecValue from_double(PrecConfig config, double x);
    static PrecValue from_decimal(PrecConfig config, std::string_view literal);
    static PrecValue from_raw(PrecConfig config, mpfr_srcptr x);

    PrecConfig config() const noexcept { return PrecConfig(static_cast<int>(mpfr_get_prec(&value_))); }
    int bits() const noexcept { return static_cast<int>(mpfr_get_prec(&value_)); }

    mpfr_srcptr raw() const noexcept { return &value_; }

    double to_double() const;
    /// Shortest decimal string that reads back to this exact value at bits().
    std::string to_string() const;

    bool is_zero() const noexcept { return mpfr_zero_p(&value_) != 0; }
    int sign() const noexcept { return mpfr_sgn(&value_); }

    /// Hash of the numeric value; +0 and -0 hash alike.
    std::size_t hash() const noexcept;

    /// Numeric equality; precision is not compared.
    friend bool operator==(const PrecValue& a, const PrecValue& b) noexcept
    {
        return mpfr_equal_p(a.raw(), b.raw()) != 0;
    }

private:
    friend class Rounder;
    mpfr_ptr mut() noexcept { return &value_; }

    static constexpr int kMaxLimbs = (PrecConfig::kMaxBits + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;

    mp_limb_t limbs_[kMaxLimbs];
    __mpfr_struct value_;
};

/// Nearest value with config.bits() significand bits, ties to even.
/// Exact when x already fits.
PrecValue round_to(PrecConfig config, const PrecValue& x);
PrecValue round_to(PrecConfig config, mpfr_srcptr x);

PrecValue add(const PrecValue& a, const PrecValue& b);
PrecValue sub(const PrecValue& a, const PrecValue& b);
PrecValue mul(const PrecValue& a, const PrecValue& b);
PrecValue div(const PrecValue& a, const PrecValue& b);
PrecValue neg(const PrecValue& a);
/// Exact scaling by 2^e.
PrecValue scale2(const PrecValue& a, long e);

inline PrecValue operator+(const PrecValue& a, const PrecValue& b) { return add(a, b); }
inline PrecValue operator-(const PrecValue& a, const PrecValue& b) { return sub(a, b); }
inline PrecValue operator*(const PrecValue& a, const PrecValue& b) { return mul(a, b); }
inline PrecValue operator/(const PrecValue& a, const PrecValue& b) { return div(a, b); }
inline PrecValue operator-(const PrecValue& a) { return neg(a); }

struct PrecComplex {
    PrecValue re;
    PrecValue im;

    explicit PrecComplex(PrecConfig config) : re(config), im(config) {}
    /// Throws PrecisionMismatch when the parts disagree on precision.
    PrecComplex(PrecValue real, PrecValue imag);

    static PrecComplex from_doubles(PrecConfig config, double real, double imag = 0.0);

    PrecConfig config() const noexcept { return re.config(); }
    bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }
    std::size_t hash() const noexcept;
    std::string to_string() const;

    friend bool operator==(const PrecComplex& a, const PrecComplex& b) noexcept
    {
        return a.re == b.re && a.im == b.im;
    }
};

PrecComplex round_to(PrecConfig config, const PrecComplex& z);

/// Two real additions.
PrecComplex cadd(const PrecComplex& a, const PrecComplex& b);
PrecComplex csub(const PrecComplex& a, const PrecComplex& b);
/// Four real multiplications and two real additions, each rounded:
/// re = ar*br - ai*bi, im = ar*bi + ai*br.
PrecComplex cmul(const PrecComplex& a, const PrecComplex& b);
PrecComplex cneg(const PrecComplex& a);

inline PrecComplex operator+(const PrecComplex& a, const PrecComplex& b) { return cadd(a, b); }
inline PrecComplex operator-(const PrecComplex& a, const PrecComplex& b) { return csub(a, b); }
inline PrecComplex operator*(const PrecComplex& a, const PrecComplex& b) { return cmul(a, b); }

/// |a - b| (complex modulus) evaluated with enough working precision that the
/// returned double is the correctly rounded distance up to one double ulp.
double distance(const PrecComplex& a, const PrecComplex& b);

/// True only if |a - b| <= delta holds exactly. The test rounds toward
/// rejection, so a pair reported as within is never farther than delta.
bool within(const PrecComplex& a, const PrecComplex& b, double delta);

/// Modulus |z| as a double.
double modulus(const PrecComplex& z);

// ---------------------------------------------------------------------------
// Angles and gate constants

/// A rotation angle as written in a circuit: either +-pi/d for a positive
/// integer d, or a decimal literal kept verbatim.
class Angle {
public:
    struct PiFraction {
        bool negative = false;
        std::uint64_t denominator = 1;
        bool operator==(const PiFraction&) const = default;
    };
    struct Decimal {
        std::string literal;
        bool operator==(const Decimal&) const = default;
    };

    Angle() : repr_(Decimal{"0"}) {}

    static Angle pi_over(std::uint64_t denominator, bool negative = false);
    /// Throws std::invalid_argument when the literal is not a decimal number.
    static Angle decimal(std::string literal);
    /// Accepts a decimal literal, `[-]pi/<int>` or `[-]pi/2^<int>`.
    static Angle parse(std::string_view text);

    bool is_pi_fraction() const noexcept { return std::holds_alternative<PiFraction>(repr_); }
    const std::variant<PiFraction, Decimal>& repr() const noexcept { return repr_; }

    std::string to_string() const;

    /// The angle rounded first to max(128, bits) bits and then to config.
    PrecValue value(PrecConfig config) const;

    bool operator==(const Angle&) const = default;

private:
    explicit Angle(std::variant<PiFraction, Decimal> r) : repr_(std::move(r)) {}
    std::variant<PiFraction, Decimal> repr_;
};

/// Correctly rounded functions of an already rounded argument; the result has
/// the argument's precision.
PrecValue cos_of(const PrecValue& theta);
PrecValue sin_of(const PrecValue& theta);
/// (cos theta, sin theta).
PrecComplex exp_i(const PrecValue& theta);
/// Correctly rounded 1/sqrt(2).
PrecValue sqrt_half(PrecConfig config);

enum class ConstantKind { SqrtHalf, Cos, Sin, ExpI };

/// Gate constant at config precision. The angle is rounded to config before
/// the function is applied, so cos(pi/4) and sqrt_half may differ by an ulp.
/// Both are within 1 ulp of the true value.
PrecComplex constant(ConstantKind kind, const Angle& theta, PrecConfig config);

} // namespace qmtbdd
