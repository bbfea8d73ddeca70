#pragma once

#include <mpfr.h>

namespace qmtbdd::detail {

// Heap-backed MPFR temporary for working precisions above the value range.
class Scratch {
public:
    explicit Scratch(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;
    ~Scratch() { mpfr_clear(v_); }

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }
    operator mpfr_ptr() noexcept { return v_; }
    operator mpfr_srcptr() const noexcept { return v_; }

private:
    mpfr_t v_;
};

} // namespace qmtbdd::detail
