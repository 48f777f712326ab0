#pragma once

#include <compare>
#include <limits>
#include <stdexcept>

namespace cmfg {

/**
 * Real number extended by +infinity.
 *
 * Used for quantities that are +inf outside the admissible set (kinetic
 * cost of moving mass that is not there). Infinity is absorbing under
 * addition and compares greater than every finite value. Only finite values
 * may be subtracted, so the undefined form inf - inf cannot arise.
 */
class ExtendedReal {
public:
    constexpr ExtendedReal() noexcept = default;
    constexpr ExtendedReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
        if (v != v) throw std::domain_error("ExtendedReal: NaN");
        if (v == -std::numeric_limits<double>::infinity()) throw std::domain_error("ExtendedReal: -inf");
    }

    static constexpr ExtendedReal infinity() noexcept { return ExtendedReal(Tag{}); }

    constexpr bool is_infinite() const noexcept { return v_ == std::numeric_limits<double>::infinity(); }
    constexpr bool is_finite() const noexcept { return !is_infinite(); }

    /// Finite value; throws on infinity.
    double value() const {
        if (is_infinite()) throw std::domain_error("ExtendedReal::value: value is +infinity");
        return v_;
    }
    /// Raw double (+inf for the infinite value).
    constexpr double raw() const noexcept { return v_; }

    constexpr ExtendedReal& operator+=(ExtendedReal o) noexcept {
        v_ += o.v_;
        return *this;
    }
    friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) noexcept { return a += b; }
    friend constexpr ExtendedReal operator-(ExtendedReal a, double b) { return ExtendedReal(a.v_ - b); }
    /// Scaling by a nonnegative factor; 0 * inf is defined as +inf.
    friend ExtendedReal operator*(double s, ExtendedReal a) {
        if (s < 0) throw std::domain_error("ExtendedReal: negative scale");
        if (a.is_infinite()) return a;
        return ExtendedReal(s * a.v_);
    }

    friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) noexcept { return a.v_ <=> b.v_; }
    friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) noexcept { return a.v_ == b.v_; }

private:
    struct Tag {};
    constexpr explicit ExtendedReal(Tag) noexcept : v_(std::numeric_limits<double>::infinity()) {}
    double v_ = 0.0;
};

}  // namespace cmfg
