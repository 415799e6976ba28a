#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace edcode {

// Exact non-negative rational with a distinguished +infinity (den == 0,
// num > 0). Values stay tiny (numerators/denominators bounded by string
// lengths), so cross multiplication in int64 never overflows.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Ratio() = default;
    constexpr Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {}

    static constexpr Ratio infinity() { return Ratio{1, 0}; }
    static constexpr Ratio zero() { return Ratio{0, 1}; }

    constexpr bool is_infinite() const { return den == 0; }

    friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
        if (a.is_infinite() || b.is_infinite())
            return a.is_infinite() && b.is_infinite();
        return a.num * b.den == b.num * a.den;
    }

    friend constexpr bool operator<(const Ratio& a, const Ratio& b) {
        if (a.is_infinite()) return false;
        if (b.is_infinite()) return true;
        return a.num * b.den < b.num * a.den;
    }
    friend constexpr bool operator<=(const Ratio& a, const Ratio& b) {
        return a < b || a == b;
    }
    friend constexpr bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend constexpr bool operator>=(const Ratio& a, const Ratio& b) { return b <= a; }

    Ratio reduced() const {
        if (is_infinite()) return infinity();
        if (num == 0) return zero();
        std::int64_t g = std::gcd(num, den);
        return Ratio{num / g, den / g};
    }

    double to_double() const {
        if (is_infinite()) return 1e300;
        return static_cast<double>(num) / static_cast<double>(den);
    }

    std::string str() const {
        if (is_infinite()) return "inf";
        Ratio r = reduced();
        if (r.den == 1) return std::to_string(r.num);
        return std::to_string(r.num) + "/" + std::to_string(r.den);
    }
};

inline Ratio max(const Ratio& a, const Ratio& b) { return a < b ? b : a; }
inline Ratio min(const Ratio& a, const Ratio& b) { return a < b ? a : b; }

} // namespace edcode
