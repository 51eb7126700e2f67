#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fitt {

/// Base error for everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Residue arithmetic in Z/p^N. The modulus must stay below 2^31 so that
/// products of two residues fit in 64 bits.
struct Modulus {
    std::uint64_t p = 3;
    int N = 1;
    std::uint64_t q = 3;

    Modulus() = default;
    Modulus(std::uint64_t prime, int precision) : p(prime), N(precision), q(1) {
        if (prime < 2) throw Error("modulus: p must be at least 2");
        if (precision < 1) throw Error("modulus: coefficient precision must be >= 1");
        for (int i = 0; i < precision; ++i) {
            q *= prime;
            if (q >= (std::uint64_t{1} << 31)) throw Error("modulus: p^N exceeds 2^31");
        }
    }

    std::uint64_t reduce(std::int64_t x) const {
        std::int64_t r = x % static_cast<std::int64_t>(q);
        return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
    }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= q ? s - q : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + q - b; }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : q - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % q; }

    /// p-adic valuation of a residue; N for zero.
    int valuation(std::uint64_t a) const {
        if (a == 0) return N;
        int v = 0;
        while (a % p == 0) {
            a /= p;
            ++v;
        }
        return v;
    }

    std::uint64_t power_of_p(int k) const {
        std::uint64_t r = 1;
        for (int i = 0; i < k; ++i) r *= p;
        return r % q;
    }

    bool is_unit(std::uint64_t a) const { return a % p != 0; }

    std::uint64_t inverse(std::uint64_t a) const {
        if (!is_unit(a)) throw Error("modulus: inverse of a non-unit residue");
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = static_cast<std::int64_t>(q), new_r = static_cast<std::int64_t>(a % q);
        while (new_r != 0) {
            std::int64_t quo = r / new_r;
            std::int64_t tmp = t - quo * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - quo * new_r;
            r = new_r;
            new_r = tmp;
        }
        return reduce(t);
    }

    /// Symmetric representative in (-q/2, q/2].
    std::int64_t signed_value(std::uint64_t a) const {
        auto s = static_cast<std::int64_t>(a);
        return s > static_cast<std::int64_t>(q / 2) ? s - static_cast<std::int64_t>(q) : s;
    }

    bool operator==(const Modulus& o) const { return p == o.p && N == o.N; }
};

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace fitt
