#pragma once
#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <random>
#include <string>

#include "errors.hpp"

namespace saguaro {

// Exact rationals. mpq_rational keeps everything exact; speed is fine at desk scale.
struct RationalField {
    using Elem = boost::multiprecision::mpq_rational;

    static constexpr bool is_prime_field = false;

    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    Elem from_long(long n) const { return Elem(n); }
    Elem from_ratio(long num, long den) const {
        if (den == 0)
            throw input_error("rational scalar with zero denominator");
        return Elem(num) / Elem(den);
    }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const {
        if (a == 0)
            throw internal_error("division by zero");
        return Elem(1) / a;
    }
    bool is_zero(const Elem& a) const { return a == 0; }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    bool is_one(const Elem& a) const { return a == 1; }

    // Small random scalars; decompose() wants generic but cheap endomorphism mixes.
    Elem random(std::mt19937_64& rng) const {
        std::uniform_int_distribution<int> d(-4, 4);
        return Elem(d(rng));
    }
    Elem random_nonzero(std::mt19937_64& rng) const {
        std::uniform_int_distribution<int> d(1, 5);
        int s = (rng() & 1) ? 1 : -1;
        return Elem(s * d(rng));
    }
    std::string str(const Elem& a) const { return a.str(); }
    std::size_t element_count() const { return 0; } // infinite
    std::string name() const { return "Q"; }
};

// F_p with runtime prime p < 2^31. Elements are canonical residues in [0, p).
struct PrimeField {
    using Elem = std::uint64_t;

    static constexpr bool is_prime_field = true;
    std::uint64_t p = 2;

    PrimeField() = default;
    explicit PrimeField(std::uint64_t prime) : p(prime) {
        if (p < 2 || p >= (1ull << 31) || !probable_prime(p))
            throw input_error("field modulus must be a prime < 2^31, got " + std::to_string(p));
    }

    static bool probable_prime(std::uint64_t n) {
        if (n < 2)
            return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0)
                return false;
        return true;
    }

    Elem zero() const { return 0; }
    Elem one() const { return 1 % p; }
    Elem from_long(long n) const {
        long long r = n % static_cast<long long>(p);
        if (r < 0)
            r += static_cast<long long>(p);
        return static_cast<Elem>(r);
    }
    Elem from_ratio(long num, long den) const { return mul(from_long(num), inv(from_long(den))); }
    Elem add(Elem a, Elem b) const {
        Elem s = a + b;
        return s >= p ? s - p : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
    Elem mul(Elem a, Elem b) const { return (a * b) % p; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem inv(Elem a) const {
        if (a == 0)
            throw internal_error("division by zero in F_p");
        // Extended Euclid.
        long long t = 0, newt = 1;
        long long r = static_cast<long long>(p), newr = static_cast<long long>(a);
        while (newr != 0) {
            long long q = r / newr;
            t -= q * newt;
            std::swap(t, newt);
            r -= q * newr;
            std::swap(r, newr);
        }
        if (t < 0)
            t += static_cast<long long>(p);
        return static_cast<Elem>(t);
    }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    bool is_one(Elem a) const { return a == 1 % p; }

    Elem random(std::mt19937_64& rng) const {
        std::uniform_int_distribution<std::uint64_t> d(0, p - 1);
        return d(rng);
    }
    Elem random_nonzero(std::mt19937_64& rng) const {
        std::uniform_int_distribution<std::uint64_t> d(1, p - 1);
        return d(rng);
    }
    std::string str(Elem a) const { return std::to_string(a); }
    std::size_t element_count() const { return static_cast<std::size_t>(p); }
    std::string name() const { return "F" + std::to_string(p); }
};

// Runtime field selection for the CLI: "q" or "fp:P".
struct FieldConfig {
    bool rational = true;
    std::uint64_t p = 0;

    static FieldConfig parse(const std::string& s) {
        FieldConfig c;
        if (s == "q" || s == "Q") {
            c.rational = true;
            return c;
        }
        if (s.rfind("fp:", 0) == 0) {
            c.rational = false;
            c.p = std::stoull(s.substr(3));
            PrimeField check(c.p); // validates primality
            return c;
        }
        throw input_error("bad --field value '" + s + "' (expected q or fp:P)");
    }
};

} // namespace saguaro
