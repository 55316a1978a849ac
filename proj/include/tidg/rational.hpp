#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace tidg {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational, always stored in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : value_(n) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        value_ = boost::multiprecision::cpp_rational(n, d);
    }
    Rational(const BigInt& n, const BigInt& d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        value_ = boost::multiprecision::cpp_rational(n, d);
    }

    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }

    // "p/q", or just "p" when the denominator is 1.
    std::string str() const {
        auto d = denominator();
        if (d == 1) return numerator().str();
        return numerator().str() + "/" + d.str();
    }

    // Accepts "p", "p/q" and decimals such as "0.5" or ".25".
    static Rational parse(std::string_view text) {
        auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
            return s;
        };
        auto digits = [](std::string_view s) {
            if (s.empty()) return false;
            for (char c : s)
                if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            return true;
        };
        text = trim(text);
        bool negative = false;
        if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        Rational r;
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            auto num = trim(text.substr(0, slash));
            auto den = trim(text.substr(slash + 1));
            if (!digits(num) || !digits(den)) throw std::invalid_argument("bad rational: " + std::string(text));
            BigInt d{std::string(den)};
            if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
            r = Rational(BigInt(std::string(num)), d);
        } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
            auto whole = text.substr(0, dot);
            auto frac = text.substr(dot + 1);
            if ((!whole.empty() && !digits(whole)) || (!frac.empty() && !digits(frac)) || (whole.empty() && frac.empty()))
                throw std::invalid_argument("bad decimal: " + std::string(text));
            BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
            BigInt num = whole.empty() ? BigInt(0) : BigInt(std::string(whole));
            num = num * scale + (frac.empty() ? BigInt(0) : BigInt(std::string(frac)));
            r = Rational(num, scale);
        } else {
            if (!digits(text)) throw std::invalid_argument("bad rational: " + std::string(text));
            r = Rational(BigInt(std::string(text)), BigInt(1));
        }
        if (negative) r = -r;
        return r;
    }

    static Rational pow2_inverse(unsigned m) { return Rational(BigInt(1), BigInt(1) << m); }

    Rational operator-() const { Rational r; r.value_ = -value_; return r; }
    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("division by zero");
        value_ /= o.value_;
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    boost::multiprecision::cpp_rational value_{0};
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace tidg
