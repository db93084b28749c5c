#pragma once

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace vo2osc::test {

/// Purely relative tolerance; doctest::Approx also adds an absolute slack of `eps`,
/// which swamps quantities far below unity.
struct Rel {
    double value;
    double eps;
};

inline Rel rel(double value, double eps) { return {value, eps}; }

inline bool operator==(double x, const Rel& r) {
    return std::abs(x - r.value) <= r.eps * std::max(std::abs(x), std::abs(r.value));
}

}  // namespace vo2osc::test

template <>
struct doctest::StringMaker<vo2osc::test::Rel> {
    static String convert(const vo2osc::test::Rel& r) {
        std::ostringstream os;
        os.precision(9);
        os << r.value << " (rel " << r.eps << ")";
        return os.str().c_str();
    }
};
