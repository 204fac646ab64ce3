#pragma once

// Matrix exponential by scaling-and-squaring with diagonal Pade
// approximants, order selected from the 1-norm (Higham's constants).

#include "impsync/mat.hpp"
#include "impsync/solve.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace impsync {

namespace detail {

inline Mat pade_low_order(const Mat& a, const std::vector<double>& b) {
    // orders 3/5/7/9: U = A (b1 I + b3 A2 + ...), V = b0 I + b2 A2 + ...
    const std::size_t n = a.rows();
    const Mat a2 = a * a;
    std::vector<Mat> even; // I, A2, A4, ...
    even.push_back(Mat::identity(n));
    for (std::size_t k = 2; k + 1 < b.size(); k += 2) even.push_back(even.back() * a2);

    Mat usum(n, n), v(n, n);
    for (std::size_t k = 0; k < even.size(); ++k) {
        usum += b[2 * k + 1] * even[k];
        v += b[2 * k] * even[k];
    }
    const Mat u = a * usum;
    return solve(v - u, v + u);
}

inline Mat pade13(const Mat& a) {
    static const std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const std::size_t n = a.rows();
    const Mat id = Mat::identity(n);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a4 * a2;
    const Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                       b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                  b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return solve(v - u, v + u);
}

} // namespace detail

/// e^m for square m.
inline Mat expm(const Mat& m) {
    if (!m.square()) throw dimension_error("expm: matrix must be square");
    const double nrm = m.one_norm();

    // order thresholds theta_3, theta_5, theta_7, theta_9
    if (nrm <= 1.495585217958292e-2)
        return detail::pade_low_order(m, {120.0, 60.0, 12.0, 1.0});
    if (nrm <= 2.539398330063230e-1)
        return detail::pade_low_order(m, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
    if (nrm <= 9.504178996162932e-1)
        return detail::pade_low_order(
            m, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0});
    if (nrm <= 2.097847961257068)
        return detail::pade_low_order(m, {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                          30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});

    constexpr double theta13 = 5.371920351148152;
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Mat scaled = m;
    if (s > 0) scaled *= cxd(std::ldexp(1.0, -s), 0.0);
    Mat x = detail::pade13(scaled);
    for (int k = 0; k < s; ++k) x = x * x;
    return x;
}

} // namespace impsync
