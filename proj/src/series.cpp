#include "sfcy/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfcy {

Series Series::constant(cplx value, std::size_t length) {
    Series s(length);
    if (length > 0) s[0] = value;
    return s;
}

Series Series::identity(std::size_t length) {
    Series s(length);
    if (length > 1) s[1] = 1.0;
    return s;
}

cplx Series::operator()(cplx z) const {
    cplx acc{0.0, 0.0};
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

cplx Series::derivative_at(cplx z) const {
    cplx acc{0.0, 0.0};
    for (std::size_t i = c_.size(); i-- > 1;) acc = acc * z + c_[i] * double(i);
    return acc;
}

cplx Series::second_derivative_at(cplx z) const {
    cplx acc{0.0, 0.0};
    for (std::size_t i = c_.size(); i-- > 2;) acc = acc * z + c_[i] * double(i * (i - 1));
    return acc;
}

Series Series::truncated(std::size_t length) const {
    Series s(length);
    for (std::size_t i = 0; i < std::min(length, c_.size()); ++i) s[i] = c_[i];
    return s;
}

Series Series::derivative() const {
    Series d(c_.size());
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * double(i);
    return d;
}

Series Series::integral() const {
    Series r(c_.size());
    for (std::size_t i = 1; i < c_.size(); ++i) r[i] = c_[i - 1] / double(i);
    return r;
}

Series Series::operator+(const Series& o) const {
    const std::size_t n = std::min(size(), o.size());
    Series r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = c_[i] + o[i];
    return r;
}

Series Series::operator-(const Series& o) const {
    const std::size_t n = std::min(size(), o.size());
    Series r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = c_[i] - o[i];
    return r;
}

Series Series::operator-() const {
    Series r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = -c_[i];
    return r;
}

Series Series::operator*(const Series& o) const {
    const std::size_t n = std::min(size(), o.size());
    Series r(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (c_[i] == cplx{}) continue;
        for (std::size_t j = 0; i + j < n; ++j) r[i + j] += c_[i] * o[j];
    }
    return r;
}

Series Series::operator*(cplx s) const {
    Series r(*this);
    for (auto& v : r.c_) v *= s;
    return r;
}

Series Series::reciprocal() const {
    if (c_.empty() || c_[0] == cplx{}) throw std::domain_error("Series::reciprocal: zero constant term");
    const std::size_t n = size();
    Series r(n);
    r[0] = 1.0 / c_[0];
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc{};
        for (std::size_t j = 1; j <= k; ++j) acc += c_[j] * r[k - j];
        r[k] = -acc / c_[0];
    }
    return r;
}

Series Series::pow_unit(double p) const {
    if (c_.empty()) return {};
    if (std::abs(c_[0] - 1.0) > 1e-12) throw std::domain_error("Series::pow_unit: constant term must be 1");
    const std::size_t n = size();
    Series r(n);
    r[0] = 1.0;
    // k r_k = sum_{j=1}^{k} ((p+1) j - k) a_j r_{k-j}
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc{};
        for (std::size_t j = 1; j <= k; ++j) acc += ((p + 1.0) * double(j) - double(k)) * c_[j] * r[k - j];
        r[k] = acc / double(k);
    }
    return r;
}

Series Series::compose(const Series& g) const {
    if (g.size() > 0 && std::abs(g[0]) > 0.0) throw std::domain_error("Series::compose: inner series must vanish at 0");
    const std::size_t n = std::min(size(), g.size());
    Series r(n);
    Series power = Series::constant(1.0, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) r[i] += c_[k] * power[i];
        power = power * g;
    }
    return r;
}

Series Series::reversion() const {
    const std::size_t n = size();
    if (n < 2 || std::abs(c_[0]) > 0.0 || c_[1] == cplx{})
        throw std::domain_error("Series::reversion: need s(0)=0, s'(0)!=0");
    // Fixed point r = (w - sum_{k>=2} a_k r^k) / a_1, one correct order per sweep.
    Series w = Series::identity(n);
    Series r = w * (1.0 / c_[1]);
    Series higher(*this);
    higher[0] = 0.0;
    higher[1] = 0.0;
    for (std::size_t sweep = 2; sweep < n; ++sweep) r = (w - higher.compose(r)) * (1.0 / c_[1]);
    return r;
}

double Series::radius_estimate() const {
    // Fit over the upper half of the coefficients, ignoring exact zeros.
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = size();
    for (std::size_t k = std::max<std::size_t>(2, n / 2); k < n; ++k) {
        const double a = std::abs(c_[k]);
        if (a < 1e-300) continue;
        best = std::min(best, std::pow(a, -1.0 / double(k)));
    }
    return best;
}

}  // namespace sfcy
