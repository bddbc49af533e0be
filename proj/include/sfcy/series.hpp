#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sfcy {

using cplx = std::complex<double>;

/// Truncated power series c_0 + c_1 z + ... + c_{n-1} z^{n-1} with complex
/// coefficients. All binary operations truncate to the shorter length.
class Series {
public:
    Series() = default;
    explicit Series(std::size_t length) : c_(length, cplx{0.0, 0.0}) {}
    explicit Series(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}

    static Series constant(cplx value, std::size_t length);
    /// z (identity map) truncated to `length` terms.
    static Series identity(std::size_t length);

    std::size_t size() const { return c_.size(); }
    cplx& operator[](std::size_t i) { return c_[i]; }
    const cplx& operator[](std::size_t i) const { return c_[i]; }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx operator()(cplx z) const;   ///< Horner evaluation
    cplx derivative_at(cplx z) const;
    cplx second_derivative_at(cplx z) const;

    Series truncated(std::size_t length) const;
    Series derivative() const;
    /// Antiderivative vanishing at 0 (drops the top term to keep the length).
    Series integral() const;

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;
    Series operator*(cplx s) const;

    /// 1/s; requires s[0] != 0.
    Series reciprocal() const;
    /// s^p for a series with s[0] == 1 (J.C.P. Miller recurrence).
    Series pow_unit(double p) const;
    /// s∘g, requires g[0] == 0.
    Series compose(const Series& g) const;
    /// Compositional inverse r with s(r(w)) = w; requires s[0] == 0, s[1] != 0.
    Series reversion() const;

    /// Root-test estimate of the radius of convergence from the tail of the
    /// coefficient list (infinity if the tail vanishes).
    double radius_estimate() const;

private:
    std::vector<cplx> c_;
};

}  // namespace sfcy
