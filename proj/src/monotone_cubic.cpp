#include "polblock/monotone_cubic.hpp"

#include <algorithm>
#include <cmath>

#include "polblock/errors.hpp"

namespace polblock::spectral {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// one-sided three-point end slope with the usual shape-preserving limits
double end_slope(double delta0, double delta1)
{
    double d = 0.5 * (3.0 * delta0 - delta1);
    if (sign(d) != sign(delta0)) return 0.0;
    if (sign(delta0) != sign(delta1) && std::abs(d) > 3.0 * std::abs(delta0)) return 3.0 * delta0;
    return d;
}

} // namespace

MonotoneCubic::MonotoneCubic(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y))
{
    if (y_.size() < 3) throw Error(ErrorKind::domain, "spectral", "interpolant needs at least 3 samples");
    if (!(h_ > 0.0)) throw Error(ErrorKind::domain, "spectral", "interpolant spacing must be > 0");

    const std::size_t n = y_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / h_;

    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double a = delta[i - 1], b = delta[i];
        if (a * b > 0.0) d_[i] = 2.0 * a * b / (a + b);
    }
    d_[0] = end_slope(delta[0], delta[1]);
    d_[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::panel_index(double x) const
{
    const double t = (x - x0_) / h_;
    const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
    return std::min(i, panels() - 1);
}

std::array<double, 4> MonotoneCubic::panel(std::size_t i) const
{
    const double y0 = y_[i], y1 = y_[i + 1];
    const double d0 = d_[i], d1 = d_[i + 1];
    const double delta = (y1 - y0) / h_;
    return {y0, d0, (3.0 * delta - 2.0 * d0 - d1) / h_, (d0 + d1 - 2.0 * delta) / (h_ * h_)};
}

double MonotoneCubic::operator()(double x) const
{
    const std::size_t i = panel_index(x);
    const double s = x - (x0_ + h_ * static_cast<double>(i));
    const auto c = panel(i);
    return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
}

double MonotoneCubic::integral() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < panels(); ++i) {
        sum += 0.5 * h_ * (y_[i] + y_[i + 1]) + h_ * h_ * (d_[i] - d_[i + 1]) / 12.0;
    }
    return sum;
}

double MonotoneCubic::first_moment() const
{
    double sum = 0.0;
    const double h2 = h_ * h_, h3 = h2 * h_, h4 = h3 * h_, h5 = h4 * h_;
    for (std::size_t i = 0; i < panels(); ++i) {
        const auto c = panel(i);
        const double xl = x0_ + h_ * static_cast<double>(i);
        const double m0 = c[0] * h_ + c[1] * h2 / 2.0 + c[2] * h3 / 3.0 + c[3] * h4 / 4.0;
        const double m1 = c[0] * h2 / 2.0 + c[1] * h3 / 3.0 + c[2] * h4 / 4.0 + c[3] * h5 / 5.0;
        sum += xl * m0 + m1;
    }
    return sum;
}

} // namespace polblock::spectral
