#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gpc/errors.hpp"

namespace gpc {

/// Weight function w(t) of one mixture component, e^{w(t) L_a}.
/// Always w(0) = 0 and w(t) >= 0. Derivatives at knots are right-hand;
/// past the last knot or sample the function is held constant.
class WeightFunction {
public:
    enum class Kind { Linear, PiecewiseLinear, Sampled, Analytic };

    static WeightFunction linear(double rate) {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw Error(Errc::InvalidArgument, "linear weight needs rate > 0, got " + std::to_string(rate));
        return WeightFunction(Linear{rate});
    }

    static WeightFunction piecewise_linear(std::vector<std::pair<double, double>> knots) {
        if (knots.size() < 2) throw Error(Errc::InvalidArgument, "piecewise-linear weight needs >= 2 knots");
        if (knots.front().first != 0.0 || knots.front().second != 0.0)
            throw Error(Errc::InvalidArgument, "piecewise-linear weight must start at (0, 0)");
        Piecewise pw;
        for (std::size_t i = 0; i < knots.size(); ++i) {
            const auto [t, w] = knots[i];
            if (!std::isfinite(t) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "non-finite knot");
            if (w < 0.0) throw Error(Errc::InvalidArgument, "weight must be >= 0, knot value " + std::to_string(w));
            if (i > 0 && !(t > pw.t.back())) throw Error(Errc::InvalidArgument, "knot times must increase");
            pw.t.push_back(t);
            pw.w.push_back(w);
        }
        return WeightFunction(std::move(pw));
    }

    /// Monotone cubic Hermite interpolant through (grid, values); the
    /// Fritsch-Butland slopes keep the interpolant within each segment's
    /// range, so nonnegative samples give a nonnegative w(t).
    static WeightFunction sampled(std::vector<double> grid, std::vector<double> values) {
        if (grid.size() != values.size() || grid.size() < 2)
            throw Error(Errc::InvalidArgument, "sampled weight needs >= 2 matching samples");
        if (grid.front() != 0.0 || values.front() != 0.0)
            throw Error(Errc::InvalidArgument, "sampled weight must start at (0, 0)");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
                throw Error(Errc::InvalidArgument, "non-finite sample");
            if (values[i] < 0.0) throw Error(Errc::InvalidArgument, "weight samples must be >= 0");
            if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(Errc::InvalidArgument, "sample times must increase");
        }
        Sampled s{std::move(grid), std::move(values), {}};
        const std::size_t n = s.t.size();
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = s.t[i + 1] - s.t[i];
            delta[i] = (s.w[i + 1] - s.w[i]) / h[i];
        }
        s.slope.assign(n, 0.0);
        s.slope.front() = delta.front();
        s.slope.back() = delta.back();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) continue;
            s.slope[i] = 3.0 * (h[i - 1] + h[i]) /
                         ((2.0 * h[i] + h[i - 1]) / delta[i - 1] + (h[i] + 2.0 * h[i - 1]) / delta[i]);
        }
        return WeightFunction(std::move(s));
    }

    /// Closed-form weight with user-supplied value and derivative.
    static WeightFunction analytic(std::string label, std::function<double(double)> value,
                                   std::function<double(double)> derivative) {
        if (!value || !derivative) throw Error(Errc::InvalidArgument, "analytic weight needs both callables");
        if (std::abs(value(0.0)) > 1e-15) throw Error(Errc::InvalidArgument, "analytic weight must vanish at t = 0");
        return WeightFunction(Analytic{std::move(label), std::move(value), std::move(derivative)});
    }

    Kind kind() const noexcept { return static_cast<Kind>(impl_.index()); }

    double value(double t) const {
        return std::visit([t](const auto& f) { return f.value(t); }, impl_);
    }

    double derivative(double t) const {
        return std::visit([t](const auto& f) { return f.derivative(t); }, impl_);
    }

    /// Linear rate when kind() == Linear.
    double rate() const {
        if (const auto* lin = std::get_if<Linear>(&impl_)) return lin->rate;
        throw Error(Errc::InvalidArgument, "weight function is not linear");
    }

    /// Checks w(t) >= 0 on the given evaluation grid.
    void validate_on(std::span<const double> grid) const {
        for (const double t : grid) {
            const double w = value(t);
            if (!std::isfinite(w) || w < 0.0)
                throw Error(Errc::InvalidArgument, "weight " + describe() + " is negative or non-finite at t = " +
                                                       std::to_string(t));
        }
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        if (const auto* lin = std::get_if<Linear>(&impl_)) {
            os << "linear:" << lin->rate;
        } else if (const auto* pw = std::get_if<Piecewise>(&impl_)) {
            os << "pwl:";
            for (std::size_t i = 0; i < pw->t.size(); ++i) os << (i ? ";" : "") << pw->t[i] << ',' << pw->w[i];
        } else if (const auto* s = std::get_if<Sampled>(&impl_)) {
            os << "sampled:" << s->t.size() << " points";
        } else {
            os << std::get<Analytic>(impl_).label;
        }
        return os.str();
    }

private:
    struct Linear {
        double rate;
        double value(double t) const { return rate * t; }
        double derivative(double) const { return rate; }
    };

    // Index of the segment [t_i, t_{i+1}) holding t; npos past the end.
    static std::size_t segment(const std::vector<double>& knots, double t) {
        if (t >= knots.back()) return static_cast<std::size_t>(-1);
        const auto it = std::upper_bound(knots.begin(), knots.end(), t);
        return static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots.begin() - 1, 0));
    }

    struct Piecewise {
        std::vector<double> t, w;
        double value(double x) const {
            const std::size_t i = segment(t, x);
            if (i == static_cast<std::size_t>(-1)) return w.back();
            return w[i] + (w[i + 1] - w[i]) * (x - t[i]) / (t[i + 1] - t[i]);
        }
        double derivative(double x) const {
            const std::size_t i = segment(t, x);
            if (i == static_cast<std::size_t>(-1)) return 0.0;
            return (w[i + 1] - w[i]) / (t[i + 1] - t[i]);
        }
    };

    struct Sampled {
        std::vector<double> t, w, slope;
        double value(double x) const {
            const std::size_t i = segment(t, x);
            if (i == static_cast<std::size_t>(-1)) return w.back();
            const double h = t[i + 1] - t[i];
            const double s = (x - t[i]) / h;
            const double s2 = s * s, s3 = s2 * s;
            return (2 * s3 - 3 * s2 + 1) * w[i] + (s3 - 2 * s2 + s) * h * slope[i] + (-2 * s3 + 3 * s2) * w[i + 1] +
                   (s3 - s2) * h * slope[i + 1];
        }
        double derivative(double x) const {
            const std::size_t i = segment(t, x);
            if (i == static_cast<std::size_t>(-1)) return 0.0;
            const double h = t[i + 1] - t[i];
            const double s = (x - t[i]) / h;
            const double s2 = s * s;
            return (6 * s2 - 6 * s) / h * w[i] + (3 * s2 - 4 * s + 1) * slope[i] + (-6 * s2 + 6 * s) / h * w[i + 1] +
                   (3 * s2 - 2 * s) * slope[i + 1];
        }
    };

    struct Analytic {
        std::string label;
        std::function<double(double)> w, dw;
        double value(double t) const { return w(t); }
        double derivative(double t) const { return dw(t); }
    };

    using Impl = std::variant<Linear, Piecewise, Sampled, Analytic>;
    explicit WeightFunction(Impl impl) : impl_(std::move(impl)) {}

    Impl impl_;
};

} // namespace gpc
