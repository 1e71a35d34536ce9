#include "specshape/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "specshape/errors.hpp"

namespace specshape {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr int kMaxPanels = 4000;

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// One 7/15 panel. Boost reports the error of the panel mapped onto [-1, 1] without the
// Jacobian, so the refinement is driven here with the error rescaled to [a, b].
Panel panel(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err * 0.5 * (b - a)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol) {
    if (a == b) return {};
    if (!(a < b)) throw ValidationError("integrate: lower limit must not exceed upper limit");

    // Global refinement: always bisect the panel with the largest error estimate.
    std::priority_queue<Panel> panels;
    panels.push(panel(f, a, b));
    QuadratureResult res{panels.top().value, panels.top().error};
    auto done = [&] {
        return res.error <= std::max(tol.absolute, 0.5 * tol.relative * std::abs(res.value));
    };
    while (!done() && static_cast<int>(panels.size()) < kMaxPanels) {
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = panel(f, worst.a, mid);
        const Panel right = panel(f, mid, worst.b);
        panels.push(left);
        panels.push(right);
        res.value += left.value + right.value - worst.value;
        res.error += left.error + right.error - worst.error;
    }
    // Re-sum to shed the rounding picked up by the running updates.
    res = {};
    while (!panels.empty()) {
        res.value += panels.top().value;
        res.error += panels.top().error;
        panels.pop();
    }

    if (!std::isfinite(res.value) ||
        res.error > std::max(tol.absolute, tol.relative * std::abs(res.value))) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: value " << res.value
            << ", error estimate " << res.error;
        throw NumericalError(msg.str());
    }
    return res;
}

}  // namespace specshape
