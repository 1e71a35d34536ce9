#pragma once

#include <functional>

namespace specshape {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

struct QuadratureTolerance {
    double absolute = 0.0;
    double relative = 1e-9;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Throws NumericalError when the error estimate exceeds
/// max(tol.absolute, tol.relative * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol = {});

}  // namespace specshape
