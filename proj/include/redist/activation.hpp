#pragma once

#include <cmath>

namespace redist {

/// Softplus (1/beta) ln(1 + exp(beta x)), evaluated without overflow:
/// for positive arguments it is x plus the (tiny) correction term.
inline double softplus(double x, double beta)
{
    const double bx = beta * x;
    if (bx > 0.0) {
        return x + std::log1p(std::exp(-bx)) / beta;
    }
    return std::log1p(std::exp(bx)) / beta;
}

/// Derivative of softplus: the logistic function of beta x.
inline double sigmoid(double x, double beta)
{
    const double bx = beta * x;
    if (bx >= 0.0) {
        return 1.0 / (1.0 + std::exp(-bx));
    }
    const double e = std::exp(bx);
    return e / (1.0 + e);
}

}  // namespace redist
