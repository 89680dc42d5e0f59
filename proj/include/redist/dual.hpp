#pragma once

// Forward-mode spatial derivatives. Dual1 carries a value and its gradient,
// Dual2 additionally a full (symmetric) Hessian. The component type T is
// either double or a tape-tracked Var, which gives forward-in-x over
// reverse-in-parameters for losses that contain spatial derivatives.

#include "redist/activation.hpp"
#include "redist/tape.hpp"

#include <array>
#include <cmath>
#include <concepts>
#include <optional>

namespace redist {

template <class T, int N>
struct Dual1 {
    T val{};
    std::array<T, N> grad{};

    Dual1() = default;
    Dual1(double c) : val(c) {}  // NOLINT(google-explicit-constructor)
    template <class U>
        requires(!std::same_as<T, double> && std::same_as<U, T>)
    Dual1(const U& c) : val(c)  // NOLINT(google-explicit-constructor)
    {
    }

    static Dual1 variable(T x, int axis)
    {
        Dual1 d;
        d.val = x;
        d.grad[axis] = T(1.0);
        return d;
    }
};

template <class T, int N>
struct Dual2 {
    T val{};
    std::array<T, N> grad{};
    std::array<T, N * N> hess{};

    Dual2() = default;
    Dual2(double c) : val(c) {}  // NOLINT(google-explicit-constructor)
    template <class U>
        requires(!std::same_as<T, double> && std::same_as<U, T>)
    Dual2(const U& c) : val(c)  // NOLINT(google-explicit-constructor)
    {
    }

    static Dual2 variable(T x, int axis)
    {
        Dual2 d;
        d.val = x;
        d.grad[axis] = T(1.0);
        return d;
    }

    const T& h(int i, int j) const { return hess[i * N + j]; }
};

template <class T, int N>
double value_of(const Dual1<T, N>& x)
{
    return value_of(x.val);
}

template <class T, int N>
double value_of(const Dual2<T, N>& x)
{
    return value_of(x.val);
}

// ---------------------------------------------------------------------------
// Dual1 arithmetic

template <class T, int N>
Dual1<T, N> operator+(const Dual1<T, N>& a, const Dual1<T, N>& b)
{
    Dual1<T, N> r;
    r.val = a.val + b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] + b.grad[i];
    }
    return r;
}

template <class T, int N>
Dual1<T, N> operator-(const Dual1<T, N>& a, const Dual1<T, N>& b)
{
    Dual1<T, N> r;
    r.val = a.val - b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] - b.grad[i];
    }
    return r;
}

template <class T, int N>
Dual1<T, N> operator-(const Dual1<T, N>& a)
{
    Dual1<T, N> r;
    r.val = -a.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = -a.grad[i];
    }
    return r;
}

template <class T, int N>
Dual1<T, N> operator*(const Dual1<T, N>& a, const Dual1<T, N>& b)
{
    Dual1<T, N> r;
    r.val = a.val * b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] * b.val + a.val * b.grad[i];
    }
    return r;
}

template <class T, int N>
Dual1<T, N> operator*(const T& s, const Dual1<T, N>& a)
{
    Dual1<T, N> r;
    r.val = s * a.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = s * a.grad[i];
    }
    return r;
}

template <class T, int N>
    requires(!std::same_as<T, double>)
Dual1<T, N> operator*(double s, const Dual1<T, N>& a)
{
    return T(s) * a;
}

/// Applies a scalar function given its value f0 and derivative f1 at a.val.
template <class T, int N>
Dual1<T, N> chain(const Dual1<T, N>& a, const T& f0, const T& f1)
{
    Dual1<T, N> r;
    r.val = f0;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = f1 * a.grad[i];
    }
    return r;
}

template <class T, int N>
Dual1<T, N> sqrt(const Dual1<T, N>& a)
{
    using std::sqrt;
    const T s = sqrt(a.val);
    return chain(a, s, T(0.5) / s);
}

template <class T, int N>
Dual1<T, N> exp(const Dual1<T, N>& a)
{
    using std::exp;
    const T e = exp(a.val);
    return chain(a, e, e);
}

template <class T, int N>
Dual1<T, N> tanh(const Dual1<T, N>& a)
{
    using std::tanh;
    const T t = tanh(a.val);
    return chain(a, t, T(1.0) - t * t);
}

template <class T, int N>
Dual1<T, N> softplus(const Dual1<T, N>& a, double beta)
{
    return chain(a, softplus(a.val, beta), sigmoid(a.val, beta));
}

// ---------------------------------------------------------------------------
// Dual2 arithmetic

template <class T, int N>
Dual2<T, N> operator+(const Dual2<T, N>& a, const Dual2<T, N>& b)
{
    Dual2<T, N> r;
    r.val = a.val + b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] + b.grad[i];
    }
    for (int k = 0; k < N * N; ++k) {
        r.hess[k] = a.hess[k] + b.hess[k];
    }
    return r;
}

template <class T, int N>
Dual2<T, N> operator-(const Dual2<T, N>& a, const Dual2<T, N>& b)
{
    Dual2<T, N> r;
    r.val = a.val - b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] - b.grad[i];
    }
    for (int k = 0; k < N * N; ++k) {
        r.hess[k] = a.hess[k] - b.hess[k];
    }
    return r;
}

template <class T, int N>
Dual2<T, N> operator-(const Dual2<T, N>& a)
{
    Dual2<T, N> r;
    r.val = -a.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = -a.grad[i];
    }
    for (int k = 0; k < N * N; ++k) {
        r.hess[k] = -a.hess[k];
    }
    return r;
}

template <class T, int N>
Dual2<T, N> operator*(const Dual2<T, N>& a, const Dual2<T, N>& b)
{
    Dual2<T, N> r;
    r.val = a.val * b.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = a.grad[i] * b.val + a.val * b.grad[i];
    }
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const int k = i * N + j;
            r.hess[k] = a.hess[k] * b.val + a.val * b.hess[k]
                + (a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i]);
        }
    }
    return r;
}

template <class T, int N>
Dual2<T, N> operator*(const T& s, const Dual2<T, N>& a)
{
    Dual2<T, N> r;
    r.val = s * a.val;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = s * a.grad[i];
    }
    for (int k = 0; k < N * N; ++k) {
        r.hess[k] = s * a.hess[k];
    }
    return r;
}

template <class T, int N>
    requires(!std::same_as<T, double>)
Dual2<T, N> operator*(double s, const Dual2<T, N>& a)
{
    return T(s) * a;
}

/// Second-order chain rule for a scalar function with value f0 and first and
/// second derivatives f1, f2 at a.val.
template <class T, int N>
Dual2<T, N> chain(const Dual2<T, N>& a, const T& f0, const T& f1, const T& f2)
{
    Dual2<T, N> r;
    r.val = f0;
    for (int i = 0; i < N; ++i) {
        r.grad[i] = f1 * a.grad[i];
    }
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const int k = i * N + j;
            r.hess[k] = f1 * a.hess[k] + f2 * (a.grad[i] * a.grad[j]);
        }
    }
    return r;
}

template <class T, int N>
Dual2<T, N> sqrt(const Dual2<T, N>& a)
{
    using std::sqrt;
    const T s = sqrt(a.val);
    const T d1 = T(0.5) / s;
    return chain(a, s, d1, -(d1 / (T(2.0) * a.val)));
}

template <class T, int N>
Dual2<T, N> exp(const Dual2<T, N>& a)
{
    using std::exp;
    const T e = exp(a.val);
    return chain(a, e, e, e);
}

template <class T, int N>
Dual2<T, N> tanh(const Dual2<T, N>& a)
{
    using std::tanh;
    const T t = tanh(a.val);
    const T d1 = T(1.0) - t * t;
    return chain(a, t, d1, T(-2.0) * t * d1);
}

template <class T, int N>
Dual2<T, N> softplus(const Dual2<T, N>& a, double beta)
{
    const T s = sigmoid(a.val, beta);
    return chain(a, softplus(a.val, beta), s, T(beta) * s * (T(1.0) - s));
}

// ---------------------------------------------------------------------------
// Spatial differential operators

template <int N>
struct Gradient {
    double value = 0.0;
    std::array<double, N> grad{};
};

template <int N>
struct Hessian {
    double value = 0.0;
    std::array<double, N> grad{};
    std::array<double, N * N> hess{};
};

/// Exact value and gradient of field at x. The field is any callable that
/// accepts std::array<S, N> for a generic arithmetic scalar S.
template <int N, class F>
Gradient<N> grad_x(F&& field, const std::array<double, N>& x)
{
    using D = Dual1<double, N>;
    std::array<D, N> p;
    for (int i = 0; i < N; ++i) {
        p[i] = D::variable(x[i], i);
    }
    const D r = field(p);
    return {r.val, r.grad};
}

template <int N, class F>
Hessian<N> hessian_x(F&& field, const std::array<double, N>& x)
{
    using D = Dual2<double, N>;
    std::array<D, N> p;
    for (int i = 0; i < N; ++i) {
        p[i] = D::variable(x[i], i);
    }
    const D r = field(p);
    return {r.val, r.grad, r.hess};
}

/// Below this gradient norm the p-Laplacian (p > 2) is treated as degenerate.
inline constexpr double kGradientGuard = 1e-12;

/// div(|grad u|^(p-2) grad u) expanded as
///   |g|^(p-2) tr(H) + (p-2) |g|^(p-4) g^T H g.
/// Returns nullopt when p > 2 and |grad u| falls below the guard.
template <class T, int N>
std::optional<T> p_laplacian_of(const Dual2<T, N>& u, double p, double guard = kGradientGuard)
{
    using std::pow;
    T trace = u.hess[0];
    for (int i = 1; i < N; ++i) {
        trace = trace + u.hess[i * N + i];
    }
    if (p == 2.0) {
        return trace;
    }
    T norm2 = u.grad[0] * u.grad[0];
    for (int i = 1; i < N; ++i) {
        norm2 = norm2 + u.grad[i] * u.grad[i];
    }
    if (!(std::sqrt(value_of(norm2)) >= guard)) {
        return std::nullopt;
    }
    T quad{};
    for (int i = 0; i < N; ++i) {
        T row{};
        for (int j = 0; j < N; ++j) {
            row = row + u.hess[i * N + j] * u.grad[j];
        }
        quad = quad + u.grad[i] * row;
    }
    return pow(norm2, 0.5 * (p - 2.0)) * trace + T(p - 2.0) * pow(norm2, 0.5 * (p - 4.0)) * quad;
}

template <int N, class F>
std::optional<double> p_laplacian(F&& field, const std::array<double, N>& x, double p)
{
    using D = Dual2<double, N>;
    std::array<D, N> pt;
    for (int i = 0; i < N; ++i) {
        pt[i] = D::variable(x[i], i);
    }
    return p_laplacian_of(field(pt), p);
}

}  // namespace redist
