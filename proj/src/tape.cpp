#include "redist/tape.hpp"

#include "redist/activation.hpp"

#include <cassert>
#include <cmath>

namespace redist {

namespace {

Tape* tape_of(const Var& a, const Var& b)
{
    assert(!(a.active() && b.active() && a.tape != b.tape));
    return a.active() ? a.tape : b.tape;
}

Var unary(const Var& x, double value, double derivative)
{
    if (!x.active()) {
        return Var{value};
    }
    return x.tape->push(value, x, derivative);
}

}  // namespace

Var Tape::parameter(double value)
{
    Var out{value};
    out.id = static_cast<int>(nodes_.size());
    out.tape = this;
    nodes_.push_back(Node{});
    params_.push_back(out.id);
    return out;
}

Var Tape::push(double value, const Var& a, double da)
{
    Var out{value};
    out.id = static_cast<int>(nodes_.size());
    out.tape = this;
    nodes_.push_back(Node{a.id, -1, da, 0.0});
    return out;
}

Var Tape::push(double value, const Var& a, double da, const Var& b, double db)
{
    if (!a.active()) {
        return push(value, b, db);
    }
    if (!b.active()) {
        return push(value, a, da);
    }
    Var out{value};
    out.id = static_cast<int>(nodes_.size());
    out.tape = this;
    nodes_.push_back(Node{a.id, b.id, da, db});
    return out;
}

std::vector<double> Tape::backward(const Var& root) const
{
    std::vector<double> grad(params_.size(), 0.0);
    if (!root.active()) {
        return grad;
    }
    assert(root.tape == this);
    std::vector<double> adjoint(static_cast<std::size_t>(root.id) + 1, 0.0);
    adjoint[root.id] = 1.0;
    for (int i = root.id; i >= 0; --i) {
        const double w = adjoint[i];
        if (w == 0.0) {
            continue;
        }
        const Node& n = nodes_[i];
        if (n.a >= 0) {
            adjoint[n.a] += w * n.da;
        }
        if (n.b >= 0) {
            adjoint[n.b] += w * n.db;
        }
    }
    for (std::size_t k = 0; k < params_.size(); ++k) {
        if (params_[k] <= root.id) {
            grad[k] = adjoint[params_[k]];
        }
    }
    return grad;
}

void Tape::clear()
{
    nodes_.clear();
    params_.clear();
}

std::vector<Var> track(Tape& tape, std::span<const double> values)
{
    std::vector<Var> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back(tape.parameter(v));
    }
    return out;
}

Var operator+(const Var& a, const Var& b)
{
    const double v = a.v + b.v;
    if (!a.active() && !b.active()) {
        return Var{v};
    }
    return tape_of(a, b)->push(v, a, 1.0, b, 1.0);
}

Var operator-(const Var& a, const Var& b)
{
    const double v = a.v - b.v;
    if (!a.active() && !b.active()) {
        return Var{v};
    }
    return tape_of(a, b)->push(v, a, 1.0, b, -1.0);
}

Var operator*(const Var& a, const Var& b)
{
    const double v = a.v * b.v;
    // A passive zero factor kills the dependence on the other operand.
    if ((!a.active() && (!b.active() || a.v == 0.0)) || (!b.active() && b.v == 0.0)) {
        return Var{v};
    }
    return tape_of(a, b)->push(v, a, b.v, b, a.v);
}

Var operator/(const Var& a, const Var& b)
{
    const double v = a.v / b.v;
    if (!a.active() && !b.active()) {
        return Var{v};
    }
    return tape_of(a, b)->push(v, a, 1.0 / b.v, b, -v / b.v);
}

Var operator-(const Var& a)
{
    return unary(a, -a.v, -1.0);
}

Var& operator+=(Var& a, const Var& b)
{
    a = a + b;
    return a;
}

Var& operator-=(Var& a, const Var& b)
{
    a = a - b;
    return a;
}

Var& operator*=(Var& a, const Var& b)
{
    a = a * b;
    return a;
}

Var sqrt(const Var& x)
{
    const double s = std::sqrt(x.v);
    return unary(x, s, 0.5 / s);
}

Var exp(const Var& x)
{
    const double e = std::exp(x.v);
    return unary(x, e, e);
}

Var tanh(const Var& x)
{
    const double t = std::tanh(x.v);
    return unary(x, t, 1.0 - t * t);
}

Var pow(const Var& x, double exponent)
{
    const double v = std::pow(x.v, exponent);
    return unary(x, v, exponent == 0.0 ? 0.0 : exponent * std::pow(x.v, exponent - 1.0));
}

Var softplus(const Var& x, double beta)
{
    return unary(x, softplus(x.v, beta), sigmoid(x.v, beta));
}

Var sigmoid(const Var& x, double beta)
{
    const double s = sigmoid(x.v, beta);
    return unary(x, s, beta * s * (1.0 - s));
}

}  // namespace redist
