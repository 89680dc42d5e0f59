#pragma once

// Scalar reverse-mode tape. Every operation on active Var values appends one
// node holding at most two parent links with their local partial derivatives.
// Passive values (id < 0) never touch the tape.

#include <cstddef>
#include <span>
#include <vector>

namespace redist {

class Tape;

struct Var {
    double v = 0.0;
    int id = -1;
    Tape* tape = nullptr;

    Var() = default;
    Var(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

    bool active() const { return id >= 0; }
};

class Tape {
public:
    /// Registers a differentiable leaf. Parameters are reported by backward()
    /// in registration order.
    Var parameter(double value);

    Var push(double value, const Var& a, double da);
    Var push(double value, const Var& a, double da, const Var& b, double db);

    /// Adjoint sweep from root. Returns d(root)/d(parameter_k) for every
    /// registered parameter; nodes are visited once, in reverse append order.
    std::vector<double> backward(const Var& root) const;

    std::size_t size() const { return nodes_.size(); }
    std::size_t parameter_count() const { return params_.size(); }
    void clear();

private:
    struct Node {
        int a = -1;
        int b = -1;
        double da = 0.0;
        double db = 0.0;
    };

    std::vector<Node> nodes_;
    std::vector<int> params_;
};

/// Registers every value as a parameter on tape and returns the tracked copies.
std::vector<Var> track(Tape& tape, std::span<const double> values);

// Arithmetic.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var& operator+=(Var& a, const Var& b);
Var& operator-=(Var& a, const Var& b);
Var& operator*=(Var& a, const Var& b);

// Elementary functions.
Var sqrt(const Var& x);
Var exp(const Var& x);
Var tanh(const Var& x);
Var pow(const Var& x, double exponent);
Var softplus(const Var& x, double beta);
Var sigmoid(const Var& x, double beta);

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

}  // namespace redist
