#pragma once

// Implicit functions f: R^n -> R (n = 1, 2, 3) built from algebraic
// primitives and R-function set operations, plus the scene description that
// pairs an expression with its computational domain.

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redist {

enum class NodeKind {
    constant,
    coordinate,
    add,
    sub,
    mul,
    neg,
    square,
    sqrt,
    r_intersect,
    r_union,
};

/// Immutable expression tree. Sub-trees may be shared between parents.
class Expr {
public:
    struct Node {
        NodeKind kind = NodeKind::constant;
        double value = 0.0;  // constant
        int axis = 0;        // coordinate
        std::vector<Expr> children;
    };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v);
    static Expr coordinate(int axis);
    static Expr make(NodeKind kind, std::vector<Expr> children);

    NodeKind kind() const { return node_->kind; }
    double value() const { return node_->value; }
    int axis() const { return node_->axis; }
    const std::vector<Expr>& children() const { return node_->children; }

    /// Highest coordinate index referenced plus one (0 for constant trees).
    int arity() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr square(const Expr& a);
Expr sqrt(const Expr& a);
/// R-conjunction a + b - sqrt(a^2 + b^2): positive iff both a and b are.
Expr r_intersect(const Expr& a, const Expr& b);
/// R-disjunction a + b + sqrt(a^2 + b^2): positive iff either is.
Expr r_union(const Expr& a, const Expr& b);

/// Evaluates the tree with any scalar type supporting +, -, *, unary minus and
/// sqrt (plain doubles, Dual1/Dual2, tape-tracked values).
template <class S>
S eval(const Expr& e, std::span<const S> x)
{
    using std::sqrt;
    switch (e.kind()) {
    case NodeKind::constant:
        return S(e.value());
    case NodeKind::coordinate:
        return x[e.axis()];
    case NodeKind::add:
        return eval(e.children()[0], x) + eval(e.children()[1], x);
    case NodeKind::sub:
        return eval(e.children()[0], x) - eval(e.children()[1], x);
    case NodeKind::mul:
        return eval(e.children()[0], x) * eval(e.children()[1], x);
    case NodeKind::neg:
        return -eval(e.children()[0], x);
    case NodeKind::square: {
        const S a = eval(e.children()[0], x);
        return a * a;
    }
    case NodeKind::sqrt:
        return sqrt(eval(e.children()[0], x));
    case NodeKind::r_intersect:
    case NodeKind::r_union: {
        const S a = eval(e.children()[0], x);
        const S b = eval(e.children()[1], x);
        const S root = sqrt(a * a + b * b);
        return e.kind() == NodeKind::r_intersect ? (a + b) - root : (a + b) + root;
    }
    }
    return S(0.0);
}

/// Axis-aligned box; only the first dim entries are meaningful.
struct Box {
    int dim = 1;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    bool contains(const std::array<double, 3>& p) const;
    double volume() const;
};

struct Scene {
    std::string name;
    int dim = 1;
    Expr expr;
    Box domain;

    /// Plain evaluation at a point (unused trailing coordinates ignored).
    double f(const std::array<double, 3>& p) const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses the scene DSL:
///   # comment
///   dim 2;
///   domain [-2,2]x[-2,2];
///   f = 1 - x^2 - y^2;
Scene parse_scene(std::string_view text, std::string name = "custom");
Expr parse_expr(std::string_view text, int dim);

/// Canonical text; parse(print(s)) reproduces s exactly.
std::string to_string(const Expr& e);
std::string to_string(const Scene& s);

/// segment1d, circle2d or csg3d. Throws std::invalid_argument otherwise.
Scene builtin_scene(std::string_view name);
std::vector<std::string> builtin_names();

/// Points where the scene's f evaluates to exactly zero in floating point.
/// Empty for scenes without such known points.
std::vector<std::array<double, 3>> exact_zero_points(const Scene& scene);

}  // namespace redist
