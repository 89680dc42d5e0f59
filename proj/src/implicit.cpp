#include "redist/implicit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace redist {

// ---------------------------------------------------------------------------
// Construction

Expr Expr::constant(double v)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::coordinate(int axis)
{
    if (axis < 0 || axis > 2) {
        throw std::invalid_argument("coordinate axis out of range: " + std::to_string(axis));
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::coordinate;
    n->axis = axis;
    return Expr(std::move(n));
}

Expr Expr::make(NodeKind kind, std::vector<Expr> children)
{
    std::size_t want = 0;
    switch (kind) {
    case NodeKind::constant:
    case NodeKind::coordinate:
        throw std::invalid_argument("leaf nodes are built with constant()/coordinate()");
    case NodeKind::neg:
    case NodeKind::square:
    case NodeKind::sqrt:
        want = 1;
        break;
    default:
        want = 2;
        break;
    }
    if (children.size() != want) {
        throw std::invalid_argument("wrong number of operands for expression node");
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = std::move(children);
    return Expr(std::move(n));
}

int Expr::arity() const
{
    if (kind() == NodeKind::coordinate) {
        return axis() + 1;
    }
    int a = 0;
    for (const Expr& c : children()) {
        a = std::max(a, c.arity());
    }
    return a;
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case NodeKind::constant:
        return a.value() == b.value();
    case NodeKind::coordinate:
        return a.axis() == b.axis();
    default:
        break;
    }
    return std::equal(a.children().begin(), a.children().end(), b.children().begin(), b.children().end());
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(NodeKind::add, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(NodeKind::sub, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(NodeKind::mul, {a, b}); }
Expr operator-(const Expr& a) { return Expr::make(NodeKind::neg, {a}); }
Expr square(const Expr& a) { return Expr::make(NodeKind::square, {a}); }
Expr sqrt(const Expr& a) { return Expr::make(NodeKind::sqrt, {a}); }
Expr r_intersect(const Expr& a, const Expr& b) { return Expr::make(NodeKind::r_intersect, {a, b}); }
Expr r_union(const Expr& a, const Expr& b) { return Expr::make(NodeKind::r_union, {a, b}); }

bool Box::contains(const std::array<double, 3>& p) const
{
    for (int i = 0; i < dim; ++i) {
        if (p[i] < lo[i] || p[i] > hi[i]) {
            return false;
        }
    }
    return true;
}

double Box::volume() const
{
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
        v *= hi[i] - lo[i];
    }
    return v;
}

double Scene::f(const std::array<double, 3>& p) const
{
    return eval<double>(expr, std::span<const double>(p.data(), 3));
}

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message)
    , line_(line)
    , column_(column)
{
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { number, ident, punct, end };

struct Token {
    Tok type = Tok::end;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) {
                ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
                    ++k;
                }
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                        ++k;
                    }
                    j = k;
                }
            }
            t.type = Tok::number;
            t.text = std::string(src.substr(i, j - i));
            const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
                throw ParseError("malformed number '" + t.text + "'", line, col);
            }
            advance(j - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            t.type = Tok::ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::string_view("+-*^(),;=[]").find(c) != std::string_view::npos) {
            t.type = Tok::punct;
            t.text = std::string(1, c);
            advance(1);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
//
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' '2')?
//   primary := number | x | y | z | '(' expr ')'
//            | sqrt '(' expr ')' | rint '(' expr ',' expr ')' | runion '(' expr ',' expr ')'

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Scene scene(std::string name)
    {
        Scene s;
        s.name = std::move(name);
        bool have_dim = false;
        bool have_domain = false;
        bool have_f = false;
        while (peek().type != Tok::end) {
            const Token& t = peek();
            if (t.type != Tok::ident) {
                fail("expected 'dim', 'domain' or 'f'", t);
            }
            if (t.text == "dim") {
                next();
                const Token& n = next();
                if (n.type != Tok::number || (n.number != 1.0 && n.number != 2.0 && n.number != 3.0)) {
                    fail("dimension must be 1, 2 or 3", n);
                }
                if (have_dim) {
                    fail("duplicate dim declaration", t);
                }
                dim_ = static_cast<int>(n.number);
                s.dim = dim_;
                have_dim = true;
            } else if (t.text == "domain") {
                require_dim(have_dim, t);
                next();
                s.domain = box(t);
                have_domain = true;
            } else if (t.text == "f") {
                require_dim(have_dim, t);
                next();
                expect("=");
                s.expr = expr();
                have_f = true;
            } else {
                fail("unknown identifier '" + t.text + "'", t);
            }
            if (peek().type == Tok::end) {
                break;
            }
            expect(";");
        }
        const Token& end = peek();
        if (!have_dim) {
            fail("missing 'dim' declaration", end);
        }
        if (!have_domain) {
            fail("missing 'domain' declaration", end);
        }
        if (!have_f) {
            fail("missing 'f = ...' definition", end);
        }
        return s;
    }

    Expr standalone(int dim)
    {
        dim_ = dim;
        Expr e = expr();
        if (peek().type != Tok::end) {
            fail("unexpected '" + peek().text + "'", peek());
        }
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

    bool accept(std::string_view punct)
    {
        if (peek().type == Tok::punct && peek().text == punct) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(std::string_view punct)
    {
        if (!accept(punct)) {
            const Token& t = peek();
            fail("expected '" + std::string(punct) + "' but found " + (t.type == Tok::end ? "end of input" : "'" + t.text + "'"), t);
        }
    }

    [[noreturn]] static void fail(const std::string& msg, const Token& at)
    {
        throw ParseError(msg, at.line, at.column);
    }

    static void require_dim(bool have_dim, const Token& t)
    {
        if (!have_dim) {
            fail("'dim' must be declared before '" + t.text + "'", t);
        }
    }

    double signed_number()
    {
        const bool negative = accept("-");
        const Token& t = next();
        if (t.type != Tok::number) {
            fail("expected a number", t);
        }
        return negative ? -t.number : t.number;
    }

    Box box(const Token& at)
    {
        Box b;
        b.dim = dim_;
        int axis = 0;
        do {
            const Token& open = peek();
            expect("[");
            const double lo = signed_number();
            expect(",");
            const double hi = signed_number();
            expect("]");
            if (axis >= dim_) {
                fail("domain has more intervals than dim " + std::to_string(dim_), open);
            }
            if (!(lo < hi)) {
                fail("domain interval must satisfy lower < upper", open);
            }
            b.lo[axis] = lo;
            b.hi[axis] = hi;
            ++axis;
        } while (peek().type == Tok::ident && peek().text == "x" && (next(), true));
        if (axis != dim_) {
            fail("domain has " + std::to_string(axis) + " interval(s) but dim is " + std::to_string(dim_), at);
        }
        return b;
    }

    Expr expr()
    {
        Expr lhs = term();
        for (;;) {
            if (accept("+")) {
                lhs = lhs + term();
            } else if (accept("-")) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    Expr term()
    {
        Expr lhs = unary();
        while (accept("*")) {
            lhs = lhs * unary();
        }
        return lhs;
    }

    Expr unary()
    {
        if (accept("-")) {
            return -unary();
        }
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (accept("^")) {
            const Token& t = next();
            if (t.type != Tok::number || t.number != 2.0) {
                fail("only the exponent 2 is supported", t);
            }
            return square(base);
        }
        return base;
    }

    Expr primary()
    {
        const Token& t = next();
        if (t.type == Tok::number) {
            return Expr::constant(t.number);
        }
        if (t.type == Tok::punct && t.text == "(") {
            Expr inner = expr();
            expect(")");
            return inner;
        }
        if (t.type == Tok::ident) {
            if (t.text == "x" || t.text == "y" || t.text == "z") {
                const int axis = t.text[0] - 'x';
                if (axis >= dim_) {
                    fail("coordinate '" + t.text + "' exceeds dimension " + std::to_string(dim_), t);
                }
                return Expr::coordinate(axis);
            }
            if (t.text == "sqrt") {
                expect("(");
                Expr a = expr();
                expect(")");
                return sqrt(a);
            }
            if (t.text == "rint" || t.text == "runion") {
                expect("(");
                Expr a = expr();
                expect(",");
                Expr b = expr();
                expect(")");
                return t.text == "rint" ? r_intersect(a, b) : r_union(a, b);
            }
            fail("unknown identifier '" + t.text + "'", t);
        }
        fail(t.type == Tok::end ? "unexpected end of input" : "unexpected '" + t.text + "'", t);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int dim_ = 3;
};

// ---------------------------------------------------------------------------
// Printer

enum Prec { additive = 0, multiplicative = 1, prefix = 2, postfix = 3, atom = 4 };

std::string number_text(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Prec precedence(const Expr& e)
{
    switch (e.kind()) {
    case NodeKind::add:
    case NodeKind::sub:
        return additive;
    case NodeKind::mul:
        return multiplicative;
    case NodeKind::neg:
        return prefix;
    case NodeKind::square:
        return postfix;
    case NodeKind::constant:
        return std::signbit(e.value()) ? additive : atom;
    default:
        return atom;
    }
}

void print(std::ostream& os, const Expr& e, Prec ctx)
{
    const bool paren = precedence(e) < ctx;
    if (paren) {
        os << '(';
    }
    const auto& c = e.children();
    switch (e.kind()) {
    case NodeKind::constant:
        os << number_text(e.value());
        break;
    case NodeKind::coordinate:
        os << static_cast<char>('x' + e.axis());
        break;
    case NodeKind::add:
    case NodeKind::sub:
        print(os, c[0], additive);
        os << (e.kind() == NodeKind::add ? " + " : " - ");
        print(os, c[1], multiplicative);
        break;
    case NodeKind::mul:
        print(os, c[0], multiplicative);
        os << " * ";
        print(os, c[1], prefix);
        break;
    case NodeKind::neg:
        os << '-';
        print(os, c[0], prefix);
        break;
    case NodeKind::square:
        print(os, c[0], atom);
        os << "^2";
        break;
    case NodeKind::sqrt:
        os << "sqrt(";
        print(os, c[0], additive);
        os << ')';
        break;
    case NodeKind::r_intersect:
    case NodeKind::r_union:
        os << (e.kind() == NodeKind::r_intersect ? "rint(" : "runion(");
        print(os, c[0], additive);
        os << ", ";
        print(os, c[1], additive);
        os << ')';
        break;
    }
    if (paren) {
        os << ')';
    }
}

// 1.8181818181818181 = 1/0.55 scales the unit cylinders to radius 0.55.
constexpr const char* kCsgText = R"(# Unit sphere drilled by three axis-aligned cylinders,
# united with the box [-0.7,0.7]^3.
dim 3;
domain [-2,2]x[-2,2]x[-2,2];
f = runion(
      rint(rint(rint(0.7 - x, x + 0.7), rint(0.7 - y, y + 0.7)), rint(0.7 - z, z + 0.7)),
      rint(1 - x^2 - y^2 - z^2,
           rint(rint(-(1 - (x * 1.8181818181818181)^2 - (y * 1.8181818181818181)^2),
                     -(1 - (y * 1.8181818181818181)^2 - (z * 1.8181818181818181)^2)),
                -(1 - (z * 1.8181818181818181)^2 - (x * 1.8181818181818181)^2))))
)";

}  // namespace

Scene parse_scene(std::string_view text, std::string name)
{
    return Parser(text).scene(std::move(name));
}

Expr parse_expr(std::string_view text, int dim)
{
    return Parser(text).standalone(dim);
}

std::string to_string(const Expr& e)
{
    std::ostringstream os;
    print(os, e, additive);
    return os.str();
}

std::string to_string(const Scene& s)
{
    std::ostringstream os;
    os << "dim " << s.dim << ";\ndomain ";
    for (int i = 0; i < s.dim; ++i) {
        if (i > 0) {
            os << 'x';
        }
        os << '[' << number_text(s.domain.lo[i]) << ',' << number_text(s.domain.hi[i]) << ']';
    }
    os << ";\nf = " << to_string(s.expr) << ";\n";
    return os.str();
}

Scene builtin_scene(std::string_view name)
{
    if (name == "segment1d") {
        return parse_scene("dim 1; domain [-2,3]; f = rint(x, 1 - x);", "segment1d");
    }
    if (name == "circle2d") {
        return parse_scene("dim 2; domain [-2,2]x[-2,2]; f = 1 - x^2 - y^2;", "circle2d");
    }
    if (name == "csg3d") {
        return parse_scene(kCsgText, "csg3d");
    }
    throw std::invalid_argument("unknown builtin scene '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names()
{
    return {"segment1d", "circle2d", "csg3d"};
}

std::vector<std::array<double, 3>> exact_zero_points(const Scene& scene)
{
    std::vector<std::array<double, 3>> candidates;
    if (scene.name == "segment1d") {
        candidates = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    } else if (scene.name == "circle2d") {
        candidates = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}};
    }
    std::vector<std::array<double, 3>> out;
    for (const auto& p : candidates) {
        if (scene.f(p) == 0.0) {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace redist
