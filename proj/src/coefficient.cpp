#include "elastep/coefficient.hpp"

#include "elastep/polybasis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace elastep {

namespace detail {

struct ExprNode {
    enum class Op { Const, X1, X2, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos };
    Op op = Op::Const;
    double value = 0.0;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;

    double eval(double x1, double x2) const
    {
        switch (op) {
        case Op::Const: return value;
        case Op::X1: return x1;
        case Op::X2: return x2;
        case Op::Add: return lhs->eval(x1, x2) + rhs->eval(x1, x2);
        case Op::Sub: return lhs->eval(x1, x2) - rhs->eval(x1, x2);
        case Op::Mul: return lhs->eval(x1, x2) * rhs->eval(x1, x2);
        case Op::Div: return lhs->eval(x1, x2) / rhs->eval(x1, x2);
        case Op::Pow: {
            const double e = rhs->eval(x1, x2);
            const double b = lhs->eval(x1, x2);
            if (e == std::round(e) && std::abs(e) <= 16) {
                const int n = static_cast<int>(e);
                double r = 1.0;
                for (int k = 0; k < std::abs(n); ++k) r *= b;
                return n < 0 ? 1.0 / r : r;
            }
            return std::pow(b, e);
        }
        case Op::Neg: return -lhs->eval(x1, x2);
        case Op::Sin: return std::sin(lhs->eval(x1, x2));
        case Op::Cos: return std::cos(lhs->eval(x1, x2));
        }
        return 0.0;
    }
};

}  // namespace detail

namespace {

using Node = detail::ExprNode;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double v)
{
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
}

NodePtr make_var(Node::Op op)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    return n;
}

NodePtr make_node(Node::Op op, NodePtr a, NodePtr b = nullptr)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    const bool foldable = n->lhs->op == Node::Op::Const && (!n->rhs || n->rhs->op == Node::Op::Const);
    if (foldable) return make_const(n->eval(0.0, 0.0));
    return n;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse()
    {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::invalid_argument("coefficient expression '" + std::string(s_) + "': " + what +
                                    " at position " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make_node(Node::Op::Add, lhs, term());
            else if (eat('-')) lhs = make_node(Node::Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            skip();
            if (eat('*')) lhs = make_node(Node::Op::Mul, lhs, unary());
            else if (eat('/')) lhs = make_node(Node::Op::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary()
    {
        if (eat('-')) return make_node(Node::Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        skip();
        if (eat('^')) return make_node(Node::Op::Pow, base, unary());
        if (s_.substr(pos_, 2) == "**") {
            pos_ += 2;
            return make_node(Node::Op::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(std::string(s_.substr(pos_)), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return make_const(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
            const std::string name(s_.substr(pos_, end - pos_));
            pos_ = end;
            if (name == "x1" || name == "x") return make_var(Node::Op::X1);
            if (name == "x2" || name == "y") return make_var(Node::Op::X2);
            if (name == "pi") return make_const(std::numbers::pi);
            if (name == "sin" || name == "cos") {
                if (!eat('(')) fail("expected '(' after " + name);
                NodePtr arg = expr();
                if (!eat(')')) fail("missing ')'");
                return make_node(name == "sin" ? Node::Op::Sin : Node::Op::Cos, arg);
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected character");
    }

    std::string_view s_;
    size_t pos_ = 0;
};

}  // namespace

Coefficient::Coefficient(std::shared_ptr<const detail::ExprNode> root, Kind kind, std::string text)
    : root_(std::move(root)), kind_(kind), text_(std::move(text))
{
    if (root_->op == Node::Op::Const) kind_ = Kind::Constant;
}

Coefficient Coefficient::constant(double c) { return Coefficient(make_const(c), Kind::Constant, fmt(c)); }

Coefficient Coefficient::affine(double c0, double c1, double c2)
{
    NodePtr n = make_node(Node::Op::Add,
                          make_node(Node::Op::Add, make_const(c0),
                                    make_node(Node::Op::Mul, make_const(c1), make_var(Node::Op::X1))),
                          make_node(Node::Op::Mul, make_const(c2), make_var(Node::Op::X2)));
    return Coefficient(n, Kind::Affine, fmt(c0) + " + " + fmt(c1) + "*x1 + " + fmt(c2) + "*x2");
}

Coefficient Coefficient::radial_quadratic(double c0)
{
    NodePtr x1 = make_var(Node::Op::X1), x2 = make_var(Node::Op::X2);
    NodePtr n = make_node(Node::Op::Add,
                          make_node(Node::Op::Add, make_const(c0), make_node(Node::Op::Mul, x1, x1)),
                          make_node(Node::Op::Mul, x2, x2));
    return Coefficient(n, Kind::RadialQuadratic, fmt(c0) + " + x1^2 + x2^2");
}

Coefficient Coefficient::parse(std::string_view text)
{
    return Coefficient(Parser(text).parse(), Kind::Expression, std::string(text));
}

double Coefficient::operator()(double x1, double x2) const { return root_->eval(x1, x2); }

double Coefficient::constant_value() const
{
    if (kind_ != Kind::Constant) throw std::logic_error("coefficient '" + text_ + "' is not constant");
    return root_->value;
}

double Coefficient::min_on(const TriMesh& mesh, int quad_degree) const
{
    if (is_constant()) return constant_value();
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    double m = std::numeric_limits<double>::infinity();
    for (const Point& v : mesh.vertices()) m = std::min(m, (*this)(v));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const AffineMap map = AffineMap::of(mesh, t);
        for (const Point& xi : rule.points) m = std::min(m, (*this)(map.to_physical(xi)));
    }
    return m;
}

double Coefficient::max_on(const TriMesh& mesh, int quad_degree) const
{
    return -(-*this).min_on(mesh, quad_degree);
}

Coefficient operator+(const Coefficient& a, const Coefficient& b)
{
    return Coefficient(make_node(Node::Op::Add, a.root_, b.root_), Coefficient::Kind::Expression,
                       "(" + a.text_ + ") + (" + b.text_ + ")");
}

Coefficient operator-(const Coefficient& a, const Coefficient& b)
{
    return Coefficient(make_node(Node::Op::Sub, a.root_, b.root_), Coefficient::Kind::Expression,
                       "(" + a.text_ + ") - (" + b.text_ + ")");
}

Coefficient operator*(const Coefficient& a, const Coefficient& b)
{
    return Coefficient(make_node(Node::Op::Mul, a.root_, b.root_), Coefficient::Kind::Expression,
                       "(" + a.text_ + ") * (" + b.text_ + ")");
}

Coefficient operator/(const Coefficient& a, const Coefficient& b)
{
    return Coefficient(make_node(Node::Op::Div, a.root_, b.root_), Coefficient::Kind::Expression,
                       "(" + a.text_ + ") / (" + b.text_ + ")");
}

Coefficient operator-(const Coefficient& a)
{
    return Coefficient(make_node(Node::Op::Neg, a.root_), Coefficient::Kind::Expression, "-(" + a.text_ + ")");
}

}  // namespace elastep
