#pragma once

#include "elastep/mesh.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace elastep {

namespace detail {
struct ExprNode;
}

/**
 * Scalar spatial coefficient c(x1, x2).
 *
 * Built as a constant, an affine or radial-quadratic function, or parsed
 * from an arithmetic expression over x1, x2 and pi with + - * / ^, sin and
 * cos. Coefficients compose arithmetically; the result is an expression.
 * Evaluation is thread-safe.
 */
class Coefficient {
public:
    enum class Kind { Constant, Affine, RadialQuadratic, Expression };

    Coefficient() : Coefficient(constant(0.0)) {}
    Coefficient(double c) : Coefficient(constant(c)) {}  // NOLINT(google-explicit-constructor)

    static Coefficient constant(double c);
    /// c0 + c1 x1 + c2 x2
    static Coefficient affine(double c0, double c1, double c2);
    /// c0 + x1^2 + x2^2
    static Coefficient radial_quadratic(double c0);
    /// Throws std::invalid_argument with the offending position on parse errors.
    static Coefficient parse(std::string_view text);

    double operator()(double x1, double x2) const;
    double operator()(const Point& p) const { return (*this)(p.x(), p.y()); }

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    /// Value of a constant coefficient; throws for other kinds.
    double constant_value() const;
    const std::string& text() const { return text_; }

    /// Minimum over the vertices and the quadrature points of every triangle.
    double min_on(const TriMesh& mesh, int quad_degree = 6) const;
    double max_on(const TriMesh& mesh, int quad_degree = 6) const;

    friend Coefficient operator+(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator-(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator/(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator-(const Coefficient& a);

private:
    Coefficient(std::shared_ptr<const detail::ExprNode> root, Kind kind, std::string text);

    std::shared_ptr<const detail::ExprNode> root_;
    Kind kind_ = Kind::Constant;
    std::string text_;
};

}  // namespace elastep
