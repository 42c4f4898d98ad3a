#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stefan::exprs {

/// Thrown by parse(). offset() is the byte position in the source string
/// where the parser gave up.
class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier };

    ParseError(Kind kind, std::size_t offset, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

enum class NodeKind { Number, VarX, VarT, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Exp, Sqrt, Abs };

struct Node {
    NodeKind kind = NodeKind::Number;
    double value = 0.0;  // Number only
    Func func = Func::Sin;  // Call only
    int lhs = -1;
    int rhs = -1;
};

/// Forward-mode dual number, used to differentiate expressions exactly.
struct Dual {
    double v = 0.0;
    double d = 0.0;
};

/// Immutable parsed expression in the variables x and t.
class Expr {
public:
    Expr() = default;

    double eval(double x, double t) const;

    /// Value and exact partial derivative with respect to x.
    Dual eval_dx(double x, double t) const;
    /// Value and exact partial derivative with respect to t.
    Dual eval_dt(double x, double t) const;

    /// Fully parenthesised form that parses back to an identical tree.
    std::string print() const;

    const std::string& source() const noexcept { return source_; }
    bool empty() const noexcept { return !nodes_; }

    /// True when the expression references no variable (a literal constant).
    bool is_constant() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    friend Expr parse(std::string_view src);

    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = -1;
    std::string source_;
};

/// Parses src following the grammar
///   expr    := term (("+"|"-") term)*
///   term    := factor (("*"|"/") factor)*
///   factor  := "-" factor | power
///   power   := primary ("^" factor)?
///   primary := number | "x" | "t" | "pi" | ident "(" expr ")" | "(" expr ")"
/// so that "^" binds tighter than unary minus and is right-associative.
Expr parse(std::string_view src);

}  // namespace stefan::exprs
