#include "stefan/exprs.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace stefan::exprs {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
      kind_(kind),
      offset_(offset) {}

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    int parse_all(std::vector<Node>& out) {
        nodes_ = &out;
        skip_ws();
        if (pos_ == src_.size()) fail("expected an expression");
        const int root = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("expected operator or end of input");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Kind::Syntax, pos_, msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Node n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    int binary(NodeKind k, int lhs, int rhs) {
        Node n;
        n.kind = k;
        n.lhs = lhs;
        n.rhs = rhs;
        return push(n);
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(NodeKind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = binary(NodeKind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term() {
        int lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = binary(NodeKind::Mul, lhs, factor());
            } else if (accept('/')) {
                lhs = binary(NodeKind::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    int factor() {
        if (++depth_ > kMaxDepth) fail("expression nested too deeply");
        int r;
        if (accept('-')) {
            r = binary(NodeKind::Neg, factor(), -1);
        } else {
            r = power();
        }
        --depth_;
        return r;
    }

    int power() {
        const int base = primary();
        if (accept('^')) return binary(NodeKind::Pow, base, factor());
        return base;
    }

    int primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected number, variable, function or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("expected number, variable, function or '('");
    }

    int number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t nd = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            nd += digits();
        }
        if (nd == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = save;
                fail("malformed exponent");
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        Node n;
        n.kind = NodeKind::Number;
        n.value = std::strtod(text.c_str(), nullptr);
        return push(n);
    }

    int identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        Node n;
        if (name == "x") {
            n.kind = NodeKind::VarX;
            return push(n);
        }
        if (name == "t") {
            n.kind = NodeKind::VarT;
            return push(n);
        }
        if (name == "pi") {
            n.kind = NodeKind::Number;
            n.value = std::numbers::pi;
            return push(n);
        }
        Func f;
        if (name == "sin") {
            f = Func::Sin;
        } else if (name == "cos") {
            f = Func::Cos;
        } else if (name == "exp") {
            f = Func::Exp;
        } else if (name == "sqrt") {
            f = Func::Sqrt;
        } else if (name == "abs") {
            f = Func::Abs;
        } else {
            throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                             "unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        const int arg = expr();
        if (!accept(')')) fail("expected ')'");
        n.kind = NodeKind::Call;
        n.func = f;
        n.lhs = arg;
        return push(n);
    }

    static constexpr int kMaxDepth = 512;

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    std::vector<Node>* nodes_ = nullptr;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }

inline double apply(Func f, double a) {
    switch (f) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Abs: return std::abs(a);
    }
    return a;
}

inline Dual apply(Func f, Dual a) {
    switch (f) {
        case Func::Sin: return {std::sin(a.v), std::cos(a.v) * a.d};
        case Func::Cos: return {std::cos(a.v), -std::sin(a.v) * a.d};
        case Func::Exp: {
            const double e = std::exp(a.v);
            return {e, e * a.d};
        }
        case Func::Sqrt: {
            const double r = std::sqrt(a.v);
            return {r, a.d == 0.0 ? 0.0 : a.d / (2.0 * r)};
        }
        case Func::Abs:
            return {std::abs(a.v), a.v < 0.0 ? -a.d : a.d};
    }
    return a;
}

inline double pow_of(double a, double b) { return std::pow(a, b); }

inline Dual pow_of(Dual a, Dual b) {
    const double v = std::pow(a.v, b.v);
    double d = 0.0;
    // d(a^b) = b a^(b-1) a' + a^b ln(a) b'; the second term vanishes for constant exponents.
    if (a.d != 0.0) d += b.v * std::pow(a.v, b.v - 1.0) * a.d;
    if (b.d != 0.0) d += v * std::log(a.v) * b.d;
    return {v, d};
}

template <typename S>
S lift(double c) {
    if constexpr (std::is_same_v<S, Dual>) {
        return Dual{c, 0.0};
    } else {
        return c;
    }
}

template <typename S>
S eval_node(const std::vector<Node>& nodes, int i, const S& x, const S& t) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    switch (n.kind) {
        case NodeKind::Number: return lift<S>(n.value);
        case NodeKind::VarX: return x;
        case NodeKind::VarT: return t;
        case NodeKind::Add: return eval_node(nodes, n.lhs, x, t) + eval_node(nodes, n.rhs, x, t);
        case NodeKind::Sub: return eval_node(nodes, n.lhs, x, t) - eval_node(nodes, n.rhs, x, t);
        case NodeKind::Mul: return eval_node(nodes, n.lhs, x, t) * eval_node(nodes, n.rhs, x, t);
        case NodeKind::Div: return eval_node(nodes, n.lhs, x, t) / eval_node(nodes, n.rhs, x, t);
        case NodeKind::Pow:
            return pow_of(eval_node(nodes, n.lhs, x, t), eval_node(nodes, n.rhs, x, t));
        case NodeKind::Neg: return -eval_node(nodes, n.lhs, x, t);
        case NodeKind::Call: return apply(n.func, eval_node(nodes, n.lhs, x, t));
    }
    return lift<S>(0.0);
}

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
    }
    return "?";
}

void print_node(const std::vector<Node>& nodes, int i, std::string& out) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    auto bin = [&](const char* op) {
        out += '(';
        print_node(nodes, n.lhs, out);
        out += op;
        print_node(nodes, n.rhs, out);
        out += ')';
    };
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            std::string s(buf);
            // inf/nan cannot be produced by the grammar; literals are non-negative.
            out += s;
            return;
        }
        case NodeKind::VarX: out += 'x'; return;
        case NodeKind::VarT: out += 't'; return;
        case NodeKind::Add: bin(" + "); return;
        case NodeKind::Sub: bin(" - "); return;
        case NodeKind::Mul: bin(" * "); return;
        case NodeKind::Div: bin(" / "); return;
        case NodeKind::Pow: bin(" ^ "); return;
        case NodeKind::Neg:
            out += "(-";
            print_node(nodes, n.lhs, out);
            out += ')';
            return;
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            print_node(nodes, n.lhs, out);
            out += ')';
            return;
    }
}

bool same_tree(const std::vector<Node>& a, int ia, const std::vector<Node>& b, int ib) {
    if (ia < 0 || ib < 0) return ia == ib;
    const Node& na = a[static_cast<std::size_t>(ia)];
    const Node& nb = b[static_cast<std::size_t>(ib)];
    if (na.kind != nb.kind) return false;
    if (na.kind == NodeKind::Number) return na.value == nb.value;
    if (na.kind == NodeKind::Call && na.func != nb.func) return false;
    return same_tree(a, na.lhs, b, nb.lhs) && same_tree(a, na.rhs, b, nb.rhs);
}

}  // namespace

Expr parse(std::string_view src) {
    auto nodes = std::make_shared<std::vector<Node>>();
    Parser p(src);
    const int root = p.parse_all(*nodes);
    Expr e;
    e.nodes_ = std::move(nodes);
    e.root_ = root;
    e.source_ = std::string(src);
    return e;
}

double Expr::eval(double x, double t) const {
    if (!nodes_) return std::nan("");
    return eval_node<double>(*nodes_, root_, x, t);
}

Dual Expr::eval_dx(double x, double t) const {
    if (!nodes_) return {std::nan(""), std::nan("")};
    return eval_node<Dual>(*nodes_, root_, Dual{x, 1.0}, Dual{t, 0.0});
}

Dual Expr::eval_dt(double x, double t) const {
    if (!nodes_) return {std::nan(""), std::nan("")};
    return eval_node<Dual>(*nodes_, root_, Dual{x, 0.0}, Dual{t, 1.0});
}

std::string Expr::print() const {
    std::string out;
    if (nodes_) print_node(*nodes_, root_, out);
    return out;
}

bool Expr::is_constant() const {
    if (!nodes_) return false;
    for (const Node& n : *nodes_)
        if (n.kind == NodeKind::VarX || n.kind == NodeKind::VarT) return false;
    return true;
}

bool operator==(const Expr& a, const Expr& b) {
    if (!a.nodes_ || !b.nodes_) return !a.nodes_ && !b.nodes_;
    return same_tree(*a.nodes_, a.root_, *b.nodes_, b.root_);
}

}  // namespace stefan::exprs
