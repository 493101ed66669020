#include "pdm/expr.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace pdm {

namespace {

constexpr std::array<std::pair<Op, std::string_view>, 12> kFunctions{{
    {Op::Exp, "exp"},
    {Op::Ln, "ln"},
    {Op::Sqrt, "sqrt"},
    {Op::Abs, "abs"},
    {Op::Sin, "sin"},
    {Op::Cos, "cos"},
    {Op::Tan, "tan"},
    {Op::Sinh, "sinh"},
    {Op::Cosh, "cosh"},
    {Op::Tanh, "tanh"},
    {Op::Sech, "sech"},
    {Op::Neg, "neg"},
}};

}  // namespace

std::string_view function_name(Op op) noexcept {
    for (const auto& [o, n] : kFunctions) {
        if (o == op) return n;
    }
    return {};
}

std::optional<Op> function_from_name(std::string_view name) noexcept {
    for (const auto& [o, n] : kFunctions) {
        if (n == name && o != Op::Neg) return o;
    }
    return std::nullopt;
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(double value) : Expr(constant(value)) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = value;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::variable() {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->has_var = true;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::parameter(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Param;
    n->name = std::move(name);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::unary(Op op, Expr arg) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->has_var = arg.depends_on_x();
    n->depth = arg.depth() + 1;
    n->kids.push_back(std::move(arg));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->has_var = lhs.depends_on_x() || rhs.depends_on_x();
    n->depth = std::max(lhs.depth(), rhs.depth()) + 1;
    n->kids.reserve(2);
    n->kids.push_back(std::move(lhs));
    n->kids.push_back(std::move(rhs));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
const Expr& Expr::child(std::size_t i) const noexcept { return node_->kids[i]; }
bool Expr::depends_on_x() const noexcept { return node_->has_var; }
std::size_t Expr::depth() const noexcept { return node_->depth; }

bool operator==(const Expr& a, const Expr& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
    case Op::Const:
        return a.value() == b.value();
    case Op::Var:
        return true;
    case Op::Param:
        return a.name() == b.name();
    default:
        break;
    }
    if (!(a.child(0) == b.child(0))) return false;
    return arity(a.op()) == 1 || a.child(1) == b.child(1);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Op::Pow, base, exponent); }
Expr exp(const Expr& a) { return Expr::unary(Op::Exp, a); }
Expr ln(const Expr& a) { return Expr::unary(Op::Ln, a); }
Expr sqrt(const Expr& a) { return Expr::unary(Op::Sqrt, a); }
Expr abs(const Expr& a) { return Expr::unary(Op::Abs, a); }
Expr sin(const Expr& a) { return Expr::unary(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Op::Cos, a); }
Expr tan(const Expr& a) { return Expr::unary(Op::Tan, a); }
Expr sinh(const Expr& a) { return Expr::unary(Op::Sinh, a); }
Expr cosh(const Expr& a) { return Expr::unary(Op::Cosh, a); }
Expr tanh(const Expr& a) { return Expr::unary(Op::Tanh, a); }
Expr sech(const Expr& a) { return Expr::unary(Op::Sech, a); }

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength used by the printer; mirrors the grammar levels.
int precedence(const Expr& e) {
    switch (e.op()) {
    case Op::Add:
    case Op::Sub:
        return 1;
    case Op::Mul:
    case Op::Div:
        return 2;
    case Op::Neg:
        return 3;
    case Op::Pow:
        return 4;
    case Op::Const:
        return (e.value() < 0.0 || std::signbit(e.value())) ? 3 : 5;
    default:
        return 5;
    }
}

void format_number(double v, std::string& out) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(e, out);
    if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e.op()) {
    case Op::Const:
        format_number(e.value(), out);
        return;
    case Op::Var:
        out += 'x';
        return;
    case Op::Param:
        out += e.name();
        return;
    case Op::Neg:
        // factor := '-' power, so anything looser than a power needs parentheses
        out += '-';
        print_wrapped(e.child(0), precedence(e.child(0)) < 4, out);
        return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        const int p = precedence(e);
        const char sym = e.op() == Op::Add ? '+' : e.op() == Op::Sub ? '-' : e.op() == Op::Mul ? '*' : '/';
        print_wrapped(e.child(0), precedence(e.child(0)) < p, out);
        if (p == 1) {
            out += ' ';
            out += sym;
            out += ' ';
        } else {
            out += sym;
        }
        // left-associative: equal precedence on the right must be parenthesized
        print_wrapped(e.child(1), precedence(e.child(1)) <= p, out);
        return;
    }
    case Op::Pow: {
        // power := atom '^' factor, so the base must be an atom
        print_wrapped(e.child(0), precedence(e.child(0)) < 5, out);
        out += '^';
        print_wrapped(e.child(1), precedence(e.child(1)) < 3, out);
        return;
    }
    default:
        out += function_name(e.op());
        out += '(';
        print(e.child(0), out);
        out += ')';
        return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Evaluator {
    double x;
    const Params& params;
    EvalFailure* failure;
    bool failed = false;

    double fail(const Expr& e, const char* message) {
        if (!failed && failure != nullptr) {
            failure->message = message;
            failure->node = to_string(e);
        }
        failed = true;
        return 0.0;
    }

    double run(const Expr& e) {
        if (failed) return 0.0;
        switch (e.op()) {
        case Op::Const:
            return e.value();
        case Op::Var:
            return x;
        case Op::Param: {
            auto it = params.find(e.name());
            if (it == params.end()) throw UnboundParameter(e.name());
            return it->second;
        }
        default:
            break;
        }

        const double a = run(e.child(0));
        if (failed) return 0.0;
        double r = 0.0;
        switch (e.op()) {
        case Op::Neg: r = -a; break;
        case Op::Exp: r = std::exp(a); break;
        case Op::Ln:
            if (!(a > 0.0)) return fail(e, "logarithm of a non-positive value");
            r = std::log(a);
            break;
        case Op::Sqrt:
            if (a < 0.0) return fail(e, "square root of a negative value");
            r = std::sqrt(a);
            break;
        case Op::Abs: r = std::fabs(a); break;
        case Op::Sin: r = std::sin(a); break;
        case Op::Cos: r = std::cos(a); break;
        case Op::Tan: r = std::tan(a); break;
        case Op::Sinh: r = std::sinh(a); break;
        case Op::Cosh: r = std::cosh(a); break;
        case Op::Tanh: r = std::tanh(a); break;
        case Op::Sech: r = 1.0 / std::cosh(a); break;
        default: {
            const double b = run(e.child(1));
            if (failed) return 0.0;
            switch (e.op()) {
            case Op::Add: r = a + b; break;
            case Op::Sub: r = a - b; break;
            case Op::Mul: r = a * b; break;
            case Op::Div:
                if (b == 0.0) return fail(e, "division by zero");
                r = a / b;
                break;
            case Op::Pow:
                if (a == 0.0 && b < 0.0) return fail(e, "zero raised to a negative power");
                if (a < 0.0 && std::trunc(b) != b) return fail(e, "negative base with non-integer exponent");
                r = std::pow(a, b);
                break;
            default:
                break;
            }
        }
        }
        if (!std::isfinite(r)) return fail(e, "non-finite result");
        return r;
    }
};

}  // namespace

std::optional<double> try_eval(const Expr& e, double x, const Params& params, EvalFailure* failure) {
    Evaluator ev{x, params, failure};
    const double v = ev.run(e);
    if (ev.failed) return std::nullopt;
    return v;
}

double eval(const Expr& e, double x, const Params& params) {
    EvalFailure failure;
    auto v = try_eval(e, x, params, &failure);
    if (!v) {
        throw DomainError(failure.message + " in '" + failure.node + "' at x = " + std::to_string(x),
                          failure.node);
    }
    return *v;
}

// ---------------------------------------------------------------------------
// Parameter utilities

Expr bind(const Expr& e, const Params& params) {
    switch (e.op()) {
    case Op::Const:
    case Op::Var:
        return e;
    case Op::Param: {
        auto it = params.find(e.name());
        return it == params.end() ? e : Expr::constant(it->second);
    }
    default:
        break;
    }
    if (arity(e.op()) == 1) return Expr::unary(e.op(), bind(e.child(0), params));
    return Expr::binary(e.op(), bind(e.child(0), params), bind(e.child(1), params));
}

namespace {
void collect_parameters(const Expr& e, std::set<std::string>& out) {
    if (e.op() == Op::Param) {
        out.insert(e.name());
        return;
    }
    for (int i = 0; i < arity(e.op()); ++i) collect_parameters(e.child(static_cast<std::size_t>(i)), out);
}
}  // namespace

std::set<std::string> parameters(const Expr& e) {
    std::set<std::string> out;
    collect_parameters(e, out);
    return out;
}

}  // namespace pdm
