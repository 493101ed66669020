#pragma once

// Closed-form expressions over one variable `x` and late-bound named parameters.
//
// Expr is an immutable, shared expression tree. Construction through the free
// builder functions and operators below is purely structural: nothing is folded
// or reordered until `simplify` is called. All functions are pure and an Expr may
// be evaluated from any number of threads concurrently.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pdm {

enum class Op {
    Const,
    Var,
    Param,
    // unary
    Neg,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    // binary
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

[[nodiscard]] constexpr int arity(Op op) noexcept {
    switch (op) {
    case Op::Const:
    case Op::Var:
    case Op::Param:
        return 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
        return 2;
    default:
        return 1;
    }
}

/// Function name for a named unary op ("exp", "sech", ...); empty for the rest.
[[nodiscard]] std::string_view function_name(Op op) noexcept;

/// Inverse of `function_name`. `neg` is not a callable function.
[[nodiscard]] std::optional<Op> function_from_name(std::string_view name) noexcept;

using Params = std::map<std::string, double, std::less<>>;

class Expr {
public:
    struct Node;

    /// The constant 0.
    Expr();
    Expr(double value);  // NOLINT(google-explicit-constructor): numbers read naturally in builders

    static Expr constant(double value);
    static Expr variable();
    static Expr parameter(std::string name);
    static Expr unary(Op op, Expr arg);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    [[nodiscard]] Op op() const noexcept;
    [[nodiscard]] double value() const noexcept;
    [[nodiscard]] const std::string& name() const noexcept;
    /// Child `i` (0 for unary ops; 0 = lhs, 1 = rhs for binary ops).
    [[nodiscard]] const Expr& child(std::size_t i) const noexcept;

    [[nodiscard]] bool is_constant() const noexcept { return op() == Op::Const; }
    [[nodiscard]] bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
    /// True when the tree references the variable `x` anywhere.
    [[nodiscard]] bool depends_on_x() const noexcept;
    [[nodiscard]] std::size_t depth() const noexcept;

    /// Structural equality (constants compared by value).
    friend bool operator==(const Expr& a, const Expr& b) noexcept;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;
    std::string name;
    std::vector<Expr> kids;
    bool has_var = false;
    std::size_t depth = 1;
};

// Builders. These never simplify.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr tanh(const Expr& a);
Expr sech(const Expr& a);

/// Parses the expression grammar
///
///     expr   := term (('+'|'-') term)*
///     term   := factor (('*'|'/') factor)*
///     factor := ('-')? power
///     power  := atom ('^' factor)?
///     atom   := number | identifier | identifier '(' expr ')' | '(' expr ')'
///
/// `x` is the variable; any other identifier is a parameter. A minus applied
/// directly to a numeric literal yields a negative constant.
/// Throws ParseError.
[[nodiscard]] Expr parse(std::string_view text);

/// Prints with the minimal parentheses needed for `parse` to recover the same tree.
[[nodiscard]] std::string to_string(const Expr& e);

/// Failure details from `try_eval`.
struct EvalFailure {
    std::string message;
    std::string node;
};

/// Evaluates at `x`. Throws UnboundParameter or DomainError; never returns NaN or inf.
[[nodiscard]] double eval(const Expr& e, double x, const Params& params = {});

/// Like `eval`, but reports domain failures through `failure` instead of throwing.
/// Unbound parameters still throw.
[[nodiscard]] std::optional<double> try_eval(const Expr& e, double x, const Params& params,
                                             EvalFailure* failure = nullptr);

/// Exact symbolic derivative with respect to `x`, applied `order` times, simplified.
[[nodiscard]] Expr differentiate(const Expr& e, int order = 1);

/// Constant folding plus the neutral/absorbing element identities and collapse of
/// double negation. Evaluation-equivalent wherever the input is defined.
[[nodiscard]] Expr simplify(const Expr& e);

/// Replaces every bound parameter by its constant value (unbound ones are kept).
[[nodiscard]] Expr bind(const Expr& e, const Params& params);

/// Names of all parameters referenced by `e`.
[[nodiscard]] std::set<std::string> parameters(const Expr& e);

}  // namespace pdm
