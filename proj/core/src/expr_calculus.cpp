#include "pdm/errors.hpp"
#include "pdm/expr.hpp"

#include <cmath>

namespace pdm {

namespace {

bool all_children_constant(const Expr& e) {
    for (int i = 0; i < arity(e.op()); ++i) {
        if (!e.child(static_cast<std::size_t>(i)).is_constant()) return false;
    }
    return true;
}

// Folds a node whose children are all constants, when the result is defined.
std::optional<Expr> fold(const Expr& e) {
    if (arity(e.op()) == 0 || !all_children_constant(e)) return std::nullopt;
    static const Params kNoParams;
    auto v = try_eval(e, 0.0, kNoParams);
    if (!v) return std::nullopt;
    return Expr::constant(*v);
}

// Smart constructors: apply the local identities to a node whose children are
// already simplified.
Expr make_unary(Op op, const Expr& a) {
    if (op == Op::Neg && a.op() == Op::Neg) return a.child(0);
    Expr e = Expr::unary(op, a);
    if (auto f = fold(e)) return *f;
    return e;
}

Expr make_binary(Op op, const Expr& a, const Expr& b) {
    switch (op) {
    case Op::Add:
        if (a.is_constant(0.0)) return b;
        if (b.is_constant(0.0)) return a;
        if (b.op() == Op::Neg) return make_binary(Op::Sub, a, b.child(0));
        break;
    case Op::Sub:
        if (b.is_constant(0.0)) return a;
        if (a.is_constant(0.0)) return make_unary(Op::Neg, b);
        if (b.op() == Op::Neg) return make_binary(Op::Add, a, b.child(0));
        break;
    case Op::Mul:
        if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
        if (a.is_constant(1.0)) return b;
        if (b.is_constant(1.0)) return a;
        if (a.is_constant(-1.0)) return make_unary(Op::Neg, b);
        if (b.is_constant(-1.0)) return make_unary(Op::Neg, a);
        if (a.op() == Op::Neg && b.op() == Op::Neg) return make_binary(Op::Mul, a.child(0), b.child(0));
        break;
    case Op::Div:
        if (b.is_constant(1.0)) return a;
        if (b.is_constant(-1.0)) return make_unary(Op::Neg, a);
        if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
        break;
    case Op::Pow:
        if (b.is_constant(1.0)) return a;
        if (b.is_constant(0.0)) return Expr::constant(1.0);
        if (a.is_constant(1.0)) return Expr::constant(1.0);
        break;
    default:
        break;
    }
    Expr e = Expr::binary(op, a, b);
    if (auto f = fold(e)) return *f;
    return e;
}

Expr s_add(const Expr& a, const Expr& b) { return make_binary(Op::Add, a, b); }
Expr s_sub(const Expr& a, const Expr& b) { return make_binary(Op::Sub, a, b); }
Expr s_mul(const Expr& a, const Expr& b) { return make_binary(Op::Mul, a, b); }
Expr s_div(const Expr& a, const Expr& b) { return make_binary(Op::Div, a, b); }
Expr s_pow(const Expr& a, const Expr& b) { return make_binary(Op::Pow, a, b); }
Expr s_neg(const Expr& a) { return make_unary(Op::Neg, a); }
Expr s_fn(Op op, const Expr& a) { return make_unary(op, a); }

Expr derivative(const Expr& e) {
    if (!e.depends_on_x()) return Expr::constant(0.0);
    switch (e.op()) {
    case Op::Var:
        return Expr::constant(1.0);
    case Op::Const:
    case Op::Param:
        return Expr::constant(0.0);
    default:
        break;
    }

    const Expr& u = e.child(0);
    const Expr du = derivative(u);
    switch (e.op()) {
    case Op::Neg:
        return s_neg(du);
    case Op::Exp:
        return s_mul(e, du);
    case Op::Ln:
        return s_div(du, u);
    case Op::Sqrt:
        return s_div(du, s_mul(Expr::constant(2.0), e));
    case Op::Abs:
        return s_mul(s_div(u, e), du);
    case Op::Sin:
        return s_mul(s_fn(Op::Cos, u), du);
    case Op::Cos:
        return s_neg(s_mul(s_fn(Op::Sin, u), du));
    case Op::Tan:
        return s_div(du, s_pow(s_fn(Op::Cos, u), Expr::constant(2.0)));
    case Op::Sinh:
        return s_mul(s_fn(Op::Cosh, u), du);
    case Op::Cosh:
        return s_mul(s_fn(Op::Sinh, u), du);
    case Op::Tanh:
        return s_mul(s_pow(s_fn(Op::Sech, u), Expr::constant(2.0)), du);
    case Op::Sech:
        return s_neg(s_mul(s_mul(e, s_fn(Op::Tanh, u)), du));
    default:
        break;
    }

    const Expr& v = e.child(1);
    const Expr dv = derivative(v);
    switch (e.op()) {
    case Op::Add:
        return s_add(du, dv);
    case Op::Sub:
        return s_sub(du, dv);
    case Op::Mul:
        return s_add(s_mul(du, v), s_mul(u, dv));
    case Op::Div:
        return s_div(s_sub(s_mul(du, v), s_mul(u, dv)), s_pow(v, Expr::constant(2.0)));
    case Op::Pow:
        if (!v.depends_on_x()) {
            return s_mul(s_mul(v, s_pow(u, s_sub(v, Expr::constant(1.0)))), du);
        }
        if (!u.depends_on_x()) {
            return s_mul(s_mul(e, s_fn(Op::Ln, u)), dv);
        }
        return s_mul(e, s_add(s_mul(dv, s_fn(Op::Ln, u)), s_div(s_mul(v, du), u)));
    default:
        return Expr::constant(0.0);
    }
}

}  // namespace

Expr simplify(const Expr& e) {
    switch (arity(e.op())) {
    case 0:
        return e;
    case 1:
        return make_unary(e.op(), simplify(e.child(0)));
    default:
        return make_binary(e.op(), simplify(e.child(0)), simplify(e.child(1)));
    }
}

Expr differentiate(const Expr& e, int order) {
    if (order < 1) throw Error("derivative order must be at least 1");
    Expr d = simplify(e);
    for (int k = 0; k < order; ++k) d = derivative(d);
    return d;
}

}  // namespace pdm
