#pragma once

// Hand-rolled generators for property tests. Seeds are fixed by the callers.

#include "pdm/expr.hpp"

#include <array>
#include <random>

namespace pdm::testing {

/// Random expression trees of bounded depth over x and the parameters a, b.
class ExprGenerator {
public:
    explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

    Expr tree(int max_depth) {
        if (max_depth <= 1 || coin(0.25)) return leaf();
        const int kind = pick(0, 2);
        if (kind == 0) {
            static constexpr std::array<Op, 12> ops{Op::Neg,  Op::Exp,  Op::Ln,   Op::Sqrt, Op::Abs,  Op::Sin,
                                                    Op::Cos,  Op::Tan,  Op::Sinh, Op::Cosh, Op::Tanh, Op::Sech};
            return Expr::unary(ops[static_cast<std::size_t>(pick(0, 11))], tree(max_depth - 1));
        }
        static constexpr std::array<Op, 5> ops{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
        return Expr::binary(ops[static_cast<std::size_t>(pick(0, 4))], tree(max_depth - 1), tree(max_depth - 1));
    }

    /// Trees built from everywhere-smooth pieces with moderate growth; used where
    /// a finite-difference oracle must be trustworthy.
    Expr smooth(int max_depth) {
        if (max_depth <= 1 || coin(0.3)) return coin(0.6) ? Expr::variable() : Expr(uniform(-2.0, 2.0));
        switch (pick(0, 8)) {
        case 0: return smooth(max_depth - 1) + smooth(max_depth - 1);
        case 1: return smooth(max_depth - 1) - smooth(max_depth - 1);
        case 2: return smooth(max_depth - 1) * smooth(max_depth - 1);
        case 3: return sin(smooth(max_depth - 1));
        case 4: return cos(smooth(max_depth - 1));
        case 5: return tanh(smooth(max_depth - 1));
        case 6: return sech(smooth(max_depth - 1));
        case 7: return exp(tanh(smooth(max_depth - 1)));
        default: return smooth(max_depth - 1) / (Expr(1.5) + cos(smooth(max_depth - 1)));
        }
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

private:
    Expr leaf() {
        switch (pick(0, 3)) {
        case 0: return Expr::variable();
        case 1: return Expr::parameter(coin(0.5) ? "a" : "b");
        default: {
            // mix of short and long literals, both signs
            const double v = coin(0.5) ? static_cast<double>(pick(-5, 5)) : uniform(-10.0, 10.0);
            return Expr::constant(v);
        }
        }
    }

    std::mt19937_64 rng_;
};

/// Fourth-order central difference of e at x.
inline double central_fd(const Expr& e, double x, double h, const Params& p = {}) {
    return (-eval(e, x + 2 * h, p) + 8 * eval(e, x + h, p) - 8 * eval(e, x - h, p) + eval(e, x - 2 * h, p)) /
           (12 * h);
}

}  // namespace pdm::testing
