#ifndef VIAB_TESTS_HELPERS_HPP
#define VIAB_TESTS_HELPERS_HPP

#include <random>
#include <string>
#include <vector>

#include "viab/dsl.hpp"

namespace viab::testing {

// Random expression trees for the precedence differential test. Literals are
// kept nonnegative so printed trees re-parse to the same structure (a leading
// '-' always belongs to a Neg node).
inline dsl::ExprPtr random_expr(std::mt19937_64& eng, int depth, const dsl::Dims& dims) {
  using dsl::Expr;
  using dsl::NodeKind;
  std::uniform_int_distribution<int> leaf_pick(0, 3);
  std::uniform_int_distribution<int> node_pick(0, 7);
  std::uniform_real_distribution<double> lit(0.0, 4.0);

  auto make = [](Expr e) { return std::make_shared<const Expr>(std::move(e)); };

  if (depth <= 0 || node_pick(eng) == 0) {
    Expr e;
    switch (leaf_pick(eng)) {
      case 0:
        e.kind = NodeKind::Literal;
        e.literal = lit(eng);
        break;
      case 1:
        e.kind = NodeKind::VarT;
        break;
      case 2:
        if (dims.state > 0) {
          e.kind = NodeKind::VarX;
          e.index = 1 + static_cast<int>(eng() % dims.state);
        } else {
          e.kind = NodeKind::Literal;
          e.literal = lit(eng);
        }
        break;
      default:
        if (!dims.params.empty()) {
          e.kind = NodeKind::Param;
          e.name = dims.params[eng() % dims.params.size()];
        } else {
          e.kind = NodeKind::Literal;
          e.literal = lit(eng);
        }
        break;
    }
    return make(std::move(e));
  }

  Expr e;
  switch (node_pick(eng)) {
    case 1: e.kind = NodeKind::Neg; break;
    case 2: e.kind = NodeKind::Add; break;
    case 3: e.kind = NodeKind::Sub; break;
    case 4: e.kind = NodeKind::Mul; break;
    case 5: e.kind = NodeKind::Div; break;
    case 6: e.kind = NodeKind::Pow; break;
    default:
      e.kind = NodeKind::Call;
      e.func = static_cast<dsl::Func>(eng() % 5);
      break;
  }
  e.lhs = random_expr(eng, depth - 1, dims);
  if (e.kind != NodeKind::Neg && e.kind != NodeKind::Call)
    e.rhs = random_expr(eng, depth - 1, dims);
  return make(std::move(e));
}

}  // namespace viab::testing

#endif
