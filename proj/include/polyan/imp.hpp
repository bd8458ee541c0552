#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyan/linalg.hpp"
#include "polyan/text.hpp"

namespace polyan::imp {

struct Aexp;
struct Bexp;
struct Stmt;
using AexpPtr = std::shared_ptr<const Aexp>;
using BexpPtr = std::shared_ptr<const Bexp>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Aexp {
    enum class Kind { num, var, add, sub, mul };
    Kind kind = Kind::num;
    Integer value = 0;
    std::size_t var = 0;
    AexpPtr lhs, rhs;
    SourcePos pos;
};

struct Bexp {
    enum class Kind { lit, eq, lt };
    Kind kind = Kind::lit;
    bool value = true;
    AexpPtr lhs, rhs;
    SourcePos pos;
};

struct Stmt {
    enum class Kind { skip, assign, seq, ite, loop };
    Kind kind = Kind::skip;
    /// Pre-order index among all statements of the program.
    std::size_t id = 0;
    SourcePos pos;
    std::size_t var = 0;
    AexpPtr expr;
    BexpPtr cond;
    /// seq: first/second; ite: then/else; loop: body in `s0`.
    StmtPtr s0, s1;
};

struct Program {
    std::vector<std::string> vars;
    /// True when the source starts with a `var` declaration.
    bool declared = false;
    StmtPtr body;
    /// Statements indexed by id.
    std::vector<const Stmt*> points;
};

/// Without a leading `var x, y;` declaration, variables are numbered in order
/// of first occurrence.
Program parse_program(std::string_view text);
std::string format(const Program& p);

bool same_aexp(const Aexp& a, const Aexp& b);
bool same_bexp(const Bexp& a, const Bexp& b);
/// Structural equality, ignoring source positions and ids.
bool same_stmt(const Stmt& a, const Stmt& b);

using Store = std::vector<Integer>;

Integer eval(const Aexp& a, const Store& s);
bool eval(const Bexp& b, const Store& s);

struct ExecResult {
    bool diverged = false;
    Store store;
};

/// Called with each loop statement and the store every time its guard is tested.
using LoopObserver = std::function<void(const Stmt&, const Store&)>;

/// Each statement execution and each loop iteration costs one unit of fuel.
ExecResult exec(const Program& p, Store store, std::size_t fuel, const LoopObserver& observe = {});

/// Affine view of an expression, when it has one.
std::optional<LinExpr> linearize(const Aexp& a, std::size_t dim);

}  // namespace polyan::imp
