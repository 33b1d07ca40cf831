// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace protopart::sat {

using Var = int;

/// Literal: 2 * var + (negated ? 1 : 0).
struct Lit {
    int code = -1;

    static Lit pos(Var v) { return Lit{2 * v}; }
    static Lit neg(Var v) { return Lit{2 * v + 1}; }

    [[nodiscard]] Var var() const { return code >> 1; }
    [[nodiscard]] bool negated() const { return (code & 1) != 0; }
    Lit operator~() const { return Lit{code ^ 1}; }
    bool operator==(const Lit&) const = default;
};

/// Conflict-driven clause learning solver with assumption support.
///
/// Decisions follow variable index order with the false phase first, so
/// variables created first are the ones the search tries to keep false.
/// Learned clauses persist across calls to solve().
class Solver {
  public:
    Var new_var();
    [[nodiscard]] int num_vars() const { return static_cast<int>(assigns_.size()); }

    /// Returns false once the clause database is unsatisfiable at level 0.
    bool add_clause(std::vector<Lit> clause);

    /// True if the clauses plus assumptions are satisfiable; the model is then
    /// available through value().
    bool solve(std::span<const Lit> assumptions = {});

    [[nodiscard]] bool value(Var v) const { return model_.at(static_cast<std::size_t>(v)) != 0; }
    [[nodiscard]] bool value(Lit l) const { return value(l.var()) != l.negated(); }

    [[nodiscard]] std::uint64_t conflicts() const { return conflicts_; }

  private:
    static constexpr std::int8_t undef = -1;

    [[nodiscard]] std::int8_t lit_value(Lit l) const {
        auto a = assigns_[static_cast<std::size_t>(l.var())];
        return a == undef ? undef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(l.negated()));
    }
    [[nodiscard]] int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(Lit l, int reason);
    int propagate();  // conflicting clause index or -1
    void analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level);
    void cancel_until(int level);
    void attach(int clause_index);

    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<int>> watches_;  // by literal code: clauses watching it
    std::vector<std::int8_t> assigns_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::vector<std::int8_t> seen_;
    std::vector<std::int8_t> model_;
    std::size_t qhead_ = 0;
    int next_decision_ = 0;
    bool ok_ = true;
    std::uint64_t conflicts_ = 0;
};

}  // namespace protopart::sat
