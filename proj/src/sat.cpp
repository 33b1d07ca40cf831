// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include "protopart/sat.hpp"

#include <algorithm>
#include <cassert>

namespace protopart::sat {

Var Solver::new_var() {
    auto v = static_cast<Var>(assigns_.size());
    assigns_.push_back(undef);
    level_.push_back(0);
    reason_.push_back(-1);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    return v;
}

void Solver::enqueue(Lit l, int reason) {
    auto v = static_cast<std::size_t>(l.var());
    assigns_[v] = static_cast<std::int8_t>(!l.negated());
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
}

void Solver::attach(int ci) {
    const auto& c = clauses_[static_cast<std::size_t>(ci)];
    watches_[static_cast<std::size_t>(c[0].code)].push_back(ci);
    watches_[static_cast<std::size_t>(c[1].code)].push_back(ci);
}

bool Solver::add_clause(std::vector<Lit> clause) {
    if (!ok_) {
        return false;
    }
    cancel_until(0);
    std::sort(clause.begin(), clause.end(), [](Lit a, Lit b) { return a.code < b.code; });
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < clause.size(); ++i) {
        auto l = clause[i];
        assert(l.var() >= 0 && l.var() < num_vars());
        if (lit_value(l) == 1 || (i + 1 < clause.size() && clause[i + 1] == ~l)) {
            return true;  // satisfied at level 0 or tautology
        }
        if (lit_value(l) == 0 || (!kept.empty() && kept.back() == l)) {
            continue;
        }
        kept.push_back(l);
    }
    if (kept.empty()) {
        ok_ = false;
        return false;
    }
    if (kept.size() == 1) {
        enqueue(kept[0], -1);
        ok_ = propagate() < 0;
        return ok_;
    }
    clauses_.push_back(std::move(kept));
    attach(static_cast<int>(clauses_.size()) - 1);
    return true;
}

int Solver::propagate() {
    while (qhead_ < trail_.size()) {
        Lit false_lit = ~trail_[qhead_++];
        auto& ws = watches_[static_cast<std::size_t>(false_lit.code)];
        std::size_t keep = 0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
            int ci = ws[i];
            auto& c = clauses_[static_cast<std::size_t>(ci)];
            if (c[0] == false_lit) {
                std::swap(c[0], c[1]);
            }
            if (lit_value(c[0]) == 1) {
                ws[keep++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (lit_value(c[k]) != 0) {
                    std::swap(c[1], c[k]);
                    watches_[static_cast<std::size_t>(c[1].code)].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) {
                continue;
            }
            ws[keep++] = ci;
            if (lit_value(c[0]) == 0) {
                for (std::size_t j = i + 1; j < ws.size(); ++j) {
                    ws[keep++] = ws[j];
                }
                ws.resize(keep);
                qhead_ = trail_.size();
                return ci;
            }
            enqueue(c[0], ci);
        }
        ws.resize(keep);
    }
    return -1;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level) {
    learnt.clear();
    learnt.push_back(Lit{});
    int path = 0;
    Lit p{};
    auto idx = static_cast<std::ptrdiff_t>(trail_.size()) - 1;
    do {
        const auto& c = clauses_[static_cast<std::size_t>(confl)];
        for (std::size_t j = (p.code < 0 ? 0 : 1); j < c.size(); ++j) {
            auto q = c[j];
            auto v = static_cast<std::size_t>(q.var());
            if (seen_[v] == 0 && level_[v] > 0) {
                seen_[v] = 1;
                if (level_[v] >= decision_level()) {
                    ++path;
                } else {
                    learnt.push_back(q);
                }
            }
        }
        while (seen_[static_cast<std::size_t>(trail_[static_cast<std::size_t>(idx)].var())] == 0) {
            --idx;
        }
        p = trail_[static_cast<std::size_t>(idx)];
        --idx;
        confl = reason_[static_cast<std::size_t>(p.var())];
        seen_[static_cast<std::size_t>(p.var())] = 0;
        --path;
    } while (path > 0);
    learnt[0] = ~p;

    backtrack_level = 0;
    std::size_t max_i = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
        auto lv = level_[static_cast<std::size_t>(learnt[i].var())];
        if (lv > backtrack_level) {
            backtrack_level = lv;
            max_i = i;
        }
    }
    if (learnt.size() > 1) {
        std::swap(learnt[1], learnt[max_i]);
    }
    for (std::size_t i = 1; i < learnt.size(); ++i) {
        seen_[static_cast<std::size_t>(learnt[i].var())] = 0;
    }
}

void Solver::cancel_until(int level) {
    if (decision_level() <= level) {
        return;
    }
    auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
    for (auto i = trail_.size(); i > stop; --i) {
        auto v = trail_[i - 1].var();
        assigns_[static_cast<std::size_t>(v)] = undef;
        reason_[static_cast<std::size_t>(v)] = -1;
        next_decision_ = std::min(next_decision_, v);
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
}

bool Solver::solve(std::span<const Lit> assumptions) {
    model_.clear();
    if (!ok_) {
        return false;
    }
    cancel_until(0);
    if (propagate() >= 0) {
        ok_ = false;
        return false;
    }
    std::vector<Lit> learnt;
    for (;;) {
        int confl = propagate();
        if (confl >= 0) {
            ++conflicts_;
            if (decision_level() == 0) {
                ok_ = false;
                return false;
            }
            int bt = 0;
            analyze(confl, learnt, bt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], -1);
            } else {
                clauses_.push_back(learnt);
                int ci = static_cast<int>(clauses_.size()) - 1;
                attach(ci);
                enqueue(learnt[0], ci);
            }
            continue;
        }

        Lit next{};
        while (decision_level() < static_cast<int>(assumptions.size())) {
            Lit a = assumptions[static_cast<std::size_t>(decision_level())];
            auto val = lit_value(a);
            if (val == 1) {
                trail_lim_.push_back(static_cast<int>(trail_.size()));  // already satisfied: empty level
            } else if (val == 0) {
                cancel_until(0);
                return false;
            } else {
                next = a;
                break;
            }
        }
        if (next.code < 0) {
            while (next_decision_ < num_vars() && assigns_[static_cast<std::size_t>(next_decision_)] != undef) {
                ++next_decision_;
            }
            if (next_decision_ == num_vars()) {
                model_.assign(assigns_.begin(), assigns_.end());
                cancel_until(0);
                return true;
            }
            next = Lit::neg(next_decision_);
        }
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(next, -1);
    }
}

}  // namespace protopart::sat
