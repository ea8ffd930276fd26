#include "random_model.hpp"

#include <fmt/format.h>

#include <vector>

namespace ssmi_test {

using ssmi::Expr;
using ssmi::Model;
using ssmi::Variable;
using ssmi::VariableKind;

namespace {

struct Candidate {
    std::string name;
    bool repeating;
    bool positive;
};

class Gen {
public:
    Gen(std::mt19937_64& rng, const ModelGenOptions& opt) : rng_(rng), opt_(opt) {}

    Model run() {
        Model m;
        if (opt_.allow_dimension && chance(0.6)) {
            static const char* labels[] = {"Alpha", "Beta", "Gamma", "Delta"};
            int k = 1 + static_cast<int>(rng_() % 4);
            ssmi::Dimension dim;
            dim.name = "Seg";
            for (int i = 0; i < k; ++i) dim.instances.push_back(labels[i]);
            m.dimension = std::move(dim);
        }
        int n = 2 + static_cast<int>(rng_() % (opt_.max_vars - 1));
        for (int i = 0; i < n; ++i) add_variable(m, i);
        return m;
    }

private:
    bool chance(double p) { return std::uniform_real_distribution<>(0, 1)(rng_) < p; }
    double literal() { return std::uniform_real_distribution<>(0.5, 2.5)(rng_); }
    int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

    void add_variable(Model& m, int i) {
        Variable v;
        // occasional punctuation exercises mangling and quoted labels
        switch (pick(4)) {
        case 0: v.display_label = fmt::format("Var{}", i); break;
        case 1: v.display_label = fmt::format("Item {} Cost", i); break;
        case 2: v.display_label = fmt::format("Rate ({})", i); break;
        default: v.display_label = fmt::format("X{}", i); break;
        }
        v.canonical_name = ssmi::mangle(v.display_label);

        double roll = std::uniform_real_distribution<>(0, 1)(rng_);
        if (candidates_.empty() || roll < 0.25)
            v.kind = VariableKind::Input;
        else if (roll < 0.55)
            v.kind = VariableKind::Parameter;
        else if (roll < 0.90)
            v.kind = VariableKind::Calculated;
        else
            v.kind = VariableKind::Output;
        v.repeating = m.dimension && chance(0.4);

        bool positive = true;
        if (ssmi::is_given(v.kind)) {
            std::size_t count = v.repeating ? m.dimension->instances.size() : 1;
            for (std::size_t c = 0; c < count; ++c) v.literals.push_back(literal());
        } else {
            if (chance(0.7)) {
                v.formula = gen_pos(2, v.repeating);
            } else {
                positive = false;
                if (chance(0.5))
                    v.formula = Expr::neg(gen_term(1, v.repeating));
                else
                    v.formula = Expr::bin('-', gen_term(1, v.repeating), gen_term(1, v.repeating));
            }
        }
        candidates_.push_back({v.canonical_name, v.repeating, positive});
        m.variables.push_back(std::move(v));
    }

    std::vector<Candidate> usable(bool repeating_target, bool positive_only) const {
        std::vector<Candidate> out;
        for (const auto& c : candidates_) {
            if (!repeating_target && c.repeating) continue;  // scalars reach repeating via SUM
            if (positive_only && !c.positive) continue;
            out.push_back(c);
        }
        return out;
    }

    std::vector<Candidate> repeating_candidates(bool positive_only) const {
        std::vector<Candidate> out;
        for (const auto& c : candidates_)
            if (c.repeating && (!positive_only || c.positive)) out.push_back(c);
        return out;
    }

    // positive-certain subtree: safe as denominator or power base
    Expr gen_pos(int depth, bool repeating_target) {
        auto refs = usable(repeating_target, true);
        double roll = std::uniform_real_distribution<>(0, 1)(rng_);
        if (depth == 0 || roll < 0.25) {
            if (!refs.empty() && chance(0.6)) return Expr::ref(refs[pick(refs.size())].name);
            return Expr::num(literal());
        }
        if (roll < 0.40 && !refs.empty()) return Expr::ref(refs[pick(refs.size())].name);
        if (roll < 0.50) {
            auto reps = repeating_candidates(true);
            if (!reps.empty()) return Expr::sum(reps[pick(reps.size())].name);
            return Expr::num(literal());
        }
        if (roll < 0.60) {
            Expr exponent = Expr::num(1 + pick(3));
            if (chance(0.2)) exponent = Expr::neg(std::move(exponent));
            return Expr::bin('^', gen_pos(depth - 1, repeating_target), std::move(exponent));
        }
        char op = "+*/"[pick(3)];
        return Expr::bin(op, gen_pos(depth - 1, repeating_target),
                         gen_pos(depth - 1, repeating_target));
    }

    // any-sign subtree; division and '^' only over positive-certain parts
    Expr gen_term(int depth, bool repeating_target) {
        auto refs = usable(repeating_target, false);
        double roll = std::uniform_real_distribution<>(0, 1)(rng_);
        if (depth == 0 || roll < 0.3) {
            if (!refs.empty() && chance(0.7)) return Expr::ref(refs[pick(refs.size())].name);
            return Expr::num(literal());
        }
        if (roll < 0.45) return gen_pos(depth, repeating_target);
        if (roll < 0.55) return Expr::neg(gen_term(depth - 1, repeating_target));
        if (roll < 0.65) {
            auto reps = repeating_candidates(false);
            if (!reps.empty()) return Expr::sum(reps[pick(reps.size())].name);
            return Expr::num(literal());
        }
        if (roll < 0.75)
            return Expr::bin('/', gen_term(depth - 1, repeating_target),
                             gen_pos(depth - 1, repeating_target));
        char op = "+-*"[pick(3)];
        return Expr::bin(op, gen_term(depth - 1, repeating_target),
                         gen_term(depth - 1, repeating_target));
    }

    std::size_t pick(std::size_t n) { return rng_() % n; }

    std::mt19937_64& rng_;
    ModelGenOptions opt_;
    std::vector<Candidate> candidates_;
};

}  // namespace

Model random_model(std::mt19937_64& rng, const ModelGenOptions& opt) {
    return Gen(rng, opt).run();
}

std::map<std::string, double> random_inputs(std::mt19937_64& rng, const Model& m) {
    std::map<std::string, double> out;
    for (const auto& v : m.variables) {
        if (v.kind != VariableKind::Input) continue;
        if (std::uniform_real_distribution<>(0, 1)(rng) < 0.7)
            out[v.canonical_name] = std::uniform_real_distribution<>(0.5, 2.5)(rng);
    }
    return out;
}

}  // namespace ssmi_test
