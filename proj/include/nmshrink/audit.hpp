#pragma once

// Closed-form checks of the propriety and dominance conditions.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/estimators.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"

namespace nmshrink::audit {

/// One named condition with the inequality it encodes, rendered for reports.
struct Condition {
    std::string name;
    bool holds = false;
    std::string inequality;
};

struct Verdict {
    bool holds = false;
    std::vector<Condition> conditions;

    void add(std::string name, bool ok, std::string inequality) {
        conditions.push_back({std::move(name), ok, std::move(inequality)});
    }
    Verdict& finish() {
        holds = std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.holds; });
        return *this;
    }
    /// The first failing inequality, or an empty string.
    [[nodiscard]] std::string first_failure() const {
        for (const auto& c : conditions)
            if (!c.holds) return c.name + ": " + c.inequality;
        return {};
    }
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// a0 > 0 with a finite tail, or a0 = 0 with both ends finite.
inline Verdict propriety_conditions(double shifted_a0, const PriorSpec& prior, std::size_t n_cols, const std::string& label) {
    const double nd = static_cast<double>(n_cols);
    const double tail_exp = prior.alpha - nd * prior.a_dot();
    Verdict v;
    const bool tail = tail_integral_finite(tail_exp, prior.beta, prior.g);
    v.add("tail", tail,
          "int_1^inf t^(" + fmt(tail_exp) + " - 1) e^(-" + fmt(prior.beta) + " t) g(t) dt < inf" +
              (prior.g.is_constant_one() ? " (g1: beta > 0 or alpha < N a.)" : ""));
    if (shifted_a0 > 0.0) {
        v.add("origin", true, label + " = " + fmt(shifted_a0) + " > 0");
    } else if (shifted_a0 == 0.0) {
        const double s = prior.alpha - nd;
        v.add("origin", small_t_integral_finite(s, prior.g),
              label + " = 0 and int_0^1 t^(" + fmt(s) + " - 1) e^(-beta t) g(t) dt < inf");
    } else {
        v.add("origin", false, label + " = " + fmt(shifted_a0) + " >= 0");
    }
    return v.finish();
}

}  // namespace detail

/// Propriety of the hierarchical prior and of its posterior.
struct ProprietyVerdict {
    PriorSpec prior;
    std::size_t n_cols = 1;
    bool prior_proper = false;
    std::string reasons;

    /// Posterior propriety for all data given r.
    [[nodiscard]] Verdict posterior(double r) const { return detail::propriety_conditions(r + prior.a0, prior, n_cols, "r + a0"); }
    [[nodiscard]] bool posterior_proper_given_r(double r) const { return posterior(r).holds; }
};

inline ProprietyVerdict check_prior_propriety(const PriorSpec& prior, std::size_t n_cols) {
    prior.validate();
    require_input(n_cols >= 1, "check_prior_propriety: N must be positive");
    const Verdict v = detail::propriety_conditions(prior.a0, prior, n_cols, "a0");
    std::string reasons;
    for (const auto& c : v.conditions) reasons += (c.holds ? "[ok] " : "[fails] ") + c.inequality + "\n";
    return {prior, n_cols, v.holds, reasons};
}

struct SufficientConditionResult {
    bool holds_up_to_z_max = false;
    std::optional<Count> first_violation;
    std::string failed_condition;
    /// Check of condition (ii) at z = infinity for rules with a known limit.
    std::optional<bool> limit_holds;
};

/// Sufficient condition for delta-shrinkage to dominate UMVU under L_n:
/// (i) z delta(z) <= (z+1) delta(z+1) for z >= 1 and (ii) the two-branch
/// inequality for z >= 2, both checked for z <= z_max.
inline SufficientConditionResult check_sufficient_condition(const DeltaRule& delta, double r, std::size_t m, std::size_t n, Count z_max) {
    require_condition(r >= 2.5, "check_sufficient_condition: the condition requires r >= 5/2");
    require_input(m >= 1 && n >= 1, "check_sufficient_condition: m and n must be positive");
    require_input(z_max >= 1, "check_sufficient_condition: z_max must be at least 1");
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double cap = 2.0 * (md - 3.0);

    auto branch = [&](double d, double z) -> std::optional<std::string> {
        const double lin = (md - 6.0) * d + 2.0 * (md - 3.0) * r;
        if (d <= cap) {
            if (lin < 0.0) return "(ii) delta <= 2(m-3) but (m-6) delta + 2(m-3) r = " + detail::fmt(lin) + " < 0";
        } else if (nd * lin < (z - 1.0) * (d - cap)) {
            return "(ii) delta > 2(m-3) but n{(m-6) delta + 2(m-3) r} = " + detail::fmt(nd * lin) +
                   " < (z-1)(delta - 2(m-3)) = " + detail::fmt((z - 1.0) * (d - cap));
        }
        return std::nullopt;
    };

    SufficientConditionResult out;
    double prev = delta(1);
    for (Count z = 1; z <= z_max; ++z) {
        const double dz = prev;
        const double dn = delta(z + 1);
        prev = dn;
        if (!(dz > 0.0) || !(dn > 0.0)) {
            out.first_violation = z;
            out.failed_condition = "delta must be strictly positive";
            return out;
        }
        const double zd = static_cast<double>(z);
        if (zd * dz > (zd + 1.0) * dn * (1.0 + 1e-14)) {
            out.first_violation = z;
            out.failed_condition = "(i) z delta(z) = " + detail::fmt(zd * dz) + " > (z+1) delta(z+1) = " +
                                   detail::fmt((zd + 1.0) * dn);
            return out;
        }
        if (z >= 2) {
            if (auto msg = branch(dz, zd)) {
                out.first_violation = z;
                out.failed_condition = *msg;
                return out;
            }
        }
    }
    out.holds_up_to_z_max = true;
    if (delta.limit) {
        const double d = *delta.limit;
        // For delta(inf) > 2(m-3) the right-hand side of (ii) grows without bound.
        out.limit_holds = d <= cap && (md - 6.0) * d + 2.0 * (md - 3.0) * r >= 0.0;
    }
    return out;
}

/// Empirical Bayes dominance: m >= 7 and r >= 5/2, for every n.
inline Verdict check_eb_dominance(std::size_t m, double r) {
    Verdict v;
    v.add("m", m >= 7, "m = " + std::to_string(m) + " >= 7");
    v.add("r", r >= 2.5, "r = " + detail::fmt(r) + " >= 5/2");
    return v.finish();
}

/// Hierarchical Bayes dominance under L_n.
inline Verdict check_hb_dominance(double alpha, double beta, const GChoice& g, double r, std::size_t m,
                                  std::size_t n, std::size_t n_cols) {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    Verdict v;
    v.add("assumption", hb_assumption_holds(alpha, beta, g, r, m, n_cols),
          "r > m with int_1^inf t^(alpha - N m - 1) e^(-beta t) g dt < inf, or r = m with alpha > N as well");
    v.add("g_nonincreasing", g.nonincreasing(), "g = " + g.describe() + " is nonincreasing");
    const double bound = std::min(nd * (md - 2.0), nd * md / 2.0 + beta * r);
    v.add("alpha_bound", alpha + 1.0 <= bound,
          "alpha + 1 = " + detail::fmt(alpha + 1.0) + " <= min{n(m-2), nm/2 + beta r} = " + detail::fmt(bound));
    return v.finish();
}

/// Dominance of the hierarchical posterior mean over the Dirichlet posterior
/// mean under the KL-type loss.
inline Verdict check_kl_dominance(double alpha, double beta, const GChoice& g, double a0, std::span<const double> a,
                                  double r, std::size_t n, std::size_t n_cols) {
    PriorSpec prior{alpha, beta, g, a0, std::vector<double>(a.begin(), a.end())};
    prior.validate();
    const double nd = static_cast<double>(n);
    Verdict v;
    const Verdict post = detail::propriety_conditions(r + a0, prior, n_cols, "r + a0");
    v.add("posterior_proper", post.holds, post.holds ? "posterior proper" : post.first_failure());
    v.add("g_nonincreasing", g.nonincreasing(), "g = " + g.describe() + " is nonincreasing");
    v.add("a_sum", a0 + prior.a_dot() + 1.0 >= 0.0, "a0 + a. + 1 = " + detail::fmt(a0 + prior.a_dot() + 1.0) + " >= 0");
    v.add("alpha_bound", alpha + 1.0 <= nd * (-a0 - 2.0),
          "alpha + 1 = " + detail::fmt(alpha + 1.0) + " <= n(-a0 - 2) = " + detail::fmt(nd * (-a0 - 2.0)));
    return v.finish();
}

/// Jeffreys prior of the negative multinomial: a0 = (1 - m)/2, a = 1/2.
inline GeneralizedDirichlet jeffreys_prior(std::size_t m) {
    require_input(m >= 1, "jeffreys_prior: m must be positive");
    return GeneralizedDirichlet((1.0 - static_cast<double>(m)) / 2.0, std::vector<double>(m, 0.5));
}

/// Parameters of one simulation case for the dominance table.
struct CaseParams {
    std::string name;
    double r;
    std::size_t m;
    std::size_t n_cols;
    double alpha;
    double beta = 1.0;
};

struct DominanceRow {
    std::string name;
    Verdict eb0;
    Verdict eb;
    Verdict hb;
};

/// EB0 is the N = 1 empirical Bayes rule applied per column, so it is covered
/// by the same m, r condition; HB is judged with n = N.
inline DominanceRow dominance_row(const CaseParams& c) {
    return {c.name, check_eb_dominance(c.m, c.r), check_eb_dominance(c.m, c.r),
            check_hb_dominance(c.alpha, c.beta, GChoice::constant_one(), c.r, c.m, c.n_cols, c.n_cols)};
}

inline std::vector<CaseParams> simulation_cases() {
    return {{"(i)", 8.0, 7, 3, 14.0}, {"(ii)", 4.0, 3, 7, 6.0}, {"(iii)", 2.0, 1, 7, 6.0}};
}

}  // namespace nmshrink::audit
