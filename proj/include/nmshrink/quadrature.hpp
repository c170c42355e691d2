#pragma once

// Adaptive composite Gauss-Legendre quadrature for integrands supplied as
// their logarithm. All accumulation is shifted by a running maximum so that
// integrands spanning hundreds of nats neither overflow nor underflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/special.hpp"

namespace nmshrink::quadrature {

inline constexpr std::size_t kOrder = 16;

struct Rule {
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline const Rule& gauss_legendre() {
    static const Rule rule = [] {
        Rule out;
        constexpr std::size_t n = kOrder;
        for (std::size_t k = 0; k < n; ++k) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            out.nodes[k] = x;
            out.weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return out;
    }();
    return rule;
}

struct Settings {
    /// Nodes of the initial rule (split into panels of 2 x kOrder nodes).
    std::size_t initial_nodes = 64;
    /// Hard cap on the number of nodes of the final composite rule.
    std::size_t max_nodes = std::size_t{1} << 14;
    /// A panel whose log-integrand varies by more than this is always split.
    double split_nats = 30.0;
    /// Target relative error of the integral.
    double rel_tol = 1e-12;
};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double log_value = -special::kInf;  // log of the refined (two half-panel) estimate
    double log_error = -special::kInf;  // log |coarse - refined|
    double log_range = 0.0;             // max - min of the log-integrand over the nodes
};

struct Result {
    double log_value = -special::kInf;
    double rel_error = 0.0;
    std::size_t nodes = 0;
    std::vector<Panel> panels;
};

namespace detail {

// log of sum_k w_k f(x_k) on [a, b] plus the min/max of log f at the nodes.
template <class LogF>
double log_gl(const LogF& logf, double a, double b, double& lo, double& hi) {
    const Rule& rule = gauss_legendre();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::array<double, kOrder> terms{};
    for (std::size_t k = 0; k < kOrder; ++k) {
        const double lf = logf(mid + half * rule.nodes[k]);
        if (std::isnan(lf)) throw NumericalError("quadrature: log-integrand returned NaN");
        if (lf == special::kInf) throw NumericalError("quadrature: log-integrand returned +inf");
        lo = std::min(lo, lf);
        hi = std::max(hi, lf);
        terms[k] = lf + std::log(rule.weights[k] * half);
    }
    return special::log_sum_exp(terms);
}

template <class LogF>
Panel evaluate_panel(const LogF& logf, double a, double b) {
    Panel p{a, b};
    double lo = special::kInf;
    double hi = -special::kInf;
    const double coarse = log_gl(logf, a, b, lo, hi);
    const double m = 0.5 * (a + b);
    const double left = log_gl(logf, a, m, lo, hi);
    const double right = log_gl(logf, m, b, lo, hi);
    p.log_value = special::log_add_exp(left, right);
    if (hi == -special::kInf) {
        p.log_error = -special::kInf;
        p.log_range = 0.0;
        return p;
    }
    lo = std::max(lo, hi - 745.0);  // underflowed tails count as a large, finite range
    p.log_range = hi - lo;
    const double mx = std::max(coarse, p.log_value);
    const double diff = std::abs(std::exp(coarse - mx) - std::exp(p.log_value - mx));
    p.log_error = diff > 0.0 ? mx + std::log(diff) : -special::kInf;
    return p;
}

inline double total_log(const std::vector<Panel>& panels, double Panel::*field) {
    std::vector<double> v;
    v.reserve(panels.size());
    for (const auto& p : panels) v.push_back(p.*field);
    return special::log_sum_exp(v);
}

}  // namespace detail

/// Integrates exp(logf) over [a, b] with the given initial breakpoints.
template <class LogF>
Result integrate_log(const LogF& logf, std::span<const double> breakpoints, const Settings& settings = {}) {
    if (breakpoints.size() < 2) throw InputError("quadrature: need at least two breakpoints");
    const std::size_t nodes_per_panel = 2 * kOrder;
    std::vector<Panel> panels;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (!(breakpoints[k + 1] > breakpoints[k])) continue;
        const std::size_t pieces = std::max<std::size_t>(
            1, settings.initial_nodes / nodes_per_panel / (breakpoints.size() - 1));
        const double w = (breakpoints[k + 1] - breakpoints[k]) / static_cast<double>(pieces);
        for (std::size_t j = 0; j < pieces; ++j) {
            const double lo = breakpoints[k] + w * static_cast<double>(j);
            const double hi = j + 1 == pieces ? breakpoints[k + 1] : lo + w;
            panels.push_back(detail::evaluate_panel(logf, lo, hi));
        }
    }
    if (panels.empty()) throw InputError("quadrature: empty integration range");

    const double log_tol = std::log(settings.rel_tol);
    for (;;) {
        const double total = detail::total_log(panels, &Panel::log_value);
        const double err = detail::total_log(panels, &Panel::log_error);
        // Panels with a wide dynamic range take priority; otherwise refine the worst error.
        auto worst = panels.end();
        for (auto it = panels.begin(); it != panels.end(); ++it) {
            if (it->log_range > settings.split_nats && it->log_value > total + log_tol - 40.0) {
                if (worst == panels.end() || it->log_value > worst->log_value) worst = it;
            }
        }
        if (worst == panels.end()) {
            if (total == -special::kInf || err - total <= log_tol) {
                Result out;
                out.log_value = total;
                out.rel_error = total == -special::kInf ? 0.0 : std::exp(err - total);
                out.nodes = panels.size() * nodes_per_panel;
                std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
                out.panels = std::move(panels);
                return out;
            }
            worst = std::max_element(panels.begin(), panels.end(),
                                     [](const Panel& x, const Panel& y) { return x.log_error < y.log_error; });
        }
        if ((panels.size() + 1) * nodes_per_panel > settings.max_nodes) {
            throw NumericalError("quadrature: panel refinement exceeded the cap of " +
                                 std::to_string(settings.max_nodes) + " nodes (relative error estimate " +
                                 std::to_string(std::exp(err - total)) + ")");
        }
        const double a = worst->a;
        const double b = worst->b;
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b)) throw NumericalError("quadrature: panel width reached machine resolution");
        *worst = detail::evaluate_panel(logf, a, m);
        panels.push_back(detail::evaluate_panel(logf, m, b));
    }
}

/// Re-integrates on a fixed set of panels, each subdivided `pieces` times.
/// Used to confirm that refining a converged rule leaves the value unchanged.
template <class LogF>
double log_integral_on_panels(const LogF& logf, std::span<const Panel> panels, std::size_t pieces) {
    std::vector<double> parts;
    for (const auto& p : panels) {
        const double w = (p.b - p.a) / static_cast<double>(pieces);
        for (std::size_t j = 0; j < pieces; ++j) {
            const double lo = p.a + w * static_cast<double>(j);
            const double hi = j + 1 == pieces ? p.b : lo + w;
            double mn = special::kInf;
            double mx = -special::kInf;
            parts.push_back(detail::log_gl(logf, lo, hi, mn, mx));
        }
    }
    return special::log_sum_exp(parts);
}

}  // namespace nmshrink::quadrature
