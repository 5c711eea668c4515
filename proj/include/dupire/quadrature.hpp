#pragma once

#include "dupire/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

// Adaptive Gauss-Kronrod (10/21 point) quadrature for vector-valued real
// integrands, plus a half-line driver that grows panels geometrically.
namespace dupire::quad {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::size_t max_evals = 4'000'000;
};

template <std::size_t N>
struct Result {
    Vec<N> value{};
    Vec<N> error{};
    std::size_t evals = 0;
};

template <std::size_t N>
struct HalfLineResult : Result<N> {
    double upper = 0.0;  // where integration stopped
    int panels = 0;
};

namespace detail {

// Kronrod abscissae (descending), Kronrod weights, Gauss weights for odd
// indices of the Kronrod set.
extern const std::array<double, 11> kXgk;
extern const std::array<double, 11> kWgk;
extern const std::array<double, 5> kWg;
extern const double kWgCenter;

template <std::size_t N>
struct Segment {
    double a = 0.0;
    double b = 0.0;
    Vec<N> value{};
    Vec<N> error{};
    double score = 0.0;  // max_i error_i / tol_i

    bool operator<(const Segment& o) const { return score < o.score; }
};

}  // namespace detail

// One GK21 application on [a, b].
template <std::size_t N, class F>
Result<N> gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Vec<N> kron{};
    Vec<N> gauss{};
    const Vec<N> fc = f(center);
    for (std::size_t i = 0; i < N; ++i) {
        kron[i] = detail::kWgk[10] * fc[i];
        gauss[i] = 0.0;
    }
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * detail::kXgk[j];
        const Vec<N> f1 = f(center - dx);
        const Vec<N> f2 = f(center + dx);
        for (std::size_t i = 0; i < N; ++i) {
            const double sum = f1[i] + f2[i];
            kron[i] += detail::kWgk[j] * sum;
            if (j % 2 == 1) gauss[i] += detail::kWg[j / 2] * sum;
        }
    }
    Result<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        r.value[i] = kron[i] * half;
        r.error[i] = std::abs((kron[i] - gauss[i]) * half);
    }
    r.evals = 21;
    return r;
}

// Globally adaptive bisection on [a, b] until every component satisfies
// error <= max(abs_tol, rel_tol * |value|) (scaled by `budget`, in (0, 1]).
template <std::size_t N, class F>
Result<N> adaptive(F& f, double a, double b, const Options& opt, double budget,
                   std::size_t& evals_used) {
    auto score_of = [&](const Vec<N>& err, const Vec<N>& total) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double tol = budget * std::max(opt.abs_tol, opt.rel_tol * std::abs(total[i]));
            s = std::max(s, err[i] / tol);
        }
        return s;
    };
    std::priority_queue<detail::Segment<N>> heap;
    Result<N> first = gk21<N>(f, a, b);
    evals_used += first.evals;
    Vec<N> total = first.value;
    Vec<N> total_err = first.error;
    heap.push({a, b, first.value, first.error, 0.0});
    while (true) {
        if (score_of(total_err, total) <= 1.0) break;
        if (evals_used > opt.max_evals) {
            throw QuadratureError("quadrature: tolerance not reached within max_evals = " +
                                  std::to_string(opt.max_evals));
        }
        detail::Segment<N> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("quadrature: interval cannot be subdivided further");
        }
        Result<N> left = gk21<N>(f, worst.a, mid);
        Result<N> right = gk21<N>(f, mid, worst.b);
        evals_used += 42;
        for (std::size_t i = 0; i < N; ++i) {
            total[i] += left.value[i] + right.value[i] - worst.value[i];
            total_err[i] += left.error[i] + right.error[i] - worst.error[i];
        }
        detail::Segment<N> ls{worst.a, mid, left.value, left.error, 0.0};
        detail::Segment<N> rs{mid, worst.b, right.value, right.error, 0.0};
        ls.score = score_of(left.error, total);
        rs.score = score_of(right.error, total);
        heap.push(ls);
        heap.push(rs);
    }
    // Re-sum from the leaves to shed accumulated rounding of the running total.
    Result<N> out;
    while (!heap.empty()) {
        const auto& s = heap.top();
        for (std::size_t i = 0; i < N; ++i) {
            out.value[i] += s.value[i];
            out.error[i] += s.error[i];
        }
        heap.pop();
    }
    out.evals = evals_used;
    return out;
}

// Integral over [0, inf) using panels [0,h), [h,3h), [3h,7h), ... Stops once two
// consecutive panels are below tolerance, or at `truncation` when it is > 0.
template <std::size_t N, class F>
HalfLineResult<N> half_line(F& f, double h0, const Options& opt, double truncation = 0.0,
                            double hard_cap = 1e7) {
    HalfLineResult<N> out;
    std::size_t evals = 0;
    double lo = 0.0;
    double width = h0;
    int quiet = 0;
    while (true) {
        double hi = lo + width;
        bool last = false;
        if (truncation > 0.0 && hi >= truncation) {
            hi = truncation;
            last = true;
        }
        const Result<N> panel = adaptive<N>(f, lo, hi, opt, 0.25, evals);
        bool small = true;
        for (std::size_t i = 0; i < N; ++i) {
            out.value[i] += panel.value[i];
            out.error[i] += panel.error[i];
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value[i]));
            if (std::abs(panel.value[i]) > tol || panel.error[i] > tol) small = false;
        }
        ++out.panels;
        lo = hi;
        width *= 2.0;
        if (last) break;
        quiet = small ? quiet + 1 : 0;
        if (quiet >= 2 && truncation <= 0.0) break;
        if (lo > hard_cap) {
            throw QuadratureError("quadrature: integrand tail not negligible before |Im s| = " +
                                  std::to_string(hard_cap));
        }
    }
    out.upper = lo;
    out.evals = evals;
    return out;
}

}  // namespace dupire::quad
