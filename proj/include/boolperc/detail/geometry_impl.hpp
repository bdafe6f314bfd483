#pragma once

#include <algorithm>
#include <cstdlib>

namespace boolperc {
namespace detail {

template <typename Fn>
void ball_recurse(Site& cur, const Site& x, int axis, Radius budget, const Site* lo, const Site* hi, Fn& fn)
{
    Coord a = x[axis] - budget;
    Coord b = x[axis] + budget;
    if (lo != nullptr) {
        a = std::max(a, (*lo)[axis]);
        b = std::min(b, (*hi)[axis]);
    }
    if (axis == x.dim() - 1) {
        for (Coord c = a; c <= b; ++c) {
            cur[axis] = c;
            fn(static_cast<const Site&>(cur));
        }
        return;
    }
    for (Coord c = a; c <= b; ++c) {
        cur[axis] = c;
        ball_recurse(cur, x, axis + 1, budget - std::abs(c - x[axis]), lo, hi, fn);
    }
}

}  // namespace detail

template <typename Fn>
void for_each_in_ball(const Site& x, Radius r, Fn&& fn)
{
    if (r < 0 || x.dim() == 0) {
        return;
    }
    Site cur = x;
    detail::ball_recurse(cur, x, 0, r, nullptr, nullptr, fn);
}

template <typename Fn>
void for_each_in_ball(const Site& x, Radius r, const Window& w, Fn&& fn)
{
    if (r < 0 || x.dim() == 0) {
        return;
    }
    Site cur = x;
    if (w.ball()) {
        auto const& [center, radius] = *w.ball();
        auto filtered = [&](const Site& s) {
            if (l1_distance(s, center) <= radius) {
                fn(s);
            }
        };
        detail::ball_recurse(cur, x, 0, r, &w.lo(), &w.hi(), filtered);
    } else {
        detail::ball_recurse(cur, x, 0, r, &w.lo(), &w.hi(), fn);
    }
}

template <typename Fn>
void for_each_site(const Window& w, Fn&& fn)
{
    int const d = w.dim();
    if (d == 0) {
        return;
    }
    if (w.ball()) {
        // Recursing over the ball visits members only, in the same order.
        Site cur = w.ball()->first;
        detail::ball_recurse(cur, w.ball()->first, 0, w.ball()->second, &w.lo(), &w.hi(), fn);
        return;
    }
    Site cur = w.lo();
    for (;;) {
        fn(static_cast<const Site&>(cur));
        int axis = d - 1;
        while (axis >= 0) {
            if (cur[axis] < w.hi()[axis]) {
                ++cur[axis];
                break;
            }
            cur[axis] = w.lo()[axis];
            --axis;
        }
        if (axis < 0) {
            return;
        }
    }
}

}  // namespace boolperc
